#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "llga/rng.hpp"

namespace llga {

using Fitness = std::int64_t;

/// Fixed-length binary string packed into 64-bit words. Length is set at
/// construction and never changes; unused bits of the last word are kept
/// zero so that word-wise comparisons and popcounts are valid.
class BitString {
public:
    explicit BitString(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {
        if (n == 0) throw std::invalid_argument("BitString: length must be positive");
    }

    std::size_t size() const { return n_; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }

    void set(std::size_t i, bool v) {
        const std::uint64_t mask = 1ULL << (i & 63);
        if (v)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    void flip(std::size_t i) { words_[i >> 6] ^= 1ULL << (i & 63); }

    /// Number of positions where this string and `other` agree.
    std::size_t agreement_count(const BitString& other) const {
        require_same_length(other);
        std::size_t agree = 0;
        for (std::size_t w = 0; w < words_.size(); ++w)
            agree += std::popcount(~(words_[w] ^ other.words_[w]));
        // ~ sets the padding bits of the last word; discount them
        return agree - (words_.size() * 64 - n_);
    }

    std::size_t hamming_distance(const BitString& other) const {
        return n_ - agreement_count(other);
    }

    BitString complemented() const {
        BitString out(*this);
        for (auto& w : out.words_) w = ~w;
        out.mask_tail();
        return out;
    }

    bool operator==(const BitString& other) const = default;

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    void require_same_length(const BitString& other) const {
        if (n_ != other.n_)
            throw std::invalid_argument("BitString: length mismatch");
    }

    void mask_tail() {
        if (n_ & 63) words_.back() &= ~0ULL >> (64 - (n_ & 63));
    }

    friend BitString random_bitstring(std::size_t, Rng&);

    std::size_t n_;
    std::vector<std::uint64_t> words_;
};

/// Each bit independently 0 or 1 with probability 1/2.
inline BitString random_bitstring(std::size_t n, Rng& rng) {
    BitString x(n);
    for (auto& w : x.words_) w = rng.next_u64();
    x.mask_tail();
    return x;
}

/// A OneMax instance with hidden target z: f(x) counts the positions where
/// x agrees with z. Every fitness query is charged to the evaluation
/// counter, duplicates included; best_seen lets callers stop the moment an
/// optimal point has been evaluated, even mid-iteration.
class OneMaxInstance {
public:
    explicit OneMaxInstance(BitString target)
        : target_(std::move(target)) {}

    Fitness evaluate(const BitString& x) {
        if (x.size() != target_.size())
            throw std::invalid_argument("OneMaxInstance: dimension mismatch");
        ++eval_count_;
        const auto f = static_cast<Fitness>(x.agreement_count(target_));
        if (f > best_seen_) best_seen_ = f;
        return f;
    }

    std::size_t size() const { return target_.size(); }
    std::int64_t eval_count() const { return eval_count_; }
    Fitness best_seen() const { return best_seen_; }
    bool optimum_found() const { return best_seen_ == static_cast<Fitness>(target_.size()); }
    const BitString& target() const { return target_; }

private:
    BitString target_;
    std::int64_t eval_count_ = 0;
    Fitness best_seen_ = 0;
};

/// Applies a strictly increasing transform to the reported fitness values
/// while leaving evaluation accounting and optimum detection untouched.
/// Used to check that a search algorithm is comparison-based.
template <class Transform>
class TransformedObjective {
public:
    TransformedObjective(OneMaxInstance& inner, Transform g)
        : inner_(inner), g_(std::move(g)) {}

    Fitness evaluate(const BitString& x) { return g_(inner_.evaluate(x)); }

    std::size_t size() const { return inner_.size(); }
    std::int64_t eval_count() const { return inner_.eval_count(); }
    bool optimum_found() const { return inner_.optimum_found(); }

private:
    OneMaxInstance& inner_;
    Transform g_;
};

}  // namespace llga
