#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "mbqc/errors.hpp"

namespace mbqc {

// Fixed-width bit vector packed into 64-bit limbs. Bit i corresponds to
// qubit i throughout the library.
class BitVec {
public:
    static constexpr std::size_t kLimbBits = 64;

    BitVec() = default;

    explicit BitVec(std::size_t size) : size_(size), limbs_((size + kLimbBits - 1) / kLimbBits, 0) {}

    static BitVec single(std::size_t size, std::size_t index) {
        BitVec v(size);
        v.set(index);
        return v;
    }

    std::size_t size() const { return size_; }

    bool get(std::size_t i) const { return (limbs_[i / kLimbBits] >> (i % kLimbBits)) & 1u; }

    void set(std::size_t i, bool value = true) {
        const std::uint64_t mask = std::uint64_t{1} << (i % kLimbBits);
        if (value) {
            limbs_[i / kLimbBits] |= mask;
        } else {
            limbs_[i / kLimbBits] &= ~mask;
        }
    }

    void flip(std::size_t i) { limbs_[i / kLimbBits] ^= std::uint64_t{1} << (i % kLimbBits); }

    BitVec& operator^=(const BitVec& rhs) {
        require_same_size(rhs);
        for (std::size_t k = 0; k < limbs_.size(); ++k) {
            limbs_[k] ^= rhs.limbs_[k];
        }
        return *this;
    }

    BitVec& operator&=(const BitVec& rhs) {
        require_same_size(rhs);
        for (std::size_t k = 0; k < limbs_.size(); ++k) {
            limbs_[k] &= rhs.limbs_[k];
        }
        return *this;
    }

    BitVec& operator|=(const BitVec& rhs) {
        require_same_size(rhs);
        for (std::size_t k = 0; k < limbs_.size(); ++k) {
            limbs_[k] |= rhs.limbs_[k];
        }
        return *this;
    }

    friend BitVec operator^(BitVec lhs, const BitVec& rhs) { return lhs ^= rhs; }
    friend BitVec operator&(BitVec lhs, const BitVec& rhs) { return lhs &= rhs; }
    friend BitVec operator|(BitVec lhs, const BitVec& rhs) { return lhs |= rhs; }

    std::size_t count() const {
        std::size_t total = 0;
        for (std::uint64_t limb : limbs_) {
            total += static_cast<std::size_t>(std::popcount(limb));
        }
        return total;
    }

    // popcount(*this & other), no temporary.
    std::size_t count_and(const BitVec& other) const {
        require_same_size(other);
        std::size_t total = 0;
        for (std::size_t k = 0; k < limbs_.size(); ++k) {
            total += static_cast<std::size_t>(std::popcount(limbs_[k] & other.limbs_[k]));
        }
        return total;
    }

    bool parity_and(const BitVec& other) const { return count_and(other) & 1u; }

    bool any() const {
        for (std::uint64_t limb : limbs_) {
            if (limb != 0) {
                return true;
            }
        }
        return false;
    }

    bool none() const { return !any(); }

    bool intersects(const BitVec& other) const {
        require_same_size(other);
        for (std::size_t k = 0; k < limbs_.size(); ++k) {
            if (limbs_[k] & other.limbs_[k]) {
                return true;
            }
        }
        return false;
    }

    std::vector<std::size_t> indices() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < size_; ++i) {
            if (get(i)) {
                out.push_back(i);
            }
        }
        return out;
    }

    const std::vector<std::uint64_t>& limbs() const { return limbs_; }

    friend bool operator==(const BitVec& a, const BitVec& b) {
        return a.size_ == b.size_ && a.limbs_ == b.limbs_;
    }

    friend std::strong_ordering operator<=>(const BitVec& a, const BitVec& b) {
        if (auto c = a.size_ <=> b.size_; c != 0) {
            return c;
        }
        for (std::size_t k = 0; k < a.limbs_.size(); ++k) {
            if (auto c = a.limbs_[k] <=> b.limbs_[k]; c != 0) {
                return c;
            }
        }
        return std::strong_ordering::equal;
    }

private:
    void require_same_size(const BitVec& other) const {
        if (size_ != other.size_) {
            throw ValidationError("bit vector size mismatch");
        }
    }

    std::size_t size_ = 0;
    std::vector<std::uint64_t> limbs_;
};

}  // namespace mbqc
