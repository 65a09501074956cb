#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mbqc/bitvec.hpp"

namespace mbqc {

inline constexpr std::size_t kDenseCapDefault = 12;

enum class PauliLetter : std::uint8_t { I, X, Y, Z };

char letter_char(PauliLetter p);

// Subset of qubit indices {0..n-1}.
class QubitSet {
public:
    QubitSet() = default;
    explicit QubitSet(std::size_t n) : bits_(n) {}

    static QubitSet empty(std::size_t n) { return QubitSet(n); }
    static QubitSet full(std::size_t n);
    static QubitSet of(std::size_t n, const std::vector<std::size_t>& indices);

    std::size_t universe_size() const { return bits_.size(); }
    std::size_t count() const { return bits_.count(); }
    bool contains(std::size_t q) const { return bits_.get(q); }
    void add(std::size_t q) { bits_.set(q); }
    void remove(std::size_t q) { bits_.set(q, false); }
    QubitSet complement() const;
    std::vector<std::size_t> indices() const { return bits_.indices(); }
    const BitVec& bits() const { return bits_; }

    friend bool operator==(const QubitSet&, const QubitSet&) = default;

private:
    BitVec bits_;
};

// Signed n-qubit Pauli string in binary-symplectic form. The letter at qubit
// q is I/X/Y/Z for (x,z) = (0,0)/(1,0)/(1,1)/(0,1), and the stored word is
// i^phase times the tensor product of those letters. Hermitian words have
// phase exponent 0 or 2.
//
// Text format: optional sign prefix "+", "-", "+i", "-i" followed by letters
// from {I,X,Y,Z}; qubit 0 is the leftmost character.
class PauliWord {
public:
    PauliWord() = default;
    explicit PauliWord(std::size_t n) : n_(n), x_(n), z_(n) {}

    static PauliWord identity(std::size_t n) { return PauliWord(n); }
    static PauliWord single(std::size_t n, std::size_t qubit, PauliLetter p);
    static PauliWord from_masks(BitVec x, BitVec z, std::uint8_t phase_exp = 0);
    static PauliWord parse(std::string_view text);

    std::string str() const;

    std::size_t num_qubits() const { return n_; }
    const BitVec& x_mask() const { return x_; }
    const BitVec& z_mask() const { return z_; }
    std::uint8_t phase_exponent() const { return phase_; }
    std::complex<double> phase() const;

    PauliLetter letter(std::size_t q) const;
    void set_letter(std::size_t q, PauliLetter p);

    bool is_hermitian() const { return phase_ == 0 || phase_ == 2; }
    // Letters all I (ignores phase).
    bool is_identity_letters() const { return x_.none() && z_.none(); }
    bool is_identity() const { return phase_ == 0 && is_identity_letters(); }

    // Number of qubits with a non-identity letter.
    std::size_t weight() const;
    std::size_t weight_on(const QubitSet& s) const;

    bool commutes_with(const PauliWord& other) const;

    // Matrix product with exact phase tracking mod 4.
    PauliWord operator*(const PauliWord& rhs) const;
    void mul_inplace_right(const PauliWord& rhs);  // *this = *this * rhs

    PauliWord adjoint() const;
    PauliWord with_phase(std::uint8_t phase_exp) const;
    // Same letters, phase exponent forced to 0.
    PauliWord unsigned_word() const { return with_phase(0); }

    // True if some qubit in `mask` carries a Z letter (z set, x clear).
    bool has_z_letter_on(const BitVec& mask) const;

    // Row-major 2^n x 2^n matrix of the word.
    std::vector<std::complex<double>> to_dense(std::size_t dense_cap = kDenseCapDefault) const;

    friend bool operator==(const PauliWord&, const PauliWord&) = default;

    friend std::strong_ordering operator<=>(const PauliWord& a, const PauliWord& b) {
        if (auto c = a.n_ <=> b.n_; c != 0) {
            return c;
        }
        if (auto c = a.x_ <=> b.x_; c != 0) {
            return c;
        }
        if (auto c = a.z_ <=> b.z_; c != 0) {
            return c;
        }
        return a.phase_ <=> b.phase_;
    }

private:
    std::size_t n_ = 0;
    BitVec x_, z_;
    std::uint8_t phase_ = 0;  // exponent of i, mod 4
};

inline PauliWord parse_pauli(std::string_view text) { return PauliWord::parse(text); }
inline std::string format_pauli(const PauliWord& w) { return w.str(); }

}  // namespace mbqc
