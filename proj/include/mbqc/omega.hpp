#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "mbqc/resource.hpp"

namespace mbqc {

inline constexpr std::size_t kSpectralCapDefault = 26;

// Exact dyadic rational num / 2^log2_den, kept in lowest terms.
struct Dyadic {
    std::int64_t num = 0;
    int log2_den = 0;

    static Dyadic zero() { return {}; }
    static Dyadic one() { return {1, 0}; }
    static Dyadic pow2(int e);
    static Dyadic make(std::int64_t num, int log2_den);

    bool is_zero() const { return num == 0; }
    double value() const;
    Dyadic operator-() const { return {-num, log2_den}; }
    Dyadic operator+(const Dyadic& rhs) const;
    Dyadic operator-(const Dyadic& rhs) const { return *this + (-rhs); }
    Dyadic operator*(const Dyadic& rhs) const;
    Dyadic half() const { return *this * pow2(-1); }

    friend bool operator==(const Dyadic&, const Dyadic&) = default;
};

// Sparse real-weighted sum of Pauli words. Words are stored with phase +1;
// a -1 sign is folded into the coefficient. No zero coefficients are kept.
class PauliSum {
public:
    PauliSum() = default;
    explicit PauliSum(std::size_t n) : n_(n) {}

    std::size_t num_qubits() const { return n_; }
    std::size_t size() const { return terms_.size(); }

    // Adds coeff * word; the word's +/-1 phase is folded into the coefficient.
    void add(const PauliWord& word, const Dyadic& coeff);

    Dyadic coeff(const PauliWord& word) const;
    Dyadic coefficient_sum() const;
    const std::map<PauliWord, Dyadic>& terms() const { return terms_; }

    friend bool operator==(const PauliSum&, const PauliSum&) = default;

private:
    std::size_t n_ = 0;
    std::map<PauliWord, Dyadic> terms_;
};

// Omega = 2^-|O| sum over group elements acting I/X/Y on all measured
// qubits, weighted by 2^-(weight on measured qubits). Exact path; for
// groups beyond the cap use the sampler instead.
PauliSum build_omega(const ResourceState& state, std::size_t enumeration_cap = kEnumerationCapDefault);

// Same operator by recursive channel expansion from the T-subgroup:
// Lambda_i(P) = P when [P, Z_i] = 0, else (P + P Z_i R_i)/2, applied in
// temporal order. Equals build_omega exactly.
PauliSum build_omega_recursive(const ResourceState& state,
                               std::size_t enumeration_cap = kEnumerationCapDefault);

// Signed-word expansion of 2^-|O| sum_t Lambda_M(t) over the given seed
// words. Keys keep their +/-1 signs, values are path probabilities.
std::map<PauliWord, Dyadic> lambda_expand_signed(const ResourceState& state,
                                                 const std::vector<PauliWord>& seeds);

enum class MeasBasis : std::uint8_t { X, Y, XY };

// Per-measured-qubit basis assignment: fixed X, fixed Y, or averaged over
// the whole XY plane.
struct BasisMap {
    std::map<std::size_t, MeasBasis> mu;
};

// Omega restricted to fixed measurement bases: group elements incompatible
// with a fixed basis are dropped, and each XY-averaged qubit on which the
// element acts X or Y contributes a factor 1/2.
PauliSum build_omega_fixed(const ResourceState& state, const BasisMap& basis,
                           std::size_t enumeration_cap = kEnumerationCapDefault);

// Action of the XY-plane averaging channel on one Pauli letter.
std::pair<PauliLetter, double> exy_action(PauliLetter letter);

// X-string operator for the length-n linear cluster via the two-term
// recurrence from the closed-form bases at n = 2, 3.
PauliSum omega_tilde_1d(std::size_t n);

// One recurrence step: from the operators for sizes n-1 and n-2, the
// operator for size n = (X (x) prev + XI (x) prev2) / 2.
PauliSum omega_tilde_recurrence_step(const PauliSum& prev, const PauliSum& prev2);

// CZ-chain conjugation of 2*omega - I for a linear-cluster omega; checks the
// identity coefficient is exactly 1/2.
PauliSum omega_tilde_from_omega(const PauliSum& omega);

// Conjugates w by CZ on qubits (a, b).
PauliWord conjugate_cz(const PauliWord& w, std::size_t a, std::size_t b);

// All 2^m eigenvalues of a Pauli sum whose terms lie in the abelian group
// spanned by the given generators. Index k holds the eigenvalue on the joint
// eigenspace where generator i has eigenvalue -1 iff bit i of k is set.
std::vector<double> diagonalize_commuting(const PauliSum& sum, const StabilizerGroup& group,
                                          std::size_t spectral_cap = kSpectralCapDefault);

// In-place Walsh-Hadamard transform; length must be a power of two.
void fwht(std::vector<double>& values);

struct SpectralSummary {
    double max_eig = 0;
    double beta = 0;  // second largest
    double tau = 0;   // smallest
    double nu = 0;    // 1 - beta
    std::size_t max_multiplicity = 0;
};

SpectralSummary summarize_eigenvalues(const std::vector<double>& eigenvalues);

// Spectrum of Omega for the state; asserts max = 1 with multiplicity 1 and
// min = 0 within 1e-12.
SpectralSummary spectral_summary(const ResourceState& state,
                                 std::size_t spectral_cap = kSpectralCapDefault);

}  // namespace mbqc
