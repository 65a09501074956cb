#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mbqc/omega.hpp"
#include "mbqc/resource.hpp"
#include "mbqc/sampler.hpp"

namespace mbqc {

using cplx = std::complex<double>;

struct PureState {
    std::size_t n = 0;
    std::vector<cplx> amp;  // length 2^n; qubit 0 is the most significant index bit

    std::size_t dim() const { return amp.size(); }
    double norm2() const;
};

struct DensityState {
    std::size_t n = 0;
    std::vector<cplx> mat;  // row-major 2^n x 2^n

    std::size_t dim() const { return std::size_t{1} << n; }
    cplx& at(std::size_t r, std::size_t c) { return mat[r * dim() + c]; }
    const cplx& at(std::size_t r, std::size_t c) const { return mat[r * dim() + c]; }
    double trace_real() const;
};

void require_dense(std::size_t n, std::size_t cap, const char* what);

// |ref><ref| -> prod (I+g)/2 for signed Hermitian generators; normalized with
// the first nonzero amplitude made real positive.
PureState stabilizer_vector(std::size_t n, const std::vector<PauliWord>& signed_generators,
                            std::size_t dense_cap = kDenseCapDefault);

PureState ideal_vector(const ResourceState& state, std::size_t dense_cap = kDenseCapDefault);

void apply_pauli(PureState& psi, const PauliWord& word);
void apply_pauli(DensityState& rho, const PauliWord& word);  // rho -> P rho P^dag

std::vector<cplx> apply_sum(const PauliSum& sum, const PureState& psi);

DensityState density_from(const PureState& psi);
DensityState maximally_mixed(std::size_t n, std::size_t dense_cap = kDenseCapDefault);

// Measurement-free MBQC unitary: per measured qubit in temporal order, the
// basis rotation exp(i theta Z) then H, then controlled-R_i from that qubit.
void apply_gamma(const ResourceState& state, const std::vector<double>& angles, PureState& psi);
void apply_gamma_adjoint(const ResourceState& state, const std::vector<double>& angles, PureState& psi);
void apply_gamma(const ResourceState& state, const std::vector<double>& angles, DensityState& rho);

// Output-register state after running the ideal resource state through the
// measurement-free circuit; verified to be independent of the projected
// outcome pattern. Output qubits appear in ascending order.
PureState ideal_output(const ResourceState& state, const std::vector<double>& angles,
                       std::size_t dense_cap = kDenseCapDefault);

struct NoiseModel {
    enum class Kind { depolarizing, dephasing, coherent_z, global_mix, excited_mix };

    Kind kind = Kind::depolarizing;
    double p = 0.0;                          // channel strength or rotation angle
    std::map<std::size_t, double> weights;   // excited_mix: output qubit -> weight

    static NoiseModel parse(const std::string& text);
    std::string str() const;
};

// Exact channel application (Kraus sums). excited_mix draws its target
// states from the resource state's flipped-sign groups.
DensityState apply_noise(const ResourceState& state, const DensityState& rho, const NoiseModel& model,
                         std::size_t dense_cap = kDenseCapDefault);

// Dense 2^n x 2^n operator whose expectation at fixed angles equals the
// measured-path fidelity: 2^M sum_s A_s |S><S| A_s with A_s the projected
// measurement-free circuit.
std::vector<cplx> build_omega_theta(const ResourceState& state, const std::vector<double>& angles,
                                    std::size_t dense_cap = kDenseCapDefault);

// tr(rho Omega(theta)) without forming the dense operator.
double omega_theta_expectation(const ResourceState& state, const DensityState& rho,
                               const std::vector<double>& angles);

// Outcome-averaged fidelity of the adaptive measurement protocol on rho at
// fixed angles: explicit projective simulation with corrections applied as
// angle flips (measured qubits) and Pauli unitaries (output qubits).
double mbqc_fidelity_adaptive(const ResourceState& state, const DensityState& rho,
                              const std::vector<double>& angles);

// Adaptive path cross-checked against tr(rho Omega(theta)) to 1e-9.
double mbqc_fidelity_at(const ResourceState& state, const DensityState& rho,
                        const std::vector<double>& angles);

struct AngleSpec {
    enum class Mode { explicit_angles, mc_uniform, mc_clifford, exhaustive_clifford };

    Mode mode = Mode::mc_uniform;
    std::vector<double> angles;  // explicit mode
    std::size_t count = 0;       // Monte Carlo modes
    std::uint64_t seed = 0;

    static AngleSpec parse(const std::string& text, std::uint64_t seed);
    std::string str() const;
};

struct FidelityEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

// Average of tr(rho Omega(theta)) over the requested angle measure. The
// exhaustive Clifford mode averages over all 4^M tuples from
// {0, pi/4, pi/2, 3pi/4} and equals tr(rho Omega) exactly.
FidelityEstimate average_mbqc_fidelity(const ResourceState& state, const DensityState& rho,
                                       const AngleSpec& spec, std::size_t threads = 1);

// sum_g c_g tr(rho g); imaginary residue is a bug guard.
double expectation(const DensityState& rho, const PauliSum& sum);

// <S|rho|S> via the stabilizer projector expansion, cross-checked against
// the dense vector sandwich.
double state_fidelity(const DensityState& rho, const ResourceState& state,
                      std::size_t enumeration_cap = kEnumerationCapDefault);

std::vector<cplx> dense_operator(const PauliSum& sum, std::size_t dense_cap = kDenseCapDefault);

// The four Clifford measurement angles.
extern const std::vector<double> kCliffordAngles;

}  // namespace mbqc
