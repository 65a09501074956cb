#pragma once

#include <cstdint>
#include <map>

#include "mbqc/omega.hpp"
#include "mbqc/resource.hpp"

namespace mbqc {

inline constexpr std::size_t kExactDistributionCap = 14;

// Counter-based deterministic RNG: identical (seed, stream) gives an
// identical draw sequence, so shots parallelize without coordination.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    static RngStream keyed(std::uint64_t seed, std::uint64_t stream) { return {seed, stream}; }

    std::uint64_t next_u64();
    bool next_bit();
    double next_double();  // [0, 1)

private:
    std::uint64_t state_;
    std::uint64_t bit_buffer_ = 0;
    int bits_left_ = 0;
};

// One draw from the stabilizer distribution: the initial T-subset, the
// per-qubit fork decisions in temporal order, the resulting group element,
// and its exact log2 probability.
struct SampleTrace {
    BitVec t_subset;
    BitVec decisions;
    PauliWord result;
    int log2_prob = 0;
};

// Samples group elements acting I/X/Y on all measured qubits with
// probability 2^-|O| * 2^-(weight on measured qubits): start from a uniform
// product of T-stabilizers, then walk the measured qubits in temporal order
// and multiply by Z_i R_i with probability 1/2 wherever the current element
// anticommutes with Z_i.
class StabilizerSampler {
public:
    explicit StabilizerSampler(const ResourceState& state);

    SampleTrace sample(RngStream& rng) const;

    const std::vector<PauliWord>& t_stabilizers() const { return t_stabs_; }
    const std::vector<PauliWord>& r_stabilizers() const { return r_stabs_; }
    const ResourceState& state() const { return *state_; }

private:
    const ResourceState* state_;
    std::vector<PauliWord> t_stabs_;
    std::vector<PauliWord> r_stabs_;  // Z_i R_i by order position
    QubitSet measured_;
};

// Exhaustive branch expansion; probabilities are exact dyadics keyed by the
// signed sampled word. Total mass is exactly 1 and matches build_omega
// coefficients term by term.
std::map<PauliWord, Dyadic> exact_distribution(const ResourceState& state,
                                               std::size_t cap = kExactDistributionCap);

// Max |empirical - exact| over the support after `samples` draws.
double empirical_check(const ResourceState& state, std::size_t samples, RngStream& rng,
                       std::size_t cap = kExactDistributionCap);

}  // namespace mbqc
