#pragma once

#include <cstdint>
#include <vector>

#include "mbqc/sim.hpp"

namespace mbqc {

// Shots needed for additive precision eps with confidence 1 - delta:
// ceil((2 / eps^2) ln(2 / delta)), the Hoeffding budget for +/-1 outcomes.
std::size_t sample_count(double epsilon, double delta);

// Single-shot projective measurement of a Hermitian word: +/-1 with mean
// tr(rho g).
int measure_stabilizer(const DensityState& rho, const PauliWord& g, RngStream& rng);

struct LedgerEntry {
    PauliWord word;         // signed sampled element
    std::size_t shots = 0;
    double mean_outcome = 0.0;
};

struct EstimationReport {
    enum class Target { mbqc_fidelity, state_fidelity };

    Target target = Target::mbqc_fidelity;
    double estimate_raw = 0.0;
    double estimate_clamped = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    std::size_t samples_used = 0;
    std::uint64_t seed = 0;
    std::vector<LedgerEntry> ledger;
};

// Direct estimation of tr(rho Omega): sample stabilizers with the sampler's
// native distribution, one fresh single-shot measurement each; identity
// draws count as a deterministic +1. The mean outcome is unbiased because
// the coefficients form a probability distribution.
EstimationReport estimate_mbqc_fidelity(const ResourceState& state, const DensityState& rho,
                                        double epsilon, double delta, std::uint64_t seed,
                                        std::size_t threads = 1);

// Direct estimation of <S|rho|S>: uniform single-shot sampling over the
// stabilizer group.
EstimationReport estimate_state_fidelity(const ResourceState& state, const DensityState& rho,
                                         double epsilon, double delta, std::uint64_t seed,
                                         std::size_t threads = 1);

struct BoundsVerdict {
    bool lower_ok = false;
    bool upper_ok = false;
    double lower_slack = 0.0;  // (1 - f_mbqc) - nu (1 - f_s)
    double upper_slack = 0.0;  // f_mbqc - f_s

    bool holds() const { return lower_ok && upper_ok; }
};

// nu (1 - F_S) <= 1 - F_MBQC <= 1 - F_S, with slack tolerance.
BoundsVerdict check_bounds(double f_s, double f_mbqc, double nu, double tol = 1e-9);

}  // namespace mbqc
