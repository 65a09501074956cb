#include "mbqc/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <thread>

namespace mbqc {

std::size_t sample_count(double epsilon, double delta) {
    if (!(epsilon > 0.0) || epsilon > 1.0) {
        throw ValidationError("epsilon must lie in (0, 1]");
    }
    if (!(delta > 0.0) || delta >= 1.0) {
        throw ValidationError("delta must lie in (0, 1)");
    }
    return static_cast<std::size_t>(std::ceil((2.0 / (epsilon * epsilon)) * std::log(2.0 / delta)));
}

int measure_stabilizer(const DensityState& rho, const PauliWord& g, RngStream& rng) {
    if (!g.is_hermitian()) {
        throw ValidationError("can only measure Hermitian words");
    }
    PauliSum single(g.num_qubits());
    single.add(g, Dyadic::one());
    const double mean = expectation(rho, single);
    if (std::abs(mean) > 1.0 + 1e-9) {
        throw ValidationError("measured expectation left [-1, 1]; state is not a density matrix");
    }
    const double p_plus = std::clamp(0.5 * (1.0 + mean), 0.0, 1.0);
    return rng.next_double() < p_plus ? +1 : -1;
}

namespace {

struct Shot {
    PauliWord word;
    int outcome;
};

EstimationReport aggregate(EstimationReport::Target target, std::vector<Shot> shots, double epsilon,
                           double delta, std::uint64_t seed) {
    EstimationReport report;
    report.target = target;
    report.epsilon = epsilon;
    report.delta = delta;
    report.seed = seed;
    report.samples_used = shots.size();
    long total = 0;
    std::map<PauliWord, std::pair<std::size_t, long>> by_word;
    for (const Shot& shot : shots) {
        total += shot.outcome;
        auto& [count, sum] = by_word[shot.word];
        ++count;
        sum += shot.outcome;
    }
    report.estimate_raw = static_cast<double>(total) / static_cast<double>(shots.size());
    report.estimate_clamped = std::clamp(report.estimate_raw, 0.0, 1.0);
    report.ledger.reserve(by_word.size());
    for (const auto& [word, tally] : by_word) {
        report.ledger.push_back(
            {word, tally.first, static_cast<double>(tally.second) / static_cast<double>(tally.first)});
    }
    return report;
}

std::vector<Shot> run_shots(std::size_t count, std::size_t threads,
                            const std::function<Shot(std::size_t)>& shot_fn) {
    std::vector<Shot> shots(count);
    if (threads <= 1 || count < 2) {
        for (std::size_t k = 0; k < count; ++k) {
            shots[k] = shot_fn(k);
        }
        return shots;
    }
    std::atomic<std::size_t> next{0};
    constexpr std::size_t kChunk = 256;
    const auto worker = [&]() {
        while (true) {
            const std::size_t begin = next.fetch_add(kChunk);
            if (begin >= count) {
                return;
            }
            const std::size_t end = std::min(count, begin + kChunk);
            for (std::size_t k = begin; k < end; ++k) {
                shots[k] = shot_fn(k);
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t n_workers = std::min(threads, std::size_t{64});
    pool.reserve(n_workers);
    for (std::size_t t = 0; t < n_workers; ++t) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    return shots;
}

}  // namespace

EstimationReport estimate_mbqc_fidelity(const ResourceState& state, const DensityState& rho,
                                        double epsilon, double delta, std::uint64_t seed,
                                        std::size_t threads) {
    const std::size_t m = sample_count(epsilon, delta);
    const StabilizerSampler sampler(state);
    const auto shots = run_shots(m, threads, [&](std::size_t k) -> Shot {
        RngStream rng(seed, k);
        const SampleTrace trace = sampler.sample(rng);
        if (trace.result.is_identity_letters()) {
            return {trace.result, +1};
        }
        return {trace.result, measure_stabilizer(rho, trace.result, rng)};
    });
    return aggregate(EstimationReport::Target::mbqc_fidelity, shots, epsilon, delta, seed);
}

EstimationReport estimate_state_fidelity(const ResourceState& state, const DensityState& rho,
                                         double epsilon, double delta, std::uint64_t seed,
                                         std::size_t threads) {
    const std::size_t m = sample_count(epsilon, delta);
    const auto& gens = state.group.generators;
    const auto shots = run_shots(m, threads, [&](std::size_t k) -> Shot {
        RngStream rng(seed, k);
        PauliWord g = PauliWord::identity(state.num_qubits());
        for (const PauliWord& gen : gens) {
            if (rng.next_bit()) {
                g.mul_inplace_right(gen);
            }
        }
        if (g.is_identity_letters()) {
            return {g, +1};
        }
        return {g, measure_stabilizer(rho, g, rng)};
    });
    return aggregate(EstimationReport::Target::state_fidelity, shots, epsilon, delta, seed);
}

BoundsVerdict check_bounds(double f_s, double f_mbqc, double nu, double tol) {
    if (f_s < -1e-9 || f_s > 1.0 + 1e-9 || f_mbqc < -1e-9 || f_mbqc > 1.0 + 1e-9) {
        throw ValidationError("fidelities must lie in [0, 1]");
    }
    if (!(nu > 0.0) || nu >= 1.0) {
        throw ValidationError("spectral gap must lie in (0, 1)");
    }
    BoundsVerdict verdict;
    verdict.lower_slack = (1.0 - f_mbqc) - nu * (1.0 - f_s);
    verdict.upper_slack = f_mbqc - f_s;
    verdict.lower_ok = verdict.lower_slack >= -tol;
    verdict.upper_ok = verdict.upper_slack >= -tol;
    return verdict;
}

}  // namespace mbqc
