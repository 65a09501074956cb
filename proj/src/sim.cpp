#include "mbqc/sim.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mbqc {

const std::vector<double> kCliffordAngles = {0.0, std::numbers::pi / 4, std::numbers::pi / 2,
                                             3 * std::numbers::pi / 4};

namespace {

constexpr double kZeroProbability = 1e-14;

constexpr cplx kPhaseUnits[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

std::uint64_t index_mask(const BitVec& qubits, std::size_t n) {
    std::uint64_t mask = 0;
    for (std::size_t q = 0; q < n; ++q) {
        if (qubits.get(q)) {
            mask |= std::uint64_t{1} << (n - 1 - q);
        }
    }
    return mask;
}

std::uint64_t qubit_bit(std::size_t q, std::size_t n) { return std::uint64_t{1} << (n - 1 - q); }

struct PauliAction {
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    cplx unit = 1.0;

    explicit PauliAction(const PauliWord& w) {
        const std::size_t n = w.num_qubits();
        x = index_mask(w.x_mask(), n);
        z = index_mask(w.z_mask(), n);
        unit = kPhaseUnits[(w.phase_exponent() + w.x_mask().count_and(w.z_mask())) & 3u];
    }

    cplx factor(std::uint64_t idx) const {
        return (std::popcount(idx & z) & 1) ? -unit : unit;
    }
};

struct Gate2 {
    cplx u00, u01, u10, u11;

    Gate2 adjoint() const { return {std::conj(u00), std::conj(u10), std::conj(u01), std::conj(u11)}; }
};

// U(theta): rotation exp(i theta Z) followed by H.
Gate2 measurement_rotation(double theta) {
    const double inv = 1.0 / std::numbers::sqrt2;
    const cplx ep = std::polar(inv, theta);
    const cplx em = std::polar(inv, -theta);
    // H * diag(e^{i t}, e^{-i t})
    return {ep, em, ep, -em};
}

void apply_gate(PureState& psi, std::size_t q, const Gate2& g) {
    const std::uint64_t bit = qubit_bit(q, psi.n);
    for (std::uint64_t idx = 0; idx < psi.dim(); ++idx) {
        if (idx & bit) {
            continue;
        }
        const cplx a = psi.amp[idx];
        const cplx b = psi.amp[idx | bit];
        psi.amp[idx] = g.u00 * a + g.u01 * b;
        psi.amp[idx | bit] = g.u10 * a + g.u11 * b;
    }
}

// rho -> U rho U^dag on one qubit.
void apply_gate(DensityState& rho, std::size_t q, const Gate2& g) {
    const std::uint64_t bit = qubit_bit(q, rho.n);
    const std::size_t dim = rho.dim();
    for (std::uint64_t r = 0; r < dim; ++r) {
        if (r & bit) {
            continue;
        }
        for (std::uint64_t c = 0; c < dim; ++c) {
            const cplx a = rho.at(r, c);
            const cplx b = rho.at(r | bit, c);
            rho.at(r, c) = g.u00 * a + g.u01 * b;
            rho.at(r | bit, c) = g.u10 * a + g.u11 * b;
        }
    }
    const Gate2 gd = g.adjoint();
    for (std::uint64_t r = 0; r < dim; ++r) {
        for (std::uint64_t c = 0; c < dim; ++c) {
            if (c & bit) {
                continue;
            }
            const cplx a = rho.at(r, c);
            const cplx b = rho.at(r, c | bit);
            rho.at(r, c) = a * gd.u00 + b * gd.u10;
            rho.at(r, c | bit) = a * gd.u01 + b * gd.u11;
        }
    }
}

void apply_controlled_pauli(PureState& psi, std::size_t control, const PauliWord& word) {
    const PauliAction act(word);
    const std::uint64_t cbit = qubit_bit(control, psi.n);
    if (act.x & cbit) {
        throw Error("controlled Pauli must act as identity on its control");
    }
    if (act.x == 0) {
        for (std::uint64_t idx = 0; idx < psi.dim(); ++idx) {
            if (idx & cbit) {
                psi.amp[idx] *= act.factor(idx);
            }
        }
        return;
    }
    for (std::uint64_t idx = 0; idx < psi.dim(); ++idx) {
        const std::uint64_t partner = idx ^ act.x;
        if (!(idx & cbit) || idx > partner) {
            continue;
        }
        const cplx a = psi.amp[idx];
        const cplx b = psi.amp[partner];
        psi.amp[partner] = act.factor(idx) * a;
        psi.amp[idx] = act.factor(partner) * b;
    }
}

void apply_controlled_pauli(DensityState& rho, std::size_t control, const PauliWord& word) {
    // CR |r> = f(r) |r ^ x> when the control bit is set, |r> otherwise.
    const PauliAction act(word);
    const std::uint64_t cbit = qubit_bit(control, rho.n);
    if (act.x & cbit) {
        throw Error("controlled Pauli must act as identity on its control");
    }
    const std::size_t dim = rho.dim();
    std::vector<cplx> scratch(rho.mat.size());
    for (std::uint64_t r = 0; r < dim; ++r) {
        for (std::uint64_t c = 0; c < dim; ++c) {
            cplx coeff = rho.at(r, c);
            std::uint64_t rr = r, cc = c;
            if (r & cbit) {
                coeff *= act.factor(r);
                rr = r ^ act.x;
            }
            if (c & cbit) {
                coeff *= std::conj(act.factor(c));
                cc = c ^ act.x;
            }
            scratch[rr * dim + cc] = coeff;
        }
    }
    rho.mat = std::move(scratch);
}

struct GammaStep {
    std::size_t qubit;
    double theta;
    const PauliWord* correction;
};

std::vector<GammaStep> gamma_steps(const ResourceState& state, const std::vector<double>& angles) {
    if (angles.size() != state.flow.order.size()) {
        throw ValidationError("angle count must equal the number of measured qubits");
    }
    std::vector<GammaStep> steps;
    steps.reserve(angles.size());
    for (std::size_t k = 0; k < state.flow.order.size(); ++k) {
        const std::size_t i = state.flow.order[k];
        steps.push_back({i, angles[k], &state.flow.r_ops.at(i)});
    }
    return steps;
}

}  // namespace

double PureState::norm2() const {
    double total = 0.0;
    for (const cplx& a : amp) {
        total += std::norm(a);
    }
    return total;
}

double DensityState::trace_real() const {
    double total = 0.0;
    for (std::size_t r = 0; r < dim(); ++r) {
        total += at(r, r).real();
    }
    return total;
}

void require_dense(std::size_t n, std::size_t cap, const char* what) {
    if (n > cap) {
        throw CapExceeded(std::string(what) + ": n=" + std::to_string(n) + " exceeds dense cap " +
                          std::to_string(cap));
    }
}

PureState stabilizer_vector(std::size_t n, const std::vector<PauliWord>& signed_generators,
                            std::size_t dense_cap) {
    require_dense(n, dense_cap, "stabilizer vector");
    const std::size_t dim = std::size_t{1} << n;
    PureState scratch{n, std::vector<cplx>(dim)};
    const double accept = 0.25 * std::ldexp(1.0, -static_cast<int>(n));
    for (std::uint64_t ref = 0; ref < dim; ++ref) {
        PureState psi{n, std::vector<cplx>(dim, 0.0)};
        psi.amp[ref] = 1.0;
        for (const PauliWord& g : signed_generators) {
            if (g.num_qubits() != n || !g.is_hermitian()) {
                throw ValidationError("stabilizer generators must be Hermitian words on n qubits");
            }
            scratch.amp = psi.amp;
            apply_pauli(scratch, g);
            for (std::size_t k = 0; k < dim; ++k) {
                psi.amp[k] = 0.5 * (psi.amp[k] + scratch.amp[k]);
            }
        }
        const double norm2 = psi.norm2();
        if (norm2 < accept) {
            continue;
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (cplx& a : psi.amp) {
            a *= inv;
        }
        for (const cplx& a : psi.amp) {
            if (std::abs(a) > 1e-9) {
                const cplx rot = std::conj(a) / std::abs(a);
                for (cplx& b : psi.amp) {
                    b *= rot;
                }
                break;
            }
        }
        return psi;
    }
    throw ValidationError("projector product vanished on every basis vector (inconsistent signs?)");
}

PureState ideal_vector(const ResourceState& state, std::size_t dense_cap) {
    return stabilizer_vector(state.num_qubits(), state.group.generators, dense_cap);
}

void apply_pauli(PureState& psi, const PauliWord& word) {
    if (word.num_qubits() != psi.n) {
        throw ValidationError("word size mismatch");
    }
    const PauliAction act(word);
    if (act.x == 0) {
        for (std::uint64_t idx = 0; idx < psi.dim(); ++idx) {
            psi.amp[idx] *= act.factor(idx);
        }
        return;
    }
    for (std::uint64_t idx = 0; idx < psi.dim(); ++idx) {
        const std::uint64_t partner = idx ^ act.x;
        if (idx > partner) {
            continue;
        }
        const cplx a = psi.amp[idx];
        const cplx b = psi.amp[partner];
        psi.amp[partner] = act.factor(idx) * a;
        psi.amp[idx] = act.factor(partner) * b;
    }
}

void apply_pauli(DensityState& rho, const PauliWord& word) {
    if (word.num_qubits() != rho.n) {
        throw ValidationError("word size mismatch");
    }
    const PauliAction act(word);
    const std::size_t dim = rho.dim();
    std::vector<cplx> scratch(rho.mat.size());
    for (std::uint64_t r = 0; r < dim; ++r) {
        const cplx fr = act.factor(r);
        for (std::uint64_t c = 0; c < dim; ++c) {
            scratch[(r ^ act.x) * dim + (c ^ act.x)] = fr * rho.at(r, c) * std::conj(act.factor(c));
        }
    }
    rho.mat = std::move(scratch);
}

std::vector<cplx> apply_sum(const PauliSum& sum, const PureState& psi) {
    std::vector<cplx> out(psi.dim(), 0.0);
    PureState scratch = psi;
    for (const auto& [word, c] : sum.terms()) {
        scratch.amp = psi.amp;
        apply_pauli(scratch, word);
        const double cv = c.value();
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] += cv * scratch.amp[k];
        }
    }
    return out;
}

DensityState density_from(const PureState& psi) {
    DensityState rho{psi.n, std::vector<cplx>(psi.dim() * psi.dim())};
    for (std::size_t r = 0; r < psi.dim(); ++r) {
        for (std::size_t c = 0; c < psi.dim(); ++c) {
            rho.at(r, c) = psi.amp[r] * std::conj(psi.amp[c]);
        }
    }
    return rho;
}

DensityState maximally_mixed(std::size_t n, std::size_t dense_cap) {
    require_dense(n, dense_cap, "maximally mixed state");
    const std::size_t dim = std::size_t{1} << n;
    DensityState rho{n, std::vector<cplx>(dim * dim, 0.0)};
    const double p = 1.0 / static_cast<double>(dim);
    for (std::size_t r = 0; r < dim; ++r) {
        rho.at(r, r) = p;
    }
    return rho;
}

void apply_gamma(const ResourceState& state, const std::vector<double>& angles, PureState& psi) {
    for (const GammaStep& step : gamma_steps(state, angles)) {
        apply_gate(psi, step.qubit, measurement_rotation(step.theta));
        apply_controlled_pauli(psi, step.qubit, *step.correction);
    }
}

void apply_gamma_adjoint(const ResourceState& state, const std::vector<double>& angles,
                         PureState& psi) {
    const auto steps = gamma_steps(state, angles);
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        apply_controlled_pauli(psi, it->qubit, *it->correction);
        apply_gate(psi, it->qubit, measurement_rotation(it->theta).adjoint());
    }
}

void apply_gamma(const ResourceState& state, const std::vector<double>& angles, DensityState& rho) {
    for (const GammaStep& step : gamma_steps(state, angles)) {
        apply_gate(rho, step.qubit, measurement_rotation(step.theta));
        apply_controlled_pauli(rho, step.qubit, *step.correction);
    }
}

namespace {

// Scatters the output-register indices of `sub` into full-space indices with
// the measured qubits pinned to the bits of `pattern` (by order position).
struct OutputEmbedding {
    std::size_t n;
    std::vector<std::size_t> output_qubits;
    std::vector<std::size_t> order;

    explicit OutputEmbedding(const ResourceState& state)
        : n(state.num_qubits()), output_qubits(state.outputs.indices()), order(state.flow.order) {}

    std::uint64_t full_index(std::uint64_t out_index, std::uint64_t pattern) const {
        std::uint64_t idx = 0;
        for (std::size_t k = 0; k < order.size(); ++k) {
            if ((pattern >> k) & 1u) {
                idx |= qubit_bit(order[k], n);
            }
        }
        const std::size_t n_out = output_qubits.size();
        for (std::size_t k = 0; k < n_out; ++k) {
            if ((out_index >> (n_out - 1 - k)) & 1u) {
                idx |= qubit_bit(output_qubits[k], n);
            }
        }
        return idx;
    }
};

}  // namespace

PureState ideal_output(const ResourceState& state, const std::vector<double>& angles,
                       std::size_t dense_cap) {
    require_dense(state.num_qubits(), dense_cap, "ideal output");
    PureState psi = ideal_vector(state, dense_cap);
    apply_gamma(state, angles, psi);
    const OutputEmbedding embed(state);
    const std::size_t M = state.flow.order.size();
    const std::size_t out_dim = std::size_t{1} << state.outputs.count();
    const double scale = std::ldexp(1.0, static_cast<int>(M) / 2) *
                         ((M % 2) ? std::numbers::sqrt2 : 1.0);

    const auto extract = [&](std::uint64_t pattern) {
        PureState out{state.outputs.count(), std::vector<cplx>(out_dim)};
        for (std::uint64_t k = 0; k < out_dim; ++k) {
            out.amp[k] = scale * psi.amp[embed.full_index(k, pattern)];
        }
        return out;
    };

    PureState reference = extract(0);
    const double norm2 = reference.norm2();
    if (std::abs(norm2 - 1.0) > 1e-8) {
        throw ValidationError("ideal output state is not normalized (invalid flow?)");
    }
    // Outcome independence: a few other patterns must give the same state.
    RngStream rng(0x1dea, M);
    for (int check = 0; check < 3 && M > 0; ++check) {
        const std::uint64_t pattern = rng.next_u64() & ((std::uint64_t{1} << M) - 1);
        const PureState other = extract(pattern);
        cplx overlap = 0.0;
        for (std::size_t k = 0; k < out_dim; ++k) {
            overlap += std::conj(reference.amp[k]) * other.amp[k];
        }
        if (std::abs(std::abs(overlap) - 1.0) > 1e-10) {
            throw ValidationError("output state depends on the measurement outcome (invalid flow)");
        }
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (cplx& a : reference.amp) {
        a *= inv;
    }
    return reference;
}

NoiseModel NoiseModel::parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    NoiseModel model;
    if (name == "depolarizing" || name == "dephasing" || name == "coherent_z" ||
        name == "global_mix") {
        if (args.empty()) {
            throw ValidationError("noise model '" + name + "' needs a parameter");
        }
        model.p = std::stod(args);
        if (name == "depolarizing") model.kind = Kind::depolarizing;
        if (name == "dephasing") model.kind = Kind::dephasing;
        if (name == "coherent_z") model.kind = Kind::coherent_z;
        if (name == "global_mix") model.kind = Kind::global_mix;
        if (model.kind != Kind::coherent_z && (model.p < 0.0 || model.p > 1.0)) {
            throw ValidationError("noise probability must lie in [0, 1]");
        }
        return model;
    }
    if (name == "excited_mix") {
        model.kind = Kind::excited_mix;
        std::stringstream ss(args);
        std::string item;
        double total = 0.0;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                throw ValidationError("excited_mix expects k=weight entries");
            }
            const std::size_t k = std::stoul(item.substr(0, eq));
            const double w = std::stod(item.substr(eq + 1));
            if (w < 0.0 || w > 1.0) {
                throw ValidationError("excited_mix weights must lie in [0, 1]");
            }
            model.weights[k] += w;
            total += w;
        }
        if (model.weights.empty() || total > 1.0 + 1e-12) {
            throw ValidationError("excited_mix weights must be nonempty and sum to at most 1");
        }
        return model;
    }
    throw ValidationError("unknown noise model '" + name + "'");
}

std::string NoiseModel::str() const {
    switch (kind) {
        case Kind::depolarizing: return "depolarizing:" + std::to_string(p);
        case Kind::dephasing: return "dephasing:" + std::to_string(p);
        case Kind::coherent_z: return "coherent_z:" + std::to_string(p);
        case Kind::global_mix: return "global_mix:" + std::to_string(p);
        case Kind::excited_mix: {
            std::string out = "excited_mix:";
            bool first = true;
            for (const auto& [k, w] : weights) {
                if (!first) {
                    out += ',';
                }
                out += std::to_string(k) + "=" + std::to_string(w);
                first = false;
            }
            return out;
        }
    }
    throw Error("unreachable");
}

DensityState apply_noise(const ResourceState& state, const DensityState& rho, const NoiseModel& model,
                         std::size_t dense_cap) {
    require_dense(rho.n, dense_cap, "noise channel");
    const std::size_t n = rho.n;
    const std::size_t dim = rho.dim();
    DensityState out = rho;
    switch (model.kind) {
        case NoiseModel::Kind::depolarizing: {
            for (std::size_t q = 0; q < n; ++q) {
                DensityState mixed{n, std::vector<cplx>(dim * dim, 0.0)};
                for (const PauliLetter letter : {PauliLetter::X, PauliLetter::Y, PauliLetter::Z}) {
                    DensityState term = out;
                    apply_pauli(term, PauliWord::single(n, q, letter));
                    for (std::size_t k = 0; k < term.mat.size(); ++k) {
                        mixed.mat[k] += term.mat[k];
                    }
                }
                for (std::size_t k = 0; k < out.mat.size(); ++k) {
                    out.mat[k] = (1.0 - model.p) * out.mat[k] + (model.p / 3.0) * mixed.mat[k];
                }
            }
            break;
        }
        case NoiseModel::Kind::dephasing: {
            for (std::size_t q = 0; q < n; ++q) {
                DensityState term = out;
                apply_pauli(term, PauliWord::single(n, q, PauliLetter::Z));
                for (std::size_t k = 0; k < out.mat.size(); ++k) {
                    out.mat[k] = (1.0 - model.p) * out.mat[k] + model.p * term.mat[k];
                }
            }
            break;
        }
        case NoiseModel::Kind::coherent_z: {
            const cplx ep = std::polar(1.0, model.p);
            const cplx em = std::polar(1.0, -model.p);
            const Gate2 g{ep, 0.0, 0.0, em};
            for (std::size_t q = 0; q < n; ++q) {
                apply_gate(out, q, g);
            }
            break;
        }
        case NoiseModel::Kind::global_mix: {
            const double unit = model.p / static_cast<double>(dim);
            for (std::size_t k = 0; k < out.mat.size(); ++k) {
                out.mat[k] *= (1.0 - model.p);
            }
            for (std::size_t r = 0; r < dim; ++r) {
                out.at(r, r) += unit;
            }
            break;
        }
        case NoiseModel::Kind::excited_mix: {
            double total = 0.0;
            for (const auto& [k, w] : model.weights) {
                total += w;
            }
            for (std::size_t k = 0; k < out.mat.size(); ++k) {
                out.mat[k] *= (1.0 - total);
            }
            for (const auto& [k, w] : model.weights) {
                const SignedGroup excited = excited_state(state, k);
                const PureState vec = stabilizer_vector(n, excited.signed_generators(), dense_cap);
                const DensityState target = density_from(vec);
                for (std::size_t idx = 0; idx < out.mat.size(); ++idx) {
                    out.mat[idx] += w * target.mat[idx];
                }
            }
            break;
        }
    }
    const double trace = out.trace_real();
    if (std::abs(trace - rho.trace_real()) > 1e-12 * std::max(1.0, std::abs(rho.trace_real()))) {
        throw std::logic_error("noise channel failed to preserve the trace");
    }
    return out;
}

std::vector<cplx> build_omega_theta(const ResourceState& state, const std::vector<double>& angles,
                                    std::size_t dense_cap) {
    require_dense(state.num_qubits(), dense_cap, "fixed-angle operator");
    const std::size_t dim = std::size_t{1} << state.num_qubits();
    const std::size_t M = state.flow.order.size();
    PureState phi = ideal_vector(state, dense_cap);
    apply_gamma(state, angles, phi);
    const std::uint64_t measured_mask = index_mask(state.measured().bits(), state.num_qubits());
    const OutputEmbedding embed(state);
    std::vector<cplx> mat(dim * dim, 0.0);
    const double scale = std::ldexp(1.0, static_cast<int>(M));
    for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << M); ++pattern) {
        PureState w{state.num_qubits(), std::vector<cplx>(dim, 0.0)};
        const std::uint64_t base = embed.full_index(0, pattern);
        for (std::uint64_t idx = 0; idx < dim; ++idx) {
            if ((idx & measured_mask) == base) {
                w.amp[idx] = phi.amp[idx];
            }
        }
        apply_gamma_adjoint(state, angles, w);
        for (std::size_t r = 0; r < dim; ++r) {
            if (w.amp[r] == cplx{0.0, 0.0}) {
                continue;
            }
            for (std::size_t c = 0; c < dim; ++c) {
                mat[r * dim + c] += scale * w.amp[r] * std::conj(w.amp[c]);
            }
        }
    }
    return mat;
}

double omega_theta_expectation(const ResourceState& state, const DensityState& rho,
                               const std::vector<double>& angles) {
    if (rho.n != state.num_qubits()) {
        throw ValidationError("density matrix size mismatch");
    }
    const std::size_t dim = rho.dim();
    const std::size_t M = state.flow.order.size();
    PureState phi = ideal_vector(state, rho.n);
    apply_gamma(state, angles, phi);
    const std::uint64_t measured_mask = index_mask(state.measured().bits(), state.num_qubits());
    const OutputEmbedding embed(state);
    const double scale = std::ldexp(1.0, static_cast<int>(M));
    double total = 0.0;
    for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << M); ++pattern) {
        PureState w{state.num_qubits(), std::vector<cplx>(dim, 0.0)};
        const std::uint64_t base = embed.full_index(0, pattern);
        for (std::uint64_t idx = 0; idx < dim; ++idx) {
            if ((idx & measured_mask) == base) {
                w.amp[idx] = phi.amp[idx];
            }
        }
        apply_gamma_adjoint(state, angles, w);
        cplx quad = 0.0;
        for (std::size_t r = 0; r < dim; ++r) {
            if (w.amp[r] == cplx{0.0, 0.0}) {
                continue;
            }
            cplx row = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                row += rho.at(r, c) * w.amp[c];
            }
            quad += std::conj(w.amp[r]) * row;
        }
        total += scale * quad.real();
    }
    return total;
}

namespace {

struct AdaptiveContext {
    const ResourceState* state;
    const PureState* ideal_out;
    std::vector<std::size_t> order;
    std::uint64_t measured_mask = 0;
    OutputEmbedding embed;

    explicit AdaptiveContext(const ResourceState& s, const PureState& out)
        : state(&s), ideal_out(&out), order(s.flow.order), embed(s) {
        measured_mask = index_mask(s.measured().bits(), s.num_qubits());
    }
};

double adaptive_recurse(const AdaptiveContext& ctx, DensityState rho, std::size_t step,
                        BitVec flips, std::uint64_t pattern, const std::vector<double>& angles) {
    const std::size_t n = ctx.state->num_qubits();
    if (step == ctx.order.size()) {
        // Measured register is pinned to `pattern`; the branch weight is the
        // (unnormalized) trace, so this adds p_s <psi| sigma_s |psi>.
        const std::size_t out_dim = std::size_t{1} << ctx.state->outputs.count();
        cplx fid = 0.0;
        for (std::uint64_t r = 0; r < out_dim; ++r) {
            for (std::uint64_t c = 0; c < out_dim; ++c) {
                fid += std::conj(ctx.ideal_out->amp[r]) *
                       rho.at(ctx.embed.full_index(r, pattern), ctx.embed.full_index(c, pattern)) *
                       ctx.ideal_out->amp[c];
            }
        }
        return fid.real();
    }
    const std::size_t i = ctx.order[step];
    const double theta = flips.get(i) ? -angles[step] : angles[step];
    apply_gate(rho, i, measurement_rotation(theta));

    const std::uint64_t bit = qubit_bit(i, n);
    const std::size_t dim = rho.dim();
    double total = 0.0;
    for (int outcome = 0; outcome < 2; ++outcome) {
        DensityState branch{n, std::vector<cplx>(dim * dim, 0.0)};
        double prob = 0.0;
        for (std::uint64_t r = 0; r < dim; ++r) {
            if (((r & bit) != 0) != (outcome == 1)) {
                continue;
            }
            prob += rho.at(r, r).real();
            for (std::uint64_t c = 0; c < dim; ++c) {
                if (((c & bit) != 0) == (outcome == 1)) {
                    branch.at(r, c) = rho.at(r, c);
                }
            }
        }
        if (prob <= kZeroProbability) {
            continue;
        }
        BitVec branch_flips = flips;
        std::uint64_t branch_pattern = pattern;
        if (outcome == 1) {
            branch_pattern |= std::uint64_t{1} << step;
            const PauliWord& r_op = ctx.state->flow.r_ops.at(i);
            // X action on later measured qubits becomes an angle flip; the
            // output-qubit restriction is applied as a unitary.
            PauliWord output_part(n);
            for (std::size_t q = 0; q < n; ++q) {
                if (ctx.state->outputs.contains(q)) {
                    output_part.set_letter(q, r_op.letter(q));
                } else if (r_op.x_mask().get(q)) {
                    branch_flips.flip(q);
                }
            }
            if (!output_part.is_identity_letters()) {
                apply_pauli(branch, output_part);
            }
        }
        total += adaptive_recurse(ctx, std::move(branch), step + 1, std::move(branch_flips),
                                  branch_pattern, angles);
    }
    return total;
}

}  // namespace

double mbqc_fidelity_adaptive(const ResourceState& state, const DensityState& rho,
                              const std::vector<double>& angles) {
    if (rho.n != state.num_qubits()) {
        throw ValidationError("density matrix size mismatch");
    }
    const PureState psi = ideal_output(state, angles, rho.n);
    const AdaptiveContext ctx(state, psi);
    return adaptive_recurse(ctx, rho, 0, BitVec(state.num_qubits()), 0, angles);
}

double mbqc_fidelity_at(const ResourceState& state, const DensityState& rho,
                        const std::vector<double>& angles) {
    const double adaptive = mbqc_fidelity_adaptive(state, rho, angles);
    const double direct = omega_theta_expectation(state, rho, angles);
    if (std::abs(adaptive - direct) > 1e-9) {
        throw std::logic_error("adaptive fidelity diverged from the fixed-angle operator value: " +
                               std::to_string(adaptive) + " vs " + std::to_string(direct));
    }
    return adaptive;
}

AngleSpec AngleSpec::parse(const std::string& text, std::uint64_t seed) {
    AngleSpec spec;
    spec.seed = seed;
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (name == "clifford_exact") {
        spec.mode = Mode::exhaustive_clifford;
        return spec;
    }
    if (name == "mc" || name == "clifford_mc") {
        spec.mode = name == "mc" ? Mode::mc_uniform : Mode::mc_clifford;
        spec.count = std::stoul(args);
        if (spec.count == 0) {
            throw ValidationError("Monte Carlo angle sampling needs a positive count");
        }
        return spec;
    }
    if (name == "explicit") {
        spec.mode = Mode::explicit_angles;
        std::stringstream ss(args);
        std::string item;
        while (std::getline(ss, item, ',')) {
            spec.angles.push_back(std::stod(item));
        }
        if (spec.angles.empty()) {
            throw ValidationError("explicit angle list is empty");
        }
        for (double a : spec.angles) {
            if (a < 0.0 || a >= 2 * std::numbers::pi) {
                throw ValidationError("explicit angles must lie in [0, 2*pi)");
            }
        }
        return spec;
    }
    throw ValidationError("unknown angle spec '" + name + "'");
}

std::string AngleSpec::str() const {
    switch (mode) {
        case Mode::exhaustive_clifford: return "clifford_exact";
        case Mode::mc_uniform: return "mc:" + std::to_string(count);
        case Mode::mc_clifford: return "clifford_mc:" + std::to_string(count);
        case Mode::explicit_angles: {
            std::string out = "explicit:";
            for (std::size_t k = 0; k < angles.size(); ++k) {
                if (k) {
                    out += ',';
                }
                out += std::to_string(angles[k]);
            }
            return out;
        }
    }
    throw Error("unreachable");
}

namespace {

// Fixed-size chunks summed in chunk order: the result does not depend on the
// number of workers.
std::vector<double> chunked_values(std::size_t count, std::size_t threads,
                                   const std::function<double(std::size_t)>& fn) {
    std::vector<double> values(count);
    if (threads <= 1 || count < 2) {
        for (std::size_t k = 0; k < count; ++k) {
            values[k] = fn(k);
        }
        return values;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    constexpr std::size_t kChunk = 64;
    const auto worker = [&]() {
        while (true) {
            const std::size_t begin = next.fetch_add(kChunk);
            if (begin >= count) {
                return;
            }
            const std::size_t end = std::min(count, begin + kChunk);
            for (std::size_t k = begin; k < end; ++k) {
                values[k] = fn(k);
            }
        }
    };
    const std::size_t n_workers = std::min(threads, std::size_t{64});
    pool.reserve(n_workers);
    for (std::size_t t = 0; t < n_workers; ++t) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    return values;
}

FidelityEstimate summarize_samples(const std::vector<double>& values) {
    FidelityEstimate est;
    est.samples = values.size();
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    est.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - est.mean) * (v - est.mean);
        }
        est.std_error = std::sqrt(ss / (static_cast<double>(values.size()) *
                                        static_cast<double>(values.size() - 1)));
    }
    return est;
}

}  // namespace

FidelityEstimate average_mbqc_fidelity(const ResourceState& state, const DensityState& rho,
                                       const AngleSpec& spec, std::size_t threads) {
    const std::size_t M = state.flow.order.size();
    switch (spec.mode) {
        case AngleSpec::Mode::explicit_angles: {
            FidelityEstimate est;
            est.mean = omega_theta_expectation(state, rho, spec.angles);
            est.samples = 1;
            return est;
        }
        case AngleSpec::Mode::exhaustive_clifford: {
            if (M > 8) {
                throw CapExceeded("exhaustive Clifford averaging is limited to 8 measured qubits");
            }
            const std::size_t total = std::size_t{1} << (2 * M);
            const auto values = chunked_values(total, threads, [&](std::size_t k) {
                std::vector<double> angles(M);
                std::size_t rest = k;
                for (std::size_t j = 0; j < M; ++j) {
                    angles[j] = kCliffordAngles[rest & 3u];
                    rest >>= 2;
                }
                return omega_theta_expectation(state, rho, angles);
            });
            double sum = 0.0;
            for (double v : values) {
                sum += v;
            }
            FidelityEstimate est;
            est.mean = sum / static_cast<double>(total);
            est.samples = total;
            return est;
        }
        case AngleSpec::Mode::mc_uniform:
        case AngleSpec::Mode::mc_clifford: {
            const bool clifford = spec.mode == AngleSpec::Mode::mc_clifford;
            const auto values = chunked_values(spec.count, threads, [&](std::size_t k) {
                RngStream rng(spec.seed, k);
                std::vector<double> angles(M);
                for (std::size_t j = 0; j < M; ++j) {
                    angles[j] = clifford ? kCliffordAngles[rng.next_u64() & 3u]
                                         : 2 * std::numbers::pi * rng.next_double();
                }
                return omega_theta_expectation(state, rho, angles);
            });
            return summarize_samples(values);
        }
    }
    throw Error("unreachable");
}

double expectation(const DensityState& rho, const PauliSum& sum) {
    if (rho.n != sum.num_qubits()) {
        throw ValidationError("density matrix size mismatch");
    }
    const std::size_t dim = rho.dim();
    cplx total = 0.0;
    for (const auto& [word, c] : sum.terms()) {
        const PauliAction act(word);
        cplx tr = 0.0;
        for (std::uint64_t idx = 0; idx < dim; ++idx) {
            tr += act.factor(idx) * rho.at(idx, idx ^ act.x);
        }
        total += c.value() * tr;
    }
    if (std::abs(total.imag()) > 1e-9) {
        throw std::logic_error("expectation of a Hermitian sum came out complex");
    }
    return total.real();
}

double state_fidelity(const DensityState& rho, const ResourceState& state,
                      std::size_t enumeration_cap) {
    if (rho.n != state.num_qubits()) {
        throw ValidationError("density matrix size mismatch");
    }
    const std::size_t dim = rho.dim();
    const double scale = std::ldexp(1.0, -static_cast<int>(state.group.generators.size()));
    cplx projector_sum = 0.0;
    enumerate_group(state.group, enumeration_cap, [&](const PauliWord& g) {
        const PauliAction act(g);
        cplx tr = 0.0;
        for (std::uint64_t idx = 0; idx < dim; ++idx) {
            tr += act.factor(idx) * rho.at(idx, idx ^ act.x);
        }
        projector_sum += tr;
    });
    const double via_projector = scale * projector_sum.real();

    const PureState psi = ideal_vector(state, rho.n);
    cplx sandwich = 0.0;
    for (std::uint64_t r = 0; r < dim; ++r) {
        cplx row = 0.0;
        for (std::uint64_t c = 0; c < dim; ++c) {
            row += rho.at(r, c) * psi.amp[c];
        }
        sandwich += std::conj(psi.amp[r]) * row;
    }
    if (std::abs(via_projector - sandwich.real()) > 1e-9) {
        throw std::logic_error("projector expansion disagrees with the vector sandwich");
    }
    return via_projector;
}

std::vector<cplx> dense_operator(const PauliSum& sum, std::size_t dense_cap) {
    require_dense(sum.num_qubits(), dense_cap, "dense operator");
    const std::size_t dim = std::size_t{1} << sum.num_qubits();
    std::vector<cplx> mat(dim * dim, 0.0);
    for (const auto& [word, c] : sum.terms()) {
        const PauliAction act(word);
        const double cv = c.value();
        for (std::uint64_t col = 0; col < dim; ++col) {
            mat[(col ^ act.x) * dim + col] += cv * act.factor(col);
        }
    }
    return mat;
}

}  // namespace mbqc
