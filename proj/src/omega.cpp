#include "mbqc/omega.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mbqc {

namespace {

constexpr int kMaxShift = 62;

void check_shift(int amount) {
    if (amount < 0 || amount > kMaxShift) {
        throw Error("dyadic arithmetic overflow (shift " + std::to_string(amount) + ")");
    }
}

}  // namespace

Dyadic Dyadic::make(std::int64_t num, int log2_den) {
    Dyadic d{num, log2_den};
    if (d.num == 0) {
        d.log2_den = 0;
        return d;
    }
    while (d.log2_den > 0 && (d.num & 1) == 0) {
        d.num >>= 1;
        --d.log2_den;
    }
    return d;
}

Dyadic Dyadic::pow2(int e) {
    if (e >= 0) {
        check_shift(e);
        return {std::int64_t{1} << e, 0};
    }
    check_shift(-e);
    return {1, -e};
}

double Dyadic::value() const { return std::ldexp(static_cast<double>(num), -log2_den); }

Dyadic Dyadic::operator+(const Dyadic& rhs) const {
    const int den = std::max(log2_den, rhs.log2_den);
    check_shift(den - log2_den);
    check_shift(den - rhs.log2_den);
    const std::int64_t a = num << (den - log2_den);
    const std::int64_t b = rhs.num << (den - rhs.log2_den);
    return make(a + b, den);
}

Dyadic Dyadic::operator*(const Dyadic& rhs) const {
    return make(num * rhs.num, log2_den + rhs.log2_den);
}

void PauliSum::add(const PauliWord& word, const Dyadic& coeff) {
    if (word.num_qubits() != n_) {
        throw ValidationError("Pauli sum word size mismatch");
    }
    Dyadic c = coeff;
    switch (word.phase_exponent()) {
        case 0: break;
        case 2: c = -c; break;
        default:
            throw ValidationError("real Pauli sum cannot hold an imaginary-phase word: " + word.str());
    }
    if (c.is_zero()) {
        return;
    }
    const PauliWord key = word.unsigned_word();
    auto [it, inserted] = terms_.try_emplace(key, c);
    if (!inserted) {
        it->second = it->second + c;
        if (it->second.is_zero()) {
            terms_.erase(it);
        }
    }
}

Dyadic PauliSum::coeff(const PauliWord& word) const {
    const auto it = terms_.find(word.unsigned_word());
    if (it == terms_.end()) {
        return Dyadic::zero();
    }
    return word.phase_exponent() == 2 ? -it->second : it->second;
}

Dyadic PauliSum::coefficient_sum() const {
    Dyadic total = Dyadic::zero();
    for (const auto& [word, c] : terms_) {
        total = total + c;
    }
    return total;
}

namespace {

void require_verified_flow(const ResourceState& state) {
    const FlowCheck check = verify_flow(state);
    if (!check.ok) {
        throw ValidationError("state has no verified flow (condition " +
                              std::to_string(check.failed_condition) + "): " + check.detail);
    }
}

void require_sign_only(const PauliWord& g) {
    if (!g.is_hermitian()) {
        throw Error("group element with imaginary phase: " + g.str());
    }
}

}  // namespace

PauliSum build_omega(const ResourceState& state, std::size_t enumeration_cap) {
    require_verified_flow(state);
    if (state.group.generators.size() > enumeration_cap) {
        throw CapExceeded("exact construction needs group enumeration (" +
                          std::to_string(state.group.generators.size()) + " generators > cap=" +
                          std::to_string(enumeration_cap) + "); use the sampler for large states");
    }
    const QubitSet measured = state.measured();
    const Dyadic base = Dyadic::pow2(-static_cast<int>(state.outputs.count()));
    PauliSum sum(state.num_qubits());
    enumerate_group(state.group, enumeration_cap, [&](const PauliWord& g) {
        if (g.has_z_letter_on(measured.bits())) {
            return;
        }
        require_sign_only(g);
        const int w = static_cast<int>(g.weight_on(measured));
        sum.add(g, base * Dyadic::pow2(-w));
    });
    return sum;
}

std::map<PauliWord, Dyadic> lambda_expand_signed(const ResourceState& state,
                                                 const std::vector<PauliWord>& seeds) {
    const std::size_t n = state.num_qubits();
    const Dyadic base = Dyadic::pow2(-static_cast<int>(state.outputs.count()));
    std::map<PauliWord, Dyadic> current;
    for (const PauliWord& seed : seeds) {
        require_sign_only(seed);
        auto [it, inserted] = current.try_emplace(seed, base);
        if (!inserted) {
            it->second = it->second + base;
        }
    }
    for (std::size_t i : state.flow.order) {
        const PauliWord h = PauliWord::single(n, i, PauliLetter::Z) * state.flow.r_ops.at(i);
        std::map<PauliWord, Dyadic> next;
        const auto accumulate = [&next](const PauliWord& w, const Dyadic& c) {
            auto [it, inserted] = next.try_emplace(w, c);
            if (!inserted) {
                it->second = it->second + c;
            }
        };
        for (const auto& [word, c] : current) {
            if (!word.x_mask().get(i)) {
                accumulate(word, c);
            } else {
                accumulate(word, c.half());
                accumulate(word * h, c.half());
            }
        }
        current = std::move(next);
    }
    return current;
}

PauliSum build_omega_recursive(const ResourceState& state, std::size_t enumeration_cap) {
    require_verified_flow(state);
    const std::vector<PauliWord> t_stabs = derive_t_stabilizers(state);
    if (t_stabs.size() > enumeration_cap) {
        throw CapExceeded("T-subgroup enumeration cap exceeded");
    }
    std::vector<PauliWord> seeds;
    enumerate_products(state.num_qubits(), t_stabs,
                       [&](const PauliWord& t, std::uint64_t) { seeds.push_back(t); });
    PauliSum sum(state.num_qubits());
    for (const auto& [word, c] : lambda_expand_signed(state, seeds)) {
        sum.add(word, c);
    }
    return sum;
}

PauliSum build_omega_fixed(const ResourceState& state, const BasisMap& basis,
                           std::size_t enumeration_cap) {
    require_verified_flow(state);
    const QubitSet measured = state.measured();
    if (basis.mu.size() != measured.count()) {
        throw ValidationError("basis map must cover exactly the measured qubits");
    }
    for (const auto& [q, b] : basis.mu) {
        if (q >= state.num_qubits() || !measured.contains(q)) {
            throw ValidationError("basis map entry for non-measured qubit " + std::to_string(q));
        }
    }
    if (state.group.generators.size() > enumeration_cap) {
        throw CapExceeded("exact construction cap exceeded");
    }
    const Dyadic base = Dyadic::pow2(-static_cast<int>(state.outputs.count()));
    PauliSum sum(state.num_qubits());
    enumerate_group(state.group, enumeration_cap, [&](const PauliWord& g) {
        Dyadic coeff = base;
        for (const auto& [q, b] : basis.mu) {
            const PauliLetter letter = g.letter(q);
            if (letter == PauliLetter::I) {
                continue;
            }
            switch (b) {
                case MeasBasis::X:
                    if (letter != PauliLetter::X) {
                        return;
                    }
                    break;
                case MeasBasis::Y:
                    if (letter != PauliLetter::Y) {
                        return;
                    }
                    break;
                case MeasBasis::XY:
                    if (letter == PauliLetter::Z) {
                        return;
                    }
                    coeff = coeff.half();
                    break;
            }
        }
        require_sign_only(g);
        sum.add(g, coeff);
    });
    return sum;
}

std::pair<PauliLetter, double> exy_action(PauliLetter letter) {
    switch (letter) {
        case PauliLetter::I: return {PauliLetter::I, 1.0};
        case PauliLetter::X: return {PauliLetter::X, 0.5};
        case PauliLetter::Y: return {PauliLetter::Y, 0.5};
        case PauliLetter::Z: return {PauliLetter::Z, 0.0};
    }
    throw Error("unreachable");
}

namespace {

// prefix (x) word, prefix given as letters on new leading qubits.
PauliWord prepend_letters(const std::vector<PauliLetter>& prefix, const PauliWord& word) {
    const std::size_t k = prefix.size();
    PauliWord out(k + word.num_qubits());
    for (std::size_t q = 0; q < k; ++q) {
        out.set_letter(q, prefix[q]);
    }
    for (std::size_t q = 0; q < word.num_qubits(); ++q) {
        out.set_letter(k + q, word.letter(q));
    }
    return out.with_phase(word.phase_exponent());
}

}  // namespace

PauliSum omega_tilde_recurrence_step(const PauliSum& prev, const PauliSum& prev2) {
    if (prev.num_qubits() != prev2.num_qubits() + 1) {
        throw ValidationError("recurrence operands must differ by one qubit");
    }
    PauliSum out(prev.num_qubits() + 1);
    for (const auto& [word, c] : prev.terms()) {
        out.add(prepend_letters({PauliLetter::X}, word), c.half());
    }
    for (const auto& [word, c] : prev2.terms()) {
        out.add(prepend_letters({PauliLetter::X, PauliLetter::I}, word), c.half());
    }
    return out;
}

PauliSum omega_tilde_1d(std::size_t n) {
    if (n < 2) {
        throw ValidationError("omega_tilde_1d needs n >= 2");
    }
    PauliSum base2(2);
    base2.add(PauliWord::parse("XI"), Dyadic::pow2(-1));
    base2.add(PauliWord::parse("XX"), Dyadic::pow2(-1));
    if (n == 2) {
        return base2;
    }
    PauliSum base3(3);
    base3.add(PauliWord::parse("XIX"), Dyadic::pow2(-1));
    base3.add(PauliWord::parse("XXX"), Dyadic::pow2(-2));
    base3.add(PauliWord::parse("XXI"), Dyadic::pow2(-2));
    if (n == 3) {
        return base3;
    }
    PauliSum prev2 = std::move(base2);
    PauliSum prev = std::move(base3);
    for (std::size_t k = 4; k <= n; ++k) {
        PauliSum next = omega_tilde_recurrence_step(prev, prev2);
        prev2 = std::move(prev);
        prev = std::move(next);
    }
    return prev;
}

PauliWord conjugate_cz(const PauliWord& w, std::size_t a, std::size_t b) {
    const std::size_t n = w.num_qubits();
    if (a >= n || b >= n || a == b) {
        throw ValidationError("bad CZ qubit pair");
    }
    const bool xa = w.x_mask().get(a);
    const bool xb = w.x_mask().get(b);
    const bool za = w.z_mask().get(a);
    const bool zb = w.z_mask().get(b);
    BitVec x = w.x_mask();
    BitVec z = w.z_mask();
    if (xb) {
        z.flip(a);
    }
    if (xa) {
        z.flip(b);
    }
    std::uint8_t phase = w.phase_exponent();
    if (xa && xb && (za ^ zb)) {
        phase = (phase + 2) & 3u;
    }
    return PauliWord::from_masks(std::move(x), std::move(z), phase);
}

PauliSum omega_tilde_from_omega(const PauliSum& omega) {
    const std::size_t n = omega.num_qubits();
    if (omega.coeff(PauliWord::identity(n)) != Dyadic::pow2(-1)) {
        throw ValidationError("identity coefficient must be exactly 1/2 (single output qubit)");
    }
    PauliSum out(n);
    for (const auto& [word, c] : omega.terms()) {
        if (word.is_identity_letters()) {
            continue;
        }
        PauliWord conj = word;
        for (std::size_t q = 0; q + 1 < n; ++q) {
            conj = conjugate_cz(conj, q, q + 1);
        }
        out.add(conj, c + c);
    }
    return out;
}

void fwht(std::vector<double>& values) {
    const std::size_t size = values.size();
    if (size == 0 || (size & (size - 1)) != 0) {
        throw ValidationError("transform length must be a power of two");
    }
    for (std::size_t len = 1; len < size; len <<= 1) {
        for (std::size_t block = 0; block < size; block += len << 1) {
            for (std::size_t k = block; k < block + len; ++k) {
                const double a = values[k];
                const double b = values[k + len];
                values[k] = a + b;
                values[k + len] = a - b;
            }
        }
    }
}

std::vector<double> diagonalize_commuting(const PauliSum& sum, const StabilizerGroup& group,
                                          std::size_t spectral_cap) {
    if (sum.num_qubits() != group.n) {
        throw ValidationError("sum and group qubit counts differ");
    }
    const std::size_t m = group.generators.size();
    if (m > spectral_cap) {
        throw CapExceeded("spectral cap exceeded: " + std::to_string(m) + " generators > cap=" +
                          std::to_string(spectral_cap));
    }
    if (m >= 63) {
        throw CapExceeded("too many generators for spectral enumeration");
    }
    GroupIndex index(group);
    std::vector<double> values(std::size_t{1} << m, 0.0);
    for (const auto& [word, c] : sum.terms()) {
        const auto subset = index.decompose_letters(word);
        if (!subset) {
            throw ValidationError("sum term outside the abelian group span (terms must commute): " +
                                  word.str());
        }
        const PauliWord prod = index.product_of(*subset);
        double sign;
        if (prod == word) {
            sign = 1.0;
        } else if (prod == word.with_phase(2)) {
            sign = -1.0;
        } else {
            throw ValidationError("sum term is not a group element up to sign: " + word.str());
        }
        std::uint64_t idx = 0;
        for (std::size_t k = 0; k < m; ++k) {
            if (subset->get(k)) {
                idx |= std::uint64_t{1} << k;
            }
        }
        values[idx] += sign * c.value();
    }
    fwht(values);
    return values;
}

SpectralSummary summarize_eigenvalues(const std::vector<double>& eigenvalues) {
    if (eigenvalues.empty()) {
        throw ValidationError("empty spectrum");
    }
    constexpr double kTol = 1e-12;
    double max_eig = eigenvalues[0];
    double min_eig = eigenvalues[0];
    for (double v : eigenvalues) {
        max_eig = std::max(max_eig, v);
        min_eig = std::min(min_eig, v);
    }
    std::size_t multiplicity = 0;
    double second = min_eig;
    bool has_second = false;
    for (double v : eigenvalues) {
        if (v >= max_eig - kTol) {
            ++multiplicity;
        } else if (!has_second || v > second) {
            second = v;
            has_second = true;
        }
    }
    SpectralSummary s;
    s.max_eig = max_eig;
    s.beta = multiplicity > 1 ? max_eig : (has_second ? second : max_eig);
    s.tau = min_eig;
    s.nu = 1.0 - s.beta;
    s.max_multiplicity = multiplicity;
    return s;
}

SpectralSummary spectral_summary(const ResourceState& state, std::size_t spectral_cap) {
    const PauliSum omega = build_omega(state, spectral_cap);
    const std::vector<double> eig = diagonalize_commuting(omega, state.group, spectral_cap);
    const SpectralSummary s = summarize_eigenvalues(eig);
    if (std::abs(s.max_eig - 1.0) > 1e-12 || s.max_multiplicity != 1 || std::abs(s.tau) > 1e-12) {
        throw std::logic_error("omega spectrum violates its structural guarantees (max=" +
                               std::to_string(s.max_eig) + ", mult=" + std::to_string(s.max_multiplicity) +
                               ", min=" + std::to_string(s.tau) + ")");
    }
    return s;
}

}  // namespace mbqc
