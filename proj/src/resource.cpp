#include "mbqc/resource.hpp"

#include <algorithm>
#include <bit>

namespace mbqc {

BitVec symplectic_row(const PauliWord& w) {
    const std::size_t n = w.num_qubits();
    BitVec row(2 * n);
    for (std::size_t q = 0; q < n; ++q) {
        if (w.x_mask().get(q)) {
            row.set(q);
        }
        if (w.z_mask().get(q)) {
            row.set(n + q);
        }
    }
    return row;
}

StabilizerGroup check_group(std::vector<PauliWord> generators) {
    if (generators.empty()) {
        throw ValidationError("empty generator list");
    }
    const std::size_t n = generators[0].num_qubits();
    for (std::size_t k = 0; k < generators.size(); ++k) {
        if (generators[k].num_qubits() != n) {
            throw ValidationError("generator " + std::to_string(k) + " has mismatched qubit count");
        }
        if (!generators[k].is_hermitian()) {
            throw ValidationError("generator " + std::to_string(k) + " has non-Hermitian phase: " +
                                  generators[k].str());
        }
    }
    for (std::size_t a = 0; a < generators.size(); ++a) {
        for (std::size_t b = a + 1; b < generators.size(); ++b) {
            if (!generators[a].commutes_with(generators[b])) {
                throw ValidationError("generators " + std::to_string(a) + " and " + std::to_string(b) +
                                      " do not commute");
            }
        }
    }
    gf2::RowBasis basis(2 * n, generators.size());
    for (std::size_t k = 0; k < generators.size(); ++k) {
        if (!basis.add(symplectic_row(generators[k]))) {
            throw ValidationError("generator " + std::to_string(k) +
                                  " is dependent on earlier generators: " + generators[k].str());
        }
    }
    if (generators.size() > n) {
        throw ValidationError("more generators than qubits");
    }
    return StabilizerGroup{n, std::move(generators)};
}

GroupIndex::GroupIndex(const StabilizerGroup& group)
    : group_(&group), basis_(2 * group.n, group.generators.size()) {
    for (const PauliWord& g : group.generators) {
        basis_.add(symplectic_row(g));
    }
}

std::optional<BitVec> GroupIndex::decompose_letters(const PauliWord& w) const {
    if (w.num_qubits() != group_->n) {
        throw ValidationError("word size mismatch");
    }
    return basis_.decompose(symplectic_row(w));
}

PauliWord GroupIndex::product_of(const BitVec& subset) const {
    PauliWord prod = PauliWord::identity(group_->n);
    for (std::size_t k = 0; k < group_->generators.size(); ++k) {
        if (subset.get(k)) {
            prod.mul_inplace_right(group_->generators[k]);
        }
    }
    return prod;
}

bool GroupIndex::contains(const PauliWord& w) const {
    const auto subset = decompose_letters(w);
    if (!subset) {
        return false;
    }
    return product_of(*subset) == w;
}

namespace {

std::size_t order_position(const std::vector<std::size_t>& order, std::size_t qubit) {
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (order[k] == qubit) {
            return k;
        }
    }
    return order.size();
}

}  // namespace

FlowCheck verify_flow(const ResourceState& state) {
    const std::size_t n = state.num_qubits();
    const QubitSet measured = state.measured();
    FlowCheck check;

    if (state.flow.order.size() != measured.count()) {
        return {false, 0, std::nullopt, "order length does not match measured qubit count"};
    }
    {
        QubitSet seen(n);
        for (std::size_t q : state.flow.order) {
            if (q >= n || !measured.contains(q) || seen.contains(q)) {
                return {false, 0, q < n ? std::optional<std::size_t>(q) : std::nullopt,
                        "order is not a permutation of the measured qubits"};
            }
            seen.add(q);
        }
    }

    GroupIndex index(state.group);
    for (std::size_t pos = 0; pos < state.flow.order.size(); ++pos) {
        const std::size_t i = state.flow.order[pos];
        const auto it = state.flow.r_ops.find(i);
        if (it == state.flow.r_ops.end()) {
            return {false, 1, i, "no correction operator stored for qubit " + std::to_string(i)};
        }
        const PauliWord& r = it->second;
        if (r.num_qubits() != n || !r.is_hermitian()) {
            return {false, 1, i, "malformed correction operator for qubit " + std::to_string(i)};
        }
        for (std::size_t q = 0; q < n; ++q) {
            if (measured.contains(q) && r.z_mask().get(q)) {
                return {false, 2, i,
                        "correction for qubit " + std::to_string(i) + " acts " +
                            std::string(1, letter_char(r.letter(q))) + " on measured qubit " +
                            std::to_string(q)};
            }
        }
        for (std::size_t q = 0; q < n; ++q) {
            if (!measured.contains(q)) {
                continue;
            }
            if (r.x_mask().get(q) || r.z_mask().get(q)) {
                if (order_position(state.flow.order, q) <= pos) {
                    return {false, 3, i,
                            "correction for qubit " + std::to_string(i) + " is supported on qubit " +
                                std::to_string(q) + " which is not strictly later in the order"};
                }
            }
        }
        const PauliWord h = PauliWord::single(n, i, PauliLetter::Z) * r;
        if (!index.contains(h)) {
            return {false, 1, i,
                    "Z_i R_i is not a group element for qubit " + std::to_string(i) + ": " + h.str()};
        }
    }
    return check;
}

void check_state(const ResourceState& state) {
    check_group(state.group.generators);
    if (state.group.generators.size() != state.num_qubits()) {
        throw ValidationError("a resource state needs one generator per qubit");
    }
    if (state.outputs.universe_size() != state.num_qubits()) {
        throw ValidationError("output set size mismatch");
    }
    BitVec x_cover(state.num_qubits());
    for (const PauliWord& g : state.group.generators) {
        x_cover |= g.x_mask();
    }
    for (std::size_t q = 0; q < state.num_qubits(); ++q) {
        if (!x_cover.get(q)) {
            throw ValidationError("qubit " + std::to_string(q) +
                                  " is disentangled (no group element anticommutes with Z on it)");
        }
    }
    const FlowCheck check = verify_flow(state);
    if (!check.ok) {
        throw ValidationError("flow verification failed (condition " +
                              std::to_string(check.failed_condition) + "): " + check.detail);
    }
}

std::map<std::size_t, PauliWord> derive_r_operators(const StabilizerGroup& group,
                                                    const QubitSet& outputs,
                                                    const std::vector<std::size_t>& order) {
    const std::size_t n = group.n;
    const std::size_t m = group.generators.size();
    const QubitSet measured = outputs.complement();
    if (order.size() != measured.count()) {
        throw ValidationError("order must be a total order on the measured qubits");
    }

    std::map<std::size_t, PauliWord> r_ops;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t i = order[pos];
        if (!measured.contains(i)) {
            throw ValidationError("order contains non-measured qubit " + std::to_string(i));
        }
        // Unknowns: generator coefficients. Constraints on h = prod g^a:
        //   z_q(h) = [q == i]            for measured q
        //   x_q(h) = 0                   for measured q at order position <= pos
        std::vector<BitVec> rows;
        std::vector<bool> rhs_bits;
        for (std::size_t q = 0; q < n; ++q) {
            if (!measured.contains(q)) {
                continue;
            }
            BitVec row(m);
            for (std::size_t k = 0; k < m; ++k) {
                row.set(k, group.generators[k].z_mask().get(q));
            }
            rows.push_back(std::move(row));
            rhs_bits.push_back(q == i);
            if (order_position(order, q) <= pos) {
                BitVec xrow(m);
                for (std::size_t k = 0; k < m; ++k) {
                    xrow.set(k, group.generators[k].x_mask().get(q));
                }
                rows.push_back(std::move(xrow));
                rhs_bits.push_back(false);
            }
        }
        BitVec rhs(rows.size());
        for (std::size_t k = 0; k < rhs_bits.size(); ++k) {
            rhs.set(k, rhs_bits[k]);
        }
        const auto solution = gf2::solve(std::move(rows), std::move(rhs), m);
        if (!solution) {
            throw NoFlowError("no correction operator exists for measured qubit " + std::to_string(i));
        }
        PauliWord h = PauliWord::identity(n);
        for (std::size_t k = 0; k < m; ++k) {
            if (solution->get(k)) {
                h.mul_inplace_right(group.generators[k]);
            }
        }
        // R_i = Z_i h: strips the Z at i, keeps the exact group sign.
        r_ops.emplace(i, PauliWord::single(n, i, PauliLetter::Z) * h);
    }
    return r_ops;
}

std::vector<PauliWord> derive_t_stabilizers(const ResourceState& state) {
    const std::size_t n = state.num_qubits();
    const QubitSet measured = state.measured();
    const std::size_t n_outputs = state.outputs.count();

    std::vector<PauliWord> r_stabs;
    std::map<std::size_t, PauliWord> h_by_qubit;
    for (std::size_t i : state.flow.order) {
        const auto it = state.flow.r_ops.find(i);
        if (it == state.flow.r_ops.end()) {
            throw ValidationError("missing correction operator for qubit " + std::to_string(i));
        }
        PauliWord h = PauliWord::single(n, i, PauliLetter::Z) * it->second;
        h_by_qubit.emplace(i, h);
        r_stabs.push_back(std::move(h));
    }

    gf2::RowBasis basis(2 * n, n);
    for (const PauliWord& h : r_stabs) {
        if (!basis.add(symplectic_row(h))) {
            throw ValidationError("correction stabilizers are mutually dependent (broken flow)");
        }
    }

    std::vector<PauliWord> t_stabs;
    for (const PauliWord& g : state.group.generators) {
        if (t_stabs.size() == n_outputs) {
            break;
        }
        if (!basis.add(symplectic_row(g))) {
            continue;
        }
        // Clear Z/Y letters on measured qubits by multiplying with the
        // matching Z_i R_i, whose z-support on the measured set is exactly {i}.
        PauliWord t = g;
        for (std::size_t q = 0; q < n; ++q) {
            if (measured.contains(q) && t.z_mask().get(q)) {
                t.mul_inplace_right(h_by_qubit.at(q));
            }
        }
        if (t.has_z_letter_on(measured.bits()) || (t.x_mask() & t.z_mask()).intersects(measured.bits())) {
            throw ValidationError("failed to push Z letters off the measured qubits (broken flow)");
        }
        t_stabs.push_back(std::move(t));
    }
    if (t_stabs.size() != n_outputs) {
        throw ValidationError("could not complete the correction stabilizers to a full generating set");
    }
    return t_stabs;
}

ResourceState cluster_1d(std::size_t n) {
    if (n < 2) {
        throw ValidationError("1d cluster needs at least 2 qubits");
    }
    std::vector<PauliWord> gens;
    for (std::size_t q = 0; q < n; ++q) {
        PauliWord g(n);
        g.set_letter(q, PauliLetter::X);
        if (q > 0) {
            g.set_letter(q - 1, PauliLetter::Z);
        }
        if (q + 1 < n) {
            g.set_letter(q + 1, PauliLetter::Z);
        }
        gens.push_back(std::move(g));
    }
    ResourceState state;
    state.group = check_group(std::move(gens));
    state.outputs = QubitSet::of(n, {n - 1});
    for (std::size_t q = 0; q + 1 < n; ++q) {
        state.flow.order.push_back(q);
    }
    state.flow.r_ops = derive_r_operators(state.group, state.outputs, state.flow.order);
    check_state(state);
    return state;
}

ResourceState cluster_2d(std::size_t rows, std::size_t cols) {
    if (rows < 2 || cols < 2) {
        throw ValidationError("2d cluster needs at least 2 rows and 2 columns");
    }
    const std::size_t n = rows * cols;
    const auto qubit = [cols](std::size_t r, std::size_t c) { return r * cols + c; };
    std::vector<PauliWord> gens;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            PauliWord g(n);
            g.set_letter(qubit(r, c), PauliLetter::X);
            if (r > 0) g.set_letter(qubit(r - 1, c), PauliLetter::Z);
            if (r + 1 < rows) g.set_letter(qubit(r + 1, c), PauliLetter::Z);
            if (c > 0) g.set_letter(qubit(r, c - 1), PauliLetter::Z);
            if (c + 1 < cols) g.set_letter(qubit(r, c + 1), PauliLetter::Z);
            gens.push_back(std::move(g));
        }
    }
    ResourceState state;
    state.group = check_group(std::move(gens));
    std::vector<std::size_t> outs;
    for (std::size_t r = 0; r < rows; ++r) {
        outs.push_back(qubit(r, cols - 1));
    }
    state.outputs = QubitSet::of(n, outs);
    // Column-major measurement order: a column per time step.
    for (std::size_t c = 0; c + 1 < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) {
            state.flow.order.push_back(qubit(r, c));
        }
    }
    state.flow.r_ops = derive_r_operators(state.group, state.outputs, state.flow.order);
    check_state(state);
    return state;
}

std::vector<PauliWord> SignedGroup::signed_generators() const {
    std::vector<PauliWord> gens = base.generators;
    for (std::size_t k : sign_flips) {
        if (k >= gens.size()) {
            throw ValidationError("sign flip index out of range");
        }
        gens[k] = gens[k].with_phase((gens[k].phase_exponent() + 2) & 3u);
    }
    return gens;
}

SignedGroup excited_state(const ResourceState& state, std::size_t k) {
    if (k >= state.num_qubits() || !state.outputs.contains(k)) {
        throw ValidationError("excited state index must be an output qubit");
    }
    const std::size_t n = state.num_qubits();
    std::vector<PauliWord> gens;
    for (std::size_t i : state.flow.order) {
        gens.push_back(PauliWord::single(n, i, PauliLetter::Z) * state.flow.r_ops.at(i));
    }
    const std::size_t n_r = gens.size();
    const std::vector<PauliWord> t_stabs = derive_t_stabilizers(state);
    for (const PauliWord& t : t_stabs) {
        gens.push_back(t);
    }
    const std::vector<std::size_t> outs = state.outputs.indices();
    std::size_t t_index = 0;
    while (t_index < outs.size() && outs[t_index] != k) {
        ++t_index;
    }
    SignedGroup signed_group;
    signed_group.base = check_group(std::move(gens));
    signed_group.sign_flips = {n_r + t_index};
    return signed_group;
}

void enumerate_products(std::size_t n, const std::vector<PauliWord>& generators,
                        const std::function<void(const PauliWord&, std::uint64_t)>& visit) {
    PauliWord current = PauliWord::identity(n);
    visit(current, 0);
    if (generators.empty()) {
        return;
    }
    if (generators.size() >= 63) {
        throw CapExceeded("too many generators to enumerate");
    }
    const std::uint64_t total = std::uint64_t{1} << generators.size();
    for (std::uint64_t k = 1; k < total; ++k) {
        const int flip = std::countr_zero(k);
        current.mul_inplace_right(generators[static_cast<std::size_t>(flip)]);
        visit(current, k ^ (k >> 1));
    }
}

void enumerate_group(const StabilizerGroup& group, std::size_t cap,
                     const std::function<void(const PauliWord&)>& visit) {
    if (group.generators.size() > cap) {
        throw CapExceeded("group enumeration cap exceeded: " + std::to_string(group.generators.size()) +
                          " generators > cap=" + std::to_string(cap));
    }
    enumerate_products(group.n, group.generators,
                       [&](const PauliWord& w, std::uint64_t) { visit(w); });
}

std::vector<PauliWord> group_elements(const StabilizerGroup& group, std::size_t cap) {
    std::vector<PauliWord> out;
    out.reserve(std::size_t{1} << group.generators.size());
    enumerate_group(group, cap, [&](const PauliWord& w) { out.push_back(w); });
    return out;
}

}  // namespace mbqc
