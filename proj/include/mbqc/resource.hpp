#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mbqc/gf2.hpp"
#include "mbqc/pauli.hpp"

namespace mbqc {

inline constexpr std::size_t kEnumerationCapDefault = 24;

// N mutually commuting, GF(2)-independent Hermitian Pauli words on N qubits
// (fewer generators than qubits is allowed for the degenerate groups used in
// tests; builders always produce full-rank groups).
struct StabilizerGroup {
    std::size_t n = 0;
    std::vector<PauliWord> generators;
};

// Validates commutation, Hermiticity and GF(2) independence.
StabilizerGroup check_group(std::vector<PauliWord> generators);

// Measurement order over the measured qubits plus, per measured qubit i, the
// correction operator R_i with Z_i R_i in the group.
struct Flow {
    std::vector<std::size_t> order;
    std::map<std::size_t, PauliWord> r_ops;
};

struct ResourceState {
    StabilizerGroup group;
    QubitSet outputs;
    Flow flow;

    std::size_t num_qubits() const { return group.n; }
    QubitSet measured() const { return outputs.complement(); }
};

struct FlowCheck {
    bool ok = true;
    int failed_condition = 0;               // 1..3, 0 when ok
    std::optional<std::size_t> failed_qubit;
    std::string detail;
};

FlowCheck verify_flow(const ResourceState& state);

// Structural validation: group, no disentangled qubit, flow. Throws
// ValidationError naming the first violated condition.
void check_state(const ResourceState& state);

// Solves for correction operators over GF(2), one measured qubit at a time.
// Throws NoFlowError naming the first unsolvable qubit.
std::map<std::size_t, PauliWord> derive_r_operators(const StabilizerGroup& group,
                                                    const QubitSet& outputs,
                                                    const std::vector<std::size_t>& order);

// The |O| group elements, independent from all Z_i R_i, that act as I or X on
// every measured qubit. Entry k is associated with the k-th output qubit in
// ascending order.
std::vector<PauliWord> derive_t_stabilizers(const ResourceState& state);

// Linear cluster: X Z..., Z X Z ..., ... Z X; output = last qubit.
ResourceState cluster_1d(std::size_t n);
// Grid cluster with open boundary, row-major qubit indexing, star generators
// X_v prod Z_u over grid neighbors; outputs = last column, column-major
// measurement order.
ResourceState cluster_2d(std::size_t rows, std::size_t cols);

// Stabilizer group with some generator signs flipped.
struct SignedGroup {
    StabilizerGroup base;
    std::vector<std::size_t> sign_flips;

    std::vector<PauliWord> signed_generators() const;
};

// Signed group generated by {Z_i R_i, all +1} and the T-stabilizers with the
// one associated to output qubit k flipped.
SignedGroup excited_state(const ResourceState& state, std::size_t k);

// Visits all 2^m signed products of the generators (identity first, then a
// Gray-code walk). The subset mask identifies which generators multiply to
// the current element.
void enumerate_products(std::size_t n, const std::vector<PauliWord>& generators,
                        const std::function<void(const PauliWord&, std::uint64_t)>& visit);

void enumerate_group(const StabilizerGroup& group, std::size_t cap,
                     const std::function<void(const PauliWord&)>& visit);

std::vector<PauliWord> group_elements(const StabilizerGroup& group,
                                      std::size_t cap = kEnumerationCapDefault);

// GF(2) view of a group for membership and decomposition queries.
class GroupIndex {
public:
    explicit GroupIndex(const StabilizerGroup& group);

    // Generator subset whose product has the same letters as w (sign ignored).
    std::optional<BitVec> decompose_letters(const PauliWord& w) const;

    // Signed membership: some generator product equals w exactly.
    bool contains(const PauliWord& w) const;

    // Product of the generator subset, with exact sign.
    PauliWord product_of(const BitVec& subset) const;

private:
    const StabilizerGroup* group_;
    gf2::RowBasis basis_;
};

BitVec symplectic_row(const PauliWord& w);

}  // namespace mbqc
