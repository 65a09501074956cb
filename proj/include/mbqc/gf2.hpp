#pragma once

#include <optional>
#include <vector>

#include "mbqc/bitvec.hpp"

namespace mbqc::gf2 {

// Incrementally echelonized row set over GF(2) with combination tracking.
// Rows are added in order; each accepted row records which original rows
// combine to it, so membership queries can be answered as decompositions.
class RowBasis {
public:
    RowBasis(std::size_t width, std::size_t max_rows);

    // Adds a row. Returns false (and records nothing) if it is dependent on
    // the rows accepted so far.
    bool add(const BitVec& row);

    std::size_t rank() const { return rows_.size(); }
    std::size_t width() const { return width_; }

    bool in_span(const BitVec& v) const;

    // Coefficients over the accepted rows (bit i <-> i-th accepted row)
    // whose XOR equals v, or nullopt if v is outside the span.
    std::optional<BitVec> decompose(const BitVec& v) const;

private:
    std::size_t width_;
    std::size_t max_rows_;
    std::vector<BitVec> rows_;
    std::vector<BitVec> combos_;
    std::vector<std::size_t> pivots_;
};

// Solves the linear system rows[k] . x = rhs[k] over GF(2). Each row has
// `unknowns` bits. Returns a particular solution with free variables set to
// zero, or nullopt if the system is inconsistent.
std::optional<BitVec> solve(std::vector<BitVec> rows, BitVec rhs, std::size_t unknowns);

}  // namespace mbqc::gf2
