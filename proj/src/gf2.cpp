#include "mbqc/gf2.hpp"

namespace mbqc::gf2 {

namespace {

std::size_t leading_bit(const BitVec& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v.get(i)) {
            return i;
        }
    }
    return v.size();
}

}  // namespace

RowBasis::RowBasis(std::size_t width, std::size_t max_rows) : width_(width), max_rows_(max_rows) {}

bool RowBasis::add(const BitVec& row) {
    if (row.size() != width_) {
        throw ValidationError("row width mismatch");
    }
    if (rows_.size() >= max_rows_) {
        throw ValidationError("row basis capacity exceeded");
    }
    BitVec r = row;
    BitVec combo = BitVec::single(max_rows_, rows_.size());
    for (std::size_t k = 0; k < rows_.size(); ++k) {
        if (r.get(pivots_[k])) {
            r ^= rows_[k];
            combo ^= combos_[k];
        }
    }
    const std::size_t pivot = leading_bit(r);
    if (pivot == width_) {
        return false;
    }
    rows_.push_back(std::move(r));
    combos_.push_back(std::move(combo));
    pivots_.push_back(pivot);
    return true;
}

bool RowBasis::in_span(const BitVec& v) const { return decompose(v).has_value(); }

std::optional<BitVec> RowBasis::decompose(const BitVec& v) const {
    if (v.size() != width_) {
        throw ValidationError("row width mismatch");
    }
    BitVec r = v;
    BitVec combo(max_rows_);
    for (std::size_t k = 0; k < rows_.size(); ++k) {
        if (r.get(pivots_[k])) {
            r ^= rows_[k];
            combo ^= combos_[k];
        }
    }
    if (r.any()) {
        return std::nullopt;
    }
    return combo;
}

std::optional<BitVec> solve(std::vector<BitVec> rows, BitVec rhs, std::size_t unknowns) {
    if (rows.size() != rhs.size()) {
        throw ValidationError("rhs length mismatch");
    }
    const std::size_t m = rows.size();
    std::vector<std::size_t> pivot_row_of_col;
    std::vector<std::size_t> pivot_cols;
    std::size_t next_row = 0;
    for (std::size_t col = 0; col < unknowns && next_row < m; ++col) {
        std::size_t sel = m;
        for (std::size_t r = next_row; r < m; ++r) {
            if (rows[r].get(col)) {
                sel = r;
                break;
            }
        }
        if (sel == m) {
            continue;
        }
        std::swap(rows[sel], rows[next_row]);
        const bool rhs_sel = rhs.get(sel);
        const bool rhs_next = rhs.get(next_row);
        rhs.set(sel, rhs_next);
        rhs.set(next_row, rhs_sel);
        for (std::size_t r = 0; r < m; ++r) {
            if (r != next_row && rows[r].get(col)) {
                rows[r] ^= rows[next_row];
                rhs.set(r, rhs.get(r) ^ rhs.get(next_row));
            }
        }
        pivot_row_of_col.push_back(next_row);
        pivot_cols.push_back(col);
        ++next_row;
    }
    for (std::size_t r = next_row; r < m; ++r) {
        if (rhs.get(r)) {
            return std::nullopt;
        }
    }
    BitVec x(unknowns);
    for (std::size_t k = 0; k < pivot_cols.size(); ++k) {
        x.set(pivot_cols[k], rhs.get(pivot_row_of_col[k]));
    }
    return x;
}

}  // namespace mbqc::gf2
