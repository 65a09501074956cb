#include "mbqc/pauli.hpp"

#include <array>

namespace mbqc {

namespace {

constexpr std::array<std::complex<double>, 4> kPhaseUnits = {
    std::complex<double>{1.0, 0.0},
    std::complex<double>{0.0, 1.0},
    std::complex<double>{-1.0, 0.0},
    std::complex<double>{0.0, -1.0},
};

}  // namespace

char letter_char(PauliLetter p) {
    switch (p) {
        case PauliLetter::I: return 'I';
        case PauliLetter::X: return 'X';
        case PauliLetter::Y: return 'Y';
        case PauliLetter::Z: return 'Z';
    }
    throw Error("unreachable");
}

QubitSet QubitSet::full(std::size_t n) {
    QubitSet s(n);
    for (std::size_t q = 0; q < n; ++q) {
        s.add(q);
    }
    return s;
}

QubitSet QubitSet::of(std::size_t n, const std::vector<std::size_t>& indices) {
    QubitSet s(n);
    for (std::size_t q : indices) {
        if (q >= n) {
            throw ValidationError("qubit index " + std::to_string(q) + " out of range for n=" + std::to_string(n));
        }
        s.add(q);
    }
    return s;
}

QubitSet QubitSet::complement() const {
    QubitSet s(universe_size());
    for (std::size_t q = 0; q < universe_size(); ++q) {
        if (!contains(q)) {
            s.add(q);
        }
    }
    return s;
}

PauliWord PauliWord::single(std::size_t n, std::size_t qubit, PauliLetter p) {
    PauliWord w(n);
    if (qubit >= n) {
        throw ValidationError("qubit index out of range");
    }
    w.set_letter(qubit, p);
    return w;
}

PauliWord PauliWord::from_masks(BitVec x, BitVec z, std::uint8_t phase_exp) {
    if (x.size() != z.size()) {
        throw ValidationError("x/z mask size mismatch");
    }
    PauliWord w(x.size());
    w.x_ = std::move(x);
    w.z_ = std::move(z);
    w.phase_ = phase_exp & 3u;
    return w;
}

PauliWord PauliWord::parse(std::string_view text) {
    if (text.empty()) {
        throw ValidationError("empty Pauli string");
    }
    std::uint8_t phase = 0;
    std::size_t pos = 0;
    if (text[0] == '+' || text[0] == '-') {
        phase = (text[0] == '-') ? 2 : 0;
        pos = 1;
    }
    if (pos < text.size() && text[pos] == 'i') {
        phase = (phase + 1) & 3u;
        ++pos;
    }
    if (pos >= text.size()) {
        throw ValidationError("Pauli string has no letters: '" + std::string(text) + "'");
    }
    PauliWord w(text.size() - pos);
    for (std::size_t q = 0; pos < text.size(); ++pos, ++q) {
        switch (text[pos]) {
            case 'I': break;
            case 'X': w.x_.set(q); break;
            case 'Y': w.x_.set(q); w.z_.set(q); break;
            case 'Z': w.z_.set(q); break;
            default:
                throw ValidationError(std::string("invalid Pauli character '") + text[pos] + "'");
        }
    }
    w.phase_ = phase;
    return w;
}

std::string PauliWord::str() const {
    static constexpr const char* kPrefix[4] = {"+", "+i", "-", "-i"};
    std::string out = kPrefix[phase_];
    out.reserve(out.size() + n_);
    for (std::size_t q = 0; q < n_; ++q) {
        out += letter_char(letter(q));
    }
    return out;
}

std::complex<double> PauliWord::phase() const { return kPhaseUnits[phase_]; }

PauliLetter PauliWord::letter(std::size_t q) const {
    const bool x = x_.get(q);
    const bool z = z_.get(q);
    if (x && z) {
        return PauliLetter::Y;
    }
    if (x) {
        return PauliLetter::X;
    }
    if (z) {
        return PauliLetter::Z;
    }
    return PauliLetter::I;
}

void PauliWord::set_letter(std::size_t q, PauliLetter p) {
    x_.set(q, p == PauliLetter::X || p == PauliLetter::Y);
    z_.set(q, p == PauliLetter::Z || p == PauliLetter::Y);
}

std::size_t PauliWord::weight() const { return (x_ | z_).count(); }

std::size_t PauliWord::weight_on(const QubitSet& s) const {
    if (s.universe_size() != n_) {
        throw ValidationError("qubit set size mismatch");
    }
    return (x_ | z_).count_and(s.bits());
}

bool PauliWord::commutes_with(const PauliWord& other) const {
    if (n_ != other.n_) {
        throw ValidationError("Pauli word size mismatch");
    }
    return ((x_.count_and(other.z_) + z_.count_and(other.x_)) & 1u) == 0;
}

void PauliWord::mul_inplace_right(const PauliWord& rhs) {
    if (n_ != rhs.n_) {
        throw ValidationError("Pauli word size mismatch");
    }
    // Per qubit, letter(x1,z1)*letter(x2,z2) = i^t letter(x1^x2, z1^z2) with
    // t = x1 z1 + x2 z2 - (x1^x2)(z1^z2) + 2 z1 x2 (mod 4). Summed over qubits
    // with popcounts; -c == 3c (mod 4).
    const std::size_t c1 = x_.count_and(z_);
    const std::size_t c2 = rhs.x_.count_and(rhs.z_);
    const std::size_t cross = z_.count_and(rhs.x_);
    x_ ^= rhs.x_;
    z_ ^= rhs.z_;
    const std::size_t c3 = x_.count_and(z_);
    phase_ = static_cast<std::uint8_t>((phase_ + rhs.phase_ + c1 + c2 + 2 * cross + 3 * c3) & 3u);
}

PauliWord PauliWord::operator*(const PauliWord& rhs) const {
    PauliWord out = *this;
    out.mul_inplace_right(rhs);
    return out;
}

PauliWord PauliWord::adjoint() const {
    PauliWord out = *this;
    // Letters are Hermitian; only the scalar conjugates.
    out.phase_ = static_cast<std::uint8_t>((4 - phase_) & 3u);
    return out;
}

PauliWord PauliWord::with_phase(std::uint8_t phase_exp) const {
    PauliWord out = *this;
    out.phase_ = phase_exp & 3u;
    return out;
}

bool PauliWord::has_z_letter_on(const BitVec& mask) const {
    const auto& xl = x_.limbs();
    const auto& zl = z_.limbs();
    const auto& ml = mask.limbs();
    if (mask.size() != n_) {
        throw ValidationError("mask size mismatch");
    }
    for (std::size_t k = 0; k < zl.size(); ++k) {
        if (zl[k] & ~xl[k] & ml[k]) {
            return true;
        }
    }
    return false;
}

std::vector<std::complex<double>> PauliWord::to_dense(std::size_t dense_cap) const {
    if (n_ > dense_cap) {
        throw CapExceeded("dense conversion cap exceeded: n=" + std::to_string(n_) +
                          " > cap=" + std::to_string(dense_cap));
    }
    const std::size_t dim = std::size_t{1} << n_;
    std::vector<std::complex<double>> mat(dim * dim, 0.0);
    // Qubit q <-> index bit (n-1-q): qubit 0 is the most significant bit.
    std::uint64_t xm = 0;
    std::uint64_t zm = 0;
    for (std::size_t q = 0; q < n_; ++q) {
        if (x_.get(q)) {
            xm |= std::uint64_t{1} << (n_ - 1 - q);
        }
        if (z_.get(q)) {
            zm |= std::uint64_t{1} << (n_ - 1 - q);
        }
    }
    const std::complex<double> unit = kPhaseUnits[(phase_ + x_.count_and(z_)) & 3u];
    for (std::uint64_t col = 0; col < dim; ++col) {
        const std::uint64_t row = col ^ xm;
        const double sign = (std::popcount(col & zm) & 1) ? -1.0 : 1.0;
        mat[row * dim + col] = unit * sign;
    }
    return mat;
}

}  // namespace mbqc
