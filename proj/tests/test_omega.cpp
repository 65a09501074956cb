#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "mbqc/json_io.hpp"
#include "mbqc/omega.hpp"
#include "mbqc/sim.hpp"
#include "oracles.hpp"

using namespace mbqc;

namespace {

ResourceState plus_state() {
    ResourceState state;
    state.group = check_group({PauliWord::parse("X")});
    state.outputs = QubitSet::of(1, {0});
    return state;
}

PauliSum expected_sum(std::size_t n, std::initializer_list<std::pair<const char*, Dyadic>> terms) {
    PauliSum sum(n);
    for (const auto& [text, coeff] : terms) {
        sum.add(PauliWord::parse(text), coeff);
    }
    return sum;
}

StabilizerGroup x_group(std::size_t n) {
    std::vector<PauliWord> gens;
    for (std::size_t q = 0; q < n; ++q) {
        gens.push_back(PauliWord::single(n, q, PauliLetter::X));
    }
    return check_group(std::move(gens));
}

// Eigenvalue of an X-string sum on the product state with a -1 X-eigenvalue
// exactly on `minus`: each term contributes coeff * (-1)^{|support & minus|}.
double x_string_eigenvalue(const PauliSum& sum, const BitVec& minus) {
    double value = 0.0;
    for (const auto& [word, c] : sum.terms()) {
        value += c.value() * (word.x_mask().count_and(minus) % 2 == 0 ? 1.0 : -1.0);
    }
    return value;
}

}  // namespace

TEST_SUITE_BEGIN("omega");

TEST_CASE("dyadic arithmetic is exact and normalized") {
    CHECK(Dyadic::pow2(-3).value() == 0.125);
    CHECK(Dyadic::pow2(2).value() == 4.0);
    CHECK((Dyadic::pow2(-2) + Dyadic::pow2(-2)) == Dyadic::pow2(-1));
    CHECK((Dyadic::pow2(-1) * Dyadic::pow2(-2)) == Dyadic::pow2(-3));
    CHECK((Dyadic::pow2(-1) - Dyadic::pow2(-1)).is_zero());
    CHECK(Dyadic::make(6, 3) == Dyadic::make(3, 2));
}

TEST_CASE("averaged operator for the smallest chains has the exact closed form") {
    const PauliSum omega2 = build_omega(cluster_1d(2));
    CHECK(omega2 == expected_sum(2, {{"II", Dyadic::pow2(-1)},
                                     {"XZ", Dyadic::pow2(-2)},
                                     {"YY", Dyadic::pow2(-2)}}));

    const PauliSum omega3 = build_omega(cluster_1d(3));
    CHECK(omega3 == expected_sum(3, {{"III", Dyadic::pow2(-1)},
                                     {"XIX", Dyadic::pow2(-2)},
                                     {"-YXY", Dyadic::pow2(-3)},
                                     {"YYZ", Dyadic::pow2(-3)}}));
}

TEST_CASE("state with no measured qubits gives the stabilizer projector") {
    const PauliSum omega = build_omega(plus_state());
    CHECK(omega == expected_sum(1, {{"I", Dyadic::pow2(-1)}, {"X", Dyadic::pow2(-1)}}));
}

TEST_CASE("enumeration cap errors point to the sampler") {
    CHECK_THROWS_WITH_AS(build_omega(cluster_1d(8), 6), doctest::Contains("sampler"), CapExceeded);
}

TEST_CASE("coefficients are the exact weight powers and sum to one") {
    for (const ResourceState& state :
         {cluster_1d(2), cluster_1d(5), cluster_1d(8), cluster_2d(2, 2), cluster_2d(2, 3),
          cluster_2d(3, 3)}) {
        const PauliSum omega = build_omega(state);
        // The signed-element coefficients are positive and sum to 1; in the
        // folded storage that is the sum of absolute values.
        Dyadic mass = Dyadic::zero();
        for (const auto& [word, c] : omega.terms()) {
            mass = mass + (c.num < 0 ? -c : c);
        }
        CHECK(mass == Dyadic::one());
        const int n_out = static_cast<int>(state.outputs.count());
        CHECK(omega.coeff(PauliWord::identity(state.num_qubits())) == Dyadic::pow2(-n_out));
        const QubitSet measured = state.measured();
        const GroupIndex index(state.group);
        for (const auto& [word, c] : omega.terms()) {
            const int w = static_cast<int>(word.weight_on(measured));
            Dyadic expected = Dyadic::pow2(-n_out - w);
            if (!index.contains(word)) {
                expected = -expected;  // stored word is the group element times -1
                CHECK(index.contains(word.with_phase(2)));
            }
            CHECK(c == expected);
        }
    }
}

TEST_CASE("recursive channel expansion equals direct enumeration exactly") {
    for (const ResourceState& state :
         {cluster_1d(2), cluster_1d(3), cluster_1d(4), cluster_1d(7), cluster_1d(10),
          cluster_2d(2, 2), cluster_2d(2, 3), cluster_2d(3, 3)}) {
        CHECK(build_omega_recursive(state) == build_omega(state));
    }
    CHECK(build_omega_recursive(plus_state()) == build_omega(plus_state()));
}

TEST_CASE("channel expansion from an explicit seed set matches the branch tree") {
    const ResourceState state = cluster_1d(4);
    const auto expanded =
        lambda_expand_signed(state, {PauliWord::identity(4), PauliWord::parse("XIXZ")});
    REQUIRE(expanded.size() == 6);
    CHECK(expanded.at(PauliWord::parse("IIII")) == Dyadic::pow2(-1));
    CHECK(expanded.at(PauliWord::parse("XIXZ")) == Dyadic::pow2(-3));
    CHECK(expanded.at(PauliWord::parse("XIYY")) == Dyadic::pow2(-3));
    CHECK(expanded.at(PauliWord::parse("YXXY")) == Dyadic::pow2(-4));
    CHECK(expanded.at(PauliWord::parse("-YXYZ")) == Dyadic::pow2(-4));
    CHECK(expanded.at(PauliWord::parse("YYIX")) == Dyadic::pow2(-3));
    // These seeds are the full T-subgroup, so this is the whole operator.
    PauliSum as_sum(4);
    for (const auto& [word, c] : expanded) {
        as_sum.add(word, c);
    }
    CHECK(as_sum == build_omega(state));
}

TEST_CASE("fixed-basis operator for the 9-chain with one rotating qubit") {
    const ResourceState state = cluster_1d(9);
    BasisMap basis;
    for (std::size_t q = 0; q + 1 < 9; ++q) {
        basis.mu[q] = q == 4 ? MeasBasis::XY : MeasBasis::X;
    }
    const PauliSum omega = build_omega_fixed(state, basis);
    CHECK(omega == expected_sum(9, {{"IIIIIIIII", Dyadic::pow2(-1)},
                                    {"XIXIXIXIX", Dyadic::pow2(-2)},
                                    {"-XIXIYXXXY", Dyadic::pow2(-2)}}));
}

TEST_CASE("fixed-basis operator for the 3-chain measured in X") {
    const ResourceState state = cluster_1d(3);
    BasisMap basis;
    basis.mu[0] = MeasBasis::X;
    basis.mu[1] = MeasBasis::X;
    const PauliSum omega = build_omega_fixed(state, basis);
    CHECK(omega == expected_sum(3, {{"III", Dyadic::pow2(-1)}, {"XIX", Dyadic::pow2(-1)}}));
}

TEST_CASE("fixed-basis operator with every qubit averaged reduces to the plain one") {
    for (const ResourceState& state : {cluster_1d(4), cluster_2d(2, 2)}) {
        BasisMap basis;
        for (std::size_t q : state.measured().indices()) {
            basis.mu[q] = MeasBasis::XY;
        }
        CHECK(build_omega_fixed(state, basis) == build_omega(state));
    }
}

TEST_CASE("fixed-basis map must cover exactly the measured qubits") {
    const ResourceState state = cluster_1d(3);
    BasisMap partial;
    partial.mu[0] = MeasBasis::X;
    CHECK_THROWS_AS(build_omega_fixed(state, partial), ValidationError);
    BasisMap wrong;
    wrong.mu[0] = MeasBasis::X;
    wrong.mu[2] = MeasBasis::X;  // output qubit
    CHECK_THROWS_AS(build_omega_fixed(state, wrong), ValidationError);
}

TEST_CASE("single-letter channel action") {
    CHECK(exy_action(PauliLetter::I) == std::pair{PauliLetter::I, 1.0});
    CHECK(exy_action(PauliLetter::Z) == std::pair{PauliLetter::Z, 0.0});
    CHECK(exy_action(PauliLetter::X) == std::pair{PauliLetter::X, 0.5});
    CHECK(exy_action(PauliLetter::Y) == std::pair{PauliLetter::Y, 0.5});
}

TEST_CASE("X-string operator base cases") {
    CHECK(omega_tilde_1d(2) ==
          expected_sum(2, {{"XI", Dyadic::pow2(-1)}, {"XX", Dyadic::pow2(-1)}}));
    CHECK(omega_tilde_1d(3) == expected_sum(3, {{"XIX", Dyadic::pow2(-1)},
                                                {"XXX", Dyadic::pow2(-2)},
                                                {"XXI", Dyadic::pow2(-2)}}));
    CHECK_THROWS_AS(omega_tilde_1d(1), ValidationError);
}

TEST_CASE("X-string operator at length four from one recurrence step") {
    const PauliSum tilde4 = omega_tilde_recurrence_step(omega_tilde_1d(3), omega_tilde_1d(2));
    CHECK(tilde4 == expected_sum(4, {{"XXIX", Dyadic::pow2(-2)},
                                     {"XXXX", Dyadic::pow2(-3)},
                                     {"XXXI", Dyadic::pow2(-3)},
                                     {"XIXI", Dyadic::pow2(-2)},
                                     {"XIXX", Dyadic::pow2(-2)}}));
    CHECK(tilde4 == omega_tilde_1d(4));
}

TEST_CASE("CZ conjugation of words matches the dense oracle") {
    const oracle::Matrix cz = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1};
    for (const char* text :
         {"XX", "XY", "YX", "YY", "XI", "IX", "YI", "IY", "ZZ", "XZ", "ZY", "-YY", "II"}) {
        const PauliWord w = PauliWord::parse(text);
        const auto direct = oracle::matmul(cz, oracle::matmul(oracle::dense_word(w), cz));
        CHECK(oracle::max_abs_diff(direct, oracle::dense_word(conjugate_cz(w, 0, 1))) < 1e-12);
    }
    // Three-qubit spot check against explicit matrices.
    const oracle::Matrix cz01 = oracle::kron(cz, oracle::identity(2));
    for (const char* text : {"XXX", "YIX", "-ZYX"}) {
        const PauliWord w = PauliWord::parse(text);
        const auto direct = oracle::matmul(cz01, oracle::matmul(oracle::dense_word(w), cz01));
        CHECK(oracle::max_abs_diff(direct, oracle::dense_word(conjugate_cz(w, 0, 1))) < 1e-12);
    }
}

TEST_CASE("recurrence agrees with conjugating the averaged operator, lengths 2 to 12") {
    for (std::size_t n = 2; n <= 12; ++n) {
        const PauliSum via_conjugation = omega_tilde_from_omega(build_omega(cluster_1d(n)));
        CHECK(via_conjugation == omega_tilde_1d(n));
    }
}

TEST_CASE("X-string operator structure: pure X words, weight coefficients, unit mass") {
    for (std::size_t n : {4u, 7u, 11u}) {
        const PauliSum tilde = omega_tilde_1d(n);
        CHECK(tilde.coefficient_sum() == Dyadic::one());
        for (const auto& [word, c] : tilde.terms()) {
            CHECK(word.z_mask().none());
            CHECK(word.x_mask().get(0));
            QubitSet measured = QubitSet::full(n);
            measured.remove(n - 1);
            CHECK(c == Dyadic::pow2(-static_cast<int>(word.weight_on(measured))));
        }
    }
}

TEST_CASE("flipping the first three X-eigenvalues gives a 1/2 eigenstate") {
    for (std::size_t n = 3; n <= 12; ++n) {
        BitVec minus(n);
        minus.set(0);
        minus.set(1);
        minus.set(2);
        CHECK(x_string_eigenvalue(omega_tilde_1d(n), minus) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("X-string operator spectrum is symmetric about zero") {
    for (std::size_t n : {3u, 6u, 9u}) {
        auto eig = diagonalize_commuting(omega_tilde_1d(n), x_group(n));
        std::vector<double> negated(eig.size());
        for (std::size_t k = 0; k < eig.size(); ++k) {
            negated[k] = -eig[k];
        }
        std::sort(eig.begin(), eig.end());
        std::sort(negated.begin(), negated.end());
        for (std::size_t k = 0; k < eig.size(); ++k) {
            CHECK(eig[k] == doctest::Approx(negated[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("commuting diagonalization reproduces small spectra") {
    SUBCASE("projector-like sum on one qubit") {
        PauliSum sum(1);
        sum.add(PauliWord::parse("I"), Dyadic::pow2(-1));
        sum.add(PauliWord::parse("Z"), Dyadic::pow2(-1));
        StabilizerGroup group = check_group({PauliWord::parse("Z")});
        auto eig = diagonalize_commuting(sum, group);
        std::sort(eig.begin(), eig.end());
        CHECK(eig == std::vector<double>{0.0, 1.0});
    }
    SUBCASE("three-qubit chain, all eight eigenvalues") {
        const ResourceState state = cluster_1d(3);
        auto eig = diagonalize_commuting(build_omega(state), state.group);
        std::sort(eig.begin(), eig.end());
        const std::vector<double> expected = {0.0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75, 1.0};
        REQUIRE(eig.size() == expected.size());
        for (std::size_t k = 0; k < eig.size(); ++k) {
            CHECK(eig[k] == doctest::Approx(expected[k]).epsilon(1e-12));
        }
    }
    SUBCASE("non-member terms are rejected") {
        PauliSum sum(2);
        sum.add(PauliWord::parse("XY"), Dyadic::one());
        CHECK_THROWS_AS(diagonalize_commuting(sum, cluster_1d(2).group), ValidationError);
    }
}

TEST_CASE("diagonalization matches the dense eigensolver") {
    for (const ResourceState& state : {cluster_1d(2), cluster_1d(3), cluster_2d(2, 2)}) {
        const PauliSum omega = build_omega(state);
        auto fast = diagonalize_commuting(omega, state.group);
        std::sort(fast.begin(), fast.end());
        const auto dense = oracle::hermitian_eigenvalues(dense_operator(omega));
        REQUIRE(fast.size() == dense.size());
        for (std::size_t k = 0; k < fast.size(); ++k) {
            CHECK(fast[k] == doctest::Approx(dense[k]).epsilon(1e-8));
        }
    }
}

TEST_CASE("spectral summaries of small chains and grids") {
    const SpectralSummary two = spectral_summary(cluster_1d(2));
    CHECK(two.max_eig == doctest::Approx(1.0));
    CHECK(two.beta == doctest::Approx(0.5));
    CHECK(two.nu == doctest::Approx(0.5));
    CHECK(two.tau == doctest::Approx(0.0));
    CHECK(two.max_multiplicity == 1);

    for (std::size_t n : {3u, 5u, 9u}) {
        const SpectralSummary s = spectral_summary(cluster_1d(n));
        CHECK(s.nu == doctest::Approx(0.25).epsilon(1e-12));
    }
    const SpectralSummary grid = spectral_summary(cluster_2d(2, 3));
    CHECK(grid.nu >= 0.25 - 1e-12);
    CHECK(grid.nu <= 0.5 + 1e-12);
}

TEST_CASE("the averaged operator fixes the ideal vector and kills single excitations") {
    for (const ResourceState& state : {cluster_1d(3), cluster_1d(5), cluster_2d(2, 2)}) {
        const PauliSum omega = build_omega(state);
        const PureState psi = ideal_vector(state);
        const auto fixed = apply_sum(omega, psi);
        for (std::size_t k = 0; k < fixed.size(); ++k) {
            CHECK(std::abs(fixed[k] - psi.amp[k]) < 1e-12);
        }
        for (std::size_t k : state.outputs.indices()) {
            const SignedGroup excited = excited_state(state, k);
            const PureState ex =
                stabilizer_vector(state.num_qubits(), excited.signed_generators());
            const auto killed = apply_sum(omega, ex);
            double norm = 0.0;
            for (const auto& a : killed) {
                norm += std::norm(a);
            }
            CHECK(std::sqrt(norm) < 1e-12);
        }
    }
}

TEST_CASE("walsh transform lengths must be powers of two") {
    std::vector<double> bad(3, 0.0);
    CHECK_THROWS_AS(fwht(bad), ValidationError);
}

TEST_CASE("Pauli sums round trip through their JSON form") {
    for (const PauliSum& sum : {build_omega(cluster_1d(3)), build_omega(cluster_2d(2, 2)),
                                omega_tilde_1d(5)}) {
        CHECK(pauli_sum_from_json(pauli_sum_to_json(sum)) == sum);
    }
}

TEST_SUITE_END();
