#include "doctest.h"

#include <chrono>

#include "polematch/benchmarks.hpp"
#include "polematch/matcher.hpp"
#include "polematch/rom_core.hpp"
#include "test_support.hpp"

using namespace polematch;

namespace {

Eigen::Vector4d unit_d() { return Weights{}.d_columns(); }

PoleResidueROM pair_rom(double a, double b, double c1, double c2) {
    PoleResidueROM rom;
    rom.D.resize(1, 4);
    rom.D << a, b, c1, c2;
    rom.S.resize(0, 2);
    return rom;
}

}  // namespace

TEST_CASE("apply_mapping permutes rows") {
    Eigen::MatrixXd M(2, 3);
    M << 1, 2, 3, 4, 5, 6;
    const Eigen::MatrixXd swapped = apply_mapping({2, 1}, M);
    CHECK(swapped(0, 0) == 4);
    CHECK(swapped(1, 2) == 3);
    CHECK(apply_mapping({1, 2}, M) == M);

    // applying a mapping after its inverse restores the matrix
    std::mt19937 rng(11);
    const Eigen::MatrixXd R = test_support::separated_rows(rng, 5, 4);
    const auto p = test_support::random_permutation(rng, 5);
    MappingVector v(5), v_inv(5);
    for (int i = 0; i < 5; ++i) {
        v[static_cast<size_t>(i)] = p[static_cast<size_t>(i)] + 1;
        v_inv[static_cast<size_t>(p[static_cast<size_t>(i)])] = i + 1;
    }
    CHECK(apply_mapping(v, apply_mapping(v_inv, R)) == R);

    CHECK_THROWS_AS(apply_mapping({1, 1}, M), Error);
}

TEST_CASE("objective values") {
    Eigen::MatrixXd D1(1, 4), D2(1, 4);
    D1 << -1.0, 10.0, 1.0, 0.0;
    D2 << -1.1, 10.2, 1.05, 0.0;
    const Weights w;
    CHECK(objective_d(D1, D1, {1}, w) == 0.0);
    CHECK(objective_d(D1, D2, {1}, w) == doctest::Approx(0.0525));

    // zero position weight: only residue columns matter
    Weights wr;
    wr.position = 0.0;
    Eigen::MatrixXd D3 = D2;
    D3(0, 0) = 40.0;
    D3(0, 1) = 77.0;
    CHECK(objective_d(D1, D2, {1}, wr) == objective_d(D1, D3, {1}, wr));

    Eigen::MatrixXd bad(2, 4);
    CHECK_THROWS_AS(objective_d(D1, bad, {1}, w), Error);
}

TEST_CASE("branch and bound on an already matched pair") {
    std::mt19937 rng(21);
    for (int n : {1, 2, 4, 6}) {
        const Eigen::MatrixXd D1 = test_support::separated_rows(rng, n, 4);
        const BlockMatch m = branch_and_bound(D1, D1, unit_d());
        CHECK(m.mapping == identity_mapping(n));
        CHECK(m.objective == 0.0);
        CHECK(m.evaluations == n * (n - 1));
        CHECK(!m.low_confidence);
    }
}

TEST_CASE("branch and bound recovers a noisy swap") {
    std::mt19937 rng(22);
    std::normal_distribution<double> gauss;
    const Eigen::MatrixXd D1 = test_support::separated_rows(rng, 2, 4);
    Eigen::MatrixXd D2(2, 4);
    D2.row(0) = D1.row(1);
    D2.row(1) = D1.row(0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j) D2(i, j) += 1e-3 * gauss(rng);
    const BlockMatch m = branch_and_bound(D1, D2, unit_d());
    CHECK(m.mapping == MappingVector{2, 1});
    CHECK(m.objective == objective(D1, D2, brute_force(D1, D2, unit_d()), unit_d()));
}

TEST_CASE("branch and bound agrees with brute force on noisy permutations") {
    std::mt19937 rng(23);
    std::normal_distribution<double> gauss;
    for (int n = 2; n <= 6; ++n) {
        for (int trial = 0; trial < 100; ++trial) {
            const Eigen::MatrixXd D1 = test_support::separated_rows(rng, n, 4);
            const auto perm = test_support::random_permutation(rng, n);
            Eigen::MatrixXd D2(n, 4);
            for (int i = 0; i < n; ++i) D2.row(perm[static_cast<size_t>(i)]) = D1.row(i);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < 4; ++j) D2(i, j) += 1e-4 * gauss(rng);
            const BlockMatch bb = branch_and_bound(D1, D2, unit_d());
            const MappingVector bf = brute_force(D1, D2, unit_d());
            CHECK(bb.objective == objective(D1, D2, bf, unit_d()));
            // the optimal mapping undoes the permutation
            for (int i = 0; i < n; ++i)
                CHECK(bb.mapping[static_cast<size_t>(i)] == perm[static_cast<size_t>(i)] + 1);
        }
    }
}

TEST_CASE("scenario-1 evaluation counts") {
    std::mt19937 rng(24);
    std::normal_distribution<double> gauss;
    for (int n : {3, 5, 8, 12}) {
        const Eigen::MatrixXd D1 = test_support::separated_rows(rng, n, 4);
        Eigen::MatrixXd D2 = D1;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < 4; ++j) D2(i, j) += 1e-8 * gauss(rng);
        const BlockMatch m = branch_and_bound(D1, D2, unit_d());
        CHECK(m.mapping == identity_mapping(n));
        CHECK(m.evaluations == n * (n - 1));
    }
}

TEST_CASE("equal-objective swaps are rejected") {
    // duplicate source rows tie every pairing; the identity must survive
    Eigen::MatrixXd D1(2, 4), D2(2, 4);
    D1 << 1, 2, 3, 4, 1, 2, 3, 4;
    D2 = D1;
    const BlockMatch m = branch_and_bound(D1, D2, unit_d());
    CHECK(m.mapping == identity_mapping(2));
    CHECK(brute_force(D1, D2, unit_d()) == identity_mapping(2));  // lexicographic tie-break
}

TEST_CASE("evaluation budget flags low confidence") {
    std::mt19937 rng(25);
    const Eigen::MatrixXd D1 = test_support::separated_rows(rng, 4, 4);
    Eigen::MatrixXd D2(4, 4);
    for (int i = 0; i < 4; ++i) D2.row(3 - i) = D1.row(i);
    MatchOptions opt;
    opt.budget = 2;
    const BlockMatch m = branch_and_bound(D1, D2, unit_d(), opt);
    CHECK(m.low_confidence);
    CHECK(m.evaluations <= 2);
}

TEST_CASE("brute force guard and tie break") {
    Eigen::MatrixXd big(10, 4);
    big.setZero();
    CHECK_THROWS_AS(brute_force(big, big, unit_d()), Error);
}

TEST_CASE("match returns the permuted source") {
    std::mt19937 rng(26);
    const StateSpaceROM sys = test_support::random_stable_system(rng, 7);
    const PoleResidueROM X = to_pole_residue(sys, 0.3);
    const Weights w;

    const PoleResidueROM self = match(X, X, w);
    CHECK(self.D == X.D);
    CHECK(self.S == X.S);

    // matching permutes rows only: the response is untouched
    PoleResidueROM shuffled = X;
    if (X.nd() >= 2) {
        shuffled.D.row(0) = X.D.row(1);
        shuffled.D.row(1) = X.D.row(0);
    }
    const PoleResidueROM back = match(X, shuffled, w);
    CHECK(back.D == X.D);
    const std::complex<double> s{0.5, 2.0};
    CHECK(std::abs(transfer_function(match(X, shuffled, w), s) - transfer_function(shuffled, s)) <
          1e-13 * std::abs(transfer_function(shuffled, s)));

    PoleResidueROM smaller = X;
    smaller.S.conservativeResize(std::max<Eigen::Index>(X.ns() - 1, 0), 2);
    if (smaller.ns() != X.ns()) CHECK_THROWS_AS(match(X, smaller, w), Error);
}

TEST_CASE("matching across the benchmark pole crossing") {
    const FomModel model;
    const TruncationConfig cfg{4, 0};
    const PoleResidueROM a = mor_oracle(model, 4.9, cfg);
    const PoleResidueROM b = mor_oracle(model, 5.1, cfg);
    const Weights w;
    const MatchResult m = match_mappings(a, b, w);
    const MappingVector bf = brute_force(a.D, b.D, w.d_columns());
    CHECK(m.v_d == bf);
    CHECK(m.objective_d == objective_d(a.D, b.D, bf, w));
}

TEST_CASE("objective decouples into block objectives") {
    std::mt19937 rng(27);
    const StateSpaceROM sys = test_support::random_stable_system(rng, 8);
    const PoleResidueROM x = to_pole_residue(sys, 0.0);
    const PoleResidueROM y = to_pole_residue(test_support::random_stable_system(rng, 8), 0.0);
    if (x.nd() == y.nd() && x.ns() == y.ns()) {
        const Weights w;
        const MatchResult m = match_mappings(x, y, w);
        CHECK(m.objective() == m.objective_d + m.objective_s);
        CHECK(m.objective_d == objective_d(x.D, y.D, m.v_d, w));
        CHECK(m.objective_s == objective_s(x.S, y.S, m.v_s, w));
    }
}

TEST_CASE("distance and relative error") {
    const Weights w;
    const PoleResidueROM x = pair_rom(-1.0, 10.0, 1.0, 0.0);

    const RomDistance zero = distance(x, x, w);
    CHECK(zero.distance == 0.0);
    CHECK(zero.relative_error == 0.0);

    const PoleResidueROM y = pair_rom(-1.0, 10.3, 1.0, 0.0);
    const RomDistance d = distance(x, y, w);
    CHECK(d.distance == doctest::Approx(0.3));
    CHECK(d.relative_error == doctest::Approx(0.3 / std::sqrt(102.0)));

    // permuted copies are at distance zero
    std::mt19937 rng(28);
    const PoleResidueROM big = to_pole_residue(test_support::random_stable_system(rng, 9), 0.0);
    PoleResidueROM perm = big;
    if (big.ns() >= 2) {
        perm.S.row(0) = big.S.row(1);
        perm.S.row(1) = big.S.row(0);
    }
    CHECK(distance(big, perm, w).distance == doctest::Approx(0.0));

    PoleResidueROM zero_block = pair_rom(0.0, 0.0, 0.0, 0.0);  // raw matrices, not validated
    try {
        distance(zero_block, zero_block, w);
        FAIL("expected ZeroNorm");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ZeroNorm);
    }
}
