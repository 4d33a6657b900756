#include "doctest.h"

#include <cmath>

#include "polematch/adaptive.hpp"
#include "polematch/benchmarks.hpp"
#include "polematch/matcher.hpp"
#include "polematch/serialize.hpp"
#include "test_support.hpp"

using namespace polematch;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Two-row toy model with affine pole tracks; exact under linear prediction
// and interpolation.
PoleResidueROM affine_rom(double p) {
    PoleResidueROM rom;
    rom.D.resize(2, 4);
    rom.D << -1.0 + 0.1 * p, 10.0 + 2.0 * p, 1.0, 0.0,
             -2.0 - 0.2 * p, 30.0 - 1.0 * p, 2.0, 0.5;
    rom.S.resize(1, 2);
    rom.S << -5.0 + p, 1.0 + 0.5 * p;
    rom.param = p;
    return rom;
}

ModelOracle affine_oracle() {
    return ModelOracle{[](double p) { return affine_rom(p); }, {}};
}

Repository two_entry_fom_repo() {
    const FomModel model;
    const TruncationConfig cfg{4, 3};
    Repository repo;
    repo.entries.push_back(mor_oracle(model, 0.0, cfg));
    PoleResidueROM second = mor_oracle(model, kPi / 3.0, cfg);
    second = match(repo.entries[0], second, Weights{});
    second.param = kPi / 3.0;
    repo.entries.push_back(second);
    repo.low_confidence.assign(2, 0);
    repo.high_fidelity = 2;
    return repo;
}

}  // namespace

TEST_CASE("predict: constant with a single entry") {
    Repository repo;
    repo.entries.push_back(affine_rom(0.0));
    repo.low_confidence.assign(1, 0);
    repo.high_fidelity = 1;
    const PoleResidueROM pred = predict(repo, 2.5, 1);
    CHECK(pred.D == repo.entries[0].D);
    CHECK(pred.S == repo.entries[0].S);
    CHECK(pred.param == 2.5);

    Repository empty;
    CHECK_THROWS_AS(predict(empty, 0.0, 1), Error);
}

TEST_CASE("predict: linear extrapolation reproduces affine tracks") {
    Repository repo;
    repo.entries = {affine_rom(0.0), affine_rom(0.5)};
    repo.low_confidence.assign(2, 0);
    repo.high_fidelity = 2;
    const PoleResidueROM pred = predict(repo, 2.0, 1);
    const PoleResidueROM exact = affine_rom(2.0);
    CHECK((pred.D - exact.D).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((pred.S - exact.S).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("predict: benchmark pole position is linear in p") {
    const Repository repo = two_entry_fom_repo();
    const double p_next = 2.0 * kPi / 3.0;
    const PoleResidueROM pred = predict(repo, p_next, 1);
    // the track a = 4p - 42 sits in the row holding b = |8p + 200|
    int row = -1;
    for (int i = 0; i < 4; ++i)
        if (std::abs(repo.entries[0].D(i, 1) - 200.0) < 1e-9) row = i;
    REQUIRE(row >= 0);
    CHECK(std::abs(pred.D(row, 0) - (4.0 * p_next - 42.0)) < 1e-8);
}

TEST_CASE("corrector: identical and permuted candidates") {
    Repository repo;
    repo.entries = {affine_rom(0.0)};
    repo.low_confidence.assign(1, 0);
    repo.high_fidelity = 1;
    AdaptiveConfig cfg;
    cfg.p_lower = 0.0;
    cfg.p_upper = 1.0;

    const CorrectorResult same = corrector_step(repo, affine_rom(0.0), cfg);
    CHECK(same.rom.D == repo.entries[0].D);
    CHECK(same.info.objective() == 0.0);

    PoleResidueROM shuffled = affine_rom(0.0);
    shuffled.D.row(0) = affine_rom(0.0).D.row(1);
    shuffled.D.row(1) = affine_rom(0.0).D.row(0);
    const CorrectorResult fixed = corrector_step(repo, shuffled, cfg);
    CHECK(fixed.rom.D == repo.entries[0].D);

    PoleResidueROM wrong_size = affine_rom(0.0);
    wrong_size.S.conservativeResize(0, 2);
    CHECK_THROWS_AS(corrector_step(repo, wrong_size, cfg), Error);
}

TEST_CASE("corrector: prediction wins across the benchmark crossing") {
    // entries straddle nothing yet; the candidate sits past the b3/b4
    // crossing at p = 5
    const FomModel model;
    const TruncationConfig tc{4, 3};
    const Weights w;
    Repository repo;
    repo.entries.push_back(mor_oracle(model, 3.6136, tc));
    PoleResidueROM e2 = match(repo.entries[0], mor_oracle(model, 4.6608, tc), w);
    e2.param = 4.6608;
    repo.entries.push_back(e2);
    repo.low_confidence.assign(2, 0);
    repo.high_fidelity = 2;

    AdaptiveConfig cfg;
    cfg.p_lower = 3.0;
    cfg.p_upper = 6.0;
    const PoleResidueROM cand = mor_oracle(model, 5.708, tc);

    const MatchResult via_last = match_mappings(repo.entries.back(), cand, w);
    const PoleResidueROM pred = predict(repo, 5.708, 1);
    const MatchResult via_pred = match_mappings(pred, cand, w);
    CHECK(via_pred.objective() < via_last.objective());

    const CorrectorResult cr = corrector_step(repo, cand, cfg);
    CHECK(cr.used_prediction);
    // the prediction reference keeps the analytic track assignment
    const auto rows = FomModel::pair_rows(5.708);
    for (int i = 0; i < 4; ++i) {
        double best = 1e300;
        for (int t = 0; t < 4; ++t)
            best = std::min(best, (cr.rom.D.row(i) - rows.row(t)).norm());
        CHECK(best < 1e-9);
    }
}

TEST_CASE("refine: passing interval advances the watermark") {
    AdaptiveConfig cfg;
    cfg.p_lower = 0.0;
    cfg.p_upper = 1.0;
    Repository repo;
    repo.entries = {affine_rom(0.0), affine_rom(1.0)};
    repo.low_confidence.assign(2, 0);
    repo.high_fidelity = 1;
    refine(repo, affine_oracle(), cfg);
    CHECK(repo.high_fidelity == 2);
    CHECK(repo.size() == 2);
}

TEST_CASE("refine: failing interval inserts the midpoint truth ROM") {
    // curvature makes linear interpolation miss; tau forces one insert
    auto curved = [](double p) {
        PoleResidueROM rom = affine_rom(p);
        rom.S(0, 1) = 1.0 + 4.0 * p * p;
        return rom;
    };
    AdaptiveConfig cfg;
    cfg.p_lower = 0.0;
    cfg.p_upper = 1.0;
    cfg.tau_e = 1e-3;
    Repository repo;
    repo.entries = {curved(0.0), curved(1.0)};
    repo.low_confidence.assign(2, 0);
    repo.high_fidelity = 1;
    refine(repo, ModelOracle{curved, {}}, cfg);
    REQUIRE(repo.size() == 3);
    CHECK(repo.param(1) == 0.5);
    CHECK(repo.high_fidelity == 1);
    CHECK((repo.entries[1].S - curved(0.5).S).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("refine: depth guard surfaces the failing interval") {
    // an oracle the interpolant can never approximate: alternating residues
    auto noisy = [](double p) {
        PoleResidueROM rom = affine_rom(p);
        rom.S(0, 1) += std::cos(1e4 * p);
        return rom;
    };
    AdaptiveConfig cfg;
    cfg.p_lower = 0.0;
    cfg.p_upper = 1.0;
    cfg.tau_e = 1e-12;
    cfg.max_refine_depth = 3;
    Repository repo;
    repo.entries = {noisy(0.0), noisy(1.0)};
    repo.low_confidence.assign(2, 0);
    repo.high_fidelity = 1;
    try {
        for (int i = 0; i < 64 && repo.high_fidelity < repo.size(); ++i)
            refine(repo, ModelOracle{noisy, {}}, cfg);
        FAIL("expected RefineDepthExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::RefineDepthExceeded);
        CHECK(std::string(e.what()).find("interval") != std::string::npos);
    }
}

TEST_CASE("build: range narrower than the step clamps to two entries") {
    AdaptiveConfig cfg;
    cfg.p_lower = 0.0;
    cfg.p_upper = 0.25;
    cfg.u0 = 1.0;
    const Repository repo = build_repository(affine_oracle(), cfg);
    CHECK(repo.size() == 2);
    CHECK(repo.param(0) == 0.0);
    CHECK(repo.param(1) == 0.25);
    CHECK(repo.validated());
}

TEST_CASE("build: affine tracks need no refinement inserts") {
    AdaptiveConfig cfg;
    cfg.p_lower = 0.0;
    cfg.p_upper = 2.0;
    cfg.u0 = 0.5;
    const Repository repo = build_repository(affine_oracle(), cfg);
    CHECK(repo.size() == 5);
    CHECK(repo.validated());
    for (int i = 1; i < repo.size(); ++i) CHECK(repo.param(i - 1) < repo.param(i));
}

TEST_CASE("build: deterministic output") {
    AdaptiveConfig cfg;
    cfg.p_lower = 0.0;
    cfg.p_upper = 2.0;
    cfg.u0 = 0.6;
    const Repository a = build_repository(affine_oracle(), cfg);
    const Repository b = build_repository(affine_oracle(), cfg);
    CHECK(to_json(a, {}).dump() == to_json(b, {}).dump());
}

TEST_CASE("build: oracle failures and inconsistent sizes abort") {
    AdaptiveConfig cfg;
    cfg.p_lower = 0.0;
    cfg.p_upper = 1.0;
    cfg.u0 = 0.5;

    ModelOracle throwing{[](double p) -> PoleResidueROM {
        if (p > 0.4) throw std::runtime_error("solver exploded");
        return affine_rom(p);
    }, {}};
    try {
        build_repository(throwing, cfg);
        FAIL("expected OracleFailure");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::OracleFailure);
    }

    ModelOracle shrinking{[](double p) -> PoleResidueROM {
        PoleResidueROM rom = affine_rom(p);
        if (p > 0.4) rom.S.conservativeResize(0, 2);
        return rom;
    }, {}};
    try {
        build_repository(shrinking, cfg);
        FAIL("expected SizeMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::SizeMismatch);
    }
}

TEST_CASE("build: tolerance hook overrides tau_e per test point") {
    // impossible constant tolerance, permissive hook: build must succeed
    AdaptiveConfig cfg;
    cfg.p_lower = 0.0;
    cfg.p_upper = 1.0;
    cfg.u0 = 0.5;
    cfg.tau_e = 1e-300;
    cfg.max_refine_depth = 2;
    ModelOracle oracle = affine_oracle();
    oracle.tolerance = [](double) { return 1e-3; };
    const Repository repo = build_repository(oracle, cfg);
    CHECK(repo.validated());
}

TEST_CASE("build: low-confidence match freezes the watermark and forces an insert") {
    // Track X crosses track Y's b value inside the first step, so the
    // candidate arrives with swapped canonical order; a budget of 2 lets the
    // improving swap through but flags the match as low confidence.
    auto crossing = [](double p) {
        PoleResidueROM rom;
        rom.D.resize(2, 4);
        rom.D << -1.0, 10.0 + 12.0 * p, 1.0, 0.0,
                 -50.0, 20.0, 1.0, 0.0;
        rom.S.resize(0, 2);
        rom.param = p;
        return canonicalize(rom);
    };
    AdaptiveConfig cfg;
    cfg.p_lower = 0.0;
    cfg.p_upper = 1.0;
    cfg.u0 = 1.0;
    cfg.tau_e = 1e-6;

    const Repository plain = build_repository(ModelOracle{crossing, {}}, cfg);
    CHECK(plain.size() == 2);

    cfg.match_budget = 2;
    std::vector<BuildEvent> events;
    const Repository frozen = build_repository(ModelOracle{crossing, {}}, cfg,
                                               [&](const BuildEvent& ev) { events.push_back(ev); });
    CHECK(frozen.size() == 3);  // forced midpoint insert
    CHECK(frozen.validated());
    bool saw_fallback = false, saw_insert = false;
    for (const auto& ev : events) {
        saw_fallback = saw_fallback || ev.kind == BuildEvent::Kind::Fallback;
        saw_insert = saw_insert || ev.kind == BuildEvent::Kind::Insert;
    }
    CHECK(saw_fallback);
    CHECK(saw_insert);
    for (uint8_t f : frozen.low_confidence) CHECK(f == 0);  // cleared by the re-match
}

TEST_CASE("build: watermark never decreases") {
    AdaptiveConfig cfg;
    cfg.p_lower = 0.0;
    cfg.p_upper = 2.0;
    cfg.u0 = 0.5;
    int last = 0;
    bool monotone = true;
    build_repository(affine_oracle(), cfg, [&](const BuildEvent& ev) {
        if (ev.kind == BuildEvent::Kind::Test && ev.passed) {
            if (ev.high_fidelity < last) monotone = false;
            last = ev.high_fidelity;
        }
    });
    CHECK(monotone);
}
