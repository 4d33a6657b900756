#pragma once

#include <functional>
#include <string>
#include <vector>

#include "polematch/matcher.hpp"
#include "polematch/types.hpp"

namespace polematch {

enum class InterpolationScheme { Linear, CubicSpline };

/// Ordered sequence of pole-matched ROMs at increasing parameter values.
/// Entries [0, high_fidelity) are certified by the refinement test; during a
/// build the watermark trails the newest entries until their midpoint tests
/// pass.
struct Repository {
    std::vector<PoleResidueROM> entries;  // entries[i].param strictly increasing
    int high_fidelity = 0;
    std::vector<uint8_t> low_confidence;  // per-entry matcher budget flag

    int size() const { return static_cast<int>(entries.size()); }
    double param(int i) const { return entries[static_cast<size_t>(i)].param; }
    bool validated() const { return high_fidelity == size() && size() > 0; }
    void validate() const;
};

struct AdaptiveConfig {
    double p_lower = 0.0;
    double p_upper = 1.0;
    double u0 = 1.0;                // initial step length
    double tau_e = 1e-3;            // midpoint error tolerance
    int q = 5;                      // regression degree (post-processing)
    int predictor_order = 1;        // extrapolation order (1 = linear)
    int max_refine_depth = 12;      // minimum interval width u0 / 2^depth
    Weights weights{};
    InterpolationScheme scheme = InterpolationScheme::Linear;
    bool refine = true;
    long match_budget = 0;          // corrector-phase matcher budget; 0 -> 50 n^2

    void validate() const;
};

/// Builds a fixed-order ROM at any requested parameter value. An optional
/// tolerance hook replaces the constant tau_e per test point.
struct ModelOracle {
    std::function<PoleResidueROM(double)> build;
    std::function<double(double)> tolerance;  // optional

    PoleResidueROM operator()(double p) const;
};

struct BuildEvent {
    enum class Kind { Accept, Insert, Fallback, Test };
    Kind kind = Kind::Accept;
    double p = 0.0;
    std::string reference;       // accept: "first" | "last" | "pred"
    long evaluations = 0;
    double midpoint_error = -1;  // test/insert events
    bool passed = false;         // test events
    int high_fidelity = 0;
    std::string text() const;
};

using BuildLogger = std::function<void(const BuildEvent&)>;

/// Entrywise polynomial extrapolation through the last min(order+1, i_h)
/// certified entries. With one certified entry the prediction is constant.
/// The result is raw extrapolation; b entries may leave the half-plane.
PoleResidueROM predict(const Repository& repo, double p_next, int order);

struct CorrectorResult {
    PoleResidueROM rom;
    bool used_prediction = false;
    MatchResult info;
};

/// Matches a fresh candidate against whichever reference is closer in r: the
/// last repository entry or the prediction at the candidate's parameter.
/// With a single entry the candidate is always matched against it.
CorrectorResult corrector_step(const Repository& repo, const PoleResidueROM& candidate,
                               const AdaptiveConfig& cfg);

/// One refinement step for the interval (p_{i_h}, p_{i_h+1}): midpoint test
/// against a fresh truth ROM; on success the watermark advances, otherwise
/// the matched truth ROM is inserted at the midpoint and subsequent entries
/// are re-matched against it.
void refine(Repository& repo, const ModelOracle& oracle, const AdaptiveConfig& cfg,
            const BuildLogger& log = {});

/// Algorithm: predictor-corrector stepping over [p_lower, p_upper] with
/// midpoint-test refinement until every interval is certified.
Repository build_repository(const ModelOracle& oracle, const AdaptiveConfig& cfg,
                            const BuildLogger& log = {});

/// Interpolation over an explicit entry sequence (no watermark check); the
/// workhorse behind both the refinement test and the online phase.
PoleResidueROM interpolate_entries(const std::vector<PoleResidueROM>& entries, double p,
                                   InterpolationScheme scheme);

}  // namespace polematch
