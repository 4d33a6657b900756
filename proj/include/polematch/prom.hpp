#pragma once

#include "polematch/adaptive.hpp"
#include "polematch/types.hpp"

namespace polematch {

/// Online-phase interpolation at p in [p_1, p_N]; node hits reproduce the
/// stored entry exactly. Requires a fully certified repository.
PoleResidueROM interpolate_at(const Repository& repo, double p, InterpolationScheme scheme);

/// max over all poles of Re(pole); negative iff asymptotically stable.
double stability_margin(const PoleResidueROM& rom);

struct GuardedInterpolation {
    PoleResidueROM rom;
    bool used_fallback = false;
};

/// Evaluates with the preferred scheme; if the result leaves the stable
/// half-plane while both bracketing repository entries are stable, re-evaluates
/// with linear interpolation (which preserves stability) and flags it.
GuardedInterpolation guarded_interpolate(const Repository& repo, double p,
                                         InterpolationScheme preferred);

/// Per-entry polynomial coefficients over the shifted variable
/// t = (2p - (pL + pU)) / (pU - pL) in [-1, 1], monomial basis, Horner-ready.
/// Storage is exactly (q+1)(4 n_d + 2 n_s) scalars.
struct RegressedPROM {
    int q = 0;
    double p_lower = 0.0;
    double p_upper = 0.0;
    Eigen::Index n_d = 0;
    Eigen::Index n_s = 0;
    Eigen::MatrixXd d_coeffs;  // (n_d * 4) x (q+1), row = entry (i, j) at i*4+j
    Eigen::MatrixXd s_coeffs;  // (n_s * 2) x (q+1)
};

struct RegressionReport {
    double max_residual = 0.0;        // worst per-entry max-abs fit residual
    Eigen::VectorXd d_residuals;      // per D entry
    Eigen::VectorXd s_residuals;      // per S entry
};

/// Least-squares fit of every D/S entry by a degree-q polynomial over the
/// repository nodes (orthogonal Legendre basis internally).
RegressedPROM regress(const Repository& repo, int q, RegressionReport* report = nullptr);

PoleResidueROM evaluate_regressed(const RegressedPROM& rp, double p);

/// max over a uniform validation grid of e(interpolated, regressed).
double regression_disagreement(const Repository& repo, const RegressedPROM& rp, int grid_points,
                               const Weights& w, InterpolationScheme scheme);

}  // namespace polematch
