#include "polematch/prom.hpp"

#include <cmath>
#include <limits>

#include "polematch/matcher.hpp"

namespace polematch {

namespace {

double shift(const double lo, const double hi, double p) { return (2.0 * p - (lo + hi)) / (hi - lo); }

// Legendre design matrix on the shifted nodes, P_0..P_q columns.
Eigen::MatrixXd legendre_design(const Eigen::VectorXd& t, int q) {
    Eigen::MatrixXd phi(t.size(), q + 1);
    phi.col(0).setOnes();
    if (q >= 1) phi.col(1) = t;
    for (int k = 1; k < q; ++k)
        phi.col(k + 1) =
            ((2.0 * k + 1.0) * t.cwiseProduct(phi.col(k)) - double(k) * phi.col(k - 1)) /
            double(k + 1);
    return phi;
}

// Rows hold the monomial coefficients of P_k(t).
Eigen::MatrixXd legendre_to_monomial(int q) {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(q + 1, q + 1);
    L(0, 0) = 1.0;
    if (q >= 1) L(1, 1) = 1.0;
    for (int k = 1; k < q; ++k) {
        Eigen::VectorXd next = Eigen::VectorXd::Zero(q + 1);
        next.segment(1, q) = (2.0 * k + 1.0) * L.row(k).head(q).transpose();
        next -= double(k) * L.row(k - 1).transpose();
        L.row(k + 1) = next.transpose() / double(k + 1);
    }
    return L;
}

}  // namespace

PoleResidueROM interpolate_at(const Repository& repo, double p, InterpolationScheme scheme) {
    repo.validate();
    if (!repo.validated())
        fail(Errc::InvalidArgument, "repository is not fully certified (i_h < N)");
    if (p < repo.entries.front().param || p > repo.entries.back().param)
        fail(Errc::OutOfDomain, "p=" + std::to_string(p) + " outside the repository range");
    return interpolate_entries(repo.entries, p, scheme);
}

double stability_margin(const PoleResidueROM& rom) {
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < rom.nd(); ++i) m = std::max(m, rom.D(i, 0));
    for (Eigen::Index i = 0; i < rom.ns(); ++i) m = std::max(m, rom.S(i, 0));
    return m;
}

GuardedInterpolation guarded_interpolate(const Repository& repo, double p,
                                         InterpolationScheme preferred) {
    GuardedInterpolation out;
    out.rom = interpolate_at(repo, p, preferred);
    if (preferred == InterpolationScheme::Linear) return out;

    size_t k = 1;
    while (k + 1 < repo.entries.size() && p > repo.entries[k].param) ++k;
    const double left = stability_margin(repo.entries[k - 1]);
    const double right = stability_margin(repo.entries[k]);
    if (stability_margin(out.rom) >= 0.0 && left < 0.0 && right < 0.0) {
        out.rom = interpolate_at(repo, p, InterpolationScheme::Linear);
        out.used_fallback = true;
    }
    return out;
}

RegressedPROM regress(const Repository& repo, int q, RegressionReport* report) {
    repo.validate();
    if (!repo.validated())
        fail(Errc::InvalidArgument,
             "regression requires a fully certified repository (i_h = N)");
    if (q < 0) fail(Errc::InvalidArgument, "regression degree must be nonnegative");
    const int n = repo.size();
    if (n < q + 1)
        fail(Errc::Underdetermined, "need at least q+1 repository entries for degree q");

    RegressedPROM rp;
    rp.q = q;
    rp.p_lower = repo.entries.front().param;
    rp.p_upper = repo.entries.back().param;
    rp.n_d = repo.entries.front().nd();
    rp.n_s = repo.entries.front().ns();

    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) t(i) = shift(rp.p_lower, rp.p_upper, repo.param(i));
    const Eigen::MatrixXd phi = legendre_design(t, q);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
    if (qr.rank() < q + 1)
        fail(Errc::IllConditioned, "regression design matrix is rank deficient");
    const Eigen::MatrixXd to_mono = legendre_to_monomial(q).transpose();

    rp.d_coeffs.resize(rp.n_d * 4, q + 1);
    rp.s_coeffs.resize(rp.n_s * 2, q + 1);
    if (report) {
        report->d_residuals.setZero(rp.n_d * 4);
        report->s_residuals.setZero(rp.n_s * 2);
        report->max_residual = 0.0;
    }
    Eigen::VectorXd y(n);
    auto fit_entry = [&](auto accessor, Eigen::MatrixXd& coeffs, Eigen::Index row,
                         Eigen::VectorXd* res) {
        for (int i = 0; i < n; ++i) y(i) = accessor(repo.entries[static_cast<size_t>(i)]);
        const Eigen::VectorXd c_leg = qr.solve(y);
        coeffs.row(row) = (to_mono * c_leg).transpose();
        const double r = (phi * c_leg - y).cwiseAbs().maxCoeff();
        if (res) (*res)(row) = r;
        if (report) report->max_residual = std::max(report->max_residual, r);
    };
    for (Eigen::Index i = 0; i < rp.n_d; ++i)
        for (Eigen::Index j = 0; j < 4; ++j)
            fit_entry([&](const PoleResidueROM& e) { return e.D(i, j); }, rp.d_coeffs, i * 4 + j,
                      report ? &report->d_residuals : nullptr);
    for (Eigen::Index i = 0; i < rp.n_s; ++i)
        for (Eigen::Index j = 0; j < 2; ++j)
            fit_entry([&](const PoleResidueROM& e) { return e.S(i, j); }, rp.s_coeffs, i * 2 + j,
                      report ? &report->s_residuals : nullptr);
    return rp;
}

PoleResidueROM evaluate_regressed(const RegressedPROM& rp, double p) {
    if (p < rp.p_lower || p > rp.p_upper)
        fail(Errc::OutOfDomain, "p=" + std::to_string(p) + " outside the regression domain");
    const double t = shift(rp.p_lower, rp.p_upper, p);
    auto horner = [&](const Eigen::MatrixXd& coeffs, Eigen::Index row) {
        double acc = coeffs(row, rp.q);
        for (int k = rp.q - 1; k >= 0; --k) acc = acc * t + coeffs(row, k);
        return acc;
    };
    PoleResidueROM out;
    out.param = p;
    out.D.resize(rp.n_d, 4);
    for (Eigen::Index i = 0; i < rp.n_d; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) out.D(i, j) = horner(rp.d_coeffs, i * 4 + j);
    out.S.resize(rp.n_s, 2);
    for (Eigen::Index i = 0; i < rp.n_s; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) out.S(i, j) = horner(rp.s_coeffs, i * 2 + j);
    return out;
}

double regression_disagreement(const Repository& repo, const RegressedPROM& rp, int grid_points,
                               const Weights& w, InterpolationScheme scheme) {
    if (grid_points < 2) fail(Errc::InvalidArgument, "validation grid needs at least 2 points");
    const double lo = repo.entries.front().param;
    const double hi = repo.entries.back().param;
    double worst = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double p = lo + (hi - lo) * double(i) / double(grid_points - 1);
        const PoleResidueROM a = interpolate_at(repo, p, scheme);
        const PoleResidueROM b = evaluate_regressed(rp, p);
        worst = std::max(worst, distance(a, b, w).relative_error);
    }
    return worst;
}

}  // namespace polematch
