#include "polematch/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "polematch/rom_core.hpp"

namespace polematch {

namespace {

constexpr double kPredictionBFloor = 1e-12;

PoleResidueROM fetch(const ModelOracle& oracle, double p) {
    if (!oracle.build) fail(Errc::OracleFailure, "model oracle has no build callback");
    PoleResidueROM rom;
    try {
        rom = oracle.build(p);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        fail(Errc::OracleFailure, std::string("model oracle failed at p=") + std::to_string(p) +
                                      ": " + e.what());
    }
    rom.param = p;
    rom = canonicalize(std::move(rom));
    rom.validate();
    return rom;
}

void check_counts(const Repository& repo, const PoleResidueROM& rom) {
    if (repo.size() == 0) return;
    const auto& first = repo.entries.front();
    if (rom.nd() != first.nd() || rom.ns() != first.ns())
        fail(Errc::SizeMismatch,
             "oracle returned inconsistent pole counts at p=" + std::to_string(rom.param));
}

void emit(const BuildLogger& log, const BuildEvent& ev) {
    if (log) log(ev);
}

// Newton divided differences; exact polynomial interpolation through the
// sample points, evaluated at x.
double newton_eval(const std::vector<double>& xs, std::vector<double> ys, double x) {
    const size_t m = xs.size();
    for (size_t level = 1; level < m; ++level)
        for (size_t i = m - 1; i >= level; --i)
            ys[i] = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - level]);
    double acc = ys[m - 1];
    for (size_t i = m - 1; i-- > 0;) acc = acc * (x - xs[i]) + ys[i];
    return acc;
}

// Natural cubic spline second derivatives (Thomas algorithm).
std::vector<double> spline_m(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    std::vector<double> m(n, 0.0);
    if (n < 3) return m;
    std::vector<double> diag(n, 2.0), rhs(n, 0.0), sub(n, 0.0), sup(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
        const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
        sub[i] = hl / (hl + hr);
        sup[i] = hr / (hl + hr);
        rhs[i] = 6.0 / (hl + hr) * ((y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl);
    }
    for (size_t i = 2; i + 1 < n; ++i) {
        const double f = sub[i] / diag[i - 1];
        diag[i] -= f * sup[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    for (size_t i = n - 2; i >= 1; --i) m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
    return m;
}

double spline_eval(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& m, double p) {
    const size_t n = x.size();
    size_t k = 1;
    while (k + 1 < n && p > x[k]) ++k;
    const double h = x[k] - x[k - 1];
    const double a = (x[k] - p) / h, b = (p - x[k - 1]) / h;
    return a * y[k - 1] + b * y[k] +
           ((a * a * a - a) * m[k - 1] + (b * b * b - b) * m[k]) * h * h / 6.0;
}

}  // namespace

void Repository::validate() const {
    if (entries.empty()) fail(Errc::EmptyRepository, "repository has no entries");
    for (const auto& e : entries) e.validate();
    for (size_t i = 1; i < entries.size(); ++i)
        if (!(entries[i - 1].param < entries[i].param))
            fail(Errc::InvalidArgument, "repository parameters must be strictly increasing");
    const auto& f = entries.front();
    for (const auto& e : entries)
        if (e.nd() != f.nd() || e.ns() != f.ns())
            fail(Errc::SizeMismatch, "repository entries have inconsistent pole counts");
    if (high_fidelity < 0 || high_fidelity > size())
        fail(Errc::InvalidArgument, "high-fidelity watermark out of range");
    if (!low_confidence.empty() && low_confidence.size() != entries.size())
        fail(Errc::InvalidArgument, "low-confidence flags out of sync");
}

void AdaptiveConfig::validate() const {
    if (!(p_lower < p_upper)) fail(Errc::InvalidArgument, "p_lower must be below p_upper");
    if (!(tau_e > 0.0)) fail(Errc::InvalidArgument, "tau_e must be positive");
    if (!(u0 > 0.0)) fail(Errc::InvalidArgument, "u0 must be positive");
    if (q < 0) fail(Errc::InvalidArgument, "regression degree must be nonnegative");
    if (predictor_order < 0) fail(Errc::InvalidArgument, "predictor order must be nonnegative");
    if (max_refine_depth < 1) fail(Errc::InvalidArgument, "max_refine_depth must be positive");
    weights.validate();
}

PoleResidueROM ModelOracle::operator()(double p) const { return fetch(*this, p); }

std::string BuildEvent::text() const {
    char buf[160];
    switch (kind) {
        case Kind::Accept:
            std::snprintf(buf, sizeof buf, "accept p=%.12g ref=%s evaluations=%ld", p,
                          reference.c_str(), evaluations);
            break;
        case Kind::Insert:
            std::snprintf(buf, sizeof buf, "insert p=%.12g midpoint_error=%.6e evaluations=%ld", p,
                          midpoint_error, evaluations);
            break;
        case Kind::Fallback:
            std::snprintf(buf, sizeof buf, "fallback p=%.12g low-confidence match stored", p);
            break;
        case Kind::Test:
            std::snprintf(buf, sizeof buf, "test p=%.12g midpoint_error=%.6e %s i_h=%d", p,
                          midpoint_error, passed ? "pass" : "fail", high_fidelity);
            break;
    }
    return buf;
}

PoleResidueROM predict(const Repository& repo, double p_next, int order) {
    if (repo.high_fidelity < 1) fail(Errc::EmptyRepository, "no validated repository entries");
    const int m = std::min(order + 1, repo.high_fidelity);
    const size_t lo = static_cast<size_t>(repo.high_fidelity - m);

    PoleResidueROM out;
    out.param = p_next;
    const auto& last = repo.entries[static_cast<size_t>(repo.high_fidelity - 1)];
    if (m == 1) {
        out.D = last.D;
        out.S = last.S;
        return out;
    }
    std::vector<double> xs(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) xs[static_cast<size_t>(i)] = repo.entries[lo + static_cast<size_t>(i)].param;
    std::vector<double> ys(static_cast<size_t>(m));
    auto fit = [&](auto accessor) {
        for (int i = 0; i < m; ++i) ys[static_cast<size_t>(i)] = accessor(repo.entries[lo + static_cast<size_t>(i)]);
        return newton_eval(xs, ys, p_next);
    };
    out.D.resize(last.nd(), 4);
    for (Eigen::Index r = 0; r < last.nd(); ++r)
        for (Eigen::Index c = 0; c < 4; ++c)
            out.D(r, c) = fit([&](const PoleResidueROM& e) { return e.D(r, c); });
    out.S.resize(last.ns(), 2);
    for (Eigen::Index r = 0; r < last.ns(); ++r)
        for (Eigen::Index c = 0; c < 2; ++c)
            out.S(r, c) = fit([&](const PoleResidueROM& e) { return e.S(r, c); });
    return out;
}

CorrectorResult corrector_step(const Repository& repo, const PoleResidueROM& candidate,
                               const AdaptiveConfig& cfg) {
    if (repo.size() == 0) fail(Errc::EmptyRepository, "corrector needs at least one entry");
    const auto& last = repo.entries.back();
    if (candidate.nd() != last.nd() || candidate.ns() != last.ns())
        fail(Errc::SizeMismatch, "candidate pole counts do not match the repository");

    const MatchOptions opt{cfg.match_budget};
    CorrectorResult out;
    if (repo.size() == 1) {
        out.info = match_mappings(repo.entries.front(), candidate, cfg.weights, opt);
    } else {
        PoleResidueROM pred = predict(repo, candidate.param, cfg.predictor_order);
        // Extrapolated b may have left the half-plane; clamp the matching
        // reference only, predictions are never stored.
        for (Eigen::Index r = 0; r < pred.nd(); ++r)
            pred.D(r, 1) = std::max(pred.D(r, 1), kPredictionBFloor);
        const MatchResult m_last = match_mappings(last, candidate, cfg.weights, opt);
        const MatchResult m_pred = match_mappings(pred, candidate, cfg.weights, opt);
        const double r_last = std::sqrt(m_last.objective_d) + std::sqrt(m_last.objective_s);
        const double r_pred = std::sqrt(m_pred.objective_d) + std::sqrt(m_pred.objective_s);
        out.used_prediction = r_last > r_pred;
        out.info = out.used_prediction ? m_pred : m_last;
    }
    out.rom.D = apply_mapping(out.info.v_d, candidate.D);
    out.rom.S = apply_mapping(out.info.v_s, candidate.S);
    out.rom.param = candidate.param;
    return out;
}

PoleResidueROM interpolate_entries(const std::vector<PoleResidueROM>& entries, double p,
                                   InterpolationScheme scheme) {
    if (entries.empty()) fail(Errc::EmptyRepository, "no entries to interpolate");
    const size_t n = entries.size();
    for (size_t i = 0; i < n; ++i)
        if (p == entries[i].param) return entries[i];
    if (n == 1) fail(Errc::OutOfDomain, "single-entry repository covers a single point");

    PoleResidueROM out;
    out.param = p;
    if (scheme == InterpolationScheme::Linear || n < 3) {
        size_t k = 1;
        while (k + 1 < n && p > entries[k].param) ++k;
        const auto& l = entries[k - 1];
        const auto& r = entries[k];
        const double t = (p - l.param) / (r.param - l.param);
        out.D = (1.0 - t) * l.D + t * r.D;
        out.S = (1.0 - t) * l.S + t * r.S;
        return out;
    }

    std::vector<double> x(n), y(n);
    for (size_t i = 0; i < n; ++i) x[i] = entries[i].param;
    const auto& f = entries.front();
    out.D.resize(f.nd(), 4);
    out.S.resize(f.ns(), 2);
    auto interp_entry = [&](auto accessor) {
        for (size_t i = 0; i < n; ++i) y[i] = accessor(entries[i]);
        return spline_eval(x, y, spline_m(x, y), p);
    };
    for (Eigen::Index r = 0; r < f.nd(); ++r)
        for (Eigen::Index c = 0; c < 4; ++c)
            out.D(r, c) = interp_entry([&](const PoleResidueROM& e) { return e.D(r, c); });
    for (Eigen::Index r = 0; r < f.ns(); ++r)
        for (Eigen::Index c = 0; c < 2; ++c)
            out.S(r, c) = interp_entry([&](const PoleResidueROM& e) { return e.S(r, c); });
    return out;
}

void refine(Repository& repo, const ModelOracle& oracle, const AdaptiveConfig& cfg,
            const BuildLogger& log) {
    if (repo.high_fidelity < 1 || repo.high_fidelity >= repo.size())
        fail(Errc::InvalidArgument, "watermark does not point at an open interval");
    const int ih = repo.high_fidelity;
    const double p_left = repo.param(ih - 1);
    const double p_right = repo.param(ih);
    const double p_t = 0.5 * (p_left + p_right);

    const PoleResidueROM rom_i = interpolate_entries(repo.entries, p_t, cfg.scheme);
    const PoleResidueROM rom_t = fetch(oracle, p_t);
    check_counts(repo, rom_t);
    const double tol = oracle.tolerance ? oracle.tolerance(p_t) : cfg.tau_e;
    const double e = distance(rom_i, rom_t, cfg.weights).relative_error;
    const bool flagged =
        !repo.low_confidence.empty() && repo.low_confidence[static_cast<size_t>(ih)] != 0;
    const bool pass = e < tol && !flagged;

    BuildEvent ev;
    ev.kind = BuildEvent::Kind::Test;
    ev.p = p_t;
    ev.midpoint_error = e;
    ev.passed = pass;
    ev.high_fidelity = ih;
    emit(log, ev);

    if (pass) {
        repo.high_fidelity = ih + 1;
        return;
    }
    if (p_right - p_left < cfg.u0 / std::ldexp(1.0, cfg.max_refine_depth))
        fail(Errc::RefineDepthExceeded,
             "interval [" + std::to_string(p_left) + ", " + std::to_string(p_right) +
                 "] still fails the midpoint test at minimum width");

    // Insert the truth ROM at the midpoint, then re-match everything to its
    // right against it; these matchings run unbudgeted so they can clear
    // low-confidence flags.
    const MatchResult ins =
        match_mappings(repo.entries[static_cast<size_t>(ih - 1)], rom_t, cfg.weights);
    PoleResidueROM matched;
    matched.D = apply_mapping(ins.v_d, rom_t.D);
    matched.S = apply_mapping(ins.v_s, rom_t.S);
    matched.param = p_t;
    repo.entries.insert(repo.entries.begin() + ih, std::move(matched));
    repo.low_confidence.insert(repo.low_confidence.begin() + ih, 0);
    for (size_t j = static_cast<size_t>(ih) + 1; j < repo.entries.size(); ++j) {
        const MatchResult rm =
            match_mappings(repo.entries[static_cast<size_t>(ih)], repo.entries[j], cfg.weights);
        repo.entries[j].D = apply_mapping(rm.v_d, repo.entries[j].D);
        repo.entries[j].S = apply_mapping(rm.v_s, repo.entries[j].S);
        repo.low_confidence[j] = 0;
    }

    BuildEvent iv;
    iv.kind = BuildEvent::Kind::Insert;
    iv.p = p_t;
    iv.midpoint_error = e;
    iv.evaluations = ins.evaluations;
    iv.high_fidelity = repo.high_fidelity;
    emit(log, iv);
}

Repository build_repository(const ModelOracle& oracle, const AdaptiveConfig& cfg,
                            const BuildLogger& log) {
    cfg.validate();
    Repository repo;
    repo.entries.push_back(fetch(oracle, cfg.p_lower));
    repo.low_confidence.push_back(0);
    repo.high_fidelity = 1;

    while (repo.entries.back().param < cfg.p_upper) {
        double p_next = repo.entries.back().param + cfg.u0;
        if (p_next > cfg.p_upper) p_next = cfg.p_upper;

        const PoleResidueROM cand = fetch(oracle, p_next);
        check_counts(repo, cand);
        const CorrectorResult cr = corrector_step(repo, cand, cfg);
        repo.entries.push_back(cr.rom);
        repo.low_confidence.push_back(cr.info.low_confidence ? 1 : 0);

        BuildEvent ev;
        ev.kind = BuildEvent::Kind::Accept;
        ev.p = p_next;
        ev.reference = repo.size() == 2 ? "first" : (cr.used_prediction ? "pred" : "last");
        ev.evaluations = cr.info.evaluations;
        ev.high_fidelity = repo.high_fidelity;
        emit(log, ev);
        if (cr.info.low_confidence) {
            BuildEvent fb;
            fb.kind = BuildEvent::Kind::Fallback;
            fb.p = p_next;
            fb.high_fidelity = repo.high_fidelity;
            emit(log, fb);
        }

        if (cfg.refine)
            while (repo.high_fidelity < repo.size()) refine(repo, oracle, cfg, log);
    }
    repo.validate();
    return repo;
}

}  // namespace polematch
