#include "polematch.h"

#include <algorithm>
#include <complex>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "polematch/adaptive.hpp"
#include "polematch/benchmarks.hpp"
#include "polematch/matcher.hpp"
#include "polematch/prom.hpp"
#include "polematch/rom_core.hpp"
#include "polematch/serialize.hpp"

namespace pm = polematch;

struct pm_statespace {
    pm::StateSpaceROM v;
};
struct pm_rom {
    pm::PoleResidueROM v;
};
struct pm_repository {
    pm::Repository v;
};
struct pm_regressed {
    pm::RegressedPROM v;
};

namespace {

thread_local std::string t_last_error;

pm_status map_code(pm::Errc c) {
    switch (c) {
        case pm::Errc::InvalidArgument: return PM_ERR_INVALID_ARGUMENT;
        case pm::Errc::NonSimpleEigenvalue: return PM_ERR_NONSIMPLE_EIGENVALUE;
        case pm::Errc::DefectiveMatrix: return PM_ERR_DEFECTIVE_MATRIX;
        case pm::Errc::PoleEvaluation: return PM_ERR_POLE_EVALUATION;
        case pm::Errc::SingularSystem: return PM_ERR_SINGULAR_SYSTEM;
        case pm::Errc::ShapeMismatch: return PM_ERR_SHAPE_MISMATCH;
        case pm::Errc::SizeMismatch: return PM_ERR_SIZE_MISMATCH;
        case pm::Errc::TooLarge: return PM_ERR_TOO_LARGE;
        case pm::Errc::TooManyPoles: return PM_ERR_TOO_MANY_POLES;
        case pm::Errc::ZeroNorm: return PM_ERR_ZERO_NORM;
        case pm::Errc::EmptyRepository: return PM_ERR_EMPTY_REPOSITORY;
        case pm::Errc::OutOfDomain: return PM_ERR_OUT_OF_DOMAIN;
        case pm::Errc::Underdetermined: return PM_ERR_UNDERDETERMINED;
        case pm::Errc::IllConditioned: return PM_ERR_ILL_CONDITIONED;
        case pm::Errc::RefineDepthExceeded: return PM_ERR_REFINE_DEPTH_EXCEEDED;
        case pm::Errc::OracleFailure: return PM_ERR_ORACLE_FAILURE;
        case pm::Errc::GuardViolation: return PM_ERR_GUARD_VIOLATION;
        case pm::Errc::Io: return PM_ERR_IO;
        case pm::Errc::Parse: return PM_ERR_PARSE;
    }
    return PM_ERR_INTERNAL;
}

template <typename F>
pm_status guarded(F&& fn) noexcept {
    try {
        fn();
        t_last_error.clear();
        return PM_OK;
    } catch (const pm::Error& e) {
        t_last_error = e.what();
        return map_code(e.code());
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return PM_ERR_INTERNAL;
    } catch (...) {
        t_last_error = "unknown error";
        return PM_ERR_INTERNAL;
    }
}

pm::Weights weights_of(double w_p, double w_r) {
    pm::Weights w;
    w.position = w_p;
    w.residue = w_r;
    w.validate();
    return w;
}

pm::InterpolationScheme scheme_of(int scheme) {
    if (scheme == 0) return pm::InterpolationScheme::Linear;
    if (scheme == 1) return pm::InterpolationScheme::CubicSpline;
    pm::fail(pm::Errc::InvalidArgument, "scheme must be 0 (linear) or 1 (cubic spline)");
}

void copy_block(const Eigen::MatrixXd& M, double* out) {
    if (!out) return;
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) out[i * M.cols() + j] = M(i, j);
}

void require(bool cond, const char* what) {
    if (!cond) pm::fail(pm::Errc::InvalidArgument, what);
}

pm::ModelOracle make_oracle(const pm_build_config& cfg, std::vector<double>* manifest_params) {
    if (cfg.model_kind == 0) {
        pm::TruncationConfig tc;
        tc.n_complex_pairs = cfg.n_complex_pairs;
        tc.n_real = cfg.n_real;
        if (tc.n_real < 0) {
            pm::FomModel model;
            tc.n_real = pm::default_n_real(model, cfg.tau_e, cfg.frf_points);
        }
        return pm::ModelOracle{[tc](double p) {
            pm::FomModel model;
            return pm::mor_oracle(model, p, tc);
        }, {}};
    }
    require(cfg.manifest_path != nullptr, "manifest_path required for directory models");
    // Manifest: [{"param": x, "file": "rom.json"}, ...]; paths resolve
    // relative to the manifest location.
    const std::string mpath = cfg.manifest_path;
    const pm::json m = pm::load_json_file(mpath);
    if (!m.is_array() || m.empty())
        pm::fail(pm::Errc::Parse, "manifest must be a nonempty array of {param, file}");
    std::string dir = ".";
    if (const auto slash = mpath.find_last_of('/'); slash != std::string::npos)
        dir = mpath.substr(0, slash);
    std::vector<std::pair<double, std::string>> items;
    for (const auto& e : m) {
        if (!e.contains("param") || !e.contains("file"))
            pm::fail(pm::Errc::Parse, "manifest entries need keys param and file");
        std::string f = e["file"].get<std::string>();
        if (!f.empty() && f.front() != '/') f = dir + "/" + f;
        items.emplace_back(e["param"].get<double>(), std::move(f));
    }
    std::sort(items.begin(), items.end());
    for (size_t i = 1; i < items.size(); ++i)
        if (!(items[i - 1].first < items[i].first))
            pm::fail(pm::Errc::Parse, "manifest parameters must be distinct");
    if (manifest_params) {
        manifest_params->clear();
        for (const auto& [p, f] : items) manifest_params->push_back(p);
    }
    return pm::ModelOracle{[items](double p) -> pm::PoleResidueROM {
        for (const auto& [mp, file] : items)
            if (mp == p) return pm::load_rom_any(file, p);
        pm::fail(pm::Errc::OracleFailure,
                 "external ROM set has no entry at p=" + std::to_string(p));
    }, {}};
}

}  // namespace

extern "C" {

const char* pm_last_error(void) { return t_last_error.c_str(); }

const char* pm_status_name(pm_status status) {
    switch (status) {
        case PM_OK: return "ok";
        case PM_ERR_INVALID_ARGUMENT: return "invalid argument";
        case PM_ERR_NONSIMPLE_EIGENVALUE: return "non-simple eigenvalue";
        case PM_ERR_DEFECTIVE_MATRIX: return "defective matrix";
        case PM_ERR_POLE_EVALUATION: return "evaluation at a pole";
        case PM_ERR_SINGULAR_SYSTEM: return "singular system";
        case PM_ERR_SHAPE_MISMATCH: return "shape mismatch";
        case PM_ERR_SIZE_MISMATCH: return "size mismatch";
        case PM_ERR_TOO_LARGE: return "too large";
        case PM_ERR_TOO_MANY_POLES: return "too many poles";
        case PM_ERR_ZERO_NORM: return "zero norm";
        case PM_ERR_EMPTY_REPOSITORY: return "empty repository";
        case PM_ERR_OUT_OF_DOMAIN: return "out of domain";
        case PM_ERR_UNDERDETERMINED: return "underdetermined";
        case PM_ERR_ILL_CONDITIONED: return "ill conditioned";
        case PM_ERR_REFINE_DEPTH_EXCEEDED: return "refinement depth exceeded";
        case PM_ERR_ORACLE_FAILURE: return "oracle failure";
        case PM_ERR_GUARD_VIOLATION: return "guard violation";
        case PM_ERR_IO: return "i/o error";
        case PM_ERR_PARSE: return "parse error";
        case PM_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char* pm_version(void) { return "0.1.0"; }

pm_status pm_statespace_create(const double* A, const double* B, const double* C, int k,
                               pm_statespace** out) {
    return guarded([&] {
        require(A && B && C && out && k > 0, "null input");
        auto h = std::make_unique<pm_statespace>();
        h->v.A = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                 Eigen::RowMajor>>(A, k, k);
        h->v.B = Eigen::Map<const Eigen::VectorXd>(B, k);
        h->v.C = Eigen::Map<const Eigen::RowVectorXd>(C, k);
        h->v.validate();
        *out = h.release();
    });
}

pm_status pm_statespace_load(const char* path, pm_statespace** out) {
    return guarded([&] {
        require(path && out, "null input");
        auto h = std::make_unique<pm_statespace>();
        h->v = pm::statespace_from_json(pm::load_json_file(path));
        *out = h.release();
    });
}

pm_status pm_statespace_save(const pm_statespace* ss, const char* path) {
    return guarded([&] {
        require(ss && path, "null input");
        pm::save_json_file(pm::to_json(ss->v), path);
    });
}

pm_status pm_statespace_transfer(const pm_statespace* ss, double s_re, double s_im, double* h_re,
                                 double* h_im) {
    return guarded([&] {
        require(ss && h_re && h_im, "null input");
        const auto h = pm::state_space_transfer(ss->v, {s_re, s_im});
        *h_re = h.real();
        *h_im = h.imag();
    });
}

pm_status pm_statespace_to_rom(const pm_statespace* ss, double param, pm_rom** out) {
    return guarded([&] {
        require(ss && out, "null input");
        auto h = std::make_unique<pm_rom>();
        h->v = pm::to_pole_residue(ss->v, param);
        *out = h.release();
    });
}

void pm_statespace_free(pm_statespace* ss) { delete ss; }

pm_status pm_rom_create(double param, const double* D, int n_d, const double* S, int n_s,
                        pm_rom** out) {
    return guarded([&] {
        require(out && n_d >= 0 && n_s >= 0, "null input");
        require(n_d == 0 || D != nullptr, "D data required");
        require(n_s == 0 || S != nullptr, "S data required");
        auto h = std::make_unique<pm_rom>();
        h->v.param = param;
        h->v.D.resize(n_d, 4);
        for (int i = 0; i < n_d; ++i)
            for (int j = 0; j < 4; ++j) h->v.D(i, j) = D[i * 4 + j];
        h->v.S.resize(n_s, 2);
        for (int i = 0; i < n_s; ++i)
            for (int j = 0; j < 2; ++j) h->v.S(i, j) = S[i * 2 + j];
        h->v.validate();
        *out = h.release();
    });
}

pm_status pm_rom_load(const char* path, pm_rom** out) {
    return guarded([&] {
        require(path && out, "null input");
        auto h = std::make_unique<pm_rom>();
        h->v = pm::load_rom_any(path, 0.0);
        *out = h.release();
    });
}

pm_status pm_rom_save(const pm_rom* rom, const char* path) {
    return guarded([&] {
        require(rom && path, "null input");
        pm::save_json_file(pm::to_json(rom->v), path);
    });
}

int pm_rom_nd(const pm_rom* rom) { return rom ? static_cast<int>(rom->v.nd()) : -1; }
int pm_rom_ns(const pm_rom* rom) { return rom ? static_cast<int>(rom->v.ns()) : -1; }
double pm_rom_param(const pm_rom* rom) { return rom ? rom->v.param : 0.0; }

pm_status pm_rom_data(const pm_rom* rom, double* D, double* S) {
    return guarded([&] {
        require(rom != nullptr, "null input");
        copy_block(rom->v.D, D);
        copy_block(rom->v.S, S);
    });
}

pm_status pm_rom_transfer(const pm_rom* rom, double s_re, double s_im, double* h_re, double* h_im) {
    return guarded([&] {
        require(rom && h_re && h_im, "null input");
        const auto h = pm::transfer_function(rom->v, {s_re, s_im});
        *h_re = h.real();
        *h_im = h.imag();
    });
}

double pm_rom_stability_margin(const pm_rom* rom) {
    return rom ? pm::stability_margin(rom->v) : 0.0;
}

void pm_rom_free(pm_rom* rom) { delete rom; }

pm_status pm_match(const pm_rom* target, const pm_rom* source, double w_p, double w_r, long budget,
                   pm_rom** matched, int* v_d, int* v_s, pm_match_stats* stats) {
    return guarded([&] {
        require(target && source, "null input");
        const pm::MatchOptions opt{budget};
        const pm::MatchResult m =
            pm::match_mappings(target->v, source->v, weights_of(w_p, w_r), opt);
        if (v_d)
            for (size_t i = 0; i < m.v_d.size(); ++i) v_d[i] = m.v_d[i];
        if (v_s)
            for (size_t i = 0; i < m.v_s.size(); ++i) v_s[i] = m.v_s[i];
        if (stats) {
            stats->objective = m.objective();
            stats->objective_d = m.objective_d;
            stats->objective_s = m.objective_s;
            stats->evaluations = m.evaluations;
            stats->low_confidence = m.low_confidence ? 1 : 0;
        }
        if (matched) {
            auto h = std::make_unique<pm_rom>();
            h->v.D = pm::apply_mapping(m.v_d, source->v.D);
            h->v.S = pm::apply_mapping(m.v_s, source->v.S);
            h->v.param = source->v.param;
            *matched = h.release();
        }
    });
}

pm_status pm_distance(const pm_rom* a, const pm_rom* b, double w_p, double w_r, double* dist,
                      double* rel_err) {
    return guarded([&] {
        require(a && b, "null input");
        const pm::RomDistance d = pm::distance(a->v, b->v, weights_of(w_p, w_r));
        if (dist) *dist = d.distance;
        if (rel_err) *rel_err = d.relative_error;
    });
}

void pm_build_config_defaults(pm_build_config* cfg) {
    if (!cfg) return;
    std::memset(cfg, 0, sizeof *cfg);
    cfg->model_kind = 0;
    cfg->manifest_path = nullptr;
    cfg->p_lower = -10.0;
    cfg->p_upper = 10.0;
    cfg->u0 = 1.0471975511965976;  /* pi/3 */
    cfg->tau_e = 1e-3;
    cfg->q = 5;
    cfg->predictor_order = 1;
    cfg->max_refine_depth = 12;
    cfg->w_p = 1.0;
    cfg->w_r = 1.0;
    cfg->scheme = 0;
    cfg->refine = 1;
    cfg->match_budget = 0;
    cfg->n_complex_pairs = 4;
    cfg->n_real = -1;
    cfg->frf_points = 2000;
}

pm_status pm_repository_build(const pm_build_config* cfg, pm_log_fn log, void* user,
                              pm_repository** out) {
    return guarded([&] {
        require(cfg && out, "null input");
        pm::AdaptiveConfig acfg;
        acfg.p_lower = cfg->p_lower;
        acfg.p_upper = cfg->p_upper;
        acfg.u0 = cfg->u0;
        acfg.tau_e = cfg->tau_e;
        acfg.q = cfg->q;
        acfg.predictor_order = cfg->predictor_order;
        acfg.max_refine_depth = cfg->max_refine_depth;
        acfg.weights = weights_of(cfg->w_p, cfg->w_r);
        acfg.scheme = scheme_of(cfg->scheme);
        acfg.refine = cfg->refine != 0;
        acfg.match_budget = cfg->match_budget;

        pm::BuildLogger logger;
        if (log)
            logger = [log, user](const pm::BuildEvent& ev) { log(ev.text().c_str(), user); };

        auto h = std::make_unique<pm_repository>();
        if (cfg->model_kind == 0) {
            const pm::ModelOracle oracle = make_oracle(*cfg, nullptr);
            h->v = pm::build_repository(oracle, acfg, logger);
        } else {
            // External ROM sets cannot serve midpoint requests, so the build
            // walks every manifest point through the predictor-corrector and
            // skips certification.
            std::vector<double> params;
            const pm::ModelOracle oracle = make_oracle(*cfg, &params);
            if (log) {
                if (params.size() == 1)
                    log("warning: single external ROM; no refinement possible", user);
                else if (acfg.refine)
                    log("warning: external ROM set; refinement unavailable, walking manifest",
                        user);
            }
            pm::Repository repo;
            for (double p : params) {
                pm::PoleResidueROM cand = oracle(p);
                if (repo.entries.empty()) {
                    repo.entries.push_back(std::move(cand));
                    repo.low_confidence.push_back(0);
                    repo.high_fidelity = 1;
                    continue;
                }
                const pm::CorrectorResult cr = pm::corrector_step(repo, cand, acfg);
                repo.entries.push_back(cr.rom);
                repo.low_confidence.push_back(cr.info.low_confidence ? 1 : 0);
                repo.high_fidelity = repo.size();
                if (log) {
                    pm::BuildEvent ev;
                    ev.kind = pm::BuildEvent::Kind::Accept;
                    ev.p = p;
                    ev.reference = repo.size() == 2 ? "first" : (cr.used_prediction ? "pred" : "last");
                    ev.evaluations = cr.info.evaluations;
                    log(ev.text().c_str(), user);
                }
            }
            repo.validate();
            h->v = std::move(repo);
        }
        *out = h.release();
    });
}

pm_status pm_repository_load(const char* path, pm_repository** out) {
    return guarded([&] {
        require(path && out, "null input");
        auto h = std::make_unique<pm_repository>();
        h->v = pm::repository_from_json(pm::load_json_file(path), nullptr);
        *out = h.release();
    });
}

pm_status pm_repository_save(const pm_repository* repo, const char* config_json,
                             const char* path) {
    return guarded([&] {
        require(repo && path, "null input");
        pm::json cfg = pm::json::object();
        if (config_json && *config_json) {
            try {
                cfg = pm::json::parse(config_json);
            } catch (const std::exception& e) {
                pm::fail(pm::Errc::Parse, std::string("config echo: ") + e.what());
            }
        }
        pm::save_json_file(pm::to_json(repo->v, cfg), path);
    });
}

int pm_repository_size(const pm_repository* repo) { return repo ? repo->v.size() : -1; }

int pm_repository_high_fidelity(const pm_repository* repo) {
    return repo ? repo->v.high_fidelity : -1;
}

pm_status pm_repository_set_high_fidelity(pm_repository* repo, int i_h) {
    return guarded([&] {
        require(repo != nullptr, "null input");
        require(i_h >= 0 && i_h <= repo->v.size(), "watermark out of range");
        repo->v.high_fidelity = i_h;
    });
}

double pm_repository_param(const pm_repository* repo, int index) {
    if (!repo || index < 0 || index >= repo->v.size()) return 0.0;
    return repo->v.param(index);
}

pm_status pm_repository_rom(const pm_repository* repo, int index, pm_rom** out) {
    return guarded([&] {
        require(repo && out, "null input");
        require(index >= 0 && index < repo->v.size(), "index out of range");
        auto h = std::make_unique<pm_rom>();
        h->v = repo->v.entries[static_cast<size_t>(index)];
        *out = h.release();
    });
}

pm_status pm_repository_interpolate(const pm_repository* repo, double p, int scheme,
                                    pm_rom** out) {
    return guarded([&] {
        require(repo && out, "null input");
        auto h = std::make_unique<pm_rom>();
        h->v = pm::interpolate_at(repo->v, p, scheme_of(scheme));
        *out = h.release();
    });
}

pm_status pm_repository_interpolate_guarded(const pm_repository* repo, double p, int scheme,
                                            int* used_fallback, pm_rom** out) {
    return guarded([&] {
        require(repo && out, "null input");
        const pm::GuardedInterpolation g =
            pm::guarded_interpolate(repo->v, p, scheme_of(scheme));
        if (used_fallback) *used_fallback = g.used_fallback ? 1 : 0;
        auto h = std::make_unique<pm_rom>();
        h->v = g.rom;
        *out = h.release();
    });
}

pm_status pm_repository_predict(const pm_repository* repo, double p, int order, pm_rom** out) {
    return guarded([&] {
        require(repo && out, "null input");
        auto h = std::make_unique<pm_rom>();
        h->v = pm::predict(repo->v, p, order);
        *out = h.release();
    });
}

void pm_repository_free(pm_repository* repo) { delete repo; }

pm_status pm_regress(const pm_repository* repo, int q, pm_regressed** out, double* max_residual) {
    return guarded([&] {
        require(repo && out, "null input");
        pm::RegressionReport report;
        auto h = std::make_unique<pm_regressed>();
        h->v = pm::regress(repo->v, q, &report);
        if (max_residual) *max_residual = report.max_residual;
        *out = h.release();
    });
}

pm_status pm_regressed_load(const char* path, pm_regressed** out) {
    return guarded([&] {
        require(path && out, "null input");
        auto h = std::make_unique<pm_regressed>();
        h->v = pm::regressed_from_json(pm::load_json_file(path));
        *out = h.release();
    });
}

pm_status pm_regressed_save(const pm_regressed* rp, const char* path) {
    return guarded([&] {
        require(rp && path, "null input");
        pm::save_json_file(pm::to_json(rp->v), path);
    });
}

int pm_regressed_q(const pm_regressed* rp) { return rp ? rp->v.q : -1; }

pm_status pm_regressed_domain(const pm_regressed* rp, double* p_lower, double* p_upper) {
    return guarded([&] {
        require(rp != nullptr, "null input");
        if (p_lower) *p_lower = rp->v.p_lower;
        if (p_upper) *p_upper = rp->v.p_upper;
    });
}

long pm_regressed_coefficient_count(const pm_regressed* rp) {
    if (!rp) return -1;
    return static_cast<long>(rp->v.d_coeffs.size() + rp->v.s_coeffs.size());
}

pm_status pm_regressed_eval(const pm_regressed* rp, double p, pm_rom** out) {
    return guarded([&] {
        require(rp && out, "null input");
        auto h = std::make_unique<pm_rom>();
        h->v = pm::evaluate_regressed(rp->v, p);
        *out = h.release();
    });
}

pm_status pm_regression_disagreement(const pm_repository* repo, const pm_regressed* rp,
                                     int grid_points, double w_p, double w_r, int scheme,
                                     double* max_e) {
    return guarded([&] {
        require(repo && rp && max_e, "null input");
        *max_e = pm::regression_disagreement(repo->v, rp->v, grid_points, weights_of(w_p, w_r),
                                             scheme_of(scheme));
    });
}

void pm_regressed_free(pm_regressed* rp) { delete rp; }

pm_status pm_fom_transfer(double p, double s_re, double s_im, double* h_re, double* h_im) {
    return guarded([&] {
        require(h_re && h_im, "null input");
        pm::FomModel model;
        const auto h = model.transfer(p, {s_re, s_im});
        *h_re = h.real();
        *h_im = h.imag();
    });
}

pm_status pm_fom_oracle(double p, int n_complex_pairs, int n_real, pm_rom** out) {
    return guarded([&] {
        require(out != nullptr, "null input");
        pm::FomModel model;
        auto h = std::make_unique<pm_rom>();
        h->v = pm::mor_oracle(model, p, {n_complex_pairs, n_real});
        *out = h.release();
    });
}

pm_status pm_fom_default_n_real(double tau_e, int grid_points, int* n_real) {
    return guarded([&] {
        require(n_real != nullptr, "null input");
        pm::FomModel model;
        *n_real = pm::default_n_real(model, tau_e, grid_points);
    });
}

pm_status pm_frf_error_fom(const pm_rom* rom, double p, int grid_points, double* error) {
    return guarded([&] {
        require(rom && error, "null input");
        pm::FomModel model;
        *error = pm::frf_relative_error(model, p, rom->v, grid_points);
    });
}

pm_status pm_frf_error_table(const pm_rom* rom, const double* omega, const double* h_re,
                             const double* h_im, int n, double* error) {
    return guarded([&] {
        require(rom && omega && h_re && h_im && error && n >= 2, "null input");
        std::vector<double> w(omega, omega + n);
        std::vector<std::complex<double>> truth(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) truth[static_cast<size_t>(k)] = {h_re[k], h_im[k]};
        *error = pm::frf_relative_error(w, truth, rom->v);
    });
}

}  // extern "C"
