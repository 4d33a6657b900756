// Command-line front end for the pole-matching pROM pipeline. Talks to the
// library exclusively through the C API.
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polematch.h"

namespace {

using ordered_json = nlohmann::ordered_json;

int g_log_level = 1;  // 0 quiet, 1 info, 2 debug

void log_line(int level, const std::string& line) {
    if (level <= g_log_level) std::fprintf(stderr, "%s\n", line.c_str());
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

[[noreturn]] void die(int code, const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    std::exit(code);
}

int exit_code_for(pm_status st) {
    switch (st) {
        case PM_ERR_REFINE_DEPTH_EXCEEDED: return 4;
        case PM_ERR_GUARD_VIOLATION: return 5;
        case PM_ERR_INVALID_ARGUMENT:
        case PM_ERR_PARSE: return 2;
        default: return 3;
    }
}

void check(pm_status st, const std::string& context) {
    if (st != PM_OK)
        die(exit_code_for(st),
            context + ": " + pm_status_name(st) + " (" + pm_last_error() + ")");
}

// ---- run configuration --------------------------------------------------

struct RunConfig {
    std::string model = "builtin-fom";  // builtin-fom | rom-directory
    std::string manifest;
    double p_lower = -10.0;
    double p_upper = 10.0;
    double u0 = 1.0471975511965976;  // pi/3
    double tau_e = 1e-3;
    int q = 5;
    int predictor_order = 1;
    int max_refine_depth = 12;
    double w_p = 1.0;
    double w_r = 1.0;
    std::string scheme = "linear";  // linear | cubic-spline
    bool refine = true;
    long match_budget = 0;
    int n_complex_pairs = 4;
    int n_real = -1;  // auto
    int frf_points = 2000;
    int sweep_points = 201;
    int validation_points = 101;
    double guard_multiple = 2.0;
    long seed = 0;  // reserved for randomized tooling; the pipeline is deterministic
    std::string out_dir = "out";
};

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "model",          "manifest",        "p_lower",           "p_upper",
        "u0",             "tau_e",           "q",                 "predictor_order",
        "max_refine_depth", "w_p",           "w_r",               "scheme",
        "refine",         "match_budget",    "n_complex_pairs",   "n_real",
        "frf_points",     "sweep_points",    "validation_points", "guard_multiple",
        "seed",           "out_dir"};
    return keys;
}

std::string config_get(const RunConfig& c, const std::string& key) {
    if (key == "model") return c.model;
    if (key == "manifest") return c.manifest;
    if (key == "p_lower") return fmt17(c.p_lower);
    if (key == "p_upper") return fmt17(c.p_upper);
    if (key == "u0") return fmt17(c.u0);
    if (key == "tau_e") return fmt17(c.tau_e);
    if (key == "q") return std::to_string(c.q);
    if (key == "predictor_order") return std::to_string(c.predictor_order);
    if (key == "max_refine_depth") return std::to_string(c.max_refine_depth);
    if (key == "w_p") return fmt17(c.w_p);
    if (key == "w_r") return fmt17(c.w_r);
    if (key == "scheme") return c.scheme;
    if (key == "refine") return c.refine ? "true" : "false";
    if (key == "match_budget") return std::to_string(c.match_budget);
    if (key == "n_complex_pairs") return std::to_string(c.n_complex_pairs);
    if (key == "n_real") return std::to_string(c.n_real);
    if (key == "frf_points") return std::to_string(c.frf_points);
    if (key == "sweep_points") return std::to_string(c.sweep_points);
    if (key == "validation_points") return std::to_string(c.validation_points);
    if (key == "guard_multiple") return fmt17(c.guard_multiple);
    if (key == "seed") return std::to_string(c.seed);
    if (key == "out_dir") return c.out_dir;
    die(2, "unknown config key " + key);
}

void config_set(RunConfig& c, const std::string& key, const std::string& value) {
    auto as_double = [&] { return std::stod(value); };
    auto as_int = [&] { return std::stoi(value); };
    auto as_long = [&] { return std::stol(value); };
    auto as_bool = [&]() -> bool {
        if (value == "true" || value == "1") return true;
        if (value == "false" || value == "0") return false;
        die(2, "boolean config value expected for " + key + ", got '" + value + "'");
    };
    try {
        if (key == "model") c.model = value;
        else if (key == "manifest") c.manifest = value;
        else if (key == "p_lower") c.p_lower = as_double();
        else if (key == "p_upper") c.p_upper = as_double();
        else if (key == "u0") c.u0 = as_double();
        else if (key == "tau_e") c.tau_e = as_double();
        else if (key == "q") c.q = as_int();
        else if (key == "predictor_order") c.predictor_order = as_int();
        else if (key == "max_refine_depth") c.max_refine_depth = as_int();
        else if (key == "w_p") c.w_p = as_double();
        else if (key == "w_r") c.w_r = as_double();
        else if (key == "scheme") c.scheme = value;
        else if (key == "refine") c.refine = as_bool();
        else if (key == "match_budget") c.match_budget = as_long();
        else if (key == "n_complex_pairs") c.n_complex_pairs = as_int();
        else if (key == "n_real") c.n_real = as_int();
        else if (key == "frf_points") c.frf_points = as_int();
        else if (key == "sweep_points") c.sweep_points = as_int();
        else if (key == "validation_points") c.validation_points = as_int();
        else if (key == "guard_multiple") c.guard_multiple = as_double();
        else if (key == "seed") c.seed = as_long();
        else if (key == "out_dir") c.out_dir = value;
        else die(2, "unknown config key " + key);
    } catch (const std::invalid_argument&) {
        die(2, "cannot parse config value for " + key + ": '" + value + "'");
    } catch (const std::out_of_range&) {
        die(2, "config value out of range for " + key + ": '" + value + "'");
    }
}

RunConfig load_config(const std::string& path) {
    RunConfig c;
    std::ifstream in(path);
    if (!in) die(2, "cannot open config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                die(2, path + ":" + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) die(2, path + ":" + std::to_string(lineno) + ": empty key");
        config_set(c, key, value);
    }
    return c;
}

void save_config(const RunConfig& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) die(3, "cannot write " + path);
    for (const auto& key : config_keys()) out << key << " = " << config_get(c, key) << "\n";
}

ordered_json config_echo_json(const RunConfig& c) {
    ordered_json j;
    for (const auto& key : config_keys()) j[key] = config_get(c, key);
    return j;
}

int scheme_id(const std::string& s) {
    if (s == "linear") return 0;
    if (s == "cubic-spline" || s == "cubic") return 1;
    die(2, "unknown interpolation scheme '" + s + "' (linear | cubic-spline)");
}

void ensure_out_dir(const std::string& dir) {
    std::string cmd = "mkdir -p '" + dir + "'";
    if (std::system(cmd.c_str()) != 0) die(3, "cannot create output directory " + dir);
}

struct RomHandle {
    pm_rom* p = nullptr;
    RomHandle() = default;
    RomHandle(RomHandle&& o) noexcept : p(o.p) { o.p = nullptr; }
    RomHandle& operator=(RomHandle&& o) noexcept {
        if (this != &o) {
            pm_rom_free(p);
            p = o.p;
            o.p = nullptr;
        }
        return *this;
    }
    RomHandle(const RomHandle&) = delete;
    RomHandle& operator=(const RomHandle&) = delete;
    ~RomHandle() { pm_rom_free(p); }
};
struct RepoHandle {
    pm_repository* p = nullptr;
    RepoHandle() = default;
    RepoHandle(RepoHandle&& o) noexcept : p(o.p) { o.p = nullptr; }
    RepoHandle& operator=(RepoHandle&& o) noexcept {
        if (this != &o) {
            pm_repository_free(p);
            p = o.p;
            o.p = nullptr;
        }
        return *this;
    }
    RepoHandle(const RepoHandle&) = delete;
    RepoHandle& operator=(const RepoHandle&) = delete;
    ~RepoHandle() { pm_repository_free(p); }
};
struct RegHandle {
    pm_regressed* p = nullptr;
    RegHandle() = default;
    RegHandle(RegHandle&& o) noexcept : p(o.p) { o.p = nullptr; }
    RegHandle& operator=(RegHandle&& o) noexcept {
        if (this != &o) {
            pm_regressed_free(p);
            p = o.p;
            o.p = nullptr;
        }
        return *this;
    }
    RegHandle(const RegHandle&) = delete;
    RegHandle& operator=(const RegHandle&) = delete;
    ~RegHandle() { pm_regressed_free(p); }
};

pm_build_config build_config_of(const RunConfig& c) {
    pm_build_config bc;
    pm_build_config_defaults(&bc);
    bc.model_kind = c.model == "builtin-fom" ? 0 : 1;
    bc.manifest_path = c.manifest.empty() ? nullptr : c.manifest.c_str();
    bc.p_lower = c.p_lower;
    bc.p_upper = c.p_upper;
    bc.u0 = c.u0;
    bc.tau_e = c.tau_e;
    bc.q = c.q;
    bc.predictor_order = c.predictor_order;
    bc.max_refine_depth = c.max_refine_depth;
    bc.w_p = c.w_p;
    bc.w_r = c.w_r;
    bc.scheme = scheme_id(c.scheme);
    bc.refine = c.refine ? 1 : 0;
    bc.match_budget = c.match_budget;
    bc.n_complex_pairs = c.n_complex_pairs;
    bc.n_real = c.n_real;
    bc.frf_points = c.frf_points;
    return bc;
}

// ---- prom sources (repository or regressed file) -------------------------

struct PromSource {
    RepoHandle repo;
    RegHandle reg;
    int scheme = 0;
    double lo = 0.0, hi = 0.0;
    ordered_json config;  // echo from repository files, if any

    pm_rom* at(double p) const {
        pm_rom* rom = nullptr;
        if (reg.p)
            check(pm_regressed_eval(reg.p, p, &rom), "evaluating regressed pROM");
        else
            check(pm_repository_interpolate(repo.p, p, scheme, &rom), "interpolating repository");
        return rom;
    }
};

PromSource open_prom(const std::string& path, const std::string& scheme) {
    PromSource src;
    src.scheme = scheme_id(scheme);
    std::ifstream in(path);
    if (!in) die(3, "cannot open " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        die(3, path + ": " + e.what());
    }
    if (j.contains("roms")) {
        check(pm_repository_load(path.c_str(), &src.repo.p), "loading repository");
        src.lo = pm_repository_param(src.repo.p, 0);
        src.hi = pm_repository_param(src.repo.p, pm_repository_size(src.repo.p) - 1);
        if (j.contains("config")) src.config = j["config"];
    } else if (j.contains("d_coeffs")) {
        check(pm_regressed_load(path.c_str(), &src.reg.p), "loading regressed pROM");
        check(pm_regressed_domain(src.reg.p, &src.lo, &src.hi), "reading domain");
    } else {
        die(3, path + ": neither a repository nor a regressed pROM file");
    }
    return src;
}

void write_rom_rows(std::ofstream& out, double p, pm_rom* rom) {
    const int nd = pm_rom_nd(rom), ns = pm_rom_ns(rom);
    std::vector<double> D(static_cast<size_t>(nd) * 4), S(static_cast<size_t>(ns) * 2);
    check(pm_rom_data(rom, D.data(), S.data()), "reading ROM data");
    for (int i = 0; i < nd; ++i)
        out << fmt17(p) << ",d," << i + 1 << "," << fmt17(D[i * 4 + 0]) << ","
            << fmt17(D[i * 4 + 1]) << "," << fmt17(D[i * 4 + 2]) << "," << fmt17(D[i * 4 + 3])
            << "\n";
    for (int i = 0; i < ns; ++i)
        out << fmt17(p) << ",s," << i + 1 << "," << fmt17(S[i * 2 + 0]) << ","
            << fmt17(S[i * 2 + 1]) << ",,\n";
}

// ---- subcommands ---------------------------------------------------------

int cmd_build(const RunConfig& cfg) {
    if (cfg.model != "builtin-fom" && cfg.model != "rom-directory")
        die(2, "model must be builtin-fom or rom-directory");
    if (cfg.model == "rom-directory" && cfg.manifest.empty())
        die(2, "rom-directory model needs a manifest");
    ensure_out_dir(cfg.out_dir);

    const std::string log_path = cfg.out_dir + "/build_log.txt";
    std::ofstream log_file(log_path);
    if (!log_file) die(3, "cannot write " + log_path);
    auto log_cb = +[](const char* line, void* user) {
        auto* f = static_cast<std::ofstream*>(user);
        (*f) << line << "\n";
        log_line(2, line);
    };

    pm_build_config bc = build_config_of(cfg);
    pm_repository* repo_raw = nullptr;
    const pm_status st = pm_repository_build(&bc, log_cb, &log_file, &repo_raw);
    if (st != PM_OK) {
        log_file << "error: " << pm_status_name(st) << ": " << pm_last_error() << "\n";
        die(exit_code_for(st), std::string("building repository: ") + pm_last_error());
    }
    RepoHandle repo;
    repo.p = repo_raw;

    RunConfig echo = cfg;
    if (cfg.model == "builtin-fom" && cfg.n_real < 0) {
        int n_real = 0;
        check(pm_fom_default_n_real(cfg.tau_e, cfg.frf_points, &n_real), "calibrating n_real");
        echo.n_real = n_real;
        log_file << "calibrated n_real=" << n_real << "\n";
        log_line(1, "calibrated n_real=" + std::to_string(n_real));
    }
    if (!cfg.refine && pm_repository_high_fidelity(repo.p) < pm_repository_size(repo.p)) {
        // Entries were never certified; stamp the watermark so the file is
        // usable downstream and say so.
        check(pm_repository_set_high_fidelity(repo.p, pm_repository_size(repo.p)),
              "stamping watermark");
        const char* warn = "warning: refinement disabled; entries accepted without midpoint "
                           "certification";
        log_file << warn << "\n";
        log_line(1, warn);
    }

    const std::string repo_path = cfg.out_dir + "/repository.json";
    const std::string echo_str = config_echo_json(echo).dump();
    check(pm_repository_save(repo.p, echo_str.c_str(), repo_path.c_str()), "saving repository");
    log_file << "repository entries=" << pm_repository_size(repo.p) << "\n";
    if (pm_repository_size(repo.p) == 1)
        log_line(1, "warning: single-entry repository; interpolation degenerates to one point");
    log_line(1, "wrote " + repo_path + " (" + std::to_string(pm_repository_size(repo.p)) +
                    " entries)");
    return 0;
}

int cmd_regress(const RunConfig& cfg, const std::string& repo_path, int q_flag) {
    ensure_out_dir(cfg.out_dir);
    RepoHandle repo;
    check(pm_repository_load(repo_path.c_str(), &repo.p), "loading repository");

    // Pull tau_e/scheme defaults from the repository's config echo when present.
    RunConfig rcfg = cfg;
    {
        std::ifstream in(repo_path);
        ordered_json j;
        in >> j;
        if (j.contains("config") && j["config"].is_object()) {
            const auto& e = j["config"];
            try {
                if (e.contains("tau_e")) rcfg.tau_e = std::stod(e["tau_e"].get<std::string>());
                if (e.contains("scheme")) rcfg.scheme = e["scheme"].get<std::string>();
            } catch (const std::exception&) {
                // foreign config echo; keep the CLI-side values
            }
        }
    }
    const int q = q_flag >= 0 ? q_flag : rcfg.q;

    pm_regressed* reg_raw = nullptr;
    double max_residual = 0.0;
    check(pm_regress(repo.p, q, &reg_raw, &max_residual), "regression");
    RegHandle reg;
    reg.p = reg_raw;

    double disagreement = 0.0;
    check(pm_regression_disagreement(repo.p, reg.p, rcfg.validation_points, rcfg.w_p, rcfg.w_r,
                                     scheme_id(rcfg.scheme), &disagreement),
          "validation sweep");
    const double threshold = rcfg.guard_multiple * rcfg.tau_e;

    ordered_json report;
    report["q"] = q;
    report["coefficients"] = pm_regressed_coefficient_count(reg.p);
    report["max_fit_residual"] = max_residual;
    report["max_disagreement"] = disagreement;
    report["guard_threshold"] = threshold;
    report["accepted"] = disagreement <= threshold;
    const std::string report_path = cfg.out_dir + "/regression_report.json";
    std::ofstream rep(report_path);
    rep << report.dump(2) << "\n";
    log_line(1, "regression disagreement " + fmt17(disagreement) + " vs threshold " +
                    fmt17(threshold));

    if (disagreement > threshold) {
        std::fprintf(stderr,
                     "error: regression disagreement %.6e exceeds the guard threshold %.6e; "
                     "the regressed pROM is discarded (report: %s)\n",
                     disagreement, threshold, report_path.c_str());
        return 5;
    }
    const std::string out_path = cfg.out_dir + "/regressed.json";
    check(pm_regressed_save(reg.p, out_path.c_str()), "saving regressed pROM");
    log_line(1, "wrote " + out_path);
    return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& prom_path, double p,
             const std::vector<double>& omegas) {
    const PromSource src = open_prom(prom_path, cfg.scheme);
    if (p < src.lo || p > src.hi)
        die(3, "p=" + fmt17(p) + " outside the pROM domain [" + fmt17(src.lo) + ", " +
                   fmt17(src.hi) + "]");
    RomHandle rom;
    rom.p = src.at(p);
    std::printf("omega,H_re,H_im\n");
    for (double w : omegas) {
        double re = 0.0, im = 0.0;
        check(pm_rom_transfer(rom.p, 0.0, w, &re, &im), "evaluating transfer function");
        std::printf("%s,%s,%s\n", fmt17(w).c_str(), fmt17(re).c_str(), fmt17(im).c_str());
    }
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& prom_path, const std::string& frf_file,
              bool dump_frf) {
    ensure_out_dir(cfg.out_dir);
    const PromSource src = open_prom(prom_path, cfg.scheme);

    std::string model = cfg.model;
    if (!src.config.is_null() && src.config.contains("model"))
        model = src.config["model"].get<std::string>();
    const bool builtin_truth = frf_file.empty();
    if (builtin_truth && model != "builtin-fom")
        die(3, "no ground truth: pROM was not built from the builtin benchmark and no "
               "--frf-file was given");

    // Tabulated truth: rows p,omega,H_re,H_im grouped by p.
    std::map<double, std::pair<std::vector<double>, std::vector<std::pair<double, double>>>> table;
    if (!builtin_truth) {
        std::ifstream in(frf_file);
        if (!in) die(3, "cannot open " + frf_file);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            double p, w, re, im;
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &p, &w, &re, &im) != 4)
                die(3, frf_file + ": expected rows p,omega,H_re,H_im");
            table[p].first.push_back(w);
            table[p].second.emplace_back(re, im);
        }
        if (table.empty()) die(3, frf_file + ": no data rows");
    }

    const std::string err_path = cfg.out_dir + "/errors.csv";
    const std::string track_path = cfg.out_dir + "/pole_tracks.csv";
    std::ofstream err(err_path), tracks(track_path);
    if (!err || !tracks) die(3, "cannot write sweep outputs under " + cfg.out_dir);
    err << "p,rel_error\n";
    tracks << "p,kind,index,col1,col2,col3,col4\n";
    std::ofstream frf;
    if (dump_frf) {
        frf.open(cfg.out_dir + "/frf.csv");
        frf << "p,omega,H_re,H_im\n";
    }

    std::vector<double> ps;
    if (builtin_truth) {
        const int n = cfg.sweep_points;
        if (n <= 1)
            ps.push_back(src.lo);
        else
            for (int i = 0; i < n; ++i)
                ps.push_back(src.lo + (src.hi - src.lo) * double(i) / double(n - 1));
    } else {
        for (const auto& [p, rows] : table) ps.push_back(p);
    }

    double max_err = 0.0;
    for (double p : ps) {
        if (p < src.lo || p > src.hi) die(3, "sweep point p=" + fmt17(p) + " outside the domain");
        RomHandle rom;
        rom.p = src.at(p);
        double e = 0.0;
        if (builtin_truth) {
            check(pm_frf_error_fom(rom.p, p, cfg.frf_points, &e), "sweep error");
        } else {
            const auto& [ws, hs] = table[p];
            std::vector<double> re(hs.size()), im(hs.size());
            for (size_t k = 0; k < hs.size(); ++k) {
                re[k] = hs[k].first;
                im[k] = hs[k].second;
            }
            check(pm_frf_error_table(rom.p, ws.data(), re.data(), im.data(),
                                     static_cast<int>(ws.size()), &e),
                  "sweep error");
        }
        err << fmt17(p) << "," << fmt17(e) << "\n";
        write_rom_rows(tracks, p, rom.p);
        if (dump_frf) {
            for (int k = 0; k < cfg.frf_points; ++k) {
                const double w = std::pow(10.0, 3.0 * double(k) / double(cfg.frf_points - 1));
                double re = 0.0, im = 0.0;
                check(pm_rom_transfer(rom.p, 0.0, w, &re, &im), "frf dump");
                frf << fmt17(p) << "," << fmt17(w) << "," << fmt17(re) << "," << fmt17(im)
                    << "\n";
            }
        }
        max_err = std::max(max_err, e);
    }
    log_line(1, "sweep max relative error " + fmt17(max_err));
    log_line(1, "wrote " + err_path + " and " + track_path);
    return 0;
}

int cmd_match(const RunConfig& cfg, const std::string& path_a, const std::string& path_b) {
    RomHandle a, b;
    check(pm_rom_load(path_a.c_str(), &a.p), "loading " + path_a);
    check(pm_rom_load(path_b.c_str(), &b.p), "loading " + path_b);
    const int nd = pm_rom_nd(a.p), ns = pm_rom_ns(a.p);
    std::vector<int> v_d(static_cast<size_t>(std::max(nd, 0)));
    std::vector<int> v_s(static_cast<size_t>(std::max(ns, 0)));
    pm_match_stats stats{};
    check(pm_match(a.p, b.p, cfg.w_p, cfg.w_r, cfg.match_budget, nullptr, v_d.data(), v_s.data(),
                   &stats),
          "matching");
    double dist = 0.0, rel = 0.0;
    check(pm_distance(a.p, b.p, cfg.w_p, cfg.w_r, &dist, &rel), "distance");

    ordered_json j;
    j["v_d"] = v_d;
    j["v_s"] = v_s;
    j["objective"] = stats.objective;
    j["evaluations"] = stats.evaluations;
    j["low_confidence"] = stats.low_confidence != 0;
    j["distance"] = dist;
    j["relative_error"] = rel;
    std::printf("%s\n", j.dump(2).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive pole-matching parametric reduced-order models"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path, out_dir, log_level = "info";
    long seed = -1;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "seed for randomized tooling (unused by the pipeline)");
    app.add_option("--log-level", log_level, "quiet | info | debug");

    auto* b = app.add_subcommand("build", "build a pole-matched repository");
    bool no_refine = false;
    std::string b_model, b_manifest;
    double b_u0 = NAN, b_tau = NAN, b_pl = NAN, b_pu = NAN, b_wp = NAN, b_wr = NAN;
    b->add_flag("--no-refine", no_refine, "skip the midpoint certification phase");
    b->add_option("--model", b_model, "builtin-fom | rom-directory");
    b->add_option("--manifest", b_manifest, "manifest for rom-directory models");
    b->add_option("--u0", b_u0, "initial step length");
    b->add_option("--tau-e", b_tau, "midpoint error tolerance");
    b->add_option("--p-lower", b_pl, "parameter range lower bound");
    b->add_option("--p-upper", b_pu, "parameter range upper bound");
    b->add_option("--wp", b_wp, "pole-position weight");
    b->add_option("--wr", b_wr, "residue weight");

    auto* r = app.add_subcommand("regress", "compress a repository by regression");
    std::string r_repo;
    int r_q = -1;
    r->add_option("--repo", r_repo, "repository file")->required();
    r->add_option("--q", r_q, "polynomial degree");

    auto* e = app.add_subcommand("eval", "evaluate a pROM at (p, omega)");
    std::string e_prom, e_scheme;
    double e_p = 0.0;
    std::vector<double> e_omegas;
    e->add_option("--prom", e_prom, "repository or regressed pROM file")->required();
    e->add_option("--p", e_p, "parameter value")->required();
    e->add_option("--omega", e_omegas, "frequencies (rad/s)")->required()->delimiter(',');
    e->add_option("--scheme", e_scheme, "linear | cubic-spline");

    auto* s = app.add_subcommand("sweep", "parameter sweep with error and pole-track CSVs");
    std::string s_prom, s_scheme, s_frf;
    int s_points = -1;
    bool s_dump = false;
    s->add_option("--prom", s_prom, "repository or regressed pROM file")->required();
    s->add_option("--points", s_points, "sweep grid size");
    s->add_option("--scheme", s_scheme, "linear | cubic-spline");
    s->add_option("--frf-file", s_frf, "tabulated ground truth (p,omega,H_re,H_im)");
    s->add_flag("--dump-frf", s_dump, "also write the pROM response grid");

    auto* m = app.add_subcommand("match", "pole-match two ROM files");
    std::string m_a, m_b;
    double m_wp = NAN, m_wr = NAN;
    m->add_option("--rom-a", m_a, "target ROM file")->required();
    m->add_option("--rom-b", m_b, "source ROM file")->required();
    m->add_option("--wp", m_wp, "pole-position weight");
    m->add_option("--wr", m_wr, "residue weight");

    auto* ce = app.add_subcommand("config-echo", "write the effective configuration");
    std::string ce_path;
    ce->add_option("--to", ce_path, "output path")->required();

    CLI11_PARSE(app, argc, argv);

    if (log_level == "quiet") g_log_level = 0;
    else if (log_level == "info") g_log_level = 1;
    else if (log_level == "debug") g_log_level = 2;
    else die(2, "unknown log level " + log_level);

    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed >= 0) cfg.seed = seed;

    if (b->parsed()) {
        if (no_refine) cfg.refine = false;
        if (!b_model.empty()) cfg.model = b_model;
        if (!b_manifest.empty()) cfg.manifest = b_manifest;
        if (!std::isnan(b_u0)) cfg.u0 = b_u0;
        if (!std::isnan(b_tau)) cfg.tau_e = b_tau;
        if (!std::isnan(b_pl)) cfg.p_lower = b_pl;
        if (!std::isnan(b_pu)) cfg.p_upper = b_pu;
        if (!std::isnan(b_wp)) cfg.w_p = b_wp;
        if (!std::isnan(b_wr)) cfg.w_r = b_wr;
        return cmd_build(cfg);
    }
    if (r->parsed()) return cmd_regress(cfg, r_repo, r_q);
    if (e->parsed()) {
        if (!e_scheme.empty()) cfg.scheme = e_scheme;
        return cmd_eval(cfg, e_prom, e_p, e_omegas);
    }
    if (s->parsed()) {
        if (!s_scheme.empty()) cfg.scheme = s_scheme;
        if (s_points > 0) cfg.sweep_points = s_points;
        return cmd_sweep(cfg, s_prom, s_frf, s_dump);
    }
    if (m->parsed()) {
        if (!std::isnan(m_wp)) cfg.w_p = m_wp;
        if (!std::isnan(m_wr)) cfg.w_r = m_wr;
        return cmd_match(cfg, m_a, m_b);
    }
    if (ce->parsed()) {
        save_config(cfg, ce_path);
        return 0;
    }
    return 2;
}
