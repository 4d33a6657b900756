#include "polematch/serialize.hpp"

#include <fstream>

#include "polematch/rom_core.hpp"

namespace polematch {

namespace {

json matrix_rows(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd rows_matrix(const json& j, Eigen::Index cols, const char* name) {
    if (!j.is_array()) fail(Errc::Parse, std::string(name) + " must be an array of rows");
    Eigen::MatrixXd M(static_cast<Eigen::Index>(j.size()), cols);
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        const json& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            fail(Errc::Parse, std::string(name) + " rows must hold " + std::to_string(cols) +
                                  " numbers");
        for (Eigen::Index c = 0; c < cols; ++c) M(i, c) = row[static_cast<size_t>(c)].get<double>();
    }
    return M;
}

}  // namespace

json to_json(const PoleResidueROM& rom) {
    json j;
    j["param"] = rom.param;
    j["D"] = matrix_rows(rom.D);
    j["S"] = matrix_rows(rom.S);
    return j;
}

PoleResidueROM rom_from_json(const json& j) {
    if (!j.contains("param") || !j.contains("D") || !j.contains("S"))
        fail(Errc::Parse, "pole-residue ROM needs keys param, D, S");
    PoleResidueROM rom;
    rom.param = j["param"].get<double>();
    rom.D = rows_matrix(j["D"], 4, "D");
    rom.S = rows_matrix(j["S"], 2, "S");
    rom.validate();
    return rom;
}

json to_json(const StateSpaceROM& rom) {
    json j;
    j["A"] = matrix_rows(rom.A);
    json b = json::array(), c = json::array();
    for (Eigen::Index i = 0; i < rom.B.size(); ++i) b.push_back(rom.B(i));
    for (Eigen::Index i = 0; i < rom.C.size(); ++i) c.push_back(rom.C(i));
    j["B"] = std::move(b);
    j["C"] = std::move(c);
    return j;
}

StateSpaceROM statespace_from_json(const json& j) {
    if (!j.contains("A") || !j.contains("B") || !j.contains("C"))
        fail(Errc::Parse, "state-space ROM needs keys A, B, C");
    StateSpaceROM rom;
    const Eigen::Index k = static_cast<Eigen::Index>(j["A"].size());
    rom.A = rows_matrix(j["A"], k, "A");
    if (!j["B"].is_array() || static_cast<Eigen::Index>(j["B"].size()) != k)
        fail(Errc::Parse, "B must hold one entry per state");
    if (!j["C"].is_array() || static_cast<Eigen::Index>(j["C"].size()) != k)
        fail(Errc::Parse, "C must hold one entry per state");
    rom.B.resize(k);
    rom.C.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        rom.B(i) = j["B"][static_cast<size_t>(i)].get<double>();
        rom.C(i) = j["C"][static_cast<size_t>(i)].get<double>();
    }
    rom.validate();
    return rom;
}

json to_json(const Repository& repo, const json& config) {
    json j;
    json params = json::array(), roms = json::array();
    for (const auto& e : repo.entries) {
        params.push_back(e.param);
        roms.push_back(to_json(e));
    }
    j["params"] = std::move(params);
    j["roms"] = std::move(roms);
    j["i_h"] = repo.high_fidelity;
    j["config"] = config.is_null() ? json::object() : config;
    return j;
}

Repository repository_from_json(const json& j, json* config) {
    if (!j.contains("params") || !j.contains("roms") || !j.contains("i_h"))
        fail(Errc::Parse, "repository needs keys params, roms, i_h");
    Repository repo;
    for (const auto& r : j["roms"]) repo.entries.push_back(rom_from_json(r));
    if (j["params"].size() != repo.entries.size())
        fail(Errc::Parse, "params and roms lengths differ");
    for (size_t i = 0; i < repo.entries.size(); ++i)
        if (j["params"][i].get<double>() != repo.entries[i].param)
            fail(Errc::Parse, "params array disagrees with stored ROM parameters");
    repo.high_fidelity = j["i_h"].get<int>();
    repo.low_confidence.assign(repo.entries.size(), 0);
    repo.validate();
    if (config) *config = j.contains("config") ? j["config"] : json::object();
    return repo;
}

json to_json(const RegressedPROM& rp) {
    json j;
    j["q"] = rp.q;
    j["domain"] = json::array({rp.p_lower, rp.p_upper});
    auto coeffs = [&](const Eigen::MatrixXd& M, Eigen::Index n, Eigen::Index cols) {
        json out = json::array();
        for (Eigen::Index i = 0; i < n; ++i) {
            json entry = json::array();
            for (Eigen::Index c = 0; c < cols; ++c) {
                json poly = json::array();
                for (int k = 0; k <= rp.q; ++k) poly.push_back(M(i * cols + c, k));
                entry.push_back(std::move(poly));
            }
            out.push_back(std::move(entry));
        }
        return out;
    };
    j["d_coeffs"] = coeffs(rp.d_coeffs, rp.n_d, 4);
    j["s_coeffs"] = coeffs(rp.s_coeffs, rp.n_s, 2);
    return j;
}

RegressedPROM regressed_from_json(const json& j) {
    if (!j.contains("q") || !j.contains("domain") || !j.contains("d_coeffs") ||
        !j.contains("s_coeffs"))
        fail(Errc::Parse, "regressed pROM needs keys q, domain, d_coeffs, s_coeffs");
    RegressedPROM rp;
    rp.q = j["q"].get<int>();
    rp.p_lower = j["domain"][0].get<double>();
    rp.p_upper = j["domain"][1].get<double>();
    auto read = [&](const json& arr, Eigen::Index cols, Eigen::MatrixXd& M) {
        const Eigen::Index n = static_cast<Eigen::Index>(arr.size());
        M.resize(n * cols, rp.q + 1);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index c = 0; c < cols; ++c) {
                const json& poly = arr[static_cast<size_t>(i)][static_cast<size_t>(c)];
                if (static_cast<int>(poly.size()) != rp.q + 1)
                    fail(Errc::Parse, "coefficient arrays must hold q+1 values");
                for (int k = 0; k <= rp.q; ++k)
                    M(i * cols + c, k) = poly[static_cast<size_t>(k)].get<double>();
            }
        return n;
    };
    rp.n_d = read(j["d_coeffs"], 4, rp.d_coeffs);
    rp.n_s = read(j["s_coeffs"], 2, rp.s_coeffs);
    return rp;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::Io, "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail(Errc::Parse, path + ": " + e.what());
    }
    return j;
}

void save_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Errc::Io, "cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) fail(Errc::Io, "failed writing " + path);
}

PoleResidueROM load_rom_any(const std::string& path, double param_hint) {
    const json j = load_json_file(path);
    if (j.contains("A")) {
        PoleResidueROM rom = to_pole_residue(statespace_from_json(j), param_hint);
        return rom;
    }
    PoleResidueROM rom = rom_from_json(j);
    return rom;
}

}  // namespace polematch
