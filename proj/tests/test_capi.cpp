#include "doctest.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "polematch.h"

namespace {

struct Freer {
    pm_rom* rom = nullptr;
    pm_repository* repo = nullptr;
    pm_regressed* reg = nullptr;
    pm_statespace* ss = nullptr;
    ~Freer() {
        pm_rom_free(rom);
        pm_repository_free(repo);
        pm_regressed_free(reg);
        pm_statespace_free(ss);
    }
};

}  // namespace

TEST_CASE("state-space handles and conversion") {
    const double A[1] = {-3.0};
    const double B[1] = {1.0};
    const double C[1] = {2.0};
    Freer f;
    REQUIRE(pm_statespace_create(A, B, C, 1, &f.ss) == PM_OK);

    double re = 0.0, im = 0.0;
    REQUIRE(pm_statespace_transfer(f.ss, 0.0, 0.0, &re, &im) == PM_OK);
    CHECK(re == doctest::Approx(2.0 / 3.0));

    REQUIRE(pm_statespace_to_rom(f.ss, 0.5, &f.rom) == PM_OK);
    CHECK(pm_rom_ns(f.rom) == 1);
    CHECK(pm_rom_nd(f.rom) == 0);
    CHECK(pm_rom_param(f.rom) == 0.5);
    REQUIRE(pm_rom_transfer(f.rom, 0.0, 0.0, &re, &im) == PM_OK);
    CHECK(re == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("rom creation rejects invalid data with a message") {
    const double D[4] = {-1.0, -2.0, 1.0, 0.0};  // b <= 0
    pm_rom* rom = nullptr;
    CHECK(pm_rom_create(0.0, D, 1, nullptr, 0, &rom) == PM_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(pm_last_error()) > 0);
    CHECK(rom == nullptr);
}

TEST_CASE("matching and distance through the C API") {
    const double D1[8] = {-1.0, 10.0, 1.0, 0.0, -2.0, 20.0, 2.0, 0.0};
    const double D2[8] = {-2.0, 20.0, 2.0, 0.0, -1.0, 10.0, 1.0, 0.0};  // swapped rows
    Freer a, b;
    REQUIRE(pm_rom_create(0.0, D1, 2, nullptr, 0, &a.rom) == PM_OK);
    REQUIRE(pm_rom_create(0.1, D2, 2, nullptr, 0, &b.rom) == PM_OK);

    int v_d[2] = {0, 0};
    pm_match_stats stats{};
    Freer matched;
    REQUIRE(pm_match(a.rom, b.rom, 1.0, 1.0, 0, &matched.rom, v_d, nullptr, &stats) == PM_OK);
    CHECK(v_d[0] == 2);
    CHECK(v_d[1] == 1);
    CHECK(stats.objective == 0.0);
    CHECK(stats.low_confidence == 0);

    double D_out[8] = {0};
    REQUIRE(pm_rom_data(matched.rom, D_out, nullptr) == PM_OK);
    CHECK(D_out[0] == -1.0);
    CHECK(D_out[4] == -2.0);

    double dist = -1.0, rel = -1.0;
    REQUIRE(pm_distance(a.rom, b.rom, 1.0, 1.0, &dist, &rel) == PM_OK);
    CHECK(dist == 0.0);
    CHECK(rel == 0.0);

    // size mismatch surfaces the dedicated status
    const double S1[2] = {-3.0, 1.0};
    Freer c;
    REQUIRE(pm_rom_create(0.0, D1, 2, S1, 1, &c.rom) == PM_OK);
    CHECK(pm_match(a.rom, c.rom, 1.0, 1.0, 0, nullptr, nullptr, nullptr, nullptr) ==
          PM_ERR_SIZE_MISMATCH);
}

TEST_CASE("benchmark oracle and frf error") {
    Freer f;
    REQUIRE(pm_fom_oracle(0.0, 4, 10, &f.rom) == PM_OK);
    CHECK(pm_rom_nd(f.rom) == 4);
    CHECK(pm_rom_ns(f.rom) == 10);

    double re = 0.0, im = 0.0;
    REQUIRE(pm_fom_transfer(0.0, 0.0, 50.0, &re, &im) == PM_OK);
    CHECK((re != 0.0 || im != 0.0));

    double err = -1.0;
    REQUIRE(pm_frf_error_fom(f.rom, 0.0, 500, &err) == PM_OK);
    CHECK(err > 0.0);
    CHECK(err < 1.0);

    CHECK(pm_fom_oracle(0.0, 9, 0, &f.rom) == PM_ERR_TOO_MANY_POLES);
}

TEST_CASE("repository build, io, interpolation, regression") {
    pm_build_config cfg;
    pm_build_config_defaults(&cfg);
    cfg.p_lower = 3.0;
    cfg.p_upper = 4.0;
    cfg.u0 = 0.5;
    cfg.n_real = 5;

    Freer f;
    std::vector<std::string> log;
    auto log_cb = +[](const char* line, void* user) {
        static_cast<std::vector<std::string>*>(user)->emplace_back(line);
    };
    REQUIRE(pm_repository_build(&cfg, log_cb, &log, &f.repo) == PM_OK);
    CHECK(!log.empty());
    const int n = pm_repository_size(f.repo);
    CHECK(n >= 3);
    CHECK(pm_repository_high_fidelity(f.repo) == n);
    CHECK(pm_repository_param(f.repo, 0) == 3.0);
    CHECK(pm_repository_param(f.repo, n - 1) == 4.0);

    const char* path = "/tmp/polematch_capi_repo.json";
    REQUIRE(pm_repository_save(f.repo, "{\"model\":\"builtin-fom\"}", path) == PM_OK);
    Freer loaded;
    REQUIRE(pm_repository_load(path, &loaded.repo) == PM_OK);
    CHECK(pm_repository_size(loaded.repo) == n);
    std::remove(path);

    Freer at;
    REQUIRE(pm_repository_interpolate(f.repo, 3.25, 0, &at.rom) == PM_OK);
    CHECK(pm_rom_nd(at.rom) == 4);
    pm_rom* bad = nullptr;
    CHECK(pm_repository_interpolate(f.repo, 99.0, 0, &bad) == PM_ERR_OUT_OF_DOMAIN);

    Freer reg;
    double resid = -1.0;
    REQUIRE(pm_regress(f.repo, 2, &reg.reg, &resid) == PM_OK);
    CHECK(resid >= 0.0);
    CHECK(pm_regressed_q(reg.reg) == 2);
    CHECK(pm_regressed_coefficient_count(reg.reg) == 3 * (4 * 4 + 2 * 5));
    double max_e = -1.0;
    REQUIRE(pm_regression_disagreement(f.repo, reg.reg, 21, 1.0, 1.0, 0, &max_e) == PM_OK);
    CHECK(max_e >= 0.0);

    Freer ev;
    REQUIRE(pm_regressed_eval(reg.reg, 3.5, &ev.rom) == PM_OK);
    CHECK(pm_rom_nd(ev.rom) == 4);
}

TEST_CASE("guarded interpolation through the C API") {
    // handcrafted repository with the spline-overshoot fixture
    const char* path = "/tmp/polematch_capi_fixture.json";
    std::ofstream out(path);
    out << R"({"params":[0,1,2,3],"roms":[)";
    const double a[4] = {-1.0, -0.05, -0.05, -1.0};
    for (int i = 0; i < 4; ++i) {
        out << R"({"param":)" << i << R"(,"D":[[)" << a[i] << R"(,10,1,0]],"S":[]})";
        if (i < 3) out << ",";
    }
    out << R"(],"i_h":4,"config":{}})";
    out.close();

    Freer f;
    REQUIRE(pm_repository_load(path, &f.repo) == PM_OK);
    int fell_back = 0;
    Freer g;
    REQUIRE(pm_repository_interpolate_guarded(f.repo, 1.5, 1, &fell_back, &g.rom) == PM_OK);
    CHECK(fell_back == 1);
    CHECK(pm_rom_stability_margin(g.rom) < 0.0);
    std::remove(path);
}

TEST_CASE("io failures map to status codes") {
    pm_rom* rom = nullptr;
    CHECK(pm_rom_load("/nonexistent/rom.json", &rom) == PM_ERR_IO);
    pm_repository* repo = nullptr;
    CHECK(pm_repository_load("/nonexistent/repo.json", &repo) == PM_ERR_IO);
    CHECK(std::strlen(pm_status_name(PM_ERR_IO)) > 0);
    CHECK(std::strlen(pm_version()) > 0);
}
