#include "polematch/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polematch/rom_core.hpp"

namespace polematch {

namespace {

// Residue pair of the block [[alpha, beta], [-beta, alpha]] with input column
// (b1, b2) and output row (g1, g2):
//   H_blk(s) = [(g1 b1 + g2 b2)(s - alpha) + (g1 b2 - g2 b1) beta] / ((s - alpha)^2 + beta^2),
// canonicalized to b = |beta| with the sign folded into c2.
Eigen::Vector4d block_row(double alpha, double beta, double g1, double g2, double b1, double b2) {
    const double c1 = g1 * b1 + g2 * b2;
    const double c2_signed = -(g1 * b2 - g2 * b1);
    const double sign = beta >= 0.0 ? 1.0 : -1.0;
    return {alpha, std::abs(beta), c1, sign * c2_signed};
}

}  // namespace

Eigen::Matrix<double, FomModel::kPairs, 4> FomModel::pair_rows(double p) {
    const double w = kBlockWeight;
    Eigen::Matrix<double, kPairs, 4> rows;
    rows.row(0) = block_row(4.0 * p - 42.0, 8.0 * p + 200.0, w, w, w, w);
    rows.row(1) = block_row(2.0 * p - 50.0, p * p + 4.0 * p + 210.0, w, w, w, w);
    rows.row(2) = block_row(-25.0 + p, 100.0 + p * p, w, w, w, w);
    rows.row(3) = block_row(-25.0 + 2.0 * p, 150.0 - p * p, w, w, w, w);
    return rows;
}

std::complex<double> FomModel::transfer(double p, std::complex<double> s) const {
    const auto rows = pair_rows(p);
    std::complex<double> h = 0.0;
    for (int i = 0; i < kPairs; ++i) {
        const double a = rows(i, 0), b = rows(i, 1);
        const std::complex<double> sa = s - a;
        const std::complex<double> den = sa * sa + b * b;
        if (std::abs(den) <= 1e-12 * (1.0 + std::norm(s)))
            fail(Errc::PoleEvaluation, "s coincides with a benchmark block pole");
        h += (rows(i, 2) * sa - rows(i, 3) * b) / den;
    }
    for (int j = 1; j <= kTailPoles; ++j) {
        const std::complex<double> d = s - double(j);
        if (std::abs(d) <= 1e-12 * (1.0 + double(j)))
            fail(Errc::PoleEvaluation, "s coincides with a benchmark tail pole");
        h += 1.0 / d;
    }
    return h;
}

StateSpaceROM FomModel::assemble(double p) const {
    StateSpaceROM rom;
    rom.A = Eigen::MatrixXd::Zero(kOrder, kOrder);
    rom.A.block<2, 2>(0, 0) << 4.0 * p - 42.0, 8.0 * p + 200.0, -8.0 * p - 200.0, 4.0 * p - 42.0;
    rom.A.block<2, 2>(2, 2) << 2.0 * p - 50.0, p * p + 4.0 * p + 210.0, -p * p - 4.0 * p - 210.0,
        2.0 * p - 50.0;
    rom.A.block<2, 2>(4, 4) << -25.0 + p, 100.0 + p * p, -100.0 - p * p, -25.0 + p;
    rom.A.block<2, 2>(6, 6) << -25.0 + 2.0 * p, 150.0 - p * p, -150.0 + p * p, -25.0 + 2.0 * p;
    for (int j = 1; j <= kTailPoles; ++j) rom.A(2 * kPairs + j - 1, 2 * kPairs + j - 1) = double(j);
    rom.C.resize(kOrder);
    rom.C.head(2 * kPairs).setConstant(kBlockWeight);
    rom.C.tail(kTailPoles).setOnes();
    rom.B = rom.C.transpose();
    return rom;
}

PoleResidueROM mor_oracle(const FomModel& model, double p, const TruncationConfig& cfg) {
    if (cfg.n_complex_pairs < 0 || cfg.n_complex_pairs > FomModel::kPairs)
        fail(Errc::TooManyPoles, "benchmark has 4 complex pairs");
    if (cfg.n_real < 0 || cfg.n_real > FomModel::kTailPoles)
        fail(Errc::TooManyPoles, "benchmark has 1000 real poles");

    const auto rows = FomModel::pair_rows(p);
    // Dominance |residue| / |Re(pole)|; complex pairs use the residue-vector
    // norm. Tail poles score 1/j, so the n_real most dominant are 1..n_real.
    std::vector<int> order(FomModel::kPairs);
    std::iota(order.begin(), order.end(), 0);
    auto dominance = [&](int i) {
        return std::hypot(rows(i, 2), rows(i, 3)) / std::abs(rows(i, 0));
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](int l, int r) { return dominance(l) > dominance(r); });

    PoleResidueROM rom;
    rom.param = p;
    rom.D.resize(cfg.n_complex_pairs, 4);
    for (int i = 0; i < cfg.n_complex_pairs; ++i) rom.D.row(i) = rows.row(order[static_cast<size_t>(i)]);
    rom.S.resize(cfg.n_real, 2);
    for (int j = 0; j < cfg.n_real; ++j) rom.S.row(j) << double(j + 1), 1.0;
    return canonicalize(std::move(rom));
}

int default_n_real(const FomModel& model, double tau_e, int grid_points) {
    const double target = tau_e / 10.0;
    const double probes[] = {-10.0, 0.0, 10.0};
    auto ok = [&](int n) {
        TruncationConfig cfg{FomModel::kPairs, n};
        for (double p : probes)
            if (!(frf_relative_error(model, p, mor_oracle(model, p, cfg), grid_points) < target))
                return false;
        return true;
    };
    int lo = 1, hi = FomModel::kTailPoles;
    if (ok(lo)) return lo;
    if (!ok(hi)) return hi;
    while (lo + 1 < hi) {
        const int mid = lo + (hi - lo) / 2;
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

std::vector<double> frf_grid(int points) {
    if (points < 2) fail(Errc::InvalidArgument, "frequency grid needs at least 2 points");
    std::vector<double> omega(static_cast<size_t>(points));
    for (int k = 0; k < points; ++k)
        omega[static_cast<size_t>(k)] = std::pow(10.0, 3.0 * double(k) / double(points - 1));
    return omega;
}

double frf_relative_error(const std::vector<double>& omega,
                          const std::vector<std::complex<double>>& truth,
                          const PoleResidueROM& rom) {
    if (omega.size() < 2) fail(Errc::InvalidArgument, "frequency grid needs at least 2 points");
    if (truth.size() != omega.size())
        fail(Errc::InvalidArgument, "one reference value per frequency required");
    std::complex<double> num = 0.0, den = 0.0;
    std::complex<double> prev_t = truth[0];
    std::complex<double> prev_d = prev_t - transfer_function(rom, {0.0, omega[0]});
    for (size_t k = 1; k < omega.size(); ++k) {
        const std::complex<double> t = truth[k];
        const std::complex<double> d = t - transfer_function(rom, {0.0, omega[k]});
        const double h = 0.5 * (omega[k] - omega[k - 1]);
        num += h * (prev_d + d);
        den += h * (prev_t + t);
        prev_t = t;
        prev_d = d;
    }
    if (std::abs(den) == 0.0)
        fail(Errc::ZeroNorm, "reference response integrates to zero on this grid");
    return std::abs(num) / std::abs(den);
}

double frf_relative_error(const std::function<std::complex<double>(std::complex<double>)>& truth,
                          const PoleResidueROM& rom, const std::vector<double>& omega) {
    std::vector<std::complex<double>> values(omega.size());
    for (size_t k = 0; k < omega.size(); ++k) values[k] = truth({0.0, omega[k]});
    return frf_relative_error(omega, values, rom);
}

double frf_relative_error(const FomModel& model, double p, const PoleResidueROM& rom,
                          int grid_points) {
    const auto omega = frf_grid(grid_points);
    return frf_relative_error(
        [&](std::complex<double> s) { return model.transfer(p, s); }, rom, omega);
}

std::vector<SweepRow> sweep_errors(const FomModel& model,
                                   const std::function<PoleResidueROM(double)>& prom_at,
                                   const std::vector<double>& p_grid, int grid_points) {
    std::vector<SweepRow> rows;
    rows.reserve(p_grid.size());
    const auto omega = frf_grid(grid_points);
    for (double p : p_grid) {
        const PoleResidueROM rom = prom_at(p);
        rows.push_back({p, frf_relative_error(
                               [&](std::complex<double> s) { return model.transfer(p, s); }, rom,
                               omega)});
    }
    return rows;
}

}  // namespace polematch
