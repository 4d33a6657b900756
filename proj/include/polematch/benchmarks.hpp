#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "polematch/types.hpp"

namespace polematch {

/// The order-1008 parametric benchmark: four 2x2 blocks with nonlinear
/// parameter dependency and pole crossing, plus a diagonal tail of real poles
/// at 1..1000. Input/output vectors weight the block states by 100 and the
/// tail states by 1, so every block contributes the residue pair (20000, 0)
/// and every tail pole the residue 1.
class FomModel {
public:
    static constexpr int kPairs = 4;
    static constexpr int kTailPoles = 1000;
    static constexpr int kOrder = 2 * kPairs + kTailPoles;
    static constexpr double kBlockWeight = 100.0;

    /// Closed-form D rows (a, b, c1, c2) of the four blocks at p, in block
    /// order (not canonically sorted).
    static Eigen::Matrix<double, kPairs, 4> pair_rows(double p);

    /// Exact transfer function, evaluated block-analytically.
    std::complex<double> transfer(double p, std::complex<double> s) const;

    /// Dense 1008-state realization; verification oracle for transfer().
    StateSpaceROM assemble(double p) const;
};

struct TruncationConfig {
    int n_complex_pairs = 4;
    int n_real = 30;
};

/// Modal truncation keeping the most dominant poles; dominance is
/// |residue| / |Re(pole)|, with complex pairs scored by the residue-vector
/// norm. Output is canonical.
PoleResidueROM mor_oracle(const FomModel& model, double p, const TruncationConfig& cfg);

/// Smallest real-pole count whose oracle FRF error stays below tau_e / 10 at
/// p in {-10, 0, 10}.
int default_n_real(const FomModel& model, double tau_e, int grid_points = 2000);

/// Logarithmically spaced frequency grid on [1, 1000].
std::vector<double> frf_grid(int points = 2000);

/// |trapz(truth - rom)| / |trapz(truth)| over s = i*omega on the given grid.
double frf_relative_error(const std::function<std::complex<double>(std::complex<double>)>& truth,
                          const PoleResidueROM& rom, const std::vector<double>& omega);

/// Same metric against a tabulated reference response on an explicit grid.
double frf_relative_error(const std::vector<double>& omega,
                          const std::vector<std::complex<double>>& truth,
                          const PoleResidueROM& rom);

double frf_relative_error(const FomModel& model, double p, const PoleResidueROM& rom,
                          int grid_points = 2000);

struct SweepRow {
    double p = 0.0;
    double rel_error = 0.0;
};

/// Per-p relative error of an arbitrary pROM evaluator against the benchmark.
std::vector<SweepRow> sweep_errors(const FomModel& model,
                                   const std::function<PoleResidueROM(double)>& prom_at,
                                   const std::vector<double>& p_grid, int grid_points = 2000);

}  // namespace polematch
