#pragma once

#include <complex>
#include <random>

#include "polematch/rom_core.hpp"
#include "polematch/types.hpp"

namespace test_support {

// Random stable state-space system with simple eigenvalues: a gaussian matrix
// shifted well into the left half-plane.
inline polematch::StateSpaceROM random_stable_system(std::mt19937& rng, int k) {
    std::normal_distribution<double> gauss;
    polematch::StateSpaceROM rom;
    rom.A.resize(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) rom.A(i, j) = gauss(rng);
    const double shift = rom.A.eigenvalues().real().maxCoeff();
    rom.A.diagonal().array() -= shift + 0.5 + std::abs(gauss(rng));
    rom.B.resize(k);
    rom.C.resize(k);
    for (int i = 0; i < k; ++i) {
        rom.B(i) = gauss(rng);
        rom.C(i) = gauss(rng);
    }
    return rom;
}

// Evaluation point away from every pole of the system.
inline std::complex<double> random_probe(std::mt19937& rng, const Eigen::VectorXcd& poles) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const double radius = poles.cwiseAbs().maxCoeff() + 1.0;
    for (;;) {
        const std::complex<double> s{radius * uni(rng), radius * uni(rng)};
        double gap = 1e300;
        for (Eigen::Index i = 0; i < poles.size(); ++i)
            gap = std::min(gap, std::abs(s - poles(i)));
        if (gap > 1e-2 * radius) return s;
    }
}

// Rows with pairwise (weighted) separation, the perturbation-regime shape the
// matcher is designed for.
inline Eigen::MatrixXd separated_rows(std::mt19937& rng, int n, int cols, double min_gap = 1.0) {
    std::normal_distribution<double> gauss;
    Eigen::VectorXd scale(cols);
    for (int c = 0; c < cols; ++c) scale(c) = (c < cols / 2) ? 50.0 : 5.0;
    for (;;) {
        Eigen::MatrixXd M(n, cols);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < cols; ++c) M(i, c) = gauss(rng) * scale(c);
        bool ok = true;
        for (int i = 0; i < n && ok; ++i)
            for (int j = i + 1; j < n && ok; ++j)
                if ((M.row(i) - M.row(j)).norm() < min_gap) ok = false;
        if (ok) return M;
    }
}

inline std::vector<int> random_permutation(std::mt19937& rng, int n) {
    std::vector<int> p(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
        std::uniform_int_distribution<int> pick(0, i);
        std::swap(p[static_cast<size_t>(i)], p[static_cast<size_t>(pick(rng))]);
    }
    return p;
}

}  // namespace test_support
