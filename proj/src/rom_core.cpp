#include "polematch/rom_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

namespace polematch {

namespace {

void sort_rows(Eigen::MatrixXd& M, int key0, int key1) {
    std::vector<Eigen::Index> idx(static_cast<size_t>(M.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index l, Eigen::Index r) {
        if (M(l, key0) != M(r, key0)) return M(l, key0) < M(r, key0);
        return M(l, key1) < M(r, key1);
    });
    Eigen::MatrixXd out(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i) out.row(i) = M.row(idx[static_cast<size_t>(i)]);
    M = std::move(out);
}

}  // namespace

PoleResidueROM to_pole_residue(const StateSpaceROM& rom, double param, const ConversionOptions& opt) {
    rom.validate();
    const Eigen::Index k = rom.order();

    Eigen::EigenSolver<Eigen::MatrixXd> es(rom.A, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success)
        fail(Errc::DefectiveMatrix, "eigendecomposition did not converge");
    const Eigen::VectorXcd lambda = es.eigenvalues();
    const Eigen::MatrixXcd V = es.eigenvectors();

    const double radius = lambda.cwiseAbs().maxCoeff();
    const double gap_tol = opt.simple_tol * radius;
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i + 1; j < k; ++j)
            if (std::abs(lambda(i) - lambda(j)) <= gap_tol)
                fail(Errc::NonSimpleEigenvalue,
                     "eigenvalues closer than " + std::to_string(opt.simple_tol) +
                         " * spectral radius; the realization requires simple poles");

    Eigen::FullPivLU<Eigen::MatrixXcd> lu(V);
    if (!lu.isInvertible())
        fail(Errc::DefectiveMatrix, "eigenvector matrix is numerically singular");
    const Eigen::VectorXcd y = lu.solve(rom.B.cast<std::complex<double>>());
    const Eigen::RowVectorXcd cv = rom.C.cast<std::complex<double>>() * V;

    std::vector<Eigen::Vector2d> s_rows;
    std::vector<Eigen::Vector4d> d_rows;
    Eigen::Index classified = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
        const std::complex<double> lj = lambda(j);
        const std::complex<double> res = cv(j) * y(j);
        if (std::abs(lj.imag()) < opt.imag_tol * (1.0 + std::abs(lj.real()))) {
            s_rows.push_back({lj.real(), res.real()});
            classified += 1;
        } else if (lj.imag() > 0.0) {
            // The conjugate partner carries the conjugate residue; the pair
            // collapses to one row (a, b, 2 Re res, 2 Im res) with b > 0.
            d_rows.push_back({lj.real(), lj.imag(), 2.0 * res.real(), 2.0 * res.imag()});
            classified += 2;
        }
    }
    if (classified != k)
        fail(Errc::DefectiveMatrix, "complex eigenvalues do not pair into conjugates");

    PoleResidueROM out;
    out.param = param;
    out.D.resize(static_cast<Eigen::Index>(d_rows.size()), 4);
    for (size_t i = 0; i < d_rows.size(); ++i) out.D.row(static_cast<Eigen::Index>(i)) = d_rows[i];
    out.S.resize(static_cast<Eigen::Index>(s_rows.size()), 2);
    for (size_t i = 0; i < s_rows.size(); ++i) out.S.row(static_cast<Eigen::Index>(i)) = s_rows[i];
    out = canonicalize(std::move(out));
    out.validate();
    return out;
}

std::complex<double> transfer_function(const PoleResidueROM& rom, std::complex<double> s) {
    std::complex<double> h = 0.0;
    for (Eigen::Index j = 0; j < rom.ns(); ++j) {
        const double lam = rom.S(j, 0);
        if (std::abs(s - lam) <= 1e-12 * (1.0 + std::abs(lam)))
            fail(Errc::PoleEvaluation, "s coincides with the real pole at " + std::to_string(lam));
        h += rom.S(j, 1) / (s - lam);
    }
    for (Eigen::Index j = 0; j < rom.nd(); ++j) {
        const double a = rom.D(j, 0), b = rom.D(j, 1);
        const std::complex<double> pole(a, b);
        if (std::min(std::abs(s - pole), std::abs(s - std::conj(pole))) <=
            1e-12 * (1.0 + std::abs(pole)))
            fail(Errc::PoleEvaluation, "s coincides with a complex pole pair");
        const std::complex<double> sa = s - a;
        h += (rom.D(j, 2) * sa - rom.D(j, 3) * b) / (sa * sa + b * b);
    }
    return h;
}

std::complex<double> state_space_transfer(const StateSpaceROM& rom, std::complex<double> s) {
    rom.validate();
    Eigen::MatrixXcd M = -rom.A.cast<std::complex<double>>();
    M.diagonal().array() += s;
    const Eigen::VectorXcd b = rom.B.cast<std::complex<double>>();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    const Eigen::VectorXcd x = lu.solve(b);
    const double residual = (M * x - b).norm();
    const double scale = M.norm() * x.norm() + b.norm();
    if (!(residual <= 1e-8 * scale))  // NaN-safe
        fail(Errc::SingularSystem, "sI - A is singular to machine precision");
    return (rom.C.cast<std::complex<double>>() * x)(0);
}

PoleResidueROM canonicalize(PoleResidueROM rom) {
    if (rom.D.rows() > 1) sort_rows(rom.D, 1, 0);
    if (rom.S.rows() > 1) sort_rows(rom.S, 0, 1);
    return rom;
}

}  // namespace polematch
