#include "polematch/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace polematch {

namespace {

void check_block(const Eigen::MatrixXd& M1, const Eigen::MatrixXd& M2,
                 const Eigen::VectorXd& colw) {
    if (M1.rows() != M2.rows() || M1.cols() != M2.cols())
        fail(Errc::ShapeMismatch, "blocks must have identical shape");
    if (M1.rows() > 0 && colw.size() != M1.cols())
        fail(Errc::ShapeMismatch, "one column weight per block column required");
}

// Weighted squared distance between row i of M1 and row r of M2; the per-row
// term of the objective. Fixed accumulation order keeps results bit-stable.
double row_cost(const Eigen::MatrixXd& M1, const Eigen::MatrixXd& M2, const Eigen::VectorXd& colw,
                Eigen::Index i, Eigen::Index r) {
    double acc = 0.0;
    for (Eigen::Index c = 0; c < M1.cols(); ++c) {
        const double d = (M1(i, c) - M2(r, c)) * colw(c);
        acc += d * d;
    }
    return acc;
}

}  // namespace

MappingVector identity_mapping(Eigen::Index n) {
    MappingVector v(static_cast<size_t>(n));
    std::iota(v.begin(), v.end(), 1);
    return v;
}

bool is_permutation(const MappingVector& v, Eigen::Index n) {
    if (static_cast<Eigen::Index>(v.size()) != n) return false;
    std::vector<bool> seen(static_cast<size_t>(n), false);
    for (int e : v) {
        if (e < 1 || e > n || seen[static_cast<size_t>(e - 1)]) return false;
        seen[static_cast<size_t>(e - 1)] = true;
    }
    return true;
}

Eigen::MatrixXd apply_mapping(const MappingVector& v, const Eigen::MatrixXd& M) {
    if (!is_permutation(v, M.rows()))
        fail(Errc::ShapeMismatch, "mapping vector is not a permutation of the row indices");
    Eigen::MatrixXd out(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i) out.row(i) = M.row(v[static_cast<size_t>(i)] - 1);
    return out;
}

double objective(const Eigen::MatrixXd& M1, const Eigen::MatrixXd& M2, const MappingVector& v,
                 const Eigen::VectorXd& colw) {
    check_block(M1, M2, colw);
    if (!is_permutation(v, M1.rows()))
        fail(Errc::ShapeMismatch, "mapping vector is not a permutation of the row indices");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < M1.rows(); ++i)
        acc += row_cost(M1, M2, colw, i, v[static_cast<size_t>(i)] - 1);
    return acc;
}

double objective_d(const Eigen::MatrixXd& D1, const Eigen::MatrixXd& D2, const MappingVector& v,
                   const Weights& w) {
    w.validate();
    return objective(D1, D2, v, w.d_columns());
}

double objective_s(const Eigen::MatrixXd& S1, const Eigen::MatrixXd& S2, const MappingVector& v,
                   const Weights& w) {
    w.validate();
    return objective(S1, S2, v, w.s_columns());
}

BlockMatch branch_and_bound(const Eigen::MatrixXd& M1, const Eigen::MatrixXd& M2,
                            const Eigen::VectorXd& colw, const MatchOptions& opt) {
    check_block(M1, M2, colw);
    const Eigen::Index n = M1.rows();
    const long budget = opt.budget > 0 ? opt.budget : 50 * static_cast<long>(n) * n;

    BlockMatch out;
    out.mapping = identity_mapping(n);
    if (n <= 1) {
        out.objective = objective(M1, M2, out.mapping, colw);
        return out;
    }

    // 0-based working copy; F(x, y) == 1 means swapping the positions that
    // currently hold source rows x and y has not been branched out.
    std::vector<Eigen::Index> v(static_cast<size_t>(n));
    std::iota(v.begin(), v.end(), 0);
    double incumbent = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) incumbent += row_cost(M1, M2, colw, i, v[i]);
    Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic> F(n, n);
    F.setOnes();
    F.diagonal().setZero();

    bool exhausted = false;
    while (!exhausted) {
        bool accepted = false;
        for (Eigen::Index i = 0; i < n && !accepted; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const Eigen::Index x = v[static_cast<size_t>(i)], y = v[static_cast<size_t>(j)];
                if (!F(x, y)) continue;
                if (out.evaluations == budget) {
                    out.low_confidence = true;
                    for (size_t r = 0; r < v.size(); ++r)
                        out.mapping[r] = static_cast<int>(v[r]) + 1;
                    out.objective = objective(M1, M2, out.mapping, colw);
                    return out;
                }
                ++out.evaluations;
                // Swapping entries i and j replaces the row costs at those
                // two positions only.
                const double delta = row_cost(M1, M2, colw, i, y) + row_cost(M1, M2, colw, j, x) -
                                     row_cost(M1, M2, colw, i, x) - row_cost(M1, M2, colw, j, y);
                if (delta >= 0.0) {
                    F(x, y) = 0;
                } else {
                    std::swap(v[static_cast<size_t>(i)], v[static_cast<size_t>(j)]);
                    incumbent += delta;
                    // A branched-out entry stays valid only while both of its
                    // rows keep their positions; re-open everything touching
                    // the two rows that moved.
                    F.row(x).setOnes();
                    F.col(x).setOnes();
                    F.row(y).setOnes();
                    F.col(y).setOnes();
                    F.diagonal().setZero();
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) exhausted = true;
    }

    for (size_t i = 0; i < v.size(); ++i) out.mapping[i] = static_cast<int>(v[i]) + 1;
    out.objective = objective(M1, M2, out.mapping, colw);
    return out;
}

MappingVector brute_force(const Eigen::MatrixXd& M1, const Eigen::MatrixXd& M2,
                          const Eigen::VectorXd& colw) {
    check_block(M1, M2, colw);
    const Eigen::Index n = M1.rows();
    if (n > 9) fail(Errc::TooLarge, "brute force is guarded to 9 rows (factorial blowup)");
    MappingVector v = identity_mapping(n);
    if (n <= 1) return v;
    MappingVector best = v;
    double best_f = objective(M1, M2, v, colw);
    while (std::next_permutation(v.begin(), v.end())) {
        const double f = objective(M1, M2, v, colw);
        if (f < best_f) {
            best_f = f;
            best = v;
        }
    }
    return best;
}

MatchResult match_mappings(const PoleResidueROM& target, const PoleResidueROM& source,
                           const Weights& w, const MatchOptions& opt) {
    w.validate();
    if (target.nd() != source.nd() || target.ns() != source.ns())
        fail(Errc::SizeMismatch, "pole counts differ: (" + std::to_string(target.nd()) + "," +
                                     std::to_string(target.ns()) + ") vs (" +
                                     std::to_string(source.nd()) + "," +
                                     std::to_string(source.ns()) + ")");
    const BlockMatch d = branch_and_bound(target.D, source.D, w.d_columns(), opt);
    const BlockMatch s = branch_and_bound(target.S, source.S, w.s_columns(), opt);
    MatchResult out;
    out.v_d = d.mapping;
    out.v_s = s.mapping;
    out.objective_d = d.objective;
    out.objective_s = s.objective;
    out.evaluations = d.evaluations + s.evaluations;
    out.low_confidence = d.low_confidence || s.low_confidence;
    return out;
}

PoleResidueROM match(const PoleResidueROM& target, const PoleResidueROM& source, const Weights& w,
                     const MatchOptions& opt) {
    const MatchResult m = match_mappings(target, source, w, opt);
    PoleResidueROM out;
    out.D = apply_mapping(m.v_d, source.D);
    out.S = apply_mapping(m.v_s, source.S);
    out.param = source.param;
    return out;
}

RomDistance distance(const PoleResidueROM& rom1, const PoleResidueROM& rom2, const Weights& w,
                     const MatchOptions& opt) {
    const MatchResult m = match_mappings(rom1, rom2, w, opt);
    const double r_d = std::sqrt(m.objective_d);
    const double r_s = std::sqrt(m.objective_s);
    RomDistance out;
    out.distance = r_d + r_s;
    if (rom1.nd() > 0) {
        const double nd = rom1.D.norm();
        if (nd == 0.0) fail(Errc::ZeroNorm, "||D1||_F is zero while the D block is nonempty");
        out.relative_error += r_d / nd;
    }
    if (rom1.ns() > 0) {
        const double ns = rom1.S.norm();
        if (ns == 0.0) fail(Errc::ZeroNorm, "||S1||_F is zero while the S block is nonempty");
        out.relative_error += r_s / ns;
    }
    return out;
}

}  // namespace polematch
