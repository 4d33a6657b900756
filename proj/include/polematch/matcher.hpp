#pragma once

#include <vector>

#include "polematch/types.hpp"

namespace polematch {

/// Row mapping: entry i (1-based values) names the source row placed at
/// position i. Valid mappings are permutations of {1, ..., n}.
using MappingVector = std::vector<int>;

MappingVector identity_mapping(Eigen::Index n);
bool is_permutation(const MappingVector& v, Eigen::Index n);

/// Row i of the result is row v[i] of M.
Eigen::MatrixXd apply_mapping(const MappingVector& v, const Eigen::MatrixXd& M);

/// Squared Frobenius norm of the column-weighted row-permuted difference,
/// ||M1 W - M(v, M2) W||_F^2 with W = diag(column_weights).
double objective(const Eigen::MatrixXd& M1, const Eigen::MatrixXd& M2, const MappingVector& v,
                 const Eigen::VectorXd& column_weights);

double objective_d(const Eigen::MatrixXd& D1, const Eigen::MatrixXd& D2, const MappingVector& v,
                   const Weights& w);
double objective_s(const Eigen::MatrixXd& S1, const Eigen::MatrixXd& S2, const MappingVector& v,
                   const Weights& w);

struct MatchOptions {
    /// Maximum objective evaluations per block solve; 0 picks 50 n^2.
    /// Exceeding the budget returns the incumbent flagged low-confidence.
    long budget = 0;
};

struct BlockMatch {
    MappingVector mapping;
    double objective = 0.0;  // recomputed from scratch for the final mapping
    long evaluations = 0;
    bool low_confidence = false;
};

/// Branch-and-bound solve of the single-block row-matching problem. Starts
/// from the identity mapping; a swap that fails to strictly improve the
/// incumbent is branched out, an improving swap is accepted and restarts the
/// scan. Terminates when every remaining swap has been branched out.
BlockMatch branch_and_bound(const Eigen::MatrixXd& M1, const Eigen::MatrixXd& M2,
                            const Eigen::VectorXd& column_weights, const MatchOptions& opt = {});

/// Exhaustive minimizer (guarded to n <= 9 rows). Deterministic tie-break:
/// lexicographically smallest mapping.
MappingVector brute_force(const Eigen::MatrixXd& M1, const Eigen::MatrixXd& M2,
                          const Eigen::VectorXd& column_weights);

struct MatchResult {
    MappingVector v_d;
    MappingVector v_s;
    double objective_d = 0.0;
    double objective_s = 0.0;
    long evaluations = 0;
    bool low_confidence = false;

    double objective() const { return objective_d + objective_s; }
};

/// Solves both block problems (they decouple) for matching source onto target.
MatchResult match_mappings(const PoleResidueROM& target, const PoleResidueROM& source,
                           const Weights& w, const MatchOptions& opt = {});

/// Returns source with rows permuted by the optimal mappings against target.
PoleResidueROM match(const PoleResidueROM& target, const PoleResidueROM& source, const Weights& w,
                     const MatchOptions& opt = {});

struct RomDistance {
    double distance = 0.0;        // r
    double relative_error = 0.0;  // e
};

/// r = ||D1 W_d - P(D2) W_d||_F + ||S1 W_s - P(S2) W_s||_F with P the optimal
/// matching; e divides the two terms by ||D1||_F and ||S1||_F respectively.
RomDistance distance(const PoleResidueROM& rom1, const PoleResidueROM& rom2, const Weights& w,
                     const MatchOptions& opt = {});

}  // namespace polematch
