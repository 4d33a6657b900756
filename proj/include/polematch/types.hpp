#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace polematch {

enum class Errc {
    InvalidArgument,
    NonSimpleEigenvalue,
    DefectiveMatrix,
    PoleEvaluation,
    SingularSystem,
    ShapeMismatch,
    SizeMismatch,
    TooLarge,
    TooManyPoles,
    ZeroNorm,
    EmptyRepository,
    OutOfDomain,
    Underdetermined,
    IllConditioned,
    RefineDepthExceeded,
    OracleFailure,
    GuardViolation,
    Io,
    Parse,
};

/// Error thrown by every operation in the library; carries a stable code so
/// callers (and the C API) can dispatch without string matching.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
    throw Error(code, what);
}

const char* errc_name(Errc code) noexcept;

/// Single-input single-output state-space system (A, B, C), as produced by
/// any MOR method. Descriptor systems (E != I) are out of scope; callers
/// must pre-invert E.
struct StateSpaceROM {
    Eigen::MatrixXd A;     // k x k
    Eigen::VectorXd B;     // k
    Eigen::RowVectorXd C;  // 1 x k

    Eigen::Index order() const { return A.rows(); }
    void validate() const;
};

/// Pole-residue realization. Each row of D is (a, b, c1, c2) for a conjugate
/// complex pole pair a +- i*b with b > 0; each row of S is (lambda, c) for a
/// real pole. The input vector of the realization carries no information and
/// is never stored.
struct PoleResidueROM {
    Eigen::MatrixXd D;  // n_d x 4
    Eigen::MatrixXd S;  // n_s x 2
    double param = 0.0;

    Eigen::Index nd() const { return D.rows(); }
    Eigen::Index ns() const { return S.rows(); }
    void validate() const;
};

/// Weights for pole positions (w_p) and residues (w_r). Expands to the
/// diagonal column weights diag{w_p, w_p, w_r, w_r} on D and diag{w_p, w_r}
/// on S.
struct Weights {
    double position = 1.0;
    double residue = 1.0;

    void validate() const;
    Eigen::Vector4d d_columns() const { return {position, position, residue, residue}; }
    Eigen::Vector2d s_columns() const { return {position, residue}; }
};

}  // namespace polematch
