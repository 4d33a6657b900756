#include "polematch/types.hpp"

namespace polematch {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::NonSimpleEigenvalue: return "NonSimpleEigenvalue";
        case Errc::DefectiveMatrix: return "DefectiveMatrix";
        case Errc::PoleEvaluation: return "PoleEvaluation";
        case Errc::SingularSystem: return "SingularSystem";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::SizeMismatch: return "SizeMismatch";
        case Errc::TooLarge: return "TooLarge";
        case Errc::TooManyPoles: return "TooManyPoles";
        case Errc::ZeroNorm: return "ZeroNorm";
        case Errc::EmptyRepository: return "EmptyRepository";
        case Errc::OutOfDomain: return "OutOfDomain";
        case Errc::Underdetermined: return "Underdetermined";
        case Errc::IllConditioned: return "IllConditioned";
        case Errc::RefineDepthExceeded: return "RefineDepthExceeded";
        case Errc::OracleFailure: return "OracleFailure";
        case Errc::GuardViolation: return "GuardViolation";
        case Errc::Io: return "Io";
        case Errc::Parse: return "Parse";
    }
    return "Unknown";
}

void StateSpaceROM::validate() const {
    if (A.rows() == 0 || A.rows() != A.cols())
        fail(Errc::InvalidArgument, "state-space matrix A must be square and nonempty");
    if (B.size() != A.rows())
        fail(Errc::InvalidArgument, "state-space B must have as many rows as A");
    if (C.size() != A.cols())
        fail(Errc::InvalidArgument, "state-space C must have as many columns as A");
}

void PoleResidueROM::validate() const {
    if (D.rows() > 0 && D.cols() != 4)
        fail(Errc::InvalidArgument, "D must have 4 columns");
    if (S.rows() > 0 && S.cols() != 2)
        fail(Errc::InvalidArgument, "S must have 2 columns");
    if (D.rows() == 0 && S.rows() == 0)
        fail(Errc::InvalidArgument, "pole-residue ROM must hold at least one pole");
    for (Eigen::Index i = 0; i < D.rows(); ++i) {
        if (!(D(i, 1) > 0.0))
            fail(Errc::InvalidArgument,
                 "D row " + std::to_string(i) + " violates the canonical half-plane choice (b <= 0)");
    }
}

void Weights::validate() const {
    if (position < 0.0 || residue < 0.0 || !(position + residue > 0.0))
        fail(Errc::InvalidArgument, "weights must be nonnegative with w_p + w_r > 0");
}

}  // namespace polematch
