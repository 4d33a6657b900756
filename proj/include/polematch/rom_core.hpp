#pragma once

#include <complex>

#include "polematch/types.hpp"

namespace polematch {

struct ConversionOptions {
    /// Two eigenvalues closer than simple_tol * spectral radius are treated
    /// as a repeated eigenvalue and rejected.
    double simple_tol = 1e-7;
    /// An eigenvalue with |Im| < imag_tol * (1 + |Re|) is classified as real.
    double imag_tol = 1e-9;
};

/// Converts a state-space ROM to the unified pole-residue realization.
/// Requires all eigenvalues of A to be simple; the result is canonical
/// (rows of D sorted by b then a, rows of S by lambda, every b > 0).
PoleResidueROM to_pole_residue(const StateSpaceROM& rom, double param,
                               const ConversionOptions& opt = {});

/// H(s) = sum_j c_j/(s - lambda_j) + sum_j [c1_j (s - a_j) - c2_j b_j] / ((s - a_j)^2 + b_j^2).
std::complex<double> transfer_function(const PoleResidueROM& rom, std::complex<double> s);

/// C (sI - A)^{-1} B via a dense solve. Verification oracle for the conversion.
std::complex<double> state_space_transfer(const StateSpaceROM& rom, std::complex<double> s);

/// Deterministic row order: D by b ascending (ties by a), S by lambda
/// ascending (ties by residue). The transfer function is unchanged.
PoleResidueROM canonicalize(PoleResidueROM rom);

}  // namespace polematch
