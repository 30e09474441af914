#pragma once

#include <utility>

#include "ndhom/field.hpp"

namespace ndhom {

struct SolveOptions {
    int resolution = 0;       ///< grid per axis; 0 takes the coefficient field's
    double tol = 1e-11;       ///< weak-residual L_inf target (times data scale)
    int max_iterations = 500; ///< total Krylov iteration cap
    int restart = 50;         ///< GMRES restart length
    double compat_tol = 1e-8; ///< Fredholm-defect gate for cell solves
};

/// Residuals are reported two ways. residual_linf is the weak residual: the
/// pointwise sup of the residual smoothed by the inverse Laplacian symbol,
/// which is the quantity the Fredholm theory controls (pairing the strong
/// residual against C^2 test fields) and the one the 1e-11 tolerance governs.
/// residual_raw_linf is the plain pointwise sup of the strong residual,
/// whose floor grows like N^2 * machine-eps through the D^2 symbol.
struct SolveReport {
    double residual_linf = 0.0;
    int iterations = 0;
    double compatibility_defect = 0.0;
    int resolution_used = 0;
    double residual_raw_linf = 0.0;
};

/// Invariant measure: -D^2:(rA) = 0, r > 0, mean 1. Parameterized as
/// r = 1 + s with s mean-zero, solved by preconditioned restarted GMRES on
/// the Fourier-Galerkin truncation with dealiased products.
std::pair<ScalarField, SolveReport> solve_invariant_measure(const CoefficientField& A,
                                                            const SolveOptions& opts = {});

/// Cell problem: -A:D^2 v = rhs, mean-zero v. Requires the Fredholm
/// compatibility int_Y r*rhs ~ 0; the rhs component along the discrete
/// left-null vector (the computed r) is projected out and its size recorded
/// as compatibility_defect.
std::pair<ScalarField, SolveReport> solve_cell(const CoefficientField& A, const ScalarField& r,
                                               const ScalarField& rhs,
                                               const SolveOptions& opts = {});

/// Periodic Poisson problem -Lap w = rhs with mean-zero rhs; exact spectral
/// inversion (each mode divided by 4 pi^2 |k|^2). Exact term lists are
/// preserved.
ScalarField solve_poisson(const ScalarField& rhs);

/// Independent verification channel: dense nullspace solve (SVD) of the full
/// discrete adjoint operator matrix in the nodal basis. Restricted to
/// n <= 2, N <= 24.
ScalarField invariant_measure_dense(const CoefficientField& A, int resolution);

} // namespace ndhom
