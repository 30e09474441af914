#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "ndhom/field.hpp"
#include "ndhom/solver.hpp"

namespace ndhom {

struct TensorOptions {
    int resolution = 0; ///< working grid per axis; 0 derives it from A
    SolveOptions solve;
};

/// Third-order homogenized tensor c_j^{kl} = int_Y r A e_j . grad v^{kl},
/// its full symmetrization C_jkl = c_j^{kl} + c_k^{jl} + c_l^{jk}, and the
/// effective matrix Abar = int_Y r A.
struct ThirdOrderTensor {
    int dim = 0;
    int resolution = 0;
    std::vector<double> c;     // dim^3, index (j*dim + k)*dim + l
    std::vector<double> c_sym; // dim^3
    Eigen::MatrixXd effective;
    double scale = 0.0; // Frobenius norm of the effective matrix
    std::vector<SolveReport> reports;
    ScalarField r;                       ///< invariant measure used
    std::vector<ScalarField> correctors; ///< upper triangle v^{kl}

    const ScalarField& corrector(int k, int l) const {
        return correctors[CoefficientField::upper_index(dim, k, l)];
    }
    double cval(int j, int k, int l) const { return c[(j * dim + k) * dim + l]; }
    double Cval(int j, int k, int l) const { return c_sym[(j * dim + k) * dim + l]; }
    double max_abs_c() const;
    double max_abs_c_sym() const;
};

/// Abar = int_Y r A, entrywise r-weighted averages.
Eigen::MatrixXd effective_matrix(const CoefficientField& A, const ScalarField& r);

/// Full pipeline: invariant measure, all cell problems, tensor assembly.
ThirdOrderTensor third_order_tensor(const CoefficientField& A, const TensorOptions& opts = {});

enum class Verdict { TypeEps2, TypeEps, Unresolved };

std::string verdict_name(Verdict v);

/// Two-resolution classification. The verdict quantity is max |C_jkl|
/// (max |c_j^kl| for the diagonal/constant-trace shortcut), thresholded at
/// 1e-7 * max(1, |Abar|_F); a verdict is only issued when the N and 2N
/// tensors agree to threshold/10 and give the same answer.
struct ClassificationReport {
    ThirdOrderTensor tensor;      // at the base resolution
    ThirdOrderTensor tensor_fine; // at twice the base resolution
    Verdict verdict = Verdict::Unresolved;
    double max_C = 0.0;
    double threshold = 0.0;
    double gap = 0.0; // max entrywise disagreement between the two tensors
    bool diagonal_shortcut = false;
};

ClassificationReport classify(const CoefficientField& A, const TensorOptions& opts = {});

/// Verdict from the raw c-values; valid when A is diagonal, or n = 2 with
/// constant trace. Throws DomainError otherwise.
ClassificationReport diagonal_classify_shortcut(const CoefficientField& A,
                                                const TensorOptions& opts = {});

/// Weak divergence-free check for the rows of rA (the reversible case, which
/// forces the whole tensor to vanish): returns max_i |div(r A e_i)| weighted
/// by the inverse gradient symbol.
double reversibility_defect(const CoefficientField& A, const ScalarField& r);

} // namespace ndhom
