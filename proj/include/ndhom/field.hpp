#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ndhom/spectral.hpp"
#include "ndhom/wave.hpp"

namespace ndhom {

/// Real Y-periodic scalar field on the torus T^n, n in {1,2,3}.
///
/// Dual representation: an exact trigonometric term list (authoritative when
/// present) plus cached samples on the N^n grid. Fields produced by solvers
/// carry only the grid/spectral form; fields built from short term lists keep
/// the exact form so that small products and integrals stay exact.
class ScalarField {
public:
    /// Largest resolution accepted when growing a product grid, per dimension.
    static int resolution_cap(int dim);

    static ScalarField from_terms(int dim, std::vector<WaveTerm> terms, int resolution);
    static ScalarField from_grid(spectral::RealGrid grid);
    static ScalarField from_spectrum(const spectral::Spectrum& spec);
    static ScalarField from_function(int dim, int resolution,
                                     const std::function<double(const std::array<double, 3>&)>& f);
    static ScalarField constant(int dim, double value, int resolution = 4);

    int dimension() const { return dim_; }
    int resolution() const { return res_; }
    bool has_exact_terms() const { return exact_terms_; }
    const std::vector<WaveTerm>& terms() const; // throws unless exact
    const std::vector<double>& values() const { return values_; }

    /// Bandwidth: max |k| over axes (exact form), else res/2 - 1.
    int bandwidth() const;

    /// Full term list; synthesized from the spectrum for grid-backed fields,
    /// dropping |amp| <= tol.
    std::vector<WaveTerm> spectral_terms(double tol = 0.0) const;

    spectral::Spectrum spectrum() const;
    /// Samples on the m^n grid; exact for m >= resolution or when exact terms
    /// are available.
    spectral::RealGrid sample(int m) const;

    double evaluate(const std::array<double, 3>& y) const;
    double mean() const;
    double min_value() const;
    double max_value() const;
    double linf() const;

    ScalarField resample(int new_resolution) const;
    /// Galerkin projection onto the band of new_resolution (lossy when the
    /// bandwidth exceeds it, unlike resample which refuses).
    ScalarField truncated(int new_resolution) const;
    ScalarField scaled(double factor) const;
    ScalarField plus_constant(double constant) const;

    friend ScalarField add(const ScalarField& f, const ScalarField& g);
    friend ScalarField sub(const ScalarField& f, const ScalarField& g);

private:
    int dim_{0};
    int res_{0};
    bool exact_terms_{false};
    std::vector<WaveTerm> terms_;
    std::vector<double> values_;
};

/// Exact trigonometric product when both term lists are short; dealiased
/// grid product on an enlarged grid otherwise.
ScalarField multiply(const ScalarField& f, const ScalarField& g);

/// Exact spectral derivative for multi-index |order| <= 3.
ScalarField derivative(const ScalarField& f, const std::array<int, 3>& order);

/// Integral over Y of f*g, exact for band-limited fields.
double inner_product(const ScalarField& f, const ScalarField& g);

ScalarField add(const ScalarField& f, const ScalarField& g);
ScalarField sub(const ScalarField& f, const ScalarField& g);

inline ScalarField operator+(const ScalarField& f, const ScalarField& g) { return add(f, g); }
inline ScalarField operator-(const ScalarField& f, const ScalarField& g) { return sub(f, g); }
inline ScalarField operator*(const ScalarField& f, const ScalarField& g) { return multiply(f, g); }

/// Symmetric matrix-valued Y-periodic field A(y) with uniform-ellipticity
/// metadata. Entries are stored in the upper triangle.
class CoefficientField {
public:
    /// entries: row-major upper triangle, length n(n+1)/2:
    /// n=2 -> {a11, a12, a22}; n=3 -> {a11, a12, a13, a22, a23, a33}.
    static CoefficientField from_upper(int dim, std::vector<ScalarField> entries);
    static CoefficientField diagonal(std::vector<ScalarField> diag);
    static CoefficientField constant(int dim, const std::vector<double>& upper, int resolution = 4);

    int dimension() const { return dim_; }
    const ScalarField& entry(int k, int l) const;
    double lambda_min() const { return lambda_min_; }
    double lambda_max() const { return lambda_max_; }
    bool is_diagonal(double tol = 0.0) const;
    /// Max entry resolution.
    int resolution() const;
    int bandwidth() const;

    /// trace field a11 + ... + ann
    ScalarField trace() const;
    CoefficientField scaled(double factor) const;
    /// A + c*I
    CoefficientField plus_identity(double c) const;
    /// gamma(y) * A(y); the product follows field multiplication rules.
    CoefficientField scaled_by(const ScalarField& gamma) const;
    CoefficientField plus(const CoefficientField& other) const;

    static int upper_index(int dim, int k, int l);

private:
    int dim_{0};
    std::vector<ScalarField> upper_;
    double lambda_min_{0.0};
    double lambda_max_{0.0};
};

} // namespace ndhom
