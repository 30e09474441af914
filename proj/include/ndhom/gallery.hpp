#pragma once

#include <string>
#include <vector>

#include "ndhom/field.hpp"
#include "ndhom/tensor.hpp"

namespace ndhom {

struct ReferenceValue {
    int j, k, l; ///< zero-based tensor indices
    double value;
    double tol;
    std::string provenance;
};

struct GalleryEntry {
    std::string name;
    CoefficientField field;
    std::vector<ReferenceValue> reference_tensor;
    Verdict expected_verdict;
    std::string citation;
};

GalleryEntry gallery(const std::string& name);
std::vector<std::string> gallery_names();

/// Named closed-form builders behind the gallery, reusable by suites that
/// need companion fields (e.g. the type-eps2 base whose identity shift is
/// type-eps).
namespace gallery_fields {

/// (1/r) diag(a, 2-a) with the closed-form invariant measure r.
CoefficientField st2d(int res = 128);
/// The closed-form invariant measure of st2d as a field.
ScalarField st2d_r(int res = 128);
/// Constant-trace 2d map with off-diagonal coupling, type-eps.
CoefficientField const_trace_2d(int res = 64);
/// Constant-trace 3d diagonal lift diag(b1, b2, 10 - b1 - b2), type-eps.
CoefficientField trace10_3d(int res = 32);
/// Base of the identity-shift pair: (1/r) diag(a, 2-a), type-eps2.
CoefficientField a_plus_identity_base(int res = 128);
/// The shifted field base + I2, type-eps.
CoefficientField a_plus_identity(int res = 128);
/// Diagonal field with constant invariant measure r = 1, type-eps.
CoefficientField r_one_diagonal(int res = 64);
/// diag(a1(y1), a2(y2)); reversible, type-eps2.
CoefficientField separable_diag(int res = 32);
/// Even (cosine-only) entries; shifted-even symmetry forces type-eps2.
CoefficientField shifted_even(int res = 32);

} // namespace gallery_fields

} // namespace ndhom
