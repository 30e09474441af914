#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ndhom/errors.hpp"

namespace ndhom {

enum class Phase : std::uint8_t { Cos = 0, Sin = 1 };

/// One real harmonic amp * cos(2*pi*k.y) or amp * sin(2*pi*k.y) on the torus.
/// Canonical form: the first nonzero component of k is positive (cos is even,
/// sin is odd, so signs are absorbed into the amplitude); a sin term with
/// k = 0 is identically zero and is rejected.
struct WaveTerm {
    std::array<int, 3> k{0, 0, 0};
    Phase phase{Phase::Cos};
    double amp{0.0};
};

inline bool is_zero_wavevector(const std::array<int, 3>& k) {
    return k[0] == 0 && k[1] == 0 && k[2] == 0;
}

/// Canonicalize a single term. Returns nullopt for a term that is
/// identically zero (amp 0, or sin with k = 0 when tolerate_zero_sin).
inline std::optional<WaveTerm> canonical_term(WaveTerm t, bool tolerate_zero_sin = false) {
    if (t.phase == Phase::Sin && is_zero_wavevector(t.k)) {
        if (tolerate_zero_sin) return std::nullopt;
        throw CanonicalError("sin term with zero wavevector is identically zero");
    }
    if (t.amp == 0.0) return std::nullopt;
    int lead = 0;
    for (int c : t.k) {
        if (c != 0) { lead = c; break; }
    }
    if (lead < 0) {
        for (int& c : t.k) c = -c;
        if (t.phase == Phase::Sin) t.amp = -t.amp;
    }
    return t;
}

/// Combine a list of terms into canonical form: flip signs, merge duplicates,
/// drop exact zeros. Ordering is deterministic (lexicographic in (k, phase)).
inline std::vector<WaveTerm> canonicalize_terms(const std::vector<WaveTerm>& terms,
                                                bool tolerate_zero_sin = false) {
    std::map<std::array<int, 4>, double> acc;
    for (const WaveTerm& t : terms) {
        auto ct = canonical_term(t, tolerate_zero_sin);
        if (!ct) continue;
        std::array<int, 4> key{ct->k[0], ct->k[1], ct->k[2], static_cast<int>(ct->phase)};
        acc[key] += ct->amp;
    }
    std::vector<WaveTerm> out;
    out.reserve(acc.size());
    for (const auto& [key, amp] : acc) {
        if (amp == 0.0) continue;
        out.push_back(WaveTerm{{key[0], key[1], key[2]},
                               key[3] == 0 ? Phase::Cos : Phase::Sin, amp});
    }
    return out;
}

inline int max_abs_component(const std::vector<WaveTerm>& terms) {
    int m = 0;
    for (const WaveTerm& t : terms)
        for (int c : t.k) m = std::max(m, std::abs(c));
    return m;
}

inline double evaluate_terms(const std::vector<WaveTerm>& terms, int dim, const double* y) {
    constexpr double two_pi = 2.0 * M_PI;
    double v = 0.0;
    for (const WaveTerm& t : terms) {
        double ph = 0.0;
        for (int d = 0; d < dim; ++d) ph += t.k[d] * y[d];
        ph *= two_pi;
        v += t.amp * (t.phase == Phase::Cos ? std::cos(ph) : std::sin(ph));
    }
    return v;
}

/// d/dy_axis of a single canonical term; cos(k.y) -> -2*pi*k_axis sin(k.y),
/// sin(k.y) -> 2*pi*k_axis cos(k.y). The wavevector is unchanged and stays
/// canonical.
inline std::vector<WaveTerm> derivative_terms(const std::vector<WaveTerm>& terms, int axis) {
    constexpr double two_pi = 2.0 * M_PI;
    std::vector<WaveTerm> out;
    out.reserve(terms.size());
    for (const WaveTerm& t : terms) {
        if (t.k[axis] == 0) continue;
        WaveTerm d = t;
        if (t.phase == Phase::Cos) {
            d.phase = Phase::Sin;
            d.amp = -t.amp * two_pi * t.k[axis];
        } else {
            d.phase = Phase::Cos;
            d.amp = t.amp * two_pi * t.k[axis];
        }
        out.push_back(d);
    }
    return canonicalize_terms(out, true);
}

/// Exact trigonometric product via product-to-sum identities. Term count can
/// reach |f| * |g| * 2 before merging.
inline std::vector<WaveTerm> multiply_terms(const std::vector<WaveTerm>& f,
                                            const std::vector<WaveTerm>& g) {
    std::vector<WaveTerm> out;
    out.reserve(2 * f.size() * g.size());
    auto add = [&out](std::array<int, 3> k, Phase p, double amp) {
        out.push_back(WaveTerm{k, p, amp});
    };
    for (const WaveTerm& a : f) {
        for (const WaveTerm& b : g) {
            std::array<int, 3> kp{a.k[0] + b.k[0], a.k[1] + b.k[1], a.k[2] + b.k[2]};
            std::array<int, 3> km{a.k[0] - b.k[0], a.k[1] - b.k[1], a.k[2] - b.k[2]};
            const double h = 0.5 * a.amp * b.amp;
            if (a.phase == Phase::Cos && b.phase == Phase::Cos) {
                add(km, Phase::Cos, h);
                add(kp, Phase::Cos, h);
            } else if (a.phase == Phase::Sin && b.phase == Phase::Sin) {
                add(km, Phase::Cos, h);
                add(kp, Phase::Cos, -h);
            } else if (a.phase == Phase::Sin && b.phase == Phase::Cos) {
                add(kp, Phase::Sin, h);
                add(km, Phase::Sin, h);
            } else { // cos * sin
                add(kp, Phase::Sin, h);
                add(km, Phase::Sin, -h);
            }
        }
    }
    return canonicalize_terms(out, true);
}

/// Lift a 1D term list t -> f(y1 + sign*y2) into 2D.
inline std::vector<WaveTerm> lift_1d_to_diagonal(const std::vector<WaveTerm>& terms, int sign) {
    std::vector<WaveTerm> out;
    out.reserve(terms.size());
    for (const WaveTerm& t : terms) {
        WaveTerm u = t;
        u.k = {t.k[0], sign * t.k[0], 0};
        out.push_back(u);
    }
    return canonicalize_terms(out, true);
}

/// Embed a 2D term list into 3D (constant along y3).
inline std::vector<WaveTerm> lift_2d_to_3d(const std::vector<WaveTerm>& terms) {
    return terms; // wavevector storage is already 3-wide with k3 = 0
}

} // namespace ndhom
