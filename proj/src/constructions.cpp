#include "ndhom/constructions.hpp"

#include <algorithm>
#include <cmath>

#include "ndhom/errors.hpp"
#include "ndhom/spectral.hpp"

namespace ndhom {

namespace {

ScalarField transform_values(const ScalarField& f, const std::function<double(double)>& op) {
    spectral::RealGrid g(f.dimension(), f.resolution());
    g.v = f.values();
    for (double& v : g.v) v = op(v);
    return ScalarField::from_grid(std::move(g));
}

/// A:D^2 phi as a scalar field.
ScalarField contract_hessian(const CoefficientField& A, const ScalarField& phi) {
    ScalarField acc = ScalarField::constant(A.dimension(), 0.0);
    for (int s = 0; s < A.dimension(); ++s)
        for (int t = s; t < A.dimension(); ++t) {
            std::array<int, 3> order{0, 0, 0};
            order[s] += 1;
            order[t] += 1;
            ScalarField term = multiply(A.entry(s, t), derivative(phi, order));
            acc = add(acc, s == t ? term : term.scaled(2.0));
        }
    return acc;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& C) {
    return 0.5 * (C + C.transpose());
}

/// 1d antiderivative with zero mean (terms only).
ScalarField antiderivative_1d(const ScalarField& f) {
    constexpr double two_pi = 2.0 * M_PI;
    std::vector<WaveTerm> out;
    for (const WaveTerm& t : f.terms()) {
        if (is_zero_wavevector(t.k)) {
            if (std::abs(t.amp) > 1e-14)
                throw Error("antiderivative requires a mean-zero profile");
            continue;
        }
        WaveTerm u = t;
        if (t.phase == Phase::Cos) {
            u.phase = Phase::Sin;
            u.amp = t.amp / (two_pi * t.k[0]);
        } else {
            u.phase = Phase::Cos;
            u.amp = -t.amp / (two_pi * t.k[0]);
        }
        out.push_back(u);
    }
    return ScalarField::from_terms(1, std::move(out), f.resolution());
}

} // namespace

ScalarField reciprocal(const ScalarField& f) {
    if (f.min_value() <= 0.0)
        throw PositivityError("reciprocal of a field that is not strictly positive");
    return transform_values(f, [](double v) { return 1.0 / v; });
}

CoefficientField divide_entries(const CoefficientField& A, const ScalarField& denom) {
    const int n = A.dimension();
    const int res = std::max(A.resolution(), denom.resolution());
    const std::vector<double> d = denom.sample(res).v;
    std::vector<ScalarField> entries;
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            spectral::RealGrid g = A.entry(k, l).sample(res);
            for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] /= d[i];
            entries.push_back(ScalarField::from_grid(std::move(g)));
        }
    return CoefficientField::from_upper(n, std::move(entries));
}

double sup_distance(const CoefficientField& A, const CoefficientField& B) {
    if (A.dimension() != B.dimension()) throw Error("dimension mismatch in sup_distance");
    double d = 0.0;
    for (int k = 0; k < A.dimension(); ++k)
        for (int l = k; l < A.dimension(); ++l)
            d = std::max(d, sub(A.entry(k, l), B.entry(k, l)).linf());
    return d;
}

CplusAM build_c_plus_am(const Eigen::MatrixXd& Cmat, const Eigen::MatrixXd& Mmat,
                        const ScalarField& a, const SolveOptions& opts) {
    const int n = a.dimension();
    if (Cmat.rows() != n || Cmat.cols() != n || Mmat.rows() != n || Mmat.cols() != n)
        throw Error("matrix dimensions must match the scalar field");

    std::vector<ScalarField> entries;
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l)
            entries.push_back(a.scaled(Mmat(k, l)).plus_constant(Cmat(k, l)));
    CoefficientField A = CoefficientField::from_upper(n, std::move(entries));

    CplusAM out{Cmat, Mmat, a, A, ScalarField(), ScalarField(), ScalarField(), 0.0, {}, {}};
    auto [r, rrep] = solve_invariant_measure(A, opts);
    out.r_solved = r;
    out.r_report = rrep;
    out.abar = inner_product(r, a);

    auto [w, wrep] = solve_cell(A, r, a.plus_constant(-out.abar), opts);
    out.w = w;
    out.w_report = wrep;

    ScalarField md2w = ScalarField::constant(n, 0.0);
    for (int s = 0; s < n; ++s)
        for (int t = s; t < n; ++t) {
            std::array<int, 3> order{0, 0, 0};
            order[s] += 1;
            order[t] += 1;
            const double fac = (s == t) ? Mmat(s, t) : 2.0 * Mmat(s, t);
            md2w = add(md2w, derivative(w, order).scaled(fac));
        }
    out.r_pred = md2w.plus_constant(1.0);
    return out;
}

CharacterizationData2D characterize_2d_diagonal(const ScalarField& a, const ScalarField& b,
                                                const SolveOptions& opts) {
    if (a.dimension() != 2 || b.dimension() != 2)
        throw DomainError("characterization requires two-dimensional data");
    if (a.min_value() <= 0.0) throw PositivityError("a must be strictly positive");
    if (b.min_value() <= -1.0 || b.max_value() >= 1.0)
        throw PositivityError("b must take values in (-1, 1)");

    CharacterizationData2D out;
    out.a = a;
    out.b = b;

    // B = diag(1+b, 1-b), A = a B
    CoefficientField B =
        CoefficientField::diagonal({b.plus_constant(1.0), b.scaled(-1.0).plus_constant(1.0)});
    CoefficientField A = CoefficientField::diagonal(
        {multiply(a, b.plus_constant(1.0)), multiply(a, b.scaled(-1.0).plus_constant(1.0))});

    auto [r, rrep] = solve_invariant_measure(A, opts);
    out.r = r;
    out.abar = inner_product(r, a);
    auto [wA, wArep] = solve_cell(A, r, a.plus_constant(-out.abar), opts);
    out.w_A = wA;

    auto [rB, rBrep] = solve_invariant_measure(B, opts);
    out.r_B = rB;
    out.bbar = inner_product(rB, b);
    out.w_B = solve_poisson(multiply(rB, b).plus_constant(-out.bbar));

    out.I1 = inner_product(derivative(out.w_A, {1, 0, 0}), derivative(out.w_B, {0, 2, 0}));
    out.I2 = inner_product(derivative(out.w_A, {0, 1, 0}), derivative(out.w_B, {2, 0, 0}));

    out.c_pred.assign(8, 0.0);
    auto set = [&](int j, int k, int l, double v) { out.c_pred[(j * 2 + k) * 2 + l] = v; };
    set(0, 0, 0, -2.0 * out.abar * (1.0 + out.bbar) * out.I1);
    set(1, 0, 0, 2.0 * out.abar * (1.0 + out.bbar) * out.I2);
    set(0, 1, 1, -2.0 * out.abar * (1.0 - out.bbar) * out.I1);
    set(1, 1, 1, 2.0 * out.abar * (1.0 - out.bbar) * out.I2);

    const double scale =
        out.abar * std::sqrt((1.0 + out.bbar) * (1.0 + out.bbar) +
                             (1.0 - out.bbar) * (1.0 - out.bbar));
    out.threshold = 1e-7 * std::max(1.0, scale);
    double maxc = 0.0;
    for (double v : out.c_pred) maxc = std::max(maxc, std::abs(v));
    out.verdict = maxc <= out.threshold ? Verdict::TypeEps2 : Verdict::TypeEps;
    return out;
}

QCriterion q_criterion_special(const ScalarField& r1, const ScalarField& r2, const ScalarField& a,
                               double c) {
    if (r1.dimension() != 1 || r2.dimension() != 1)
        throw DomainError("profiles r1, r2 must be one-dimensional");
    if (a.dimension() != 2) throw DomainError("a must be two-dimensional");
    if (a.min_value() <= 0.0 || a.max_value() >= c)
        throw PositivityError("a must take values in (0, c)");

    // r(y) = r1(y1+y2) + r2(y1-y2) must be a positive density
    const int res = std::max({r1.resolution(), r2.resolution(), 16});
    ScalarField r_plus = ScalarField::from_terms(2, lift_1d_to_diagonal(r1.spectral_terms(), 1),
                                                 std::max(res, 2 * (r1.bandwidth() + 1)));
    ScalarField r_minus = ScalarField::from_terms(2, lift_1d_to_diagonal(r2.spectral_terms(), -1),
                                                  std::max(res, 2 * (r2.bandwidth() + 1)));
    ScalarField r2d = add(r_plus, r_minus);
    if (r2d.min_value() <= 0.0)
        throw PositivityError("r1(y1+y2) + r2(y1-y2) is not strictly positive");

    QCriterion out;
    out.R1 = solve_poisson(r1.plus_constant(-r1.mean()).scaled(-1.0));
    out.R2 = solve_poisson(r2.plus_constant(-r2.mean()).scaled(-1.0));

    ScalarField R1p = ScalarField::from_terms(
        2, lift_1d_to_diagonal(derivative(out.R1, {1, 0, 0}).terms(), 1), r_plus.resolution());
    ScalarField R2p = ScalarField::from_terms(
        2, lift_1d_to_diagonal(derivative(out.R2, {1, 0, 0}).terms(), -1), r_minus.resolution());
    out.Q1 = inner_product(a, R1p);
    out.Q2 = inner_product(a, R2p);

    const double a0 = a.mean();
    out.c111 = (a0 / c) * (out.Q1 + out.Q2);
    out.c211 = (a0 / c) * (out.Q2 - out.Q1);
    out.c122 = ((c - a0) / c) * (out.Q1 + out.Q2);
    out.c222 = ((c - a0) / c) * (out.Q2 - out.Q1);

    const double maxc = std::max({std::abs(out.c111), std::abs(out.c211), std::abs(out.c122),
                                  std::abs(out.c222)});
    out.verdict = maxc <= 1e-7 ? Verdict::TypeEps2 : Verdict::TypeEps;
    return out;
}

OrbitScaled orbit_scale(const CoefficientField& A, const Eigen::MatrixXd& Cmat,
                        const SolveOptions& opts) {
    const int n = A.dimension();
    const Eigen::MatrixXd Cs = symmetrized(Cmat);

    ScalarField ca = ScalarField::constant(n, 0.0);
    for (int s = 0; s < n; ++s)
        for (int t = s; t < n; ++t) {
            const double fac = (s == t) ? Cs(s, t) : 2.0 * Cs(s, t);
            if (fac != 0.0) ca = add(ca, A.entry(s, t).scaled(fac));
        }
    if (ca.min_value() <= 0.0)
        throw PositivityError("C:A must be strictly positive for the orbit scaling");

    OrbitScaled out{CoefficientField(), ScalarField(), 0.0};
    out.gamma = reciprocal(ca);
    out.scaled = divide_entries(A, ca);

    auto [r, rrep] = solve_invariant_measure(A, opts);
    Eigen::MatrixXd Abar = effective_matrix(A, r);
    out.gamma_bar = 1.0 / (Cs.cwiseProduct(Abar)).sum();
    return out;
}

ScalarField orbit_closed_form_w(const CoefficientField& A, const Eigen::MatrixXd& Cmat,
                                const SolveOptions& opts) {
    const int n = A.dimension();
    const Eigen::MatrixXd Cs = symmetrized(Cmat);

    auto [r, rrep] = solve_invariant_measure(A, opts);
    ScalarField w = ScalarField::constant(n, 0.0);
    double cabar = 0.0;
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            const double abar_kl = inner_product(r, A.entry(k, l));
            const double fac = (k == l) ? Cs(k, l) : 2.0 * Cs(k, l);
            cabar += fac * abar_kl;
            if (Cs(k, l) == 0.0) continue;
            auto [v, vrep] = solve_cell(A, r, A.entry(k, l).truncated(r.resolution())
                                                  .plus_constant(-abar_kl), opts);
            w = add(w, v.scaled(fac));
        }
    return w.scaled(-1.0 / cabar);
}

TypeEpsPerturbation perturb_type_eps(const CoefficientField& A, double s,
                                     const SolveOptions& opts) {
    if (A.dimension() != 2 || !A.is_diagonal(1e-12))
        throw DomainError("perturbation requires a diagonal two-dimensional field");
    ScalarField tr = A.trace();
    if (sub(tr, ScalarField::constant(2, 2.0)).linf() > 1e-10)
        throw DomainError("perturbation requires trace identically 2 (A = diag(1+a, 1-a))");

    auto [r, rrep] = solve_invariant_measure(A, opts);
    const ScalarField& a11 = A.entry(0, 0); // 1 + a
    ScalarField ra11 = multiply(r, a11);

    // the construction degenerates when d1[r(1+a)] vanishes identically
    const double dscale = std::max(1.0, ra11.linf());
    if (derivative(ra11, {1, 0, 0}).linf() <= 2.0 * M_PI * 1e-9 * dscale)
        throw DegenerateError("d1[r(1+a)] vanishes; the scaling cannot produce a type-eps field");

    TypeEpsPerturbation out;
    out.abar = inner_product(r, a11) - 1.0; // int r*a with a = a11 - 1
    ScalarField ra = sub(ra11, r);          // r*a
    out.w = solve_poisson(ra.plus_constant(-out.abar));
    out.phi = derivative(out.w, {1, 0, 0}).scaled(s);

    ScalarField denom = contract_hessian(A, out.phi).plus_constant(1.0);
    if (denom.min_value() <= 0.0)
        throw PositivityError("1 + A:D^2 phi loses positivity; reduce s");
    out.gamma = reciprocal(denom);
    out.result = divide_entries(A, denom);

    auto d12w = derivative(out.w, {1, 1, 0});
    out.predicted_c111 = -2.0 * s * (1.0 + out.abar) * inner_product(d12w, d12w);
    return out;
}

DensityPerturbation density_perturb(const CoefficientField& A0, double delta, double s,
                                    const TensorOptions& opts,
                                    const std::vector<WaveTerm>& zeta) {
    const int n = A0.dimension();
    if (n < 2) throw DomainError("the density construction requires n >= 2");

    SolveOptions so = opts.solve;
    if (opts.resolution > 0) so.resolution = opts.resolution;

    auto [r0, r0rep] = solve_invariant_measure(A0, so);

    DensityPerturbation out;

    // does some mean-zero q already see the flux r0 A0 e1? Measured weakly
    // (inverse gradient symbol) so solver noise in high modes cannot trip it.
    ScalarField flux_div = ScalarField::constant(n, 0.0);
    for (int j = 0; j < n; ++j) {
        std::array<int, 3> d1{0, 0, 0};
        d1[j] = 1;
        flux_div = add(flux_div, derivative(multiply(r0, A0.entry(0, j)), d1));
    }
    double flux_weak = 0.0;
    {
        spectral::Spectrum s = flux_div.spectrum();
        spectral::for_each_mode(s, [&](std::size_t idx, int k0, int k1, int k2) {
            const double kn = std::sqrt(double(k0) * k0 + double(k1) * k1 + double(k2) * k2);
            if (kn > 0.0) s.c[idx] /= 2.0 * M_PI * kn;
        });
        flux_weak = ScalarField::from_spectrum(s).linf();
    }
    const bool flux_free = flux_weak <= 1e-7 * std::max(1.0, A0.lambda_max());

    // profile zeta(y1+y2) and its mean-zero antiderivative q. When the flux
    // is already visible, q is taken as the potential of its divergence,
    // which pairs with it by construction: int (r A e1).grad q = -int |grad q|^2.
    ScalarField zeta1d = ScalarField::from_terms(
        1, zeta, std::max(16, 2 * (max_abs_component(zeta) + 1)));
    if (derivative(zeta1d, {1, 0, 0}).linf() == 0.0)
        throw DomainError("zeta must have a nonvanishing derivative");
    if (flux_free) {
        ScalarField q1d = antiderivative_1d(zeta1d.plus_constant(-zeta1d.mean()));
        out.q = ScalarField::from_terms(2, lift_1d_to_diagonal(q1d.terms(), 1),
                                        std::max(A0.resolution(), zeta1d.resolution()));
        if (n == 3)
            out.q = ScalarField::from_terms(3, lift_2d_to_3d(out.q.terms()), out.q.resolution());
    } else {
        out.q = solve_poisson(flux_div.plus_constant(-flux_div.mean()));
    }

    if (flux_free) {
        // additive step: A1 = A0 + delta * Z / r0 with Z = zeta(y1+y2) diag(1,-1,0)
        ScalarField zl2 = ScalarField::from_terms(2, lift_1d_to_diagonal(zeta1d.terms(), 1),
                                                  out.q.resolution());
        ScalarField zlift = (n == 3)
                                ? ScalarField::from_terms(3, lift_2d_to_3d(zl2.terms()),
                                                          zl2.resolution())
                                : zl2;
        ScalarField p11 = multiply(zlift, reciprocal(r0.resample(
                              std::max(r0.resolution(), zlift.resolution()))));
        const double pnorm = p11.linf();
        if (pnorm > 0.5) p11 = p11.scaled(0.5 / pnorm); // keep |P| <= 1/2

        std::vector<ScalarField> entries;
        for (int k = 0; k < n; ++k)
            for (int l = k; l < n; ++l) {
                ScalarField e = A0.entry(k, l);
                if (k == 0 && l == 0) e = add(e, p11.scaled(delta));
                if (k == 1 && l == 1) e = sub(e, p11.scaled(delta));
                entries.push_back(e);
            }
        out.A1 = CoefficientField::from_upper(n, std::move(entries));
        out.additive_applied = true;

        // the ripple is divergence-free against r0, so r1 = r0
        auto [r1, r1rep] = solve_invariant_measure(out.A1, so);
        if (sub(r1, r0.resample(r1.resolution())).linf() > 1e-7)
            throw Error("additive step unexpectedly moved the invariant measure");
    } else {
        out.A1 = A0;
    }

    TensorOptions topts = opts;
    ThirdOrderTensor T1 = third_order_tensor(out.A1, topts);
    out.c111_before = T1.cval(0, 0, 0);
    const double threshold = 1e-7 * std::max(1.0, T1.scale);

    if (std::abs(out.c111_before) > threshold) {
        out.result = out.A1;
        out.c111_after = out.c111_before;
        return out;
    }

    // multiplicative step: gamma = 1/(1 + A1:D^2(s q)), with q normalized so
    // the curvature term has unit size and s alone controls the distance
    {
        const double curv = contract_hessian(out.A1, out.q).linf();
        if (curv > 0.0) out.q = out.q.scaled(1.0 / curv);
    }
    ScalarField denom = contract_hessian(out.A1, out.q.scaled(s)).plus_constant(1.0);
    if (denom.min_value() <= 0.0)
        throw PositivityError("1 + A1:D^2 phi loses positivity; reduce s");
    out.result = divide_entries(out.A1, denom);
    out.multiplicative_applied = true;

    ThirdOrderTensor T2 = third_order_tensor(out.result, topts);
    out.c111_after = T2.cval(0, 0, 0);
    return out;
}

TraceOneDensity density_perturb_trace_one(const CoefficientField& A0, double delta, double s,
                                          const TensorOptions& opts) {
    if (A0.dimension() != 2 || !A0.is_diagonal(1e-12))
        throw DomainError("trace-one construction requires a diagonal 2d field");
    ScalarField tr = A0.trace();
    if (sub(tr, ScalarField::constant(2, 1.0)).linf() > 1e-10)
        throw DomainError("trace-one construction requires trace identically 1");

    DensityPerturbation diag = density_perturb(A0, delta, s, opts);
    const CoefficientField& B = diag.result;

    TraceOneDensity out;
    double dp = delta / 4.0;
    for (int attempt = 0; attempt <= 5; ++attempt, dp *= 0.5, ++out.halvings) {
        std::vector<ScalarField> entries = {B.entry(0, 0),
                                            ScalarField::constant(2, dp),
                                            B.entry(1, 1)};
        CoefficientField Btilde = CoefficientField::from_upper(2, std::move(entries));
        ThirdOrderTensor T = third_order_tensor(Btilde, opts);
        if (std::abs(T.cval(0, 0, 0)) > 1e-7 * std::max(1.0, T.scale)) {
            out.c111_btilde = T.cval(0, 0, 0);
            out.delta_used = dp;
            out.result = divide_entries(Btilde, Btilde.trace());
            return out;
        }
    }
    throw DegenerateError("coupled tensor entry collapsed after 5 halvings of the off-diagonal");
}

CoefficientField lift_to_3d_constant_trace(const CoefficientField& B, double c) {
    if (B.dimension() != 2 || !B.is_diagonal(1e-12))
        throw DomainError("lift requires a diagonal two-dimensional field");
    const ScalarField& b1 = B.entry(0, 0);
    const ScalarField& b2 = B.entry(1, 1);
    ScalarField sum = add(b1, b2);
    if (c <= sum.max_value())
        throw TraceError("trace constant too small: need c > sup(b1 + b2) = " +
                         std::to_string(sum.max_value()));

    const int res = B.resolution();
    auto lift = [&](const ScalarField& f) {
        if (f.has_exact_terms())
            return ScalarField::from_terms(3, lift_2d_to_3d(f.terms()), f.resolution());
        // replicate the plane along y3
        spectral::RealGrid g3(3, f.resolution());
        const auto& v2 = f.values();
        const int m = f.resolution();
        std::size_t idx = 0;
        for (int i0 = 0; i0 < m; ++i0)
            for (int i1 = 0; i1 < m; ++i1) {
                const double v = v2[static_cast<std::size_t>(i0) * m + i1];
                for (int i2 = 0; i2 < m; ++i2, ++idx) g3.v[idx] = v;
            }
        return ScalarField::from_grid(std::move(g3));
    };

    ScalarField a1 = lift(b1.resolution() == res ? b1 : b1.resample(res));
    ScalarField a2 = lift(b2.resolution() == res ? b2 : b2.resample(res));
    ScalarField a3 = lift(sum.truncated(res)).scaled(-1.0).plus_constant(c);
    return CoefficientField::diagonal({a1, a2, a3});
}

} // namespace ndhom
