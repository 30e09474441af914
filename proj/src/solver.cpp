#include "ndhom/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ndhom/errors.hpp"
#include "ndhom/spectral.hpp"

namespace ndhom {

namespace {

using spectral::RealGrid;
using spectral::Spectrum;

constexpr double kFourPi2 = 4.0 * M_PI * M_PI;

// --- restarted GMRES on flat real vectors ----------------------------------

struct GmresProblem {
    std::function<void(const std::vector<double>&, std::vector<double>&)> apply;
    std::function<void(std::vector<double>&)> precondition; // in place
    std::function<double(const std::vector<double>&)> true_residual;
};

struct GmresResult {
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

GmresResult gmres(const GmresProblem& p, const std::vector<double>& b, std::vector<double>& x,
                  double tol, int restart, int max_iterations) {
    const std::size_t d = b.size();
    GmresResult out;
    std::vector<std::vector<double>> V;
    std::vector<double> H((restart + 1) * restart, 0.0);
    std::vector<double> cs(restart), sn(restart), g(restart + 1);
    std::vector<double> w(d), tmp(d);

    // The Arnoldi residual estimate lives in the preconditioned 2-norm while
    // the convergence gate is the weak L_inf residual; iterate cheaply to a
    // provisional target, confirm with the true residual, and tighten the
    // target whenever the confirmation fails.
    double inner_target = 0.3 * tol;

    while (out.iterations < max_iterations) {
        // preconditioned residual for the restart cycle
        p.apply(x, tmp);
        for (std::size_t i = 0; i < d; ++i) tmp[i] = b[i] - tmp[i];
        p.precondition(tmp);
        double beta = std::sqrt(dot(tmp, tmp));
        if (beta == 0.0) {
            out.residual = p.true_residual(x);
            out.converged = out.residual <= tol;
            return out;
        }
        V.assign(1, tmp);
        for (double& v : V[0]) v /= beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        int j = 0;
        for (; j < restart && out.iterations < max_iterations; ++j, ++out.iterations) {
            p.apply(V[j], w);
            p.precondition(w);
            for (int i = 0; i <= j; ++i) {
                const double h = dot(w, V[i]);
                H[i * restart + j] = h;
                axpy(-h, V[i], w);
            }
            double hj1 = std::sqrt(dot(w, w));
            H[(j + 1) * restart + j] = hj1;
            if (hj1 > 0.0) {
                V.push_back(w);
                for (double& v : V.back()) v /= hj1;
            }
            // apply accumulated Givens rotations to the new column
            for (int i = 0; i < j; ++i) {
                const double t = cs[i] * H[i * restart + j] + sn[i] * H[(i + 1) * restart + j];
                H[(i + 1) * restart + j] =
                    -sn[i] * H[i * restart + j] + cs[i] * H[(i + 1) * restart + j];
                H[i * restart + j] = t;
            }
            const double denom = std::hypot(H[j * restart + j], hj1);
            if (denom == 0.0) { ++j; break; }
            cs[j] = H[j * restart + j] / denom;
            sn[j] = hj1 / denom;
            H[j * restart + j] = denom;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            if (std::abs(g[j + 1]) <= std::max(inner_target, 1e-16 * beta)) { ++j; break; }
        }
        // back substitution and update
        std::vector<double> y(j, 0.0);
        for (int i = j - 1; i >= 0; --i) {
            double s = g[i];
            for (int l = i + 1; l < j; ++l) s -= H[i * restart + l] * y[l];
            y[i] = s / H[i * restart + i];
        }
        for (int i = 0; i < j; ++i) axpy(y[i], V[i], x);

        out.residual = p.true_residual(x);
        if (out.residual <= tol) {
            out.converged = true;
            return out;
        }
        inner_target *= 0.05;
        if (j == 0 && inner_target < 1e-17 * beta) break; // no progress possible
    }
    out.residual = p.true_residual(x);
    out.converged = out.residual <= tol;
    return out;
}

// --- spectral operator context ----------------------------------------------

std::size_t spec_len(int dim, int n) {
    std::size_t s = n / 2 + 1;
    for (int d = 1; d < dim; ++d) s *= n;
    return s;
}

std::vector<double> spec_to_vec(const Spectrum& s) {
    std::vector<double> v(2 * s.c.size());
    for (std::size_t i = 0; i < s.c.size(); ++i) {
        v[2 * i] = s.c[i].real();
        v[2 * i + 1] = s.c[i].imag();
    }
    return v;
}

Spectrum vec_to_spec(const std::vector<double>& v, int dim, int n) {
    Spectrum s(dim, n);
    for (std::size_t i = 0; i < s.c.size(); ++i) s.c[i] = {v[2 * i], v[2 * i + 1]};
    return s;
}

/// Coefficient entries truncated to the working band and sampled on the
/// dealiasing grid M = 2N, plus their means for the preconditioner.
struct OperatorContext {
    int dim = 0;
    int N = 0;
    int M = 0;
    std::vector<std::vector<double>> entries; // upper triangle on the M grid
    std::vector<double> entry_mean;
    double scale = 1.0; // max sup-norm of the entries

    OperatorContext(const CoefficientField& A, int resolution)
        : dim(A.dimension()), N(resolution), M(2 * resolution) {
        for (int k = 0; k < dim; ++k)
            for (int l = k; l < dim; ++l) {
                const ScalarField& e = A.entry(k, l);
                // entries beyond the working band are Galerkin-truncated first
                RealGrid g = (e.bandwidth() <= N / 2 - 1)
                                 ? e.sample(M)
                                 : spectral::synthesize(spectral::resize(e.spectrum(), N), M);
                double mean = 0.0, sup = 0.0;
                for (double v : g.v) {
                    mean += v;
                    sup = std::max(sup, std::abs(v));
                }
                mean /= static_cast<double>(g.v.size());
                entries.push_back(std::move(g.v));
                entry_mean.push_back(mean);
                scale = std::max(scale, sup);
            }
    }

    const std::vector<double>& entry(int k, int l) const {
        return entries[CoefficientField::upper_index(dim, k, l)];
    }
    double mean_entry(int k, int l) const {
        return entry_mean[CoefficientField::upper_index(dim, k, l)];
    }

    /// w = -P_N(A : D^2 v)
    Spectrum apply_cell(const Spectrum& v) const {
        std::vector<double> acc(spectral::grid_points(dim, M), 0.0);
        for (int s = 0; s < dim; ++s)
            for (int t = s; t < dim; ++t) {
                Spectrum dv = v;
                std::array<int, 3> order{0, 0, 0};
                order[s] += 1;
                order[t] += 1;
                spectral::apply_derivative(dv, order);
                RealGrid g = spectral::synthesize(dv, M);
                const double fac = (s == t) ? 1.0 : 2.0;
                const std::vector<double>& a = entry(s, t);
                for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += fac * a[i] * g.v[i];
            }
        RealGrid ag(dim, M);
        ag.v = std::move(acc);
        Spectrum out = spectral::analyze(ag, N);
        for (auto& z : out.c) z = -z;
        return out;
    }

    /// w = P_N D^2:(s A)
    Spectrum apply_adjoint(const Spectrum& sfield) const {
        RealGrid sg = spectral::synthesize(sfield, M);
        Spectrum out(dim, N);
        for (int s = 0; s < dim; ++s)
            for (int t = s; t < dim; ++t) {
                RealGrid p(dim, M);
                const std::vector<double>& a = entry(s, t);
                for (std::size_t i = 0; i < p.v.size(); ++i) p.v[i] = sg.v[i] * a[i];
                Spectrum ph = spectral::analyze(p, N);
                std::array<int, 3> order{0, 0, 0};
                order[s] += 1;
                order[t] += 1;
                spectral::apply_derivative(ph, order);
                const double fac = (s == t) ? 1.0 : 2.0;
                for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] += fac * ph.c[i];
            }
        return out;
    }

    /// Divide by the constant-coefficient symbol 4 pi^2 k . Abar0 k.
    void precondition(Spectrum& s, double k0_action) const {
        spectral::for_each_mode(s, [&](std::size_t idx, int k0, int k1, int k2) {
            const int kk[3] = {k0, k1, k2};
            double sym = 0.0;
            for (int a = 0; a < dim; ++a)
                for (int b = a; b < dim; ++b)
                    sym += ((a == b) ? 1.0 : 2.0) * mean_entry(a, b) * kk[a] * kk[b];
            sym *= kFourPi2;
            if (sym != 0.0)
                s.c[idx] /= sym;
            else
                s.c[idx] *= k0_action;
        });
    }

    /// L_inf of the inverse-Laplacian-weighted residual field.
    double weak_linf(const Spectrum& res) const {
        Spectrum w = res;
        spectral::for_each_mode(w, [&](std::size_t idx, int k0, int k1, int k2) {
            const double k2sum = double(k0) * k0 + double(k1) * k1 + double(k2) * k2;
            if (k2sum > 0.0) w.c[idx] /= kFourPi2 * k2sum;
        });
        RealGrid g = spectral::inverse(w);
        double m = 0.0;
        for (double v : g.v) m = std::max(m, std::abs(v));
        return m;
    }
};

/// True inner product on the torus from half-spectrum storage: modes off the
/// k_last = 0 hyperplane appear once and stand for a conjugate pair.
double spec_dot(const Spectrum& a, const Spectrum& b) {
    double acc = 0.0;
    spectral::for_each_mode(a, [&](std::size_t idx, int k0, int k1, int k2) {
        const int klast = (a.dim == 1) ? k0 : (a.dim == 2 ? k1 : k2);
        const double w = (klast == 0) ? 1.0 : 2.0;
        acc += w * (a.c[idx].real() * b.c[idx].real() + a.c[idx].imag() * b.c[idx].imag());
    });
    return acc;
}

int pick_resolution(const CoefficientField& A, const SolveOptions& opts) {
    if (opts.resolution > 0) return opts.resolution;
    int r = A.resolution();
    const int need = 2 * (A.bandwidth() + 1);
    while (r < need) r *= 2;
    return std::max(r, 8);
}

ScalarField truncated_entry_field(const CoefficientField& A, int k, int l, int N) {
    const ScalarField& e = A.entry(k, l);
    if (e.bandwidth() <= N / 2 - 1) return e;
    return ScalarField::from_spectrum(spectral::resize(e.spectrum(), N));
}

/// Pointwise sup of D^2:(rA) evaluated with dealiased field products (the
/// strong residual, Galerkin tail included).
double raw_invariant_residual(const CoefficientField& A, const ScalarField& r, int N) {
    ScalarField acc = ScalarField::constant(A.dimension(), 0.0);
    for (int s = 0; s < A.dimension(); ++s)
        for (int t = s; t < A.dimension(); ++t) {
            std::array<int, 3> order{0, 0, 0};
            order[s] += 1;
            order[t] += 1;
            ScalarField term = derivative(multiply(r, truncated_entry_field(A, s, t, N)), order);
            if (s != t) term = term.scaled(2.0);
            acc = add(acc, term);
        }
    return acc.linf();
}

double raw_cell_residual(const CoefficientField& A, const ScalarField& v, const ScalarField& rhs,
                         int N) {
    ScalarField acc = rhs;
    for (int s = 0; s < A.dimension(); ++s)
        for (int t = s; t < A.dimension(); ++t) {
            std::array<int, 3> order{0, 0, 0};
            order[s] += 1;
            order[t] += 1;
            ScalarField term = multiply(truncated_entry_field(A, s, t, N), derivative(v, order));
            if (s != t) term = term.scaled(2.0);
            acc = add(acc, term);
        }
    return acc.linf();
}

} // namespace

std::pair<ScalarField, SolveReport> solve_invariant_measure(const CoefficientField& A,
                                                            const SolveOptions& opts) {
    const int N = pick_resolution(A, opts);
    const int dim = A.dimension();
    OperatorContext ctx(A, N);

    // rhs: D^2:(s A) = -D^2:A, from s = r - 1
    Spectrum one(dim, N);
    one.c[0] = {1.0, 0.0};
    Spectrum b = ctx.apply_adjoint(one);
    for (auto& z : b.c) z = -z;
    b.c[0] = {0.0, 0.0};

    const double tol_eff = opts.tol * ctx.scale;
    const std::vector<double> bv = spec_to_vec(b);
    std::vector<double> xv(bv.size(), 0.0);

    GmresProblem prob;
    prob.apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        Spectrum s = vec_to_spec(in, dim, N);
        Spectrum r = ctx.apply_adjoint(s);
        r.c[0] = {0.0, 0.0};
        out = spec_to_vec(r);
    };
    prob.precondition = [&](std::vector<double>& v) {
        Spectrum s = vec_to_spec(v, dim, N);
        ctx.precondition(s, 0.0);
        v = spec_to_vec(s);
    };
    prob.true_residual = [&](const std::vector<double>& xc) {
        Spectrum s = vec_to_spec(xc, dim, N);
        Spectrum r = ctx.apply_adjoint(s);
        for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = b.c[i] - r.c[i];
        r.c[0] = {0.0, 0.0};
        return ctx.weak_linf(r);
    };

    GmresResult res = gmres(prob, bv, xv, tol_eff, opts.restart, opts.max_iterations);
    if (!res.converged)
        throw ConvergenceError("invariant-measure solve stalled at weak residual " +
                               std::to_string(res.residual) + " after " +
                               std::to_string(res.iterations) + " iterations");

    Spectrum sfinal = vec_to_spec(xv, dim, N);
    sfinal.c[0] = {1.0, 0.0};
    ScalarField r = ScalarField::from_spectrum(sfinal);

    const double rmin = [&] {
        RealGrid dense = spectral::synthesize(sfinal, 2 * N);
        return *std::min_element(dense.v.begin(), dense.v.end());
    }();
    if (!(rmin > 0.0))
        throw PositivityError("computed invariant measure is not positive (min = " +
                              std::to_string(rmin) + "); refine the resolution");

    SolveReport rep;
    rep.iterations = res.iterations;
    rep.residual_linf = res.residual;
    rep.compatibility_defect = 0.0;
    rep.resolution_used = N;
    rep.residual_raw_linf = raw_invariant_residual(A, r, N);
    return {std::move(r), rep};
}

std::pair<ScalarField, SolveReport> solve_cell(const CoefficientField& A, const ScalarField& r,
                                               const ScalarField& rhs, const SolveOptions& opts) {
    const int N = opts.resolution > 0 ? opts.resolution : r.resolution();
    const int dim = A.dimension();
    OperatorContext ctx(A, N);

    const double defect = std::abs(inner_product(r, rhs));
    const double rhs_scale = std::max(1.0, rhs.linf());
    if (defect > opts.compat_tol * rhs_scale)
        throw CompatibilityError("rhs violates the Fredholm condition: |int r*rhs| = " +
                                 std::to_string(defect));

    Spectrum rhs_s = spectral::resize(rhs.spectrum(), N);
    Spectrum r_s = spectral::resize(r.spectrum(), N);
    // project out the discrete left-null direction
    const double proj = spec_dot(rhs_s, r_s) / spec_dot(r_s, r_s);
    for (std::size_t i = 0; i < rhs_s.c.size(); ++i) rhs_s.c[i] -= proj * r_s.c[i];

    const double tol_eff = opts.tol * ctx.scale * rhs_scale;
    const std::vector<double> bv = spec_to_vec(rhs_s);
    std::vector<double> xv(bv.size(), 0.0);

    GmresProblem prob;
    prob.apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        Spectrum v = vec_to_spec(in, dim, N);
        const std::complex<double> mean = v.c[0];
        Spectrum w = ctx.apply_cell(v);
        w.c[0] += mean; // rank-one shift removes the constant kernel
        out = spec_to_vec(w);
    };
    prob.precondition = [&](std::vector<double>& v) {
        Spectrum s = vec_to_spec(v, dim, N);
        ctx.precondition(s, 1.0);
        v = spec_to_vec(s);
    };
    prob.true_residual = [&](const std::vector<double>& xc) {
        Spectrum v = vec_to_spec(xc, dim, N);
        const std::complex<double> mean = v.c[0];
        Spectrum w = ctx.apply_cell(v);
        w.c[0] += mean;
        for (std::size_t i = 0; i < w.c.size(); ++i) w.c[i] = rhs_s.c[i] - w.c[i];
        return ctx.weak_linf(w);
    };

    GmresResult res = gmres(prob, bv, xv, tol_eff, opts.restart, opts.max_iterations);
    if (!res.converged)
        throw ConvergenceError("cell solve stalled at weak residual " +
                               std::to_string(res.residual) + " after " +
                               std::to_string(res.iterations) + " iterations");

    Spectrum vfinal = vec_to_spec(xv, dim, N);
    vfinal.c[0] = {0.0, 0.0};
    ScalarField v = ScalarField::from_spectrum(vfinal);

    SolveReport rep;
    rep.iterations = res.iterations;
    rep.residual_linf = res.residual;
    rep.compatibility_defect = defect;
    rep.resolution_used = N;
    rep.residual_raw_linf = raw_cell_residual(A, v, rhs, N);
    return {std::move(v), rep};
}

ScalarField solve_poisson(const ScalarField& rhs) {
    const double m = std::abs(rhs.mean());
    if (m > 1e-12 * std::max(1.0, rhs.linf()))
        throw CompatibilityError("Poisson rhs must have zero mean (mean = " + std::to_string(m) +
                                 ")");
    if (rhs.has_exact_terms()) {
        std::vector<WaveTerm> out;
        for (const WaveTerm& t : rhs.terms()) {
            if (is_zero_wavevector(t.k)) continue; // roundoff-level mean
            WaveTerm w = t;
            const double k2 = double(t.k[0]) * t.k[0] + double(t.k[1]) * t.k[1] +
                              double(t.k[2]) * t.k[2];
            w.amp = t.amp / (kFourPi2 * k2);
            out.push_back(w);
        }
        return ScalarField::from_terms(rhs.dimension(), std::move(out), rhs.resolution());
    }
    Spectrum s = rhs.spectrum();
    spectral::for_each_mode(s, [&](std::size_t idx, int k0, int k1, int k2) {
        const double k2sum = double(k0) * k0 + double(k1) * k1 + double(k2) * k2;
        if (k2sum > 0.0)
            s.c[idx] /= kFourPi2 * k2sum;
        else
            s.c[idx] = {0.0, 0.0};
    });
    return ScalarField::from_spectrum(s);
}

ScalarField invariant_measure_dense(const CoefficientField& A, int resolution) {
    if (A.dimension() > 2 || resolution > 24)
        throw DomainError("dense oracle is limited to n <= 2, N <= 24");
    const int N = resolution;
    const int dim = A.dimension();
    OperatorContext ctx(A, N);
    const std::size_t D = spectral::grid_points(dim, N);

    // Nodal-basis matrix of the operator composed with the band-limit filter.
    // The filtered-out (Nyquist) subspace is deflated with an identity block
    // so the only null direction left is the invariant measure.
    Eigen::MatrixXd Ldense(D, D);
    RealGrid e(dim, N);
    for (std::size_t j = 0; j < D; ++j) {
        std::fill(e.v.begin(), e.v.end(), 0.0);
        e.v[j] = 1.0;
        Spectrum s = spectral::analyze(e, N);
        RealGrid filtered = spectral::inverse(s);
        RealGrid g = spectral::inverse(ctx.apply_adjoint(s));
        for (std::size_t i = 0; i < D; ++i)
            Ldense(i, j) = g.v[i] + ctx.scale * (e.v[i] - filtered.v[i]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ldense, Eigen::ComputeFullV);
    Eigen::VectorXd null = svd.matrixV().col(D - 1);
    double mean = null.mean();
    if (std::abs(mean) < 1e-14)
        throw PositivityError("dense nullspace vector has zero mean");
    null /= mean; // normalize to mean 1 (also fixes the sign)
    RealGrid rg(dim, N);
    for (std::size_t i = 0; i < D; ++i) rg.v[i] = null(i);
    return ScalarField::from_grid(std::move(rg));
}

} // namespace ndhom
