#include "ndhom/tensor.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <future>

#include "ndhom/errors.hpp"
#include "ndhom/spectral.hpp"

namespace ndhom {

namespace {

int pick_resolution(const CoefficientField& A, const TensorOptions& opts) {
    if (opts.resolution > 0) return opts.resolution;
    int r = A.resolution();
    const int need = 2 * (A.bandwidth() + 1);
    while (r < need) r *= 2;
    return std::max(r, 8);
}

double grid_triple_mean(const std::vector<double>& a, const std::vector<double>& b,
                        const std::vector<double>& c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i] * c[i];
    return acc / static_cast<double>(a.size());
}

} // namespace

double ThirdOrderTensor::max_abs_c() const {
    double m = 0.0;
    for (double v : c) m = std::max(m, std::abs(v));
    return m;
}

double ThirdOrderTensor::max_abs_c_sym() const {
    double m = 0.0;
    for (double v : c_sym) m = std::max(m, std::abs(v));
    return m;
}

Eigen::MatrixXd effective_matrix(const CoefficientField& A, const ScalarField& r) {
    const int n = A.dimension();
    Eigen::MatrixXd e(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            e(k, l) = inner_product(r, A.entry(k, l));
            e(l, k) = e(k, l);
        }
    return e;
}

ThirdOrderTensor third_order_tensor(const CoefficientField& A, const TensorOptions& opts) {
    const int n = A.dimension();
    const int N = pick_resolution(A, opts);
    const int M = 2 * N;

    SolveOptions so = opts.solve;
    so.resolution = N;

    ThirdOrderTensor T;
    T.dim = n;
    T.resolution = N;
    T.c.assign(n * n * n, 0.0);
    T.c_sym.assign(n * n * n, 0.0);

    auto [r, rrep] = solve_invariant_measure(A, so);
    T.r = r;
    T.reports.push_back(rrep);

    // working-band entries and r-weighted averages
    std::vector<ScalarField> entry_t;
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) entry_t.push_back(A.entry(k, l).truncated(N));
    auto ent = [&](int k, int l) -> const ScalarField& {
        return entry_t[CoefficientField::upper_index(n, k, l)];
    };

    T.effective = Eigen::MatrixXd(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            T.effective(k, l) = inner_product(r, ent(k, l));
            T.effective(l, k) = T.effective(k, l);
        }
    T.scale = T.effective.norm();
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.effective);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw Error("effective matrix lost positive definiteness");
    }

    // dealiased samples for the correlation integrals
    const std::vector<double> r_m = r.sample(M).v;
    std::vector<std::vector<double>> ent_m;
    for (const ScalarField& e : entry_t) ent_m.push_back(e.sample(M).v);
    auto ent_grid = [&](int k, int l) -> const std::vector<double>& {
        return ent_m[CoefficientField::upper_index(n, k, l)];
    };

    // the cell problems are independent given r; run them concurrently
    const int n_cells = n * (n + 1) / 2;
    std::vector<ScalarField> cells(n_cells);
    std::vector<SolveReport> cell_reports(n_cells);
    {
        std::vector<std::future<void>> jobs;
        for (int k = 0; k < n; ++k)
            for (int l = k; l < n; ++l) {
                const int idx = CoefficientField::upper_index(n, k, l);
                jobs.push_back(std::async(std::launch::async, [&, k, l, idx] {
                    ScalarField rhs = ent(k, l).plus_constant(-T.effective(k, l));
                    auto [v, vrep] = solve_cell(A, r, rhs, so);
                    cells[idx] = std::move(v);
                    cell_reports[idx] = vrep;
                }));
            }
        for (auto& j : jobs) j.get();
    }
    for (int i = 0; i < n_cells; ++i) T.reports.push_back(cell_reports[i]);
    T.correctors = cells;

    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            const ScalarField& v = cells[CoefficientField::upper_index(n, k, l)];
            for (int m = 0; m < n; ++m) {
                std::array<int, 3> d1{0, 0, 0};
                d1[m] = 1;
                const std::vector<double> dv = derivative(v, d1).sample(M).v;
                for (int j = 0; j < n; ++j) {
                    const double contrib = grid_triple_mean(r_m, ent_grid(j, m), dv);
                    T.c[(j * n + k) * n + l] += contrib;
                    if (k != l) T.c[(j * n + l) * n + k] += contrib;
                }
            }
        }

    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                T.c_sym[(j * n + k) * n + l] =
                    T.cval(j, k, l) + T.cval(k, j, l) + T.cval(l, j, k);
    return T;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::TypeEps2: return "type-eps2";
        case Verdict::TypeEps: return "type-eps";
        default: return "unresolved";
    }
}

namespace {

ClassificationReport classify_impl(const CoefficientField& A, const TensorOptions& opts,
                                   bool shortcut) {
    const int N = pick_resolution(A, opts);
    TensorOptions coarse_opts = opts;
    coarse_opts.resolution = N;
    TensorOptions fine_opts = opts;
    fine_opts.resolution = 2 * N;

    ClassificationReport rep;
    rep.diagonal_shortcut = shortcut;
    rep.tensor = third_order_tensor(A, coarse_opts);
    rep.tensor_fine = third_order_tensor(A, fine_opts);

    rep.threshold = 1e-7 * std::max(1.0, rep.tensor.scale);
    const auto& q = shortcut ? rep.tensor.c : rep.tensor.c_sym;
    const auto& qf = shortcut ? rep.tensor_fine.c : rep.tensor_fine.c_sym;
    double max_coarse = 0.0, max_fine = 0.0, gap = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        max_coarse = std::max(max_coarse, std::abs(q[i]));
        max_fine = std::max(max_fine, std::abs(qf[i]));
        gap = std::max(gap, std::abs(q[i] - qf[i]));
    }
    rep.max_C = max_coarse;
    rep.gap = gap;

    const bool small_coarse = max_coarse <= rep.threshold;
    const bool small_fine = max_fine <= rep.threshold;
    if (small_coarse != small_fine || gap > rep.threshold / 10.0)
        rep.verdict = Verdict::Unresolved;
    else
        rep.verdict = small_coarse ? Verdict::TypeEps2 : Verdict::TypeEps;
    return rep;
}

} // namespace

ClassificationReport classify(const CoefficientField& A, const TensorOptions& opts) {
    return classify_impl(A, opts, false);
}

ClassificationReport diagonal_classify_shortcut(const CoefficientField& A,
                                                const TensorOptions& opts) {
    const bool diag = A.is_diagonal(1e-12);
    bool const_trace = false;
    if (A.dimension() == 2) {
        ScalarField t = A.trace();
        const_trace = sub(t, ScalarField::constant(2, t.mean())).linf() <=
                      1e-10 * std::max(1.0, std::abs(t.mean()));
    }
    if (!diag && !const_trace)
        throw DomainError(
            "shortcut requires a diagonal field, or constant trace in two dimensions");
    return classify_impl(A, opts, true);
}

double reversibility_defect(const CoefficientField& A, const ScalarField& r) {
    const int n = A.dimension();
    double defect = 0.0;
    for (int i = 0; i < n; ++i) {
        ScalarField div = ScalarField::constant(n, 0.0);
        for (int j = 0; j < n; ++j) {
            std::array<int, 3> d1{0, 0, 0};
            d1[j] = 1;
            div = add(div, derivative(multiply(r, A.entry(i, j)), d1));
        }
        // weigh modes by the inverse gradient symbol: a weak-divergence size
        spectral::Spectrum s = div.spectrum();
        spectral::for_each_mode(s, [&](std::size_t idx, int k0, int k1, int k2) {
            const double kn = std::sqrt(double(k0) * k0 + double(k1) * k1 + double(k2) * k2);
            if (kn > 0.0) s.c[idx] /= 2.0 * M_PI * kn;
        });
        ScalarField weak = ScalarField::from_spectrum(s);
        defect = std::max(defect, weak.linf());
    }
    return defect;
}

} // namespace ndhom
