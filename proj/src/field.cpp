#include "ndhom/field.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ndhom/errors.hpp"

namespace ndhom {

namespace {

constexpr int kExactTermLimit = 64;

int next_pow2(int v) {
    int p = 2;
    while (p < v) p *= 2;
    return p;
}

} // namespace

int ScalarField::resolution_cap(int dim) {
    switch (dim) {
        case 1: return 1 << 14;
        case 2: return 1 << 11;
        default: return 1 << 8;
    }
}

ScalarField ScalarField::from_terms(int dim, std::vector<WaveTerm> terms, int resolution) {
    if (dim < 1 || dim > 3) throw Error("dimension must be 1, 2 or 3");
    ScalarField f;
    f.dim_ = dim;
    f.res_ = resolution;
    f.terms_ = canonicalize_terms(terms); // throws CanonicalError on sin(0)
    for (const WaveTerm& t : f.terms_)
        for (int d = dim; d < 3; ++d)
            if (t.k[d] != 0) throw Error("term wavevector exceeds field dimension");
    f.exact_terms_ = true;
    const int need = 2 * (max_abs_component(f.terms_) + 1);
    if (resolution < need)
        throw AliasError("resolution " + std::to_string(resolution) +
                         " cannot resolve bandwidth (need >= " + std::to_string(need) + ")");
    if (static_cast<int>(f.terms_.size()) <= kExactTermLimit) {
        f.values_ = spectral::sample_terms(f.terms_, dim, resolution).v;
    } else {
        f.values_ = spectral::inverse(spectral::terms_to_spectrum(f.terms_, dim, resolution)).v;
    }
    return f;
}

ScalarField ScalarField::from_grid(spectral::RealGrid grid) {
    ScalarField f;
    f.dim_ = grid.dim;
    f.res_ = grid.n;
    f.exact_terms_ = false;
    f.values_ = std::move(grid.v);
    return f;
}

ScalarField ScalarField::from_spectrum(const spectral::Spectrum& spec) {
    ScalarField f;
    f.dim_ = spec.dim;
    f.res_ = spec.n;
    f.exact_terms_ = false;
    f.values_ = spectral::inverse(spec).v;
    return f;
}

ScalarField ScalarField::from_function(int dim, int resolution,
                                       const std::function<double(const std::array<double, 3>&)>& fn) {
    spectral::RealGrid g(dim, resolution);
    const double h = 1.0 / resolution;
    std::array<double, 3> y{0.0, 0.0, 0.0};
    if (dim == 1) {
        for (int i = 0; i < resolution; ++i) {
            y[0] = i * h;
            g.v[i] = fn(y);
        }
    } else if (dim == 2) {
        std::size_t idx = 0;
        for (int i0 = 0; i0 < resolution; ++i0)
            for (int i1 = 0; i1 < resolution; ++i1, ++idx) {
                y[0] = i0 * h;
                y[1] = i1 * h;
                g.v[idx] = fn(y);
            }
    } else {
        std::size_t idx = 0;
        for (int i0 = 0; i0 < resolution; ++i0)
            for (int i1 = 0; i1 < resolution; ++i1)
                for (int i2 = 0; i2 < resolution; ++i2, ++idx) {
                    y[0] = i0 * h;
                    y[1] = i1 * h;
                    y[2] = i2 * h;
                    g.v[idx] = fn(y);
                }
    }
    return from_grid(std::move(g));
}

ScalarField ScalarField::constant(int dim, double value, int resolution) {
    std::vector<WaveTerm> t;
    if (value != 0.0) t.push_back(WaveTerm{{0, 0, 0}, Phase::Cos, value});
    return from_terms(dim, std::move(t), resolution);
}

const std::vector<WaveTerm>& ScalarField::terms() const {
    if (!exact_terms_) throw Error("field has no exact term list");
    return terms_;
}

int ScalarField::bandwidth() const {
    if (exact_terms_) return max_abs_component(terms_);
    return res_ / 2 - 1;
}

std::vector<WaveTerm> ScalarField::spectral_terms(double tol) const {
    if (exact_terms_) return terms_;
    return spectral::spectrum_to_terms(spectrum(), tol);
}

spectral::Spectrum ScalarField::spectrum() const {
    if (exact_terms_) return spectral::terms_to_spectrum(terms_, dim_, res_);
    spectral::RealGrid g(dim_, res_);
    g.v = values_;
    return spectral::analyze(g, res_);
}

spectral::RealGrid ScalarField::sample(int m) const {
    if (m == res_) {
        spectral::RealGrid g(dim_, res_);
        g.v = values_;
        return g;
    }
    if (exact_terms_) {
        if (static_cast<int>(terms_.size()) <= kExactTermLimit)
            return spectral::sample_terms(terms_, dim_, m);
        if (m > res_ || bandwidth() <= m / 2 - 1)
            return spectral::inverse(spectral::terms_to_spectrum(terms_, dim_, m));
    }
    if (m > res_) return spectral::synthesize(spectrum(), m);
    if (res_ % m == 0) {
        // subgrid of the stored samples: exact values
        spectral::RealGrid g(dim_, m);
        const int s = res_ / m;
        if (dim_ == 1) {
            for (int i = 0; i < m; ++i) g.v[i] = values_[static_cast<std::size_t>(i) * s];
        } else if (dim_ == 2) {
            std::size_t idx = 0;
            for (int i0 = 0; i0 < m; ++i0)
                for (int i1 = 0; i1 < m; ++i1, ++idx)
                    g.v[idx] = values_[(static_cast<std::size_t>(i0) * s) * res_ + i1 * s];
        } else {
            std::size_t idx = 0;
            for (int i0 = 0; i0 < m; ++i0)
                for (int i1 = 0; i1 < m; ++i1)
                    for (int i2 = 0; i2 < m; ++i2, ++idx)
                        g.v[idx] = values_[((static_cast<std::size_t>(i0) * s) * res_ + i1 * s) * res_ +
                                           i2 * s];
        }
        return g;
    }
    if (bandwidth() <= m / 2 - 1) return spectral::synthesize(spectrum(), m);
    throw AliasError("cannot sample resolution " + std::to_string(res_) + " field on " +
                     std::to_string(m) + " grid without aliasing");
}

double ScalarField::evaluate(const std::array<double, 3>& y) const {
    if (exact_terms_) return evaluate_terms(terms_, dim_, y.data());
    const auto terms = spectral_terms(0.0);
    return evaluate_terms(terms, dim_, y.data());
}

double ScalarField::mean() const {
    if (exact_terms_) {
        for (const WaveTerm& t : terms_)
            if (is_zero_wavevector(t.k) && t.phase == Phase::Cos) return t.amp;
        return 0.0;
    }
    double s = 0.0;
    for (double v : values_) s += v;
    return s / static_cast<double>(values_.size());
}

double ScalarField::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double ScalarField::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

double ScalarField::linf() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

ScalarField ScalarField::resample(int new_resolution) const {
    if (new_resolution == res_) return *this;
    if (bandwidth() > new_resolution / 2 - 1)
        throw AliasError("resample would truncate field bandwidth");
    if (exact_terms_) return from_terms(dim_, terms_, new_resolution);
    return from_spectrum(spectral::resize(spectrum(), new_resolution));
}

ScalarField ScalarField::truncated(int new_resolution) const {
    if (bandwidth() <= new_resolution / 2 - 1) return resample(new_resolution);
    return from_spectrum(spectral::resize(spectrum(), new_resolution));
}

ScalarField ScalarField::scaled(double factor) const {
    ScalarField f = *this;
    for (WaveTerm& t : f.terms_) t.amp *= factor;
    for (double& v : f.values_) v *= factor;
    if (factor == 0.0) f.terms_.clear();
    return f;
}

ScalarField ScalarField::plus_constant(double constant) const {
    if (constant == 0.0) return *this;
    ScalarField f = *this;
    if (f.exact_terms_) {
        f.terms_.push_back(WaveTerm{{0, 0, 0}, Phase::Cos, constant});
        f.terms_ = canonicalize_terms(f.terms_);
    }
    for (double& v : f.values_) v += constant;
    return f;
}

ScalarField multiply(const ScalarField& f, const ScalarField& g) {
    if (f.dimension() != g.dimension()) throw Error("dimension mismatch in multiply");
    const int dim = f.dimension();
    const int cap = ScalarField::resolution_cap(dim);
    if (f.has_exact_terms() && g.has_exact_terms() &&
        static_cast<int>(f.terms().size()) <= kExactTermLimit &&
        static_cast<int>(g.terms().size()) <= kExactTermLimit) {
        auto prod = multiply_terms(f.terms(), g.terms());
        int res = std::max(f.resolution(), g.resolution());
        const int need = 2 * (max_abs_component(prod) + 1);
        while (res < need) res *= 2;
        if (res > cap) throw AliasError("product bandwidth exceeds resolution cap");
        return ScalarField::from_terms(dim, std::move(prod), res);
    }
    const int band = f.bandwidth() + g.bandwidth();
    int m = std::max({f.resolution(), g.resolution(), next_pow2(2 * band + 2)});
    if (m > cap) throw AliasError("dealiased product resolution exceeds cap");
    spectral::RealGrid a = f.sample(m);
    const spectral::RealGrid b = g.sample(m);
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] *= b.v[i];
    return ScalarField::from_grid(std::move(a));
}

ScalarField derivative(const ScalarField& f, const std::array<int, 3>& order) {
    const int total = order[0] + order[1] + order[2];
    if (total > 3) throw Error("derivative order above 3 is not supported");
    for (int d = f.dimension(); d < 3; ++d)
        if (order[d] != 0) throw Error("derivative axis exceeds field dimension");
    if (total == 0) return f;
    if (f.has_exact_terms()) {
        std::vector<WaveTerm> t = f.terms();
        for (int d = 0; d < 3; ++d)
            for (int p = 0; p < order[d]; ++p) t = derivative_terms(t, d);
        return ScalarField::from_terms(f.dimension(), std::move(t), f.resolution());
    }
    spectral::Spectrum s = f.spectrum();
    spectral::apply_derivative(s, order);
    return ScalarField::from_spectrum(s);
}

double inner_product(const ScalarField& f, const ScalarField& g) {
    if (f.dimension() != g.dimension()) throw Error("dimension mismatch in inner_product");
    if (f.has_exact_terms() && g.has_exact_terms()) {
        // orthogonality of canonical harmonics: <cos_k, cos_k> = <sin_k, sin_k> = 1/2
        // (1 for k = 0), all other pairs vanish
        std::map<std::array<int, 4>, double> gm;
        for (const WaveTerm& t : g.terms())
            gm[{t.k[0], t.k[1], t.k[2], static_cast<int>(t.phase)}] = t.amp;
        double acc = 0.0;
        for (const WaveTerm& t : f.terms()) {
            auto it = gm.find({t.k[0], t.k[1], t.k[2], static_cast<int>(t.phase)});
            if (it == gm.end()) continue;
            const double w = is_zero_wavevector(t.k) ? 1.0 : 0.5;
            acc += w * t.amp * it->second;
        }
        return acc;
    }
    const int band = f.bandwidth() + g.bandwidth();
    const int m = std::max({f.resolution(), g.resolution(), next_pow2(band + 1)});
    const spectral::RealGrid a = f.sample(m);
    const spectral::RealGrid b = g.sample(m);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) acc += a.v[i] * b.v[i];
    return acc / static_cast<double>(a.v.size());
}

ScalarField add(const ScalarField& f, const ScalarField& g) {
    if (f.dimension() != g.dimension()) throw Error("dimension mismatch in add");
    if (f.exact_terms_ && g.exact_terms_) {
        std::vector<WaveTerm> t = f.terms_;
        t.insert(t.end(), g.terms_.begin(), g.terms_.end());
        return ScalarField::from_terms(f.dim_, std::move(t), std::max(f.res_, g.res_));
    }
    const int m = std::max(f.res_, g.res_);
    spectral::RealGrid a = f.sample(m);
    const spectral::RealGrid b = g.sample(m);
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
    return ScalarField::from_grid(std::move(a));
}

ScalarField sub(const ScalarField& f, const ScalarField& g) {
    return add(f, g.scaled(-1.0));
}

// --- CoefficientField ------------------------------------------------------

int CoefficientField::upper_index(int dim, int k, int l) {
    if (k > l) std::swap(k, l);
    return k * dim - k * (k - 1) / 2 + (l - k);
}

CoefficientField CoefficientField::from_upper(int dim, std::vector<ScalarField> entries) {
    if (dim < 1 || dim > 3) throw Error("dimension must be 1, 2 or 3");
    if (static_cast<int>(entries.size()) != dim * (dim + 1) / 2)
        throw Error("wrong number of upper-triangle entries");
    for (const ScalarField& e : entries)
        if (e.dimension() != dim) throw Error("entry dimension mismatch");

    CoefficientField A;
    A.dim_ = dim;
    A.upper_ = std::move(entries);

    int res = 4;
    for (const ScalarField& e : A.upper_) res = std::max(res, e.resolution());
    std::vector<const std::vector<double>*> grids;
    std::vector<spectral::RealGrid> storage;
    storage.reserve(A.upper_.size());
    for (const ScalarField& e : A.upper_) storage.push_back(e.sample(res));

    const std::size_t npts = storage[0].v.size();
    double lmin = std::numeric_limits<double>::infinity();
    double lmax = -std::numeric_limits<double>::infinity();
    if (dim == 1) {
        for (std::size_t i = 0; i < npts; ++i) {
            const double a = storage[0].v[i];
            lmin = std::min(lmin, a);
            lmax = std::max(lmax, a);
        }
    } else if (dim == 2) {
        for (std::size_t i = 0; i < npts; ++i) {
            const double a = storage[0].v[i], b = storage[1].v[i], c = storage[2].v[i];
            const double tr = a + c;
            const double disc = std::sqrt((a - c) * (a - c) + 4.0 * b * b);
            lmin = std::min(lmin, 0.5 * (tr - disc));
            lmax = std::max(lmax, 0.5 * (tr + disc));
        }
    } else {
        Eigen::Matrix3d m;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
        for (std::size_t i = 0; i < npts; ++i) {
            m << storage[0].v[i], storage[1].v[i], storage[2].v[i],
                 storage[1].v[i], storage[3].v[i], storage[4].v[i],
                 storage[2].v[i], storage[4].v[i], storage[5].v[i];
            es.computeDirect(m, Eigen::EigenvaluesOnly);
            lmin = std::min(lmin, es.eigenvalues()(0));
            lmax = std::max(lmax, es.eigenvalues()(2));
        }
    }
    A.lambda_min_ = lmin;
    A.lambda_max_ = lmax;
    if (!(lmin > 0.0))
        throw EllipticityError("coefficient field is not uniformly elliptic (lambda_min = " +
                               std::to_string(lmin) + ")");
    return A;
}

CoefficientField CoefficientField::diagonal(std::vector<ScalarField> diag) {
    const int dim = static_cast<int>(diag.size());
    if (dim < 1 || dim > 3) throw Error("diagonal size must be 1, 2 or 3");
    std::vector<ScalarField> upper;
    for (int k = 0; k < dim; ++k) {
        upper.push_back(diag[k]);
        for (int l = k + 1; l < dim; ++l)
            upper.push_back(ScalarField::constant(dim, 0.0));
    }
    // reorder: the loop above emits row by row which matches upper_index
    return from_upper(dim, std::move(upper));
}

CoefficientField CoefficientField::constant(int dim, const std::vector<double>& upper,
                                            int resolution) {
    std::vector<ScalarField> entries;
    for (double v : upper) entries.push_back(ScalarField::constant(dim, v, resolution));
    return from_upper(dim, std::move(entries));
}

const ScalarField& CoefficientField::entry(int k, int l) const {
    return upper_[upper_index(dim_, k, l)];
}

bool CoefficientField::is_diagonal(double tol) const {
    for (int k = 0; k < dim_; ++k)
        for (int l = k + 1; l < dim_; ++l)
            if (entry(k, l).linf() > tol) return false;
    return true;
}

int CoefficientField::resolution() const {
    int r = 0;
    for (const ScalarField& e : upper_) r = std::max(r, e.resolution());
    return r;
}

int CoefficientField::bandwidth() const {
    int b = 0;
    for (const ScalarField& e : upper_) b = std::max(b, e.bandwidth());
    return b;
}

ScalarField CoefficientField::trace() const {
    ScalarField t = entry(0, 0);
    for (int k = 1; k < dim_; ++k) t = add(t, entry(k, k));
    return t;
}

CoefficientField CoefficientField::scaled(double factor) const {
    std::vector<ScalarField> entries;
    for (const ScalarField& e : upper_) entries.push_back(e.scaled(factor));
    return from_upper(dim_, std::move(entries));
}

CoefficientField CoefficientField::plus_identity(double c) const {
    std::vector<ScalarField> entries = upper_;
    for (int k = 0; k < dim_; ++k)
        entries[upper_index(dim_, k, k)] = entries[upper_index(dim_, k, k)].plus_constant(c);
    return from_upper(dim_, std::move(entries));
}

CoefficientField CoefficientField::scaled_by(const ScalarField& gamma) const {
    std::vector<ScalarField> entries;
    for (const ScalarField& e : upper_) entries.push_back(multiply(gamma, e));
    return from_upper(dim_, std::move(entries));
}

CoefficientField CoefficientField::plus(const CoefficientField& other) const {
    if (other.dim_ != dim_) throw Error("dimension mismatch in CoefficientField::plus");
    std::vector<ScalarField> entries;
    for (std::size_t i = 0; i < upper_.size(); ++i)
        entries.push_back(add(upper_[i], other.upper_[i]));
    return from_upper(dim_, std::move(entries));
}

} // namespace ndhom
