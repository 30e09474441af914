#include "ndhom/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

#include "ndhom/errors.hpp"

namespace ndhom::spectral {

namespace {

std::size_t ipow(std::size_t b, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

std::size_t complex_size(int dim, int n) {
    return ipow(static_cast<std::size_t>(n), dim - 1) * (n / 2 + 1);
}

// Plan cache. Plans are created once per (kind, dim, n) with FFTW_UNALIGNED
// so they can be executed on any buffer via the new-array interface.
struct PlanKey {
    int kind; // 0 r2c, 1 c2r, 2 dst1
    int dim;
    int n;
    int count;               // dst only
    std::ptrdiff_t dist;     // dst only
    bool operator<(const PlanKey& o) const {
        return std::tie(kind, dim, n, count, dist) <
               std::tie(o.kind, o.dim, o.n, o.count, o.dist);
    }
};

class PlanCache {
public:
    // measured plans pay off for the large 3d grids that dominate solves
    static unsigned flags(int dim) {
        return (dim == 3 ? FFTW_MEASURE : FFTW_ESTIMATE) | FFTW_UNALIGNED;
    }

    fftw_plan get_r2c(int dim, int n) {
        std::lock_guard<std::mutex> lock(mu_);
        PlanKey key{0, dim, n, 0, 0};
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<double> in(ipow(n, dim));
        std::vector<std::complex<double>> out(complex_size(dim, n));
        std::vector<int> dims(dim, n);
        fftw_plan p = fftw_plan_dft_r2c(dim, dims.data(), in.data(),
                                        reinterpret_cast<fftw_complex*>(out.data()),
                                        flags(dim));
        plans_[key] = p;
        return p;
    }

    fftw_plan get_c2r(int dim, int n) {
        std::lock_guard<std::mutex> lock(mu_);
        PlanKey key{1, dim, n, 0, 0};
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<std::complex<double>> in(complex_size(dim, n));
        std::vector<double> out(ipow(n, dim));
        std::vector<int> dims(dim, n);
        fftw_plan p = fftw_plan_dft_c2r(dim, dims.data(),
                                        reinterpret_cast<fftw_complex*>(in.data()),
                                        out.data(), flags(dim));
        plans_[key] = p;
        return p;
    }

    fftw_plan get_dst1(int len, int count, std::ptrdiff_t dist) {
        std::lock_guard<std::mutex> lock(mu_);
        PlanKey key{2, 1, len, count, dist};
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<double> buf(static_cast<std::size_t>(count) * dist + len);
        int nn = len;
        fftw_r2r_kind kind = FFTW_RODFT00;
        fftw_plan p = fftw_plan_many_r2r(1, &nn, count,
                                         buf.data(), nullptr, 1, static_cast<int>(dist),
                                         buf.data(), nullptr, 1, static_cast<int>(dist),
                                         &kind, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_[key] = p;
        return p;
    }

private:
    std::mutex mu_;
    std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void check_res(int dim, int n) {
    if (dim < 1 || dim > 3) throw Error("dimension must be 1, 2 or 3");
    if (n < 2 || (n & (n - 1)) != 0) throw Error("resolution must be a power of two >= 2");
}

} // namespace

RealGrid::RealGrid(int dim_, int n_) : dim(dim_), n(n_) {
    check_res(dim_, n_);
    v.assign(ipow(n_, dim_), 0.0);
}

Spectrum::Spectrum(int dim_, int n_) : dim(dim_), n(n_) {
    check_res(dim_, n_);
    c.assign(complex_size(dim_, n_), {0.0, 0.0});
}

std::size_t grid_points(int dim, int n) { return ipow(n, dim); }

Spectrum forward(const RealGrid& g) {
    Spectrum s(g.dim, g.n);
    std::vector<double> in(g.v); // r2c destroys input for multi-d transforms
    fftw_plan p = cache().get_r2c(g.dim, g.n);
    fftw_execute_dft_r2c(p, in.data(), reinterpret_cast<fftw_complex*>(s.c.data()));
    const double scale = 1.0 / static_cast<double>(ipow(g.n, g.dim));
    for (auto& z : s.c) z *= scale;
    return s;
}

RealGrid inverse(const Spectrum& s) {
    RealGrid g(s.dim, s.n);
    std::vector<std::complex<double>> in(s.c); // c2r destroys input
    fftw_plan p = cache().get_c2r(s.dim, s.n);
    fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(in.data()), g.v.data());
    return g;
}

namespace {

// Copy modes |k| <= band between two layouts; everything else stays zero.
void copy_band(const Spectrum& src, Spectrum& dst) {
    const int band = std::min(src.n, dst.n) / 2 - 1;
    const int nd = dst.n, Ld = dst.n / 2 + 1;
    for_each_mode(src, [&](std::size_t idx, int k0, int k1, int k2) {
        // k2 is the non-negative last-axis mode in 1D/2D/3D layouts; map names
        int ka = k0, kb = k1, kc = k2;
        if (src.dim == 1) { ka = k0; }
        // bounds check against band
        int kk[3] = {ka, kb, kc};
        for (int d = 0; d < src.dim; ++d)
            if (std::abs(kk[d]) > band) return;
        std::size_t out = 0;
        if (src.dim == 1) {
            out = static_cast<std::size_t>(ka);
        } else if (src.dim == 2) {
            int i0 = ka >= 0 ? ka : nd + ka;
            out = static_cast<std::size_t>(i0) * Ld + kb;
        } else {
            int i0 = ka >= 0 ? ka : nd + ka;
            int i1 = kb >= 0 ? kb : nd + kb;
            out = (static_cast<std::size_t>(i0) * nd + i1) * Ld + kc;
        }
        dst.c[out] = src.c[idx];
    });
}

} // namespace

Spectrum resize(const Spectrum& s, int n_out) {
    if (n_out == s.n) {
        Spectrum t = s;
        return t;
    }
    Spectrum t(s.dim, n_out);
    copy_band(s, t);
    return t;
}

RealGrid synthesize(const Spectrum& s, int m) {
    if (m == s.n) return inverse(s);
    if (m < s.n) {
        // only exact if the field is band-limited to m; callers ensure this
        return inverse(resize(s, m));
    }
    return inverse(resize(s, m));
}

Spectrum analyze(const RealGrid& g, int n) {
    Spectrum full = forward(g);
    if (n == g.n) {
        // zero Nyquist planes for a clean band-limited representation
        Spectrum t(g.dim, n);
        copy_band(full, t);
        return t;
    }
    return resize(full, n);
}

void apply_derivative(Spectrum& s, const std::array<int, 3>& order) {
    constexpr double two_pi = 2.0 * M_PI;
    const int total = order[0] + order[1] + order[2];
    if (total == 0) return;
    for_each_mode(s, [&](std::size_t idx, int k0, int k1, int k2) {
        const int kk[3] = {k0, k1, k2};
        std::complex<double> f{1.0, 0.0};
        for (int d = 0; d < s.dim; ++d) {
            for (int p = 0; p < order[d]; ++p) f *= std::complex<double>(0.0, two_pi * kk[d]);
        }
        s.c[idx] *= f;
    });
    zero_mean(s);
}

void zero_mean(Spectrum& s) { s.c[0] = {0.0, 0.0}; }

Spectrum terms_to_spectrum(const std::vector<WaveTerm>& terms, int dim, int n) {
    Spectrum s(dim, n);
    const int band = n / 2 - 1;
    const int L = n / 2 + 1;
    auto place = [&](const std::array<int, 3>& k, std::complex<double> coef) {
        // store only modes with non-negative last-axis index
        if (k[dim - 1] < 0) return;
        std::size_t idx = 0;
        if (dim == 1) {
            idx = static_cast<std::size_t>(k[0]);
        } else if (dim == 2) {
            int i0 = k[0] >= 0 ? k[0] : n + k[0];
            idx = static_cast<std::size_t>(i0) * L + k[1];
        } else {
            int i0 = k[0] >= 0 ? k[0] : n + k[0];
            int i1 = k[1] >= 0 ? k[1] : n + k[1];
            idx = (static_cast<std::size_t>(i0) * n + i1) * L + k[2];
        }
        s.c[idx] += coef;
    };
    for (const WaveTerm& t : terms) {
        for (int d = dim; d < 3; ++d)
            if (t.k[d] != 0) throw Error("term wavevector exceeds field dimension");
        for (int d = 0; d < dim; ++d)
            if (std::abs(t.k[d]) > band)
                throw AliasError("term bandwidth exceeds resolution " + std::to_string(n));
        if (is_zero_wavevector(t.k)) {
            place(t.k, {t.amp, 0.0});
            continue;
        }
        std::array<int, 3> neg{-t.k[0], -t.k[1], -t.k[2]};
        if (t.phase == Phase::Cos) {
            place(t.k, {0.5 * t.amp, 0.0});
            place(neg, {0.5 * t.amp, 0.0});
        } else {
            place(t.k, {0.0, -0.5 * t.amp});
            place(neg, {0.0, 0.5 * t.amp});
        }
    }
    return s;
}

std::vector<WaveTerm> spectrum_to_terms(const Spectrum& s, double tol) {
    std::vector<WaveTerm> out;
    for_each_mode(s, [&](std::size_t idx, int k0, int k1, int k2) {
        const std::complex<double> z = s.c[idx];
        if (k0 == 0 && k1 == 0 && k2 == 0) {
            if (std::abs(z.real()) > tol)
                out.push_back(WaveTerm{{0, 0, 0}, Phase::Cos, z.real()});
            return;
        }
        // the k_last = 0 hyperplane holds both k and -k; keep canonical reps only
        const int klast = (s.dim == 1) ? k0 : (s.dim == 2 ? k1 : k2);
        if (klast == 0) {
            int lead = k0 != 0 ? k0 : (k1 != 0 ? k1 : k2);
            if (lead < 0) return; // the conjugate entry covers this mode
        }
        const double ac = 2.0 * z.real();
        const double as = -2.0 * z.imag();
        if (std::abs(ac) > tol) out.push_back(WaveTerm{{k0, k1, k2}, Phase::Cos, ac});
        if (std::abs(as) > tol) out.push_back(WaveTerm{{k0, k1, k2}, Phase::Sin, as});
    });
    return canonicalize_terms(out, true);
}

RealGrid sample_terms(const std::vector<WaveTerm>& terms, int dim, int n) {
    RealGrid g(dim, n);
    const double h = 1.0 / n;
    if (dim == 1) {
        for (int i = 0; i < n; ++i) {
            double y[1] = {i * h};
            g.v[i] = evaluate_terms(terms, 1, y);
        }
    } else if (dim == 2) {
        std::size_t idx = 0;
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1, ++idx) {
                double y[2] = {i0 * h, i1 * h};
                g.v[idx] = evaluate_terms(terms, 2, y);
            }
    } else {
        std::size_t idx = 0;
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1)
                for (int i2 = 0; i2 < n; ++i2, ++idx) {
                    double y[3] = {i0 * h, i1 * h, i2 * h};
                    g.v[idx] = evaluate_terms(terms, 3, y);
                }
    }
    return g;
}

void dst1_batch(double* data, int len, int count, std::ptrdiff_t dist) {
    if (len <= 0 || count <= 0) return;
    fftw_plan p = cache().get_dst1(len, count, dist);
    fftw_execute_r2r(p, data, data);
}

} // namespace ndhom::spectral
