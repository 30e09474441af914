#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "ndhom/wave.hpp"

namespace ndhom::spectral {

/// Real samples on the uniform n^dim torus grid y_j = j/n, C order
/// (last axis fastest).
struct RealGrid {
    int dim{0};
    int n{0};
    std::vector<double> v;

    RealGrid() = default;
    RealGrid(int dim_, int n_);
    std::size_t size() const { return v.size(); }
};

/// Half-complex spectrum in FFTW r2c layout: dims [n]^(dim-1) x (n/2+1),
/// normalized so that coef(0) is the mean. Nyquist planes are kept zero;
/// usable bandwidth is |k| <= n/2 - 1 per axis.
struct Spectrum {
    int dim{0};
    int n{0};
    std::vector<std::complex<double>> c;

    Spectrum() = default;
    Spectrum(int dim_, int n_);
    std::size_t size() const { return c.size(); }
    int last_extent() const { return n / 2 + 1; }
};

std::size_t grid_points(int dim, int n);

// FFT with cached plans; thread-safe.
Spectrum forward(const RealGrid& g);
RealGrid inverse(const Spectrum& s);

/// Embed/truncate between resolutions; Nyquist rows are zeroed. Truncation
/// below the source bandwidth discards tail modes (Galerkin projection).
Spectrum resize(const Spectrum& s, int n_out);

/// Samples of the band-limited field on the m^dim grid (m >= n exact).
RealGrid synthesize(const Spectrum& s, int m);

/// Forward transform of an m-grid, truncated to resolution n.
Spectrum analyze(const RealGrid& g, int n);

/// Multiply by the Fourier symbol of the derivative prod_a (d/dy_a)^order[a].
void apply_derivative(Spectrum& s, const std::array<int, 3>& order);

void zero_mean(Spectrum& s);

/// Signed wavenumber of index i along a non-final axis.
inline int signed_mode(int i, int n) { return (i <= n / 2) ? i : i - n; }

/// Place an exact term list into a spectrum (throws AliasError if the
/// bandwidth does not fit below Nyquist).
Spectrum terms_to_spectrum(const std::vector<WaveTerm>& terms, int dim, int n);

/// Extract the term list of a spectrum, dropping |amp| <= tol.
std::vector<WaveTerm> spectrum_to_terms(const Spectrum& s, double tol = 0.0);

/// Direct summation of a term list on the n^dim grid (exact for any n).
RealGrid sample_terms(const std::vector<WaveTerm>& terms, int dim, int n);

/// Iterate all modes: visit(flat_index, k0, k1, k2).
template <typename F>
void for_each_mode(const Spectrum& s, F&& visit) {
    const int n = s.n, d = s.dim, L = s.last_extent();
    if (d == 1) {
        for (int i = 0; i < L; ++i) visit(static_cast<std::size_t>(i), i, 0, 0);
    } else if (d == 2) {
        std::size_t idx = 0;
        for (int i0 = 0; i0 < n; ++i0) {
            const int k0 = signed_mode(i0, n);
            for (int i1 = 0; i1 < L; ++i1, ++idx) visit(idx, k0, i1, 0);
        }
    } else {
        std::size_t idx = 0;
        for (int i0 = 0; i0 < n; ++i0) {
            const int k0 = signed_mode(i0, n);
            for (int i1 = 0; i1 < n; ++i1) {
                const int k1 = signed_mode(i1, n);
                for (int i2 = 0; i2 < L; ++i2, ++idx) visit(idx, k0, k1, i2);
            }
        }
    }
}

// --- real-to-real transforms for the Dirichlet lab ------------------------

/// In-place DST-I of each contiguous run of length `len` (count runs,
/// stride `dist` between run starts). Unnormalized: applying twice
/// multiplies by 2*(len+1).
void dst1_batch(double* data, int len, int count, std::ptrdiff_t dist);

} // namespace ndhom::spectral
