#include "qtomo/recon.hpp"

#include <cmath>
#include <stdexcept>

#include "qtomo/radon.hpp"

namespace qtomo {

// Per-angle DFT over rho of the sinogram with centered output bins. The rho
// samples are relabeled first (cyclic shift by n_rho/2) so that rho ~ 0 sits
// at index 0: the spectrum of data parked at the array center alternates
// sign every bin, which no linear interpolation survives.
static ComplexField sinogram_spectrum_centered(const Sinogram& sino) {
    const int m = sino.n_rho;
    ComplexField spec(m, sino.n_theta, true);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < sino.n_theta; ++j) {
        std::vector<cdouble> col(m);
        for (int i = 0; i < m; ++i) col[i] = sino.at((i + m / 2) % m, j);
        col = fftshift(dft1d(col, FftDirection::forward, FftNorm::unnormalized));
        for (int i = 0; i < m; ++i) spec.at(i, j) = col[i];
    }
    return spec;
}

FourierSliceResult fourier_slice_full(const Sinogram& sino, int n, InterpScheme scheme,
                                      bool apply_ramp) {
    if (!is_pow2(n) || !is_pow2(sino.n_rho))
        throw std::invalid_argument("fourier_slice: n and n_rho must be powers of two");
    const int m = sino.n_rho;

    ComplexField spec = sinogram_spectrum_centered(sino);
    if (apply_ramp) {
        // density compensation: weight polar samples by |nu| before resampling
        for (int i = 0; i < m; ++i) {
            double nu = (i - m / 2) * 0.5; // physical frequency, spacing 1/2
            for (int j = 0; j < sino.n_theta; ++j) spec.at(i, j) *= std::abs(nu);
        }
    }

    SparseInterpMatrix A = build_interp_matrix(n, m, sino.n_theta, scheme);
    std::vector<cdouble> cart = apply_interp(A, spec.data);

    ComplexField field(n, n, true);
    field.data = std::move(cart);
    field = dft2d(unshift(field), FftDirection::inverse, FftNorm::unnormalized);

    // back to the pixel layout (origin at index n/2) and physical scale
    ComplexField img_field = fftshift(field);
    const double scale = double(n) * n / (2.0 * m);

    FourierSliceResult res;
    res.image = ImageGrid(n);
    double re2 = 0.0, im2 = 0.0;
    for (std::size_t i = 0; i < img_field.data.size(); ++i) {
        cdouble z = img_field.data[i] * scale;
        img_field.data[i] = z;
        res.image.data[i] = z.real();
        re2 += z.real() * z.real();
        im2 += z.imag() * z.imag();
    }
    res.complex_image = std::move(img_field);
    res.imag_residual = (re2 > 0.0) ? std::sqrt(im2 / re2) : 0.0;
    return res;
}

ImageGrid fourier_slice_reconstruct(const Sinogram& sino, int n, InterpScheme scheme,
                                    bool apply_ramp) {
    return fourier_slice_full(sino, n, scheme, apply_ramp).image;
}

ImageGrid fbp_reconstruct(const Sinogram& sino, int n) {
    if (!is_pow2(sino.n_rho))
        throw std::invalid_argument("fbp_reconstruct: n_rho must be a power of two");
    const int m = sino.n_rho;

    // DFT over rho -> |nu| weighting -> inverse DFT; the shifts a centered
    // convention would add cancel through the diagonal filter
    ComplexField spec(m, sino.n_theta);
    for (int j = 0; j < sino.n_theta; ++j) {
        std::vector<cdouble> col(m);
        for (int i = 0; i < m; ++i) col[i] = sino.at(i, j);
        col = dft1d(col, FftDirection::forward, FftNorm::unnormalized);
        for (int i = 0; i < m; ++i) spec.at(i, j) = col[i];
    }
    spec = ramp_filter(spec);
    Sinogram filtered(m, sino.n_theta);
    const double scale = m / 2.0; // 1/delta_rho turns the bin measure physical
    for (int j = 0; j < sino.n_theta; ++j) {
        std::vector<cdouble> col(m);
        for (int i = 0; i < m; ++i) col[i] = spec.at(i, j);
        col = dft1d(col, FftDirection::inverse, FftNorm::unnormalized);
        for (int i = 0; i < m; ++i) filtered.at(i, j) = col[i].real() * scale;
    }
    return backproject(filtered, n);
}

static void check_same_dims(const ImageGrid& a, const ImageGrid& b) {
    if (a.n != b.n || a.data.size() != b.data.size())
        throw std::invalid_argument("metric: image dimensions differ");
}

double rmse(const ImageGrid& a, const ImageGrid& b) {
    check_same_dims(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    return std::sqrt(acc / double(a.data.size()));
}

double psnr(const ImageGrid& a, const ImageGrid& b, double peak) {
    double e = rmse(a, b);
    return 20.0 * std::log10(peak / e);
}

double ncc(const ImageGrid& a, const ImageGrid& b) {
    check_same_dims(a, b);
    const std::size_t n = a.data.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) { ma += a.data[i]; mb += b.data[i]; }
    ma /= double(n);
    mb /= double(n);
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double xa = a.data[i] - ma, xb = b.data[i] - mb;
        num += xa * xb;
        da += xa * xa;
        db += xb * xb;
    }
    return num / std::sqrt(da * db);
}

} // namespace qtomo
