#include "qtomo/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace qtomo {

// In-place radix-2 Cooley-Tukey, unnormalized. sign = -1 forward, +1 inverse.
static void fft_pow2(cdouble* x, std::size_t m, double sign) {
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < m; ++i) {
        std::size_t bit = m >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= m; len <<= 1) {
        double ang = sign * 2.0 * M_PI / double(len);
        cdouble wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < m; i += len) {
            cdouble w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cdouble u = x[i + k];
                cdouble v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

static void apply_norm(std::vector<cdouble>& v, FftDirection dir, FftNorm norm) {
    double f = 1.0;
    if (norm == FftNorm::unitary)
        f = 1.0 / std::sqrt(double(v.size()));
    else if (dir == FftDirection::inverse)
        f = 1.0 / double(v.size());
    if (f != 1.0)
        for (auto& z : v) z *= f;
}

std::vector<cdouble> dft1d(std::span<const cdouble> v, FftDirection dir, FftNorm norm) {
    if (!is_pow2(std::ssize(v)))
        throw std::invalid_argument("dft1d: length must be a power of two");
    std::vector<cdouble> out(v.begin(), v.end());
    fft_pow2(out.data(), out.size(), dir == FftDirection::forward ? -1.0 : 1.0);
    apply_norm(out, dir, norm);
    return out;
}

ComplexField dft2d(const ComplexField& field, FftDirection dir, FftNorm norm) {
    if (!is_pow2(field.rows) || !is_pow2(field.cols))
        throw std::invalid_argument("dft2d: both dimensions must be powers of two");
    ComplexField out(field.rows, field.cols, field.centered);
    out.data = field.data;
    double sign = (dir == FftDirection::forward) ? -1.0 : 1.0;
#pragma omp parallel for schedule(static)
    for (int r = 0; r < out.rows; ++r)
        fft_pow2(out.data.data() + std::size_t(r) * out.cols, out.cols, sign);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < out.cols; ++c) {
        std::vector<cdouble> col(out.rows);
        for (int r = 0; r < out.rows; ++r) col[r] = out.at(r, c);
        fft_pow2(col.data(), col.size(), sign);
        for (int r = 0; r < out.rows; ++r) out.at(r, c) = col[r];
    }
    double f = 1.0;
    std::size_t total = out.data.size();
    if (norm == FftNorm::unitary)
        f = 1.0 / std::sqrt(double(total));
    else if (dir == FftDirection::inverse)
        f = 1.0 / double(total);
    if (f != 1.0)
        for (auto& z : out.data) z *= f;
    return out;
}

static std::vector<cdouble> cyclic_shift(std::span<const cdouble> v, std::size_t by) {
    std::vector<cdouble> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[(k + by) % v.size()] = v[k];
    return out;
}

std::vector<cdouble> fftshift(std::span<const cdouble> v) {
    return cyclic_shift(v, v.size() / 2);
}

std::vector<cdouble> unshift(std::span<const cdouble> v) {
    return cyclic_shift(v, v.size() - v.size() / 2);
}

static ComplexField shift2d(const ComplexField& field, bool inverse) {
    ComplexField out(field.rows, field.cols, !field.centered);
    std::size_t br = inverse ? field.rows - field.rows / 2 : field.rows / 2;
    std::size_t bc = inverse ? field.cols - field.cols / 2 : field.cols / 2;
    for (int r = 0; r < field.rows; ++r) {
        std::size_t rr = (r + br) % field.rows;
        for (int c = 0; c < field.cols; ++c)
            out.at(int(rr), int((c + bc) % field.cols)) = field.at(r, c);
    }
    return out;
}

ComplexField fftshift(const ComplexField& field) { return shift2d(field, false); }
ComplexField unshift(const ComplexField& field) { return shift2d(field, true); }

ComplexField ramp_filter(const ComplexField& sino_spectrum) {
    ComplexField out = sino_spectrum;
    int m = out.rows;
    for (int k = 0; k < m; ++k) {
        double nu = (k <= m / 2) ? double(k) / m : double(k - m) / m;
        double w = std::abs(nu);
        for (int c = 0; c < out.cols; ++c) out.at(k, c) *= w;
    }
    return out;
}

namespace ref {

std::vector<cdouble> dft1d_naive(std::span<const cdouble> v, FftDirection dir, FftNorm norm) {
    if (!is_pow2(std::ssize(v)))
        throw std::invalid_argument("dft1d_naive: length must be a power of two");
    std::size_t m = v.size();
    double sign = (dir == FftDirection::forward) ? -1.0 : 1.0;
    std::vector<cdouble> out(m);
    for (std::size_t k = 0; k < m; ++k) {
        cdouble acc(0.0, 0.0);
        for (std::size_t n = 0; n < m; ++n) {
            double ang = sign * 2.0 * M_PI * double(k) * double(n) / double(m);
            acc += v[n] * cdouble(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    apply_norm(out, dir, norm);
    return out;
}

} // namespace ref

} // namespace qtomo
