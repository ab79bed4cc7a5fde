#pragma once
#include <complex>
#include <span>
#include <vector>

namespace qtomo {

using cdouble = std::complex<double>;

enum class FftDirection { forward, inverse };

// unnormalized: forward is the plain sum, inverse divides by m.
// unitary: both directions divide by sqrt(m) (the QFT kernel).
enum class FftNorm { unnormalized, unitary };

constexpr bool is_pow2(long long v) { return v > 0 && (v & (v - 1)) == 0; }

// rows x cols complex spectrum, row-major. `centered` records whether an
// fftshift has moved the zero-frequency bin to the middle of each axis.
struct ComplexField {
    int rows = 0;
    int cols = 0;
    bool centered = false;
    std::vector<cdouble> data;

    ComplexField() = default;
    ComplexField(int r, int c, bool is_centered = false)
        : rows(r), cols(c), centered(is_centered), data(std::size_t(r) * c) {}

    cdouble& at(int r, int c) { return data[std::size_t(r) * cols + c]; }
    cdouble at(int r, int c) const { return data[std::size_t(r) * cols + c]; }
};

// Radix-2 transform; length must be a power of two (std::invalid_argument
// otherwise). X_k = sum_n x_n exp(-2*pi*i*k*n/m) in the forward direction.
std::vector<cdouble> dft1d(std::span<const cdouble> v, FftDirection dir, FftNorm norm);

// Separable: dft1d along every row, then along every column.
ComplexField dft2d(const ComplexField& field, FftDirection dir, FftNorm norm);

// Cyclic shift by floor(m/2): bin 0 moves to position floor(m/2).
std::vector<cdouble> fftshift(std::span<const cdouble> v);
std::vector<cdouble> unshift(std::span<const cdouble> v);
ComplexField fftshift(const ComplexField& field); // toggles `centered` on
ComplexField unshift(const ComplexField& field);  // toggles `centered` off

// Multiplies bin k of every column by |nu_k| with nu_k = k/m for k <= m/2 and
// (k-m)/m above; the DC row is zeroed. Input is the per-angle DFT over rho of
// a sinogram in standard (uncentered) ordering, rows = frequency bins.
ComplexField ramp_filter(const ComplexField& sino_spectrum);

namespace ref {
// O(m^2) direct summation; the oracle the radix-2 path is tested against.
std::vector<cdouble> dft1d_naive(std::span<const cdouble> v, FftDirection dir, FftNorm norm);
} // namespace ref

} // namespace qtomo
