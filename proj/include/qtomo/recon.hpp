#pragma once
#include <optional>
#include <string>

#include "qtomo/image.hpp"
#include "qtomo/interp.hpp"
#include "qtomo/sinogram.hpp"
#include "qtomo/spectral.hpp"

namespace qtomo {

struct ReconReport {
    std::string method;
    ImageGrid image;
    std::optional<double> rmse_vs_reference;
    std::optional<double> psnr;
    double wall_time_seconds = 0.0;
    // ||Im|| / ||Re|| of the complex image before the real part is taken
    // (fourier-slice only; interpolation breaks exact Hermitian symmetry)
    double imag_residual = 0.0;
};

struct FourierSliceResult {
    ImageGrid image;
    ComplexField complex_image; // spatial layout, before the real part is taken
    double imag_residual = 0.0;
};

// Fourier-slice reconstruction:
//   per angle: DFT over rho (input relabeled so rho=0 sits at index 0),
//   center bins, resample polar->Cartesian through A, uncenter, inverse 2D
//   DFT, relabel back to the pixel layout. Output scaled so amplitudes
//   approximate the source image. apply_ramp weights the polar samples by
//   |nu| before resampling (density compensation; off reproduces the plain
//   interpolation pipeline).
FourierSliceResult fourier_slice_full(const Sinogram& sino, int n, InterpScheme scheme,
                                      bool apply_ramp);
ImageGrid fourier_slice_reconstruct(const Sinogram& sino, int n, InterpScheme scheme,
                                    bool apply_ramp = false);

// DFT over rho -> ramp filter -> inverse DFT -> backproject.
ImageGrid fbp_reconstruct(const Sinogram& sino, int n);

double rmse(const ImageGrid& a, const ImageGrid& b);
double psnr(const ImageGrid& a, const ImageGrid& b, double peak);
double ncc(const ImageGrid& a, const ImageGrid& b); // Pearson correlation over pixels

} // namespace qtomo
