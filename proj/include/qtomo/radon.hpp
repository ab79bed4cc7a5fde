#pragma once
#include "qtomo/image.hpp"
#include "qtomo/sinogram.hpp"

namespace qtomo {

// Bilinear sample of the image at physical (x, y); zero outside the extent.
double sample_image(const ImageGrid& img, double x, double y);

// Line integral of img along x*cos(theta) + y*sin(theta) = rho, sampled at
// step h = 1/n over the parameter range [-sqrt(2), sqrt(2)] with bilinear
// image lookups, summed * h.
double integrate_line(const ImageGrid& img, double rho, double theta);

// Entry (i,j) is the line integral at (rho_i, theta_j). OpenMP over entries;
// every entry is computed independently so results do not depend on the
// thread count.
Sinogram forward_radon(const ImageGrid& img, int n_rho, int n_theta);

// Unfiltered backprojection:
//   G(x,y) = (pi/n_theta) * sum_j f(x cos theta_j + y sin theta_j, theta_j)
// with linear interpolation in rho and zero beyond the sample range.
ImageGrid backproject(const Sinogram& sino, int n);

namespace ref {
// Serial spellings kept as references for the parallel kernels; exercised by
// the tests and the kernel benchmark.
Sinogram forward_radon(const ImageGrid& img, int n_rho, int n_theta);
ImageGrid backproject(const Sinogram& sino, int n);
} // namespace ref

} // namespace qtomo
