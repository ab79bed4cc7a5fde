#include "qtomo/radon.hpp"

#include <cmath>
#include <stdexcept>

namespace qtomo {

double sample_image(const ImageGrid& img, double x, double y) {
    int n = img.n;
    double u = (x + 1.0) * n / 2.0 - 0.5; // fractional column
    double v = (y + 1.0) * n / 2.0 - 0.5; // fractional row
    int i0 = int(std::floor(u));
    int j0 = int(std::floor(v));
    double fu = u - i0, fv = v - j0;
    double acc = 0.0;
    for (int dj = 0; dj <= 1; ++dj) {
        int jj = j0 + dj;
        if (jj < 0 || jj >= n) continue;
        double wv = dj ? fv : 1.0 - fv;
        for (int di = 0; di <= 1; ++di) {
            int ii = i0 + di;
            if (ii < 0 || ii >= n) continue;
            double wu = di ? fu : 1.0 - fu;
            acc += wu * wv * img.at(jj, ii);
        }
    }
    return acc;
}

double integrate_line(const ImageGrid& img, double rho, double theta) {
    const double h = 1.0 / img.n; // half a pixel
    const double span = 2.0 * std::sqrt(2.0);
    const int steps = int(std::ceil(span / h));
    const double c = std::cos(theta), s = std::sin(theta);
    const double bx = rho * c, by = rho * s; // closest point of the line to the origin
    double acc = 0.0;
    for (int k = 0; k < steps; ++k) {
        double t = -std::sqrt(2.0) + (k + 0.5) * h;
        acc += sample_image(img, bx - t * s, by + t * c);
    }
    return acc * h;
}

Sinogram forward_radon(const ImageGrid& img, int n_rho, int n_theta) {
    Sinogram sino(n_rho, n_theta);
#pragma omp parallel for collapse(2) schedule(static)
    for (int i = 0; i < n_rho; ++i)
        for (int j = 0; j < n_theta; ++j)
            sino.at(i, j) = integrate_line(img, sino.rho(i), sino.theta(j));
    return sino;
}

// linear interpolation over the rho samples of one angle, zero outside
static double sample_projection(const Sinogram& sino, double s, int j) {
    double u = (s + 1.0) * sino.n_rho / 2.0 - 0.5;
    int i0 = int(std::floor(u));
    double fr = u - i0;
    double v0 = (i0 >= 0 && i0 < sino.n_rho) ? sino.at(i0, j) : 0.0;
    double v1 = (i0 + 1 >= 0 && i0 + 1 < sino.n_rho) ? sino.at(i0 + 1, j) : 0.0;
    return (1.0 - fr) * v0 + fr * v1;
}

ImageGrid backproject(const Sinogram& sino, int n) {
    ImageGrid out(n);
    const double scale = M_PI / sino.n_theta;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < n; ++y) {
        double py = out.coord(y);
        for (int x = 0; x < n; ++x) {
            double px = out.coord(x);
            double acc = 0.0;
            for (int j = 0; j < sino.n_theta; ++j) {
                double th = sino.theta(j);
                acc += sample_projection(sino, px * std::cos(th) + py * std::sin(th), j);
            }
            out.at(y, x) = acc * scale;
        }
    }
    return out;
}

namespace ref {

Sinogram forward_radon(const ImageGrid& img, int n_rho, int n_theta) {
    Sinogram sino(n_rho, n_theta);
    for (int i = 0; i < n_rho; ++i)
        for (int j = 0; j < n_theta; ++j)
            sino.at(i, j) = integrate_line(img, sino.rho(i), sino.theta(j));
    return sino;
}

ImageGrid backproject(const Sinogram& sino, int n) {
    ImageGrid out(n);
    const double scale = M_PI / sino.n_theta;
    for (int y = 0; y < n; ++y) {
        double py = out.coord(y);
        for (int x = 0; x < n; ++x) {
            double px = out.coord(x);
            double acc = 0.0;
            for (int j = 0; j < sino.n_theta; ++j) {
                double th = sino.theta(j);
                acc += sample_projection(sino, px * std::cos(th) + py * std::sin(th), j);
            }
            out.at(y, x) = acc * scale;
        }
    }
    return out;
}

} // namespace ref

} // namespace qtomo
