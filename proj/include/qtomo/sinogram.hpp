#pragma once
#include <filesystem>
#include <vector>

namespace qtomo {

// Parallel-beam line integrals f(rho_i, theta_j), rho-major.
// rho_i = -1 + (i+0.5)*2/n_rho covers [-1,1); theta_j = j*pi/n_theta covers
// [0,pi). Angles stop at pi because f(rho, theta+pi) = f(-rho, theta).
struct Sinogram {
    int n_rho = 0;
    int n_theta = 0;
    std::vector<double> data;

    Sinogram() = default;
    Sinogram(int rho_count, int theta_count, double fill = 0.0);

    double& at(int i, int j) { return data[std::size_t(i) * n_theta + j]; }
    double at(int i, int j) const { return data[std::size_t(i) * n_theta + j]; }

    double rho(int i) const { return -1.0 + (i + 0.5) * 2.0 / n_rho; }
    double theta(int j) const;
    double delta_rho() const { return 2.0 / n_rho; }
};

// "RSIN1 <n_rho> <n_theta>\n" + little-endian float64 payload, rho-major.
void write_sinogram(const Sinogram& sino, const std::filesystem::path& path);
Sinogram read_sinogram(const std::filesystem::path& path);

} // namespace qtomo
