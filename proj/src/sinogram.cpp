#include "qtomo/sinogram.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qtomo/errors.hpp"

namespace qtomo {

Sinogram::Sinogram(int rho_count, int theta_count, double fill)
    : n_rho(rho_count), n_theta(theta_count) {
    if (rho_count < 1 || theta_count < 1)
        throw std::invalid_argument("Sinogram: counts must be >= 1");
    data.assign(std::size_t(rho_count) * theta_count, fill);
}

double Sinogram::theta(int j) const { return j * M_PI / n_theta; }

void write_sinogram(const Sinogram& sino, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    out << "RSIN1 " << sino.n_rho << " " << sino.n_theta << "\n";
    out.write(reinterpret_cast<const char*>(sino.data.data()),
              std::streamsize(sino.data.size() * sizeof(double)));
    if (!out) throw io_error("short write: " + path.string());
}

Sinogram read_sinogram(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw io_error("truncated header: " + path.string());
    std::istringstream hs(header);
    std::string magic;
    int n_rho = 0, n_theta = 0;
    hs >> magic >> n_rho >> n_theta;
    if (magic != "RSIN1" || n_rho <= 0 || n_theta <= 0)
        throw io_error("malformed rsin header: " + path.string());
    Sinogram sino(n_rho, n_theta);
    in.read(reinterpret_cast<char*>(sino.data.data()),
            std::streamsize(sino.data.size() * sizeof(double)));
    if (in.gcount() != std::streamsize(sino.data.size() * sizeof(double)))
        throw io_error("truncated rsin payload: " + path.string());
    for (double v : sino.data)
        if (!std::isfinite(v)) throw io_error("non-finite value in rsin: " + path.string());
    return sino;
}

} // namespace qtomo
