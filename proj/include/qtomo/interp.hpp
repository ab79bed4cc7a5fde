#pragma once
#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qtomo/spectral.hpp"

namespace qtomo {

enum class InterpScheme { nearest_neighbor, simplex, bilinear };

int scheme_sparsity(InterpScheme scheme); // 1, 3, 4
const char* scheme_name(InterpScheme scheme);
InterpScheme scheme_from_name(const std::string& name); // std::invalid_argument on unknown

// Plain CSR storage. Weights are real: the interpolation coefficients are
// real even though the operator multiplies complex spectra.
struct CsrMatrix {
    std::int64_t n_rows = 0;
    std::int64_t n_cols = 0;
    std::vector<std::uint32_t> row_offsets; // size n_rows + 1
    std::vector<std::uint32_t> cols;
    std::vector<double> weights;
};

CsrMatrix transpose(const CsrMatrix& m);
std::vector<double> csr_apply(const CsrMatrix& m, std::span<const double> x);
std::vector<cdouble> csr_apply(const CsrMatrix& m, std::span<const cdouble> x);

// One interpolation stencil: the polar nodes and convex weights a single
// Cartesian frequency target resamples from. Nodes are addressed as
// (radial bin xi in [0, n_rho), angle column j in [0, n_theta)).
struct InterpStencil {
    struct Node {
        int xi;
        int j;
        double weight;
    };
    std::array<Node, 4> nodes{};
    int count = 0;    // 0 means the stencil left the polar grid (zero-fill)
};

// Stencil for the polar point (k_signed, theta) where k_signed is the signed
// radial frequency in bin units (radial samples sit at integers
// -n_rho/2 .. n_rho/2 - 1) and theta is in radians. theta is folded into
// [0, pi) with the radial sign flipped on each fold; the upper angle node of
// a cell at theta ~ pi wraps to column 0 with the radial coordinate negated
// (projection parity). Zero weights are dropped, duplicates merged; if any
// surviving node falls off the radial range the stencil comes back empty.
InterpStencil interp_stencil(double k_signed, double theta, int n_rho, int n_theta,
                             InterpScheme scheme);

// Row-sparse polar->Cartesian resampling operator on centered spectra.
// Row r = ky_idx * n + kx_idx targets the Cartesian bin
// (kx, ky) = (kx_idx - n/2, ky_idx - n/2); column c = xi * n_theta + j is the
// polar sample at radial bin xi (signed k = xi - n_rho/2) and angle
// theta_j = j*pi/n_theta. Both grids share the same physical frequency
// spacing because image and sinogram live on the same [-1,1] extent, so
// radii compare directly in bin units. Cartesian corners beyond the radial
// range get empty rows (zero-fill).
struct SparseInterpMatrix {
    int n = 0;       // Cartesian side
    int n_rho = 0;   // polar radial bin count
    int n_theta = 0; // polar angle count
    InterpScheme scheme = InterpScheme::bilinear;
    CsrMatrix mat;

    std::int64_t rows() const { return std::int64_t(n) * n; }
    std::int64_t cols() const { return std::int64_t(n_rho) * n_theta; }
};

SparseInterpMatrix build_interp_matrix(int n, int n_rho, int n_theta, InterpScheme scheme);

// y = A x; rows with no entries produce exact zero. Length mismatch throws.
std::vector<cdouble> apply_interp(const SparseInterpMatrix& A, std::span<const cdouble> polar);

struct SchurBound {
    double max_row_abs_sum = 0.0;
    double max_col_abs_sum = 0.0;
    double sigma_sq_bound = 0.0; // product of the two
};

SchurBound schur_bound(const SparseInterpMatrix& A);

// Largest singular value via power iteration on A^T A with a fixed-seed start
// vector. Throws numerical_error (carrying the last estimate) if the relative
// change has not dropped below tol within max_iters.
double max_singular_value(const SparseInterpMatrix& A, double tol, int max_iters = 200000);

// Debug dump: "row col weight" per line, sorted by (row, col).
void dump_matrix(const SparseInterpMatrix& A, const std::filesystem::path& path);

} // namespace qtomo
