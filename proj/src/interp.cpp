#include "qtomo/interp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "qtomo/errors.hpp"
#include "qtomo/rng.hpp"

namespace qtomo {

int scheme_sparsity(InterpScheme scheme) {
    switch (scheme) {
        case InterpScheme::nearest_neighbor: return 1;
        case InterpScheme::simplex: return 3;
        case InterpScheme::bilinear: return 4;
    }
    return 0;
}

const char* scheme_name(InterpScheme scheme) {
    switch (scheme) {
        case InterpScheme::nearest_neighbor: return "nearest";
        case InterpScheme::simplex: return "simplex";
        case InterpScheme::bilinear: return "bilinear";
    }
    return "?";
}

InterpScheme scheme_from_name(const std::string& name) {
    if (name == "nearest" || name == "nearest-neighbor") return InterpScheme::nearest_neighbor;
    if (name == "simplex") return InterpScheme::simplex;
    if (name == "bilinear") return InterpScheme::bilinear;
    throw std::invalid_argument("unknown interpolation scheme: " + name);
}

CsrMatrix transpose(const CsrMatrix& m) {
    CsrMatrix t;
    t.n_rows = m.n_cols;
    t.n_cols = m.n_rows;
    t.row_offsets.assign(std::size_t(t.n_rows) + 1, 0);
    for (auto c : m.cols) ++t.row_offsets[c + 1];
    for (std::size_t i = 1; i < t.row_offsets.size(); ++i) t.row_offsets[i] += t.row_offsets[i - 1];
    t.cols.resize(m.cols.size());
    t.weights.resize(m.weights.size());
    std::vector<std::uint32_t> cursor(t.row_offsets.begin(), t.row_offsets.end() - 1);
    for (std::int64_t r = 0; r < m.n_rows; ++r)
        for (std::uint32_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
            std::uint32_t pos = cursor[m.cols[k]]++;
            t.cols[pos] = std::uint32_t(r);
            t.weights[pos] = m.weights[k];
        }
    return t;
}

template <class T>
static std::vector<T> apply_impl(const CsrMatrix& m, std::span<const T> x) {
    if (std::ssize(x) != m.n_cols)
        throw std::invalid_argument("apply: vector length does not match column count");
    std::vector<T> y(std::size_t(m.n_rows), T{});
    // tiny operators run hot inside the post-selection loop; skip the fork
#pragma omp parallel for schedule(static) if (m.n_rows > 4096)
    for (std::int64_t r = 0; r < m.n_rows; ++r) {
        T acc{};
        for (std::uint32_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k)
            acc += m.weights[k] * x[m.cols[k]];
        y[r] = acc;
    }
    return y;
}

std::vector<double> csr_apply(const CsrMatrix& m, std::span<const double> x) {
    return apply_impl(m, x);
}
std::vector<cdouble> csr_apply(const CsrMatrix& m, std::span<const cdouble> x) {
    return apply_impl(m, x);
}

// ----------------------------------------------------------------- stencil

namespace {

struct RawNode {
    double xi; // radial bin coordinate (may be off-grid; integer part = node)
    int j;     // angle column
};

// radial bracketing of one column: node floor(xi) with weight (1-w) and
// floor(xi)+1 with weight w
void push_radial(std::vector<InterpStencil::Node>& out, double xi, int j, double col_weight) {
    if (col_weight == 0.0) return;
    double fl = std::floor(xi);
    double w = xi - fl;
    int il = int(fl);
    if (w == 0.0) {
        out.push_back({il, j, col_weight});
    } else {
        out.push_back({il, j, col_weight * (1.0 - w)});
        out.push_back({il + 1, j, col_weight * w});
    }
}

} // namespace

InterpStencil interp_stencil(double k_signed, double theta, int n_rho, int n_theta,
                             InterpScheme scheme) {
    const double dtheta = M_PI / n_theta;

    // fold theta into [0, pi), flipping the radial sign each fold
    double t = theta;
    double sign = 1.0;
    while (t < 0.0) { t += M_PI; sign = -sign; }
    while (t >= M_PI) { t -= M_PI; sign = -sign; }

    double a = t / dtheta;
    int jl = int(std::floor(a));
    if (jl >= n_theta) jl = n_theta - 1; // fp guard at the fold boundary
    double wt = a - jl;
    int jh = jl + 1;
    bool wrapped = false;
    if (jh == n_theta) { jh = 0; wrapped = true; } // theta = pi is column 0, radius negated

    const double r = std::abs(k_signed);
    const double xi_l = sign * r + n_rho / 2.0;                      // column jl
    const double xi_h = (wrapped ? -sign : sign) * r + n_rho / 2.0;  // column jh

    std::vector<InterpStencil::Node> nodes;
    nodes.reserve(4);

    switch (scheme) {
        case InterpScheme::bilinear:
            push_radial(nodes, xi_l, jl, 1.0 - wt);
            push_radial(nodes, xi_h, jh, wt);
            break;
        case InterpScheme::nearest_neighbor: {
            // nearest angle column (tie toward the lower index), then nearest
            // radial node along it (same tie rule)
            double xi = (wt > 0.5) ? xi_h : xi_l;
            int j = (wt > 0.5) ? jh : jl;
            double fl = std::floor(xi);
            int node = int(fl) + ((xi - fl) > 0.5 ? 1 : 0);
            nodes.push_back({node, j, 1.0});
            break;
        }
        case InterpScheme::simplex: {
            // unit cell coordinates (wt, wk); the cell is split along the
            // (low,low)-(high,high) diagonal, barycentric weights inside each
            // triangle
            double fl = std::floor(xi_l);
            double wk = xi_l - fl;
            int il = int(fl);
            int ihl = int(std::floor(xi_h));
            if (wk <= wt) { // triangle (0,0), (1,0), (1,1)
                if (1.0 - wt != 0.0) nodes.push_back({il, jl, 1.0 - wt});
                if (wt - wk != 0.0) nodes.push_back({ihl, jh, wt - wk});
                if (wk != 0.0) nodes.push_back({ihl + 1, jh, wk});
            } else { // triangle (0,0), (0,1), (1,1)
                if (1.0 - wk != 0.0) nodes.push_back({il, jl, 1.0 - wk});
                if (wk - wt != 0.0) nodes.push_back({il + 1, jl, wk - wt});
                if (wt != 0.0) nodes.push_back({ihl + 1, jh, wt});
            }
            break;
        }
    }

    // merge duplicates (possible when n_theta is tiny and jl == jh)
    std::sort(nodes.begin(), nodes.end(), [](const auto& a_, const auto& b_) {
        return a_.xi != b_.xi ? a_.xi < b_.xi : a_.j < b_.j;
    });
    InterpStencil st;
    for (const auto& nd : nodes) {
        if (nd.xi < 0 || nd.xi >= n_rho) return InterpStencil{}; // off the grid: zero-fill
        if (st.count > 0 && st.nodes[st.count - 1].xi == nd.xi && st.nodes[st.count - 1].j == nd.j)
            st.nodes[st.count - 1].weight += nd.weight;
        else
            st.nodes[st.count++] = {nd.xi, nd.j, nd.weight};
    }
    return st;
}

// ------------------------------------------------------------------- build

SparseInterpMatrix build_interp_matrix(int n, int n_rho, int n_theta, InterpScheme scheme) {
    if (n < 2 || n_rho < 1 || n_theta < 1)
        throw std::invalid_argument("build_interp_matrix: bad grid sizes");

    SparseInterpMatrix A;
    A.n = n;
    A.n_rho = n_rho;
    A.n_theta = n_theta;
    A.scheme = scheme;

    const std::int64_t n_rows = A.rows();
    std::vector<InterpStencil> stencils(static_cast<std::size_t>(n_rows));
#pragma omp parallel for collapse(2) schedule(static)
    for (int ky_i = 0; ky_i < n; ++ky_i) {
        for (int kx_i = 0; kx_i < n; ++kx_i) {
            double kx = kx_i - n / 2;
            double ky = ky_i - n / 2;
            stencils[std::size_t(ky_i) * n + kx_i] =
                interp_stencil(std::hypot(kx, ky), std::atan2(ky, kx), n_rho, n_theta, scheme);
        }
    }

    A.mat.n_rows = n_rows;
    A.mat.n_cols = A.cols();
    A.mat.row_offsets.resize(std::size_t(n_rows) + 1);
    A.mat.row_offsets[0] = 0;
    for (std::int64_t r = 0; r < n_rows; ++r)
        A.mat.row_offsets[r + 1] = A.mat.row_offsets[r] + std::uint32_t(stencils[r].count);
    A.mat.cols.resize(A.mat.row_offsets.back());
    A.mat.weights.resize(A.mat.row_offsets.back());
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < n_rows; ++r) {
        std::uint32_t pos = A.mat.row_offsets[r];
        for (int k = 0; k < stencils[r].count; ++k) {
            const auto& nd = stencils[r].nodes[k];
            A.mat.cols[pos] = std::uint32_t(nd.xi) * n_theta + std::uint32_t(nd.j);
            A.mat.weights[pos] = nd.weight;
            ++pos;
        }
    }
    return A;
}

std::vector<cdouble> apply_interp(const SparseInterpMatrix& A, std::span<const cdouble> polar) {
    return csr_apply(A.mat, polar);
}

SchurBound schur_bound(const SparseInterpMatrix& A) {
    SchurBound b;
    std::vector<double> col_sums(std::size_t(A.mat.n_cols), 0.0);
    for (std::int64_t r = 0; r < A.mat.n_rows; ++r) {
        double rs = 0.0;
        for (std::uint32_t k = A.mat.row_offsets[r]; k < A.mat.row_offsets[r + 1]; ++k) {
            rs += std::abs(A.mat.weights[k]);
            col_sums[A.mat.cols[k]] += std::abs(A.mat.weights[k]);
        }
        b.max_row_abs_sum = std::max(b.max_row_abs_sum, rs);
    }
    for (double cs : col_sums) b.max_col_abs_sum = std::max(b.max_col_abs_sum, cs);
    b.sigma_sq_bound = b.max_row_abs_sum * b.max_col_abs_sum;
    return b;
}

double max_singular_value(const SparseInterpMatrix& A, double tol, int max_iters) {
    if (!(tol > 0.0)) throw std::invalid_argument("max_singular_value: tol must be positive");
    CsrMatrix At = transpose(A.mat);
    std::vector<double> x(std::size_t(A.mat.n_cols));
    SplitMix64 rng(0x51CA9u); // fixed start vector
    double nx = 0.0;
    for (auto& v : x) { v = rng.uniform_pm1(); nx += v * v; }
    nx = std::sqrt(nx);
    for (auto& v : x) v /= nx;

    double lambda_prev = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        std::vector<double> z = csr_apply(A.mat, std::span<const double>(x));
        std::vector<double> y = csr_apply(At, std::span<const double>(z));
        double lambda = 0.0;
        for (double v : y) lambda += v * v;
        lambda = std::sqrt(lambda); // ||A^T A x|| -> sigma_max^2 as x converges
        if (lambda == 0.0) return 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] / lambda;
        if (it > 0 && std::abs(lambda - lambda_prev) <= tol * lambda)
            return std::sqrt(lambda);
        lambda_prev = lambda;
    }
    throw numerical_error("max_singular_value: power iteration did not converge",
                          std::sqrt(lambda_prev));
}

void dump_matrix(const SparseInterpMatrix& A, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    char line[96];
    for (std::int64_t r = 0; r < A.mat.n_rows; ++r) {
        // entries within a row are already sorted by column
        for (std::uint32_t k = A.mat.row_offsets[r]; k < A.mat.row_offsets[r + 1]; ++k) {
            std::snprintf(line, sizeof line, "%lld %u %.17g\n", static_cast<long long>(r),
                          A.mat.cols[k], A.mat.weights[k]);
            out << line;
        }
    }
    if (!out) throw io_error("short write: " + path.string());
}

} // namespace qtomo
