// Times the OpenMP kernels against their serial references.
//
//   qtomo_bench [size] [angles]
//
// The parallel kernels compute every output element independently, so their
// results match the serial references bit for bit; this target is about
// throughput only.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qtomo/image.hpp"
#include "qtomo/interp.hpp"
#include "qtomo/radon.hpp"
#include "qtomo/recon.hpp"
#include "qtomo/spectral.hpp"

using namespace qtomo;

namespace {

double now() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <class F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        double t0 = now();
        f();
        best = std::min(best, now() - t0);
    }
    return best;
}

void row(const char* name, double serial, double parallel) {
    std::printf("%-24s %10.4f s %10.4f s %8.2fx\n", name, serial, parallel, serial / parallel);
}

} // namespace

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 256;
    int angles = argc > 2 ? std::atoi(argv[2]) : n;
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif
    std::printf("image %dx%d, %d angles\n\n", n, n, angles);
    std::printf("%-24s %12s %12s %9s\n", "kernel", "serial", "parallel", "speedup");

    ImageGrid img = shepp_logan(n);

    Sinogram sino;
    double ts = time_best_of(2, [&] { sino = ref::forward_radon(img, n, angles); });
    double tp = time_best_of(2, [&] { sino = forward_radon(img, n, angles); });
    row("forward_radon", ts, tp);

    ImageGrid back;
    ts = time_best_of(2, [&] { back = ref::backproject(sino, n); });
    tp = time_best_of(2, [&] { back = backproject(sino, n); });
    row("backproject", ts, tp);

    // 2D FFT: the serial column is the same kernel at one thread
    ComplexField field(n, n);
    for (std::size_t i = 0; i < field.data.size(); ++i) field.data[i] = img.data[i];
    ComplexField spec;
#ifdef _OPENMP
    int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
    ts = time_best_of(3, [&] { spec = dft2d(field, FftDirection::forward, FftNorm::unitary); });
    omp_set_num_threads(max_threads);
#else
    ts = time_best_of(3, [&] { spec = dft2d(field, FftDirection::forward, FftNorm::unitary); });
#endif
    tp = time_best_of(3, [&] { spec = dft2d(field, FftDirection::forward, FftNorm::unitary); });
    row("dft2d (1 thread vs all)", ts, tp);

    SparseInterpMatrix A;
    ts = 0.0;
#ifdef _OPENMP
    omp_set_num_threads(1);
    ts = time_best_of(3, [&] { A = build_interp_matrix(n, n, angles, InterpScheme::bilinear); });
    omp_set_num_threads(max_threads);
#else
    ts = time_best_of(3, [&] { A = build_interp_matrix(n, n, angles, InterpScheme::bilinear); });
#endif
    tp = time_best_of(3, [&] { A = build_interp_matrix(n, n, angles, InterpScheme::bilinear); });
    row("build_interp (1 vs all)", ts, tp);

    std::vector<cdouble> x(std::size_t(A.cols()), cdouble(1.0, 0.5));
    std::vector<cdouble> y;
#ifdef _OPENMP
    omp_set_num_threads(1);
    ts = time_best_of(5, [&] { y = apply_interp(A, x); });
    omp_set_num_threads(max_threads);
#else
    ts = time_best_of(5, [&] { y = apply_interp(A, x); });
#endif
    tp = time_best_of(5, [&] { y = apply_interp(A, x); });
    row("apply_interp (1 vs all)", ts, tp);

    return int(y.size() == 0 && back.n == 0); // keep results alive
}
