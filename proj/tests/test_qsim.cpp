#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "qtomo/errors.hpp"
#include "qtomo/image.hpp"
#include "qtomo/qsim.hpp"
#include "qtomo/radon.hpp"
#include "qtomo/recon.hpp"
#include "qtomo/rng.hpp"

using namespace qtomo;

namespace {

double max_abs_diff(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

double norm2(const std::vector<cdouble>& v) {
    double acc = 0.0;
    for (const auto& z : v) acc += std::norm(z);
    return std::sqrt(acc);
}

// the polar-spectrum state the CT pipeline prepares before evolution
RegisterState prepared_polar_state(const Sinogram& sino) {
    RegisterState st = encode_amplitudes(sino);
    st = shift_register_labels(st, "rho");
    st = qft_on_register(st, "rho", FftDirection::forward);
    st = shift_register_labels(st, "rho");
    return st;
}

std::vector<cdouble> random_state_vector(std::size_t dim, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<cdouble> v(dim);
    for (auto& z : v) z = cdouble(rng.uniform_pm1(), rng.uniform_pm1());
    double n = 0.0;
    for (const auto& z : v) n += std::norm(z);
    n = std::sqrt(n);
    for (auto& z : v) z /= n;
    return v;
}

} // namespace

TEST_CASE("register layout bookkeeping") {
    RegisterLayout layout{{{"anc", 1}, {"row", 3}, {"col", 2}}};
    CHECK(layout.total_qubits() == 6);
    CHECK(layout.bit_offset("col") == 0);
    CHECK(layout.bit_offset("row") == 2);
    CHECK(layout.bit_offset("anc") == 5);
    CHECK(layout.width("row") == 3);
    CHECK_THROWS_AS(layout.bit_offset("nope"), std::invalid_argument);
    CHECK(layout.to_string() == "anc:1,row:3,col:2");
    CHECK(RegisterLayout::parse("anc:1,row:3,col:2") == layout);
    CHECK_THROWS_AS(RegisterLayout::parse("garbage"), std::invalid_argument);
}

TEST_CASE("amplitude encoding") {
    SUBCASE("delta becomes a basis state") {
        ImageGrid img(4);
        img.at(0, 0) = 3.5;
        RegisterState st = encode_amplitudes(img);
        CHECK(std::abs(st.amplitudes[0] - cdouble(1, 0)) < 1e-15);
        for (std::size_t i = 1; i < st.dim(); ++i) CHECK(std::abs(st.amplitudes[i]) == 0.0);
        CHECK(st.source_norm == doctest::Approx(3.5));
    }
    SUBCASE("uniform field becomes the uniform superposition") {
        ImageGrid img(4, 1.0);
        RegisterState st = encode_amplitudes(img);
        for (const auto& z : st.amplitudes) CHECK(std::abs(z - cdouble(0.25, 0)) < 1e-15);
    }
    SUBCASE("normalization keeps amplitude ratios") {
        SplitMix64 rng(12);
        ImageGrid img(4);
        for (auto& v : img.data) v = rng.uniform_pm1() + 2.0;
        RegisterState st = encode_amplitudes(img);
        CHECK(std::abs(st.norm() - 1.0) < 1e-12);
        for (std::size_t i = 1; i < st.dim(); ++i) {
            double want = img.data[i] / img.data[0];
            double got = (st.amplitudes[i] / st.amplitudes[0]).real();
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
        }
    }
    SUBCASE("zero field cannot be normalized") {
        CHECK_THROWS_AS(encode_amplitudes(ImageGrid(4)), std::invalid_argument);
    }
    SUBCASE("non-power-of-two shapes are rejected") {
        CHECK_THROWS_AS(encode_amplitudes(ImageGrid(6, 1.0)), std::invalid_argument);
    }
}

TEST_CASE("qft on a register") {
    SUBCASE("|0> spreads into the uniform superposition over that register") {
        RegisterLayout layout{{{"a", 3}}};
        std::vector<cdouble> v(8, 0.0);
        v[0] = 1.0;
        RegisterState st = encode_amplitudes(std::span<const cdouble>(v), layout);
        RegisterState out = qft_on_register(st, "a", FftDirection::forward);
        for (const auto& z : out.amplitudes)
            CHECK(std::abs(z - cdouble(1.0 / std::sqrt(8.0), 0)) < 1e-14);
    }
    SUBCASE("forward then inverse is the identity") {
        RegisterLayout layout{{{"hi", 2}, {"lo", 3}}};
        auto v = random_state_vector(32, 44);
        RegisterState st = encode_amplitudes(std::span<const cdouble>(v), layout);
        for (const char* reg : {"hi", "lo"}) {
            RegisterState rt = qft_on_register(qft_on_register(st, reg, FftDirection::forward),
                                               reg, FftDirection::inverse);
            CHECK(max_abs_diff(rt.amplitudes, st.amplitudes) < 1e-12);
        }
    }
    SUBCASE("matches batched unitary dft1d on the flattened vector") {
        RegisterLayout layout{{{"hi", 2}, {"lo", 3}}};
        auto v = random_state_vector(32, 45);
        RegisterState st = encode_amplitudes(std::span<const cdouble>(v), layout);

        // lo register: contiguous slices of 8
        RegisterState lo = qft_on_register(st, "lo", FftDirection::forward);
        for (int s = 0; s < 4; ++s) {
            std::vector<cdouble> slice(st.amplitudes.begin() + s * 8,
                                       st.amplitudes.begin() + (s + 1) * 8);
            auto want = dft1d(slice, FftDirection::forward, FftNorm::unitary);
            for (int k = 0; k < 8; ++k) CHECK(std::abs(lo.amplitudes[s * 8 + k] - want[k]) < 1e-13);
        }
        // hi register: stride-8 slices
        RegisterState hi = qft_on_register(st, "hi", FftDirection::forward);
        for (int s = 0; s < 8; ++s) {
            std::vector<cdouble> slice(4);
            for (int r = 0; r < 4; ++r) slice[r] = st.amplitudes[r * 8 + s];
            auto want = dft1d(slice, FftDirection::forward, FftNorm::unitary);
            for (int r = 0; r < 4; ++r) CHECK(std::abs(hi.amplitudes[r * 8 + s] - want[r]) < 1e-13);
        }
    }
    SUBCASE("unitarity preserves the norm") {
        RegisterLayout layout{{{"a", 4}}};
        auto v = random_state_vector(16, 46);
        RegisterState st = encode_amplitudes(std::span<const cdouble>(v), layout);
        RegisterState out = qft_on_register(st, "a", FftDirection::forward);
        CHECK(std::abs(out.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("register label shift is the axis fftshift and is self-inverse") {
    RegisterLayout layout{{{"hi", 2}, {"lo", 2}}};
    auto v = random_state_vector(16, 47);
    RegisterState st = encode_amplitudes(std::span<const cdouble>(v), layout);
    RegisterState sh = shift_register_labels(st, "hi");
    // hi value r moves to (r + 2) mod 4: amplitude (r, c) lands at ((r+2)%4, c)
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            CHECK(sh.amplitudes[((r + 2) % 4) * 4 + c] == st.amplitudes[r * 4 + c]);
    RegisterState back = shift_register_labels(sh, "hi");
    CHECK(std::memcmp(back.amplitudes.data(), st.amplitudes.data(),
                      st.dim() * sizeof(cdouble)) == 0);
}

TEST_CASE("mri reconstruction inverts synthesized k-space") {
    const int n = 32;
    ImageGrid disk = disk_phantom(n, 0.1, -0.2, 0.4, 1.0);
    ComplexField spatial(n, n);
    for (std::size_t i = 0; i < disk.data.size(); ++i) spatial.data[i] = disk.data[i];
    ComplexField kspace = dft2d(spatial, FftDirection::forward, FftNorm::unitary);

    RegisterState recon = mri_reconstruct_quantum(kspace);
    double pnorm = 0.0;
    for (double v : disk.data) pnorm += v * v;
    pnorm = std::sqrt(pnorm);
    double worst = 0.0;
    for (std::size_t i = 0; i < recon.dim(); ++i)
        worst = std::max(worst, std::abs(recon.amplitudes[i] - disk.data[i] / pnorm));
    CHECK(worst <= 1e-10);

    ImageGrid mag(n);
    for (std::size_t i = 0; i < mag.data.size(); ++i) mag.data[i] = std::abs(recon.amplitudes[i]);
    CHECK(ncc(mag, disk) >= 0.999);
}

TEST_CASE("k-space delta reconstructs to the uniform image") {
    ComplexField kspace(8, 8);
    kspace.at(0, 0) = 1.0;
    RegisterState recon = mri_reconstruct_quantum(kspace);
    for (const auto& z : recon.amplitudes) CHECK(std::abs(z - cdouble(1.0 / 8.0, 0)) < 1e-13);
}

TEST_CASE("evolution time from the truncation budget") {
    CHECK(choose_evolution_time(1.0 / 6.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(choose_evolution_time(1e-6, std::sqrt(21.0)) ==
          doctest::Approx(std::cbrt(6e-6) / std::sqrt(21.0)).epsilon(1e-12));
    CHECK(choose_evolution_time(1e-3, 2.0) ==
          doctest::Approx(choose_evolution_time(1e-3, 1.0) / 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(choose_evolution_time(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("the dilation is Hermitian") {
    DilatedHamiltonian H(build_interp_matrix(16, 16, 16, InterpScheme::bilinear));
    auto u = random_state_vector(2 * std::size_t(H.block_dim()), 61);
    auto v = random_state_vector(2 * std::size_t(H.block_dim()), 62);
    auto Hu = H.apply(u);
    auto Hv = H.apply(v);
    cdouble lhs(0, 0), rhs(0, 0);
    for (std::size_t i = 0; i < u.size(); ++i) {
        lhs += std::conj(u[i]) * Hv[i];
        rhs += std::conj(Hu[i]) * v[i];
    }
    CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("dilated evolution") {
    const int n = 16;
    ImageGrid disk = disk_phantom(n, 0.1, -0.15, 0.6, 1.0);
    Sinogram sino = forward_radon(disk, n, n);
    DilatedHamiltonian H(build_interp_matrix(n, n, n, InterpScheme::bilinear));
    RegisterState polar = prepared_polar_state(sino);
    RegisterState start = append_ancilla(polar);
    const double eps = 1e-4;
    const double t = choose_evolution_time(eps, H.norm_bound());
    const double sigma = max_singular_value(H.interp(), 1e-10);

    SUBCASE("t = 0 is the identity") {
        RegisterState out =
            evolve_dilated(start, H, 0.0, eps, EvolutionEngine::exact_spectral);
        CHECK(max_abs_diff(out.amplitudes, start.amplitudes) < 1e-14);
        RegisterState out2 = evolve_dilated(start, H, 0.0, eps, EvolutionEngine::taylor);
        CHECK(max_abs_diff(out2.amplitudes, start.amplitudes) < 1e-14);
    }

    SUBCASE("the two engines agree") {
        int order = 0;
        RegisterState a = evolve_dilated(start, H, t, eps, EvolutionEngine::exact_spectral);
        RegisterState b = evolve_dilated(start, H, t, eps, EvolutionEngine::taylor, &order);
        CHECK(order >= 1);
        CHECK(max_abs_diff(a.amplitudes, b.amplitudes) <= 1e-9);
        CHECK(std::abs(a.norm() - 1.0) < 1e-10); // exact path is unitary
    }

    SUBCASE("evolution reproduces the series structure") {
        RegisterState out = evolve_dilated(start, H, t, eps, EvolutionEngine::exact_spectral);
        const std::size_t bd = std::size_t(H.block_dim());

        // |1> block stays within (sigma t)^2/2 of the input polar data
        double d1 = 0.0;
        for (std::size_t i = 0; i < bd; ++i)
            d1 += std::norm(out.amplitudes[bd + i] - polar.amplitudes[i]);
        CHECK(std::sqrt(d1) <= 0.5 * sigma * sigma * t * t + 1e-12);

        // |0> block equals -i t A fhat within (sigma t)^3/6
        std::vector<cdouble> want = apply_interp(H.interp(), polar.amplitudes);
        double d0 = 0.0, wn = 0.0;
        for (std::size_t i = 0; i < bd; ++i) {
            d0 += std::norm(out.amplitudes[i] - cdouble(0, -t) * want[i]);
            wn += std::norm(want[i]);
        }
        CHECK(std::sqrt(d0) <= std::pow(sigma * t, 3) / 6.0 + 1e-12);

        // and |0>/( -i t) matches the interpolation with relative error
        // (norm_bound t)^2 / 6
        double rel = 0.0;
        for (std::size_t i = 0; i < bd; ++i)
            rel += std::norm(out.amplitudes[i] / cdouble(0, -t) - want[i]);
        CHECK(std::sqrt(rel / wn) <= H.norm_bound() * H.norm_bound() * t * t / 6.0 + 1e-12);
    }

    SUBCASE("discrepancy falls quadratically as t shrinks") {
        auto discrepancy = [&](double tt) {
            RegisterState out =
                evolve_dilated(start, H, tt, eps, EvolutionEngine::exact_spectral);
            std::vector<cdouble> want = apply_interp(H.interp(), polar.amplitudes);
            double d = 0.0, wn = 0.0;
            for (std::size_t i = 0; i < std::size_t(H.block_dim()); ++i) {
                d += std::norm(out.amplitudes[i] / cdouble(0, -tt) - want[i]);
                wn += std::norm(want[i]);
            }
            return std::sqrt(d / wn);
        };
        double ratio = discrepancy(t) / discrepancy(t / 2.0);
        CHECK(ratio >= 3.9); // sinc error scales as t^2 (exactly 4 in the limit)
        CHECK(ratio <= 4.1);
    }

    SUBCASE("measured p0 matches the t^2 ||A fhat||^2 form") {
        RegisterState out = evolve_dilated(start, H, t, eps, EvolutionEngine::exact_spectral);
        MeasurementResult m = measure_ancilla_postselect(out, "anc", 0);
        std::vector<cdouble> w = apply_interp(H.interp(), polar.amplitudes);
        double analytic = t * t * norm2(w) * norm2(w);
        double tol = 2.0 * (sigma * t) * (sigma * t) * (1.0 / 6.0 + 0.5);
        CHECK(std::abs(m.probability - analytic) / analytic <= tol);
    }
}

TEST_CASE("ancilla measurement") {
    SUBCASE("all-|1> state cannot postselect |0>") {
        RegisterLayout layout{{{"anc", 1}, {"idx", 2}}};
        std::vector<cdouble> v(8, 0.0);
        v[4] = 1.0; // ancilla bit set
        RegisterState st = encode_amplitudes(std::span<const cdouble>(v), layout);
        CHECK(measure_ancilla_postselect(st, "anc", 1).probability == doctest::Approx(1.0));
        CHECK_THROWS_AS(measure_ancilla_postselect(st, "anc", 0), std::invalid_argument);
    }
    SUBCASE("equal blocks measure half-half and collapse to unit norm") {
        RegisterLayout layout{{{"anc", 1}, {"idx", 2}}};
        std::vector<cdouble> v(8, 0.0);
        v[1] = cdouble(0.5, 0.0);
        v[2] = cdouble(0.0, 0.5);
        v[5] = cdouble(-0.5, 0.0);
        v[6] = cdouble(0.0, -0.5);
        RegisterState st = encode_amplitudes(std::span<const cdouble>(v), layout);
        MeasurementResult m0 = measure_ancilla_postselect(st, "anc", 0);
        CHECK(m0.probability == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::abs(m0.collapsed.norm() - 1.0) < 1e-12);
        CHECK(m0.collapsed.layout.registers.size() == 1);
        CHECK(m0.collapsed.dim() == 4);

        // sampled outcomes occur with the right frequency
        SplitMix64 rng(5150);
        int zeros = 0;
        for (int rep = 0; rep < 2000; ++rep)
            if (measure_ancilla_sample(st, "anc", rng).outcome == 0) ++zeros;
        CHECK(std::abs(zeros / 2000.0 - 0.5) < 0.05);
    }
}

TEST_CASE("amplification cost") {
    AmplificationCost c1 = amplification_cost(1.0);
    CHECK(c1.plain == 1.0);
    CHECK(c1.amplified == 1.0);
    AmplificationCost c = amplification_cost(0.25);
    CHECK(c.plain == 4.0);
    CHECK(c.amplified == 2.0);
    SplitMix64 rng(3);
    for (int i = 0; i < 200; ++i) {
        double p = std::max(1e-12, rng.uniform01());
        AmplificationCost cc = amplification_cost(p);
        CHECK(cc.amplified <= cc.plain + 1e-9);
    }
    CHECK_THROWS_AS(amplification_cost(0.0), std::invalid_argument);
}

TEST_CASE("quantum CT pipeline matches the classical reconstruction") {
    const int n = 16;
    ImageGrid disk = disk_phantom(n, 0.1, -0.15, 0.6, 1.0);
    Sinogram sino = forward_radon(disk, n, n);
    const double eps = 1e-4;

    QuantumCtResult q = run_ct_quantum_pipeline(sino, InterpScheme::bilinear, eps,
                                                EvolutionEngine::taylor,
                                                MeasureStrategy::postselect);
    FourierSliceResult cl = fourier_slice_full(sino, n, InterpScheme::bilinear, false);

    // unit-normalize the classical complex image and phase-align
    double cn = 0.0;
    for (const auto& z : cl.complex_image.data) cn += std::norm(z);
    cn = std::sqrt(cn);
    cdouble inner(0, 0);
    for (std::size_t i = 0; i < q.state.dim(); ++i)
        inner += std::conj(q.state.amplitudes[i]) * (cl.complex_image.data[i] / cn);
    double dist = std::sqrt(std::max(0.0, 2.0 - 2.0 * std::abs(inner)));
    CHECK(dist <= 10.0 * eps);

    CHECK(q.report.post_selected);
    CHECK(q.report.p0 > 0.0);
    CHECK(q.report.expected_iterations_plain == doctest::Approx(1.0 / q.report.p0));
    CHECK(q.report.t == doctest::Approx(choose_evolution_time(
        eps, std::sqrt(schur_bound(build_interp_matrix(n, n, n,
                                                       InterpScheme::bilinear)).sigma_sq_bound))));
    CHECK(ncc(q.image, disk) > 0.5); // n=16 is coarse but recognizable
}

TEST_CASE("low-frequency-dominated data lowers the success probability") {
    const int n = 32;
    ImageGrid disk = disk_phantom(n, 0.1, -0.15, 0.6, 1.0);
    // heavy low-pass: keep only the 3x3 lowest-frequency bins
    ComplexField spatial(n, n);
    for (std::size_t i = 0; i < disk.data.size(); ++i) spatial.data[i] = disk.data[i];
    ComplexField spec = dft2d(spatial, FftDirection::forward, FftNorm::unnormalized);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            bool keep_r = (r <= 1) || (r >= n - 1);
            bool keep_c = (c <= 1) || (c >= n - 1);
            if (!(keep_r && keep_c)) spec.at(r, c) = 0.0;
        }
    ComplexField lp_field = dft2d(spec, FftDirection::inverse, FftNorm::unnormalized);
    ImageGrid lp(n);
    for (std::size_t i = 0; i < lp.data.size(); ++i) lp.data[i] = lp_field.data[i].real();

    auto p0_of = [&](const ImageGrid& img) {
        Sinogram s = forward_radon(img, n, n);
        QuantumCtResult q = run_ct_quantum_pipeline(s, InterpScheme::bilinear, 1e-4,
                                                    EvolutionEngine::taylor,
                                                    MeasureStrategy::postselect);
        return q.report.p0;
    };
    CHECK(p0_of(lp) < p0_of(disk));
}

TEST_CASE("sample mode repeats until success and is reproducible") {
    const int n = 16;
    ImageGrid disk = disk_phantom(n, 0.0, 0.0, 0.5, 1.0);
    Sinogram sino = forward_radon(disk, n, n);
    // Repeating after a |1> outcome contracts the high-frequency components
    // (the |1> branch is only eps-close to the input), so low-p0 data can
    // starve the loop; seed 10 gives a trajectory that succeeds after 13
    // draws, which keeps this test fast while exercising the re-entry path.
    QuantumCtResult a = run_ct_quantum_pipeline(sino, InterpScheme::bilinear, 1e-3,
                                                EvolutionEngine::taylor, MeasureStrategy::sample,
                                                /*seed=*/10, /*iteration_cap=*/200);
    CHECK(a.report.sampled_iterations == 13);
    CHECK(!a.report.post_selected);
    CHECK(a.report.max_reentry_deviation > 0.0);
    CHECK(a.report.max_reentry_deviation < 0.1);
    QuantumCtResult b = run_ct_quantum_pipeline(sino, InterpScheme::bilinear, 1e-3,
                                                EvolutionEngine::taylor, MeasureStrategy::sample,
                                                /*seed=*/10, /*iteration_cap=*/200);
    CHECK(a.report.sampled_iterations == b.report.sampled_iterations);
    CHECK(std::memcmp(a.image.data.data(), b.image.data.data(),
                      a.image.data.size() * sizeof(double)) == 0);

    CHECK_THROWS_AS(run_ct_quantum_pipeline(sino, InterpScheme::bilinear, 1e-3,
                                            EvolutionEngine::taylor, MeasureStrategy::sample,
                                            /*seed=*/1, /*iteration_cap=*/2),
                    numerical_error);
}

TEST_CASE("re-entering after |1> contracts the success probability") {
    // the loop's implicit assumption that the |1> branch is reusable costs a
    // little success probability every pass; measure one pass of it
    const int n = 16;
    ImageGrid disk = disk_phantom(n, 0.0, 0.0, 0.5, 1.0);
    Sinogram sino = forward_radon(disk, n, n);
    DilatedHamiltonian H(build_interp_matrix(n, n, n, InterpScheme::bilinear));
    double t = choose_evolution_time(1e-3, H.norm_bound());
    RegisterState polar = prepared_polar_state(sino);

    RegisterState ev1 = evolve_dilated(append_ancilla(polar), H, t, 1e-3,
                                       EvolutionEngine::taylor);
    MeasurementResult m1 = measure_ancilla_postselect(ev1, "anc", 0);
    MeasurementResult f1 = measure_ancilla_postselect(ev1, "anc", 1);
    RegisterState ev2 = evolve_dilated(append_ancilla(f1.collapsed), H, t, 1e-3,
                                       EvolutionEngine::taylor);
    MeasurementResult m2 = measure_ancilla_postselect(ev2, "anc", 0);
    CHECK(m2.probability < m1.probability);
}

TEST_CASE("pipeline rejects non-square polar grids") {
    Sinogram s(16, 8, 1.0);
    CHECK_THROWS_AS(run_ct_quantum_pipeline(s, InterpScheme::bilinear, 1e-4,
                                            EvolutionEngine::taylor, MeasureStrategy::postselect),
                    std::invalid_argument);
}

TEST_CASE("pixel sampling") {
    SUBCASE("a basis state always lands in its own cell") {
        ImageGrid img(4);
        img.at(2, 1) = 1.0;
        RegisterState st = encode_amplitudes(img);
        auto counts = sample_pixels(st, 1000, 5);
        for (std::size_t i = 0; i < counts.size(); ++i)
            CHECK(counts[i] == (i == 2 * 4 + 1 ? 1000u : 0u));
    }
    SUBCASE("uniform state gives uniform frequencies") {
        RegisterState st = encode_amplitudes(ImageGrid(4, 1.0));
        const std::uint64_t shots = 1000000;
        auto counts = sample_pixels(st, shots, 99);
        for (auto c : counts)
            CHECK(std::abs(double(c) / double(shots) - 1.0 / 16.0) <= 0.002);
    }
    SUBCASE("empirical distribution converges as shots grow") {
        ImageGrid disk = disk_phantom(16, 0.0, 0.1, 0.55, 1.0);
        RegisterState st = encode_amplitudes(disk);
        auto tv = [&](std::uint64_t shots) {
            auto counts = sample_pixels(st, shots, 123);
            double acc = 0.0;
            for (std::size_t i = 0; i < counts.size(); ++i)
                acc += std::abs(double(counts[i]) / double(shots) -
                                std::norm(st.amplitudes[i]));
            return acc / 2.0;
        };
        CHECK(tv(100000) < tv(1000) / 2.0); // expect ~1/sqrt(shots)
    }
}

TEST_CASE("rvec round trip is exact") {
    auto v = random_state_vector(32, 77);
    RegisterLayout layout{{{"row", 2}, {"col", 3}}};
    RegisterState st = encode_amplitudes(std::span<const cdouble>(v), layout);
    auto path = std::filesystem::temp_directory_path() / "qtomo_state.rvec";
    write_state(st, path);
    RegisterState back = read_state(path);
    CHECK(back.layout == st.layout);
    CHECK(std::memcmp(back.amplitudes.data(), st.amplitudes.data(),
                      st.dim() * sizeof(cdouble)) == 0);
    std::filesystem::remove(path);

    // malformed header
    {
        std::ofstream out(path, std::ios::binary);
        out << "RVECX 5 row:2,col:3\n";
    }
    CHECK_THROWS_AS(read_state(path), io_error);
    std::filesystem::remove(path);
}
