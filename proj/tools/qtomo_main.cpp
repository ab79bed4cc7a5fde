// qtomo: command-line front end for the reconstruction pipelines.
//
// Every command writes its resolved configuration next to its outputs as
// <out>.config so any artifact can be regenerated from one invocation.
// Exit codes: 0 success, 2 usage/config error, 3 I/O or format error,
// 4 numerical diagnostic.

#include <CLI11.hpp>

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "qtomo/errors.hpp"
#include "qtomo/image.hpp"
#include "qtomo/interp.hpp"
#include "qtomo/qsim.hpp"
#include "qtomo/radon.hpp"
#include "qtomo/recon.hpp"
#include "qtomo/sinogram.hpp"

namespace {

using namespace qtomo;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_config(const std::string& stem, const std::string& command,
                  std::map<std::string, std::string> kv) {
    kv["command"] = command;
    std::ofstream out(stem + ".config");
    if (!out) throw io_error("cannot write config: " + stem + ".config");
    for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
}

void write_image_pair(const ImageGrid& img, const std::string& stem) {
    write_image(img, stem + ".rimg", ImageFormat::rimg);
    write_image(img, stem + ".pgm", ImageFormat::pgm16);
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

int run(int argc, char** argv) {
    CLI::App app{"tomographic reconstruction toolkit: classical Fourier-slice and "
                 "filtered back-projection pipelines plus an exact statevector "
                 "simulation of their quantum counterparts"};
    app.require_subcommand(1);

    // ---- phantom
    auto* cmd_phantom = app.add_subcommand("phantom", "rasterize a test phantom");
    std::string ph_kind = "shepp-logan";
    int ph_n = 128;
    double ph_cx = 0.0, ph_cy = 0.0, ph_r = 0.5, ph_v = 1.0;
    std::string ph_out;
    cmd_phantom->add_option("--kind", ph_kind, "shepp-logan or disk")
        ->check(CLI::IsMember({"shepp-logan", "disk"}));
    cmd_phantom->add_option("--size", ph_n, "side length in pixels")->required();
    cmd_phantom->add_option("--cx", ph_cx, "disk center x");
    cmd_phantom->add_option("--cy", ph_cy, "disk center y");
    cmd_phantom->add_option("--radius", ph_r, "disk radius");
    cmd_phantom->add_option("--value", ph_v, "disk intensity");
    cmd_phantom->add_option("--out", ph_out, "output stem")->required();

    // ---- project
    auto* cmd_project = app.add_subcommand("project", "forward Radon transform of an image");
    std::string pr_in, pr_out;
    int pr_rho = 0, pr_angles = 0;
    cmd_project->add_option("--input", pr_in, "input image (.rimg)")->required();
    cmd_project->add_option("--rho", pr_rho, "radial sample count")->required();
    cmd_project->add_option("--angles", pr_angles, "angle count over [0,pi)")->required();
    cmd_project->add_option("--out", pr_out, "output stem")->required();

    // ---- reconstruct
    auto* cmd_recon = app.add_subcommand("reconstruct", "classical reconstruction of a sinogram");
    std::string rc_method = "fbp", rc_in, rc_out, rc_scheme = "bilinear";
    int rc_n = 0;
    bool rc_ramp = false;
    cmd_recon->add_option("--method", rc_method, "fourier-slice, fbp or backproject")
        ->check(CLI::IsMember({"fourier-slice", "fbp", "backproject"}));
    cmd_recon->add_option("--input", rc_in, "input sinogram (.rsin)")->required();
    cmd_recon->add_option("--size", rc_n, "output side length")->required();
    cmd_recon->add_option("--scheme", rc_scheme, "interpolation scheme (fourier-slice)");
    cmd_recon->add_flag("--ramp", rc_ramp, "apply |nu| weighting before interpolation");
    cmd_recon->add_option("--out", rc_out, "output stem")->required();

    // ---- qreconstruct
    auto* cmd_q = app.add_subcommand("qreconstruct", "quantum CT reconstruction (statevector)");
    std::string q_in, q_out, q_scheme = "bilinear", q_engine = "exact", q_mode = "postselect";
    double q_eps = 1e-4;
    std::uint64_t q_seed = 1, q_cap = 1000000;
    cmd_q->add_option("--input", q_in, "input sinogram (.rsin)")->required();
    cmd_q->add_option("--scheme", q_scheme, "interpolation scheme");
    cmd_q->add_option("--epsilon", q_eps, "truncation error budget");
    cmd_q->add_option("--engine", q_engine, "exact or taylor")
        ->check(CLI::IsMember({"exact", "taylor"}));
    cmd_q->add_option("--mode", q_mode, "postselect or sample")
        ->check(CLI::IsMember({"postselect", "sample"}));
    cmd_q->add_option("--seed", q_seed, "measurement seed (sample mode)");
    cmd_q->add_option("--iteration-cap", q_cap, "abort threshold for sample mode");
    cmd_q->add_option("--out", q_out, "output stem")->required();

    // ---- mri-sim
    auto* cmd_mri = app.add_subcommand("mri-sim", "synthesize k-space and reconstruct it");
    std::string mri_in, mri_out;
    cmd_mri->add_option("--input", mri_in, "input image (.rimg)")->required();
    cmd_mri->add_option("--out", mri_out, "output stem")->required();

    // ---- bounds
    auto* cmd_bounds = app.add_subcommand("bounds", "interpolation operator norm bounds");
    std::string bd_sizes = "16,32,64", bd_scheme = "bilinear", bd_out;
    cmd_bounds->add_option("--sizes", bd_sizes, "comma-separated grid sizes");
    cmd_bounds->add_option("--scheme", bd_scheme, "interpolation scheme");
    cmd_bounds->add_option("--out", bd_out, "output stem")->required();

    // ---- compare
    auto* cmd_cmp = app.add_subcommand("compare", "image metrics (rmse, psnr, ncc)");
    std::string cmp_a, cmp_b, cmp_out;
    cmd_cmp->add_option("--a", cmp_a, "first image (reference)")->required();
    cmd_cmp->add_option("--b", cmp_b, "second image")->required();
    cmd_cmp->add_option("--out", cmp_out, "output stem")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e); // prints the usage message
        return rc == 0 ? 0 : 2;
    }

    if (cmd_phantom->parsed()) {
        ImageGrid img = (ph_kind == "disk") ? disk_phantom(ph_n, ph_cx, ph_cy, ph_r, ph_v)
                                            : shepp_logan(ph_n);
        write_image_pair(img, ph_out);
        std::map<std::string, std::string> kv{{"kind", ph_kind}, {"size", std::to_string(ph_n)}};
        if (ph_kind == "disk") {
            kv["cx"] = fmt(ph_cx);
            kv["cy"] = fmt(ph_cy);
            kv["radius"] = fmt(ph_r);
            kv["value"] = fmt(ph_v);
        }
        write_config(ph_out, "phantom", kv);
        return 0;
    }

    if (cmd_project->parsed()) {
        ImageGrid img = read_image(pr_in);
        Timer timer;
        Sinogram sino = forward_radon(img, pr_rho, pr_angles);
        std::printf("projected %dx%d image to %dx%d sinogram in %.3f s\n", img.n, img.n, pr_rho,
                    pr_angles, timer.seconds());
        write_sinogram(sino, pr_out + ".rsin");
        write_config(pr_out, "project",
                     {{"input", pr_in},
                      {"rho", std::to_string(pr_rho)},
                      {"angles", std::to_string(pr_angles)}});
        return 0;
    }

    if (cmd_recon->parsed()) {
        Sinogram sino = read_sinogram(rc_in);
        Timer timer;
        ImageGrid img;
        double imag_residual = 0.0;
        if (rc_method == "fbp") {
            img = fbp_reconstruct(sino, rc_n);
        } else if (rc_method == "backproject") {
            img = backproject(sino, rc_n);
        } else {
            FourierSliceResult fs =
                fourier_slice_full(sino, rc_n, scheme_from_name(rc_scheme), rc_ramp);
            img = std::move(fs.image);
            imag_residual = fs.imag_residual;
        }
        double secs = timer.seconds();
        std::printf("reconstructed (%s) in %.3f s\n", rc_method.c_str(), secs);
        write_image_pair(img, rc_out);
        std::ofstream report(rc_out + ".report.txt");
        report << "method=" << rc_method << "\n";
        if (rc_method == "fourier-slice")
            report << "imag_residual=" << fmt(imag_residual) << "\n";
        write_config(rc_out, "reconstruct",
                     {{"method", rc_method},
                      {"input", rc_in},
                      {"size", std::to_string(rc_n)},
                      {"scheme", rc_scheme},
                      {"ramp", rc_ramp ? "1" : "0"}});
        return 0;
    }

    if (cmd_q->parsed()) {
        Sinogram sino = read_sinogram(q_in);
        Timer timer;
        QuantumCtResult res = run_ct_quantum_pipeline(
            sino, scheme_from_name(q_scheme), q_eps,
            q_engine == "exact" ? EvolutionEngine::exact_spectral : EvolutionEngine::taylor,
            q_mode == "postselect" ? MeasureStrategy::postselect : MeasureStrategy::sample,
            q_seed, q_cap);
        std::printf("quantum reconstruction in %.3f s (p0=%.3e)\n", timer.seconds(),
                    res.report.p0);
        write_image_pair(res.image, q_out);
        write_state(res.state, q_out + ".rvec");
        std::ofstream report(q_out + ".report.txt");
        report << "t=" << fmt(res.report.t) << "\n"
               << "epsilon=" << fmt(res.report.epsilon) << "\n"
               << "taylor_order=" << res.report.taylor_order << "\n"
               << "p0=" << fmt(res.report.p0) << "\n"
               << "expected_iterations_plain=" << fmt(res.report.expected_iterations_plain) << "\n"
               << "expected_iterations_amplified="
               << fmt(res.report.expected_iterations_amplified) << "\n"
               << "post_selected=" << (res.report.post_selected ? "1" : "0") << "\n"
               << "sampled_iterations=" << res.report.sampled_iterations << "\n"
               << "max_reentry_deviation=" << fmt(res.report.max_reentry_deviation) << "\n";
        write_config(q_out, "qreconstruct",
                     {{"input", q_in},
                      {"scheme", q_scheme},
                      {"epsilon", fmt(q_eps)},
                      {"engine", q_engine},
                      {"mode", q_mode},
                      {"seed", std::to_string(q_seed)},
                      {"iteration_cap", std::to_string(q_cap)}});
        return 0;
    }

    if (cmd_mri->parsed()) {
        ImageGrid img = read_image(mri_in);
        ComplexField spatial(img.n, img.n);
        for (std::size_t i = 0; i < img.data.size(); ++i) spatial.data[i] = img.data[i];
        ComplexField kspace = dft2d(spatial, FftDirection::forward, FftNorm::unitary);
        RegisterState kstate = encode_amplitudes(kspace);
        write_state(kstate, mri_out + ".kspace.rvec");
        RegisterState recon = mri_reconstruct_quantum(kspace);
        ImageGrid out(img.n);
        for (std::size_t i = 0; i < out.data.size(); ++i)
            out.data[i] = recon.amplitudes[i].real() * recon.source_norm;
        write_image_pair(out, mri_out);
        write_config(mri_out, "mri-sim", {{"input", mri_in}});
        return 0;
    }

    if (cmd_bounds->parsed()) {
        std::vector<int> sizes;
        std::istringstream ss(bd_sizes);
        std::string item;
        while (std::getline(ss, item, ',')) sizes.push_back(std::stoi(item));
        if (sizes.empty()) throw std::invalid_argument("bounds: no sizes given");
        InterpScheme scheme = scheme_from_name(bd_scheme);
        std::string csv = "n,scheme,max_row_sum,max_col_sum,schur_bound,sigma_max_sq\n";
        for (int n : sizes) {
            SparseInterpMatrix A = build_interp_matrix(n, n, n, scheme);
            SchurBound b = schur_bound(A);
            double smax = max_singular_value(A, 1e-10);
            csv += std::to_string(n) + "," + bd_scheme + "," + fmt(b.max_row_abs_sum) + "," +
                   fmt(b.max_col_abs_sum) + "," + fmt(b.sigma_sq_bound) + "," +
                   fmt(smax * smax) + "\n";
        }
        std::ofstream out(bd_out + ".csv");
        if (!out) throw io_error("cannot write: " + bd_out + ".csv");
        out << csv;
        write_config(bd_out, "bounds", {{"sizes", bd_sizes}, {"scheme", bd_scheme}});
        return 0;
    }

    if (cmd_cmp->parsed()) {
        ImageGrid a = read_image(cmp_a);
        ImageGrid b = read_image(cmp_b);
        double peak = 0.0;
        for (double v : a.data) peak = std::max(peak, std::abs(v));
        if (peak == 0.0) peak = 1.0;
        double e = rmse(a, b);
        std::ofstream out(cmp_out + ".csv");
        if (!out) throw io_error("cannot write: " + cmp_out + ".csv");
        out << "rmse,psnr,ncc\n"
            << fmt(e) << "," << fmt(psnr(a, b, peak)) << "," << fmt(ncc(a, b)) << "\n";
        write_config(cmp_out, "compare", {{"a", cmp_a}, {"b", cmp_b}});
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const qtomo::io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const qtomo::numerical_error& e) {
        std::fprintf(stderr, "numerical diagnostic: %s (%.6g)\n", e.what(), e.diagnostic());
        return 4;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
