#pragma once
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "qtomo/image.hpp"
#include "qtomo/interp.hpp"
#include "qtomo/rng.hpp"
#include "qtomo/sinogram.hpp"
#include "qtomo/spectral.hpp"

namespace qtomo {

struct Register {
    std::string name;
    int qubits = 0;

    bool operator==(const Register&) const = default;
};

// Named registers, most significant first. A basis index packs the register
// values left to right: |r0>|r1>... <-> (r0 << (w1+w2+...)) | (r1 << ...) | ...
struct RegisterLayout {
    std::vector<Register> registers;

    int total_qubits() const;
    int index_of(const std::string& name) const; // std::invalid_argument if unknown
    int width(const std::string& name) const;
    // bit offset of the register's least significant qubit within a basis index
    int bit_offset(const std::string& name) const;

    std::string to_string() const; // e.g. "anc:1,row:5,col:5"
    static RegisterLayout parse(const std::string& text);

    bool operator==(const RegisterLayout&) const = default;
};

// Normalized complex amplitude vector over 2^q basis states.
struct RegisterState {
    RegisterLayout layout;
    std::vector<cdouble> amplitudes;
    // 2-norm of the classical field that was encoded (bookkeeping carried
    // through the unitaries so outputs can be rescaled back)
    double source_norm = 1.0;

    std::size_t dim() const { return amplitudes.size(); }
    double norm() const;
};

// Amplitude encoding: values flattened row-major into the layout's basis
// order, divided by their 2-norm. An all-zero field cannot be normalized and
// throws std::invalid_argument.
RegisterState encode_amplitudes(std::span<const cdouble> values, RegisterLayout layout);
RegisterState encode_amplitudes(std::span<const double> values, RegisterLayout layout);
RegisterState encode_amplitudes(const ComplexField& field);  // registers row, col
RegisterState encode_amplitudes(const ImageGrid& img);       // registers row, col
RegisterState encode_amplitudes(const Sinogram& sino);       // registers rho, theta

// Unitary DFT kernel on one register, identity on the rest. forward applies
// exp(-2 pi i k n / M)/sqrt(M); inverse the conjugate.
RegisterState qft_on_register(const RegisterState& state, const std::string& reg,
                              FftDirection dir);

// fftshift as a relabeling of one register's basis states: XOR of the
// register's top bit (register sizes are powers of two, so the shift is its
// own inverse). A permutation, hence unitary.
RegisterState shift_register_labels(const RegisterState& state, const std::string& reg);

// Prepends a one-qubit register in |1> as the new most significant register.
RegisterState append_ancilla(const RegisterState& state, const std::string& name = "anc");

// Renames registers without touching amplitudes (pure bookkeeping; widths of
// the new layout must sum to the same qubit count).
RegisterState relabel(const RegisterState& state, RegisterLayout new_layout);

// MRI reconstruction: amplitude-encode k-space, inverse QFT on both index
// registers. Output amplitudes are proportional to the density image.
RegisterState mri_reconstruct_quantum(const ComplexField& kspace);

// Hermitian dilation A* = [[0, A],[A^T, 0]] of the interpolation operator,
// held implicitly. Ancilla |0> selects the Cartesian block, |1> the polar
// block; each block is padded to a common power-of-two dimension. The dense
// SVD of A (the exact-evolution backend) is computed once on first use.
class DilatedHamiltonian {
public:
    explicit DilatedHamiltonian(SparseInterpMatrix A);

    const SparseInterpMatrix& interp() const { return A_; }
    std::int64_t block_dim() const { return block_dim_; }     // power of two
    double norm_bound() const { return norm_bound_; }         // sqrt(Schur product)

    // y = A* x for x of length 2*block_dim (block0 = Cartesian, block1 = polar)
    std::vector<cdouble> apply(std::span<const cdouble> x) const;

    // exact application of exp(-i A* t) (cos/sinc functional calculus on the SVD)
    std::vector<cdouble> evolve_exact(std::span<const cdouble> x, double t) const;
    // exact application of sin(A* t) (used by the truncation-bound checks)
    std::vector<cdouble> apply_sin(std::span<const cdouble> x, double t) const;

private:
    struct Spectral; // dense SVD factors
    const Spectral& spectral() const;

    SparseInterpMatrix A_;
    CsrMatrix At_;
    std::int64_t block_dim_ = 0;
    double norm_bound_ = 0.0;
    mutable std::shared_ptr<const Spectral> spectral_;
};

enum class EvolutionEngine { exact_spectral, taylor };

struct EvolutionReport {
    double t = 0.0;
    double epsilon = 0.0;
    int taylor_order = 0; // 0 for the exact engine
    double p0 = 0.0;      // ancilla-|0> probability after one evolution
    double expected_iterations_plain = 0.0;     // 1/p0
    double expected_iterations_amplified = 0.0; // ceil((pi/4)/asin(sqrt(p0)))
    bool post_selected = false;
    std::uint64_t sampled_iterations = 0; // measured repeat count (sample mode)
    // how far the reused |1>-branch state drifts from the original polar data
    // across loop iterations (phase-aligned L2)
    double max_reentry_deviation = 0.0;
};

// Largest t with (1/6) * norm_bound^3 * t^3 <= epsilon. Independent of the
// grid size when norm_bound is (the bound does not grow with N).
double choose_evolution_time(double epsilon, double norm_bound);

// Applies exp(-i A* t) to the dilated state. exact_spectral evaluates the
// matrix function through the SVD; taylor sums the series with the order
// picked so the remainder bound (norm_bound*t)^(K+1)/(K+1)! falls below
// min(epsilon/10, 1e-13), then renormalizes (throws numerical_error if the
// norm drifted by more than epsilon first). taylor_order_out, when non-null,
// receives the order used.
RegisterState evolve_dilated(const RegisterState& state, const DilatedHamiltonian& H,
                             double t, double epsilon, EvolutionEngine engine,
                             int* taylor_order_out = nullptr);

struct MeasurementResult {
    int outcome = 0;
    RegisterState collapsed; // measured register dropped, block renormalized
    double probability = 0.0;
};

// p(|0>) is the squared norm of the ancilla-|0> block. sample draws from the
// caller's generator; postselect forces the outcome and reports its true
// probability (std::invalid_argument on a zero-probability branch).
MeasurementResult measure_ancilla_sample(const RegisterState& state, const std::string& reg,
                                         SplitMix64& rng);
MeasurementResult measure_ancilla_postselect(const RegisterState& state, const std::string& reg,
                                             int outcome);

struct AmplificationCost {
    double plain = 0.0;     // repeat-until-success expectation, 1/p0
    double amplified = 0.0; // Grover-style iteration count (cost model only)
};

AmplificationCost amplification_cost(double p0); // p0 in (0,1]

enum class MeasureStrategy { postselect, sample };

struct QuantumCtResult {
    ImageGrid image;          // sign(Re) * |amplitude| per pixel
    RegisterState state;      // final state over registers row, col
    EvolutionReport report;
};

// Full CT reconstruction on the simulator: encode the sinogram, QFT over the
// rho register, centered-bin relabeling, dilated evolution with ancilla
// post-selection (repeating on |1> as the algorithm prescribes), uncenter,
// inverse 2D QFT, relabel to the pixel layout. Requires n_rho == n_theta
// (square polar grid; the two blocks of the dilation then match in size).
QuantumCtResult run_ct_quantum_pipeline(const Sinogram& sino, InterpScheme scheme,
                                        double epsilon, EvolutionEngine engine,
                                        MeasureStrategy mode, std::uint64_t seed = 1,
                                        std::uint64_t iteration_cap = 1000000);

// Basis-state measurements of the full state, |amplitude|^2 distribution.
// Returns counts per basis index; deterministic for a fixed seed.
std::vector<std::uint64_t> sample_pixels(const RegisterState& state, std::uint64_t shots,
                                         std::uint64_t seed);

// "RVEC1 <q> <layout>\n" + 2^q little-endian (re, im) float64 pairs.
void write_state(const RegisterState& state, const std::filesystem::path& path);
RegisterState read_state(const std::filesystem::path& path);

} // namespace qtomo
