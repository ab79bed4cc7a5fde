#include "qtomo/qsim.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qtomo/errors.hpp"

namespace qtomo {

// ---------------------------------------------------------------- layouts

int RegisterLayout::total_qubits() const {
    int q = 0;
    for (const auto& r : registers) q += r.qubits;
    return q;
}

int RegisterLayout::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < registers.size(); ++i)
        if (registers[i].name == name) return int(i);
    throw std::invalid_argument("unknown register: " + name);
}

int RegisterLayout::width(const std::string& name) const {
    return registers[index_of(name)].qubits;
}

int RegisterLayout::bit_offset(const std::string& name) const {
    int idx = index_of(name);
    int off = 0;
    for (std::size_t i = idx + 1; i < registers.size(); ++i) off += registers[i].qubits;
    return off;
}

std::string RegisterLayout::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < registers.size(); ++i) {
        if (i) s += ",";
        s += registers[i].name + ":" + std::to_string(registers[i].qubits);
    }
    return s;
}

RegisterLayout RegisterLayout::parse(const std::string& text) {
    RegisterLayout layout;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("bad register layout: " + text);
        Register r;
        r.name = item.substr(0, colon);
        r.qubits = std::stoi(item.substr(colon + 1));
        if (r.name.empty() || r.qubits < 1)
            throw std::invalid_argument("bad register layout: " + text);
        layout.registers.push_back(std::move(r));
    }
    if (layout.registers.empty())
        throw std::invalid_argument("bad register layout: " + text);
    return layout;
}

double RegisterState::norm() const {
    double acc = 0.0;
    for (const auto& z : amplitudes) acc += std::norm(z);
    return std::sqrt(acc);
}

// --------------------------------------------------------------- encoding

static int log2_exact(long long v, const char* what) {
    if (!is_pow2(v)) throw std::invalid_argument(std::string(what) + " must be a power of two");
    int q = 0;
    while ((1ll << q) < v) ++q;
    return q;
}

RegisterState encode_amplitudes(std::span<const cdouble> values, RegisterLayout layout) {
    if (std::ssize(values) != (1ll << layout.total_qubits()))
        throw std::invalid_argument("encode_amplitudes: value count does not match layout");
    double nrm = 0.0;
    for (const auto& z : values) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    if (!(nrm > 0.0))
        throw std::invalid_argument("encode_amplitudes: zero field has no normalizable state");
    RegisterState st;
    st.layout = std::move(layout);
    st.amplitudes.assign(values.begin(), values.end());
    for (auto& z : st.amplitudes) z /= nrm;
    st.source_norm = nrm;
    return st;
}

RegisterState encode_amplitudes(std::span<const double> values, RegisterLayout layout) {
    std::vector<cdouble> v(values.begin(), values.end());
    return encode_amplitudes(std::span<const cdouble>(v), std::move(layout));
}

RegisterState encode_amplitudes(const ComplexField& field) {
    RegisterLayout layout{{{"row", log2_exact(field.rows, "rows")},
                           {"col", log2_exact(field.cols, "cols")}}};
    return encode_amplitudes(std::span<const cdouble>(field.data), std::move(layout));
}

RegisterState encode_amplitudes(const ImageGrid& img) {
    RegisterLayout layout{{{"row", log2_exact(img.n, "side")},
                           {"col", log2_exact(img.n, "side")}}};
    return encode_amplitudes(std::span<const double>(img.data), std::move(layout));
}

RegisterState encode_amplitudes(const Sinogram& sino) {
    RegisterLayout layout{{{"rho", log2_exact(sino.n_rho, "n_rho")},
                           {"theta", log2_exact(sino.n_theta, "n_theta")}}};
    return encode_amplitudes(std::span<const double>(sino.data), std::move(layout));
}

// ------------------------------------------------------------ register ops

RegisterState qft_on_register(const RegisterState& state, const std::string& reg,
                              FftDirection dir) {
    const int w = state.layout.width(reg);
    const int off = state.layout.bit_offset(reg);
    const std::size_t M = std::size_t(1) << w;
    const std::size_t stride = std::size_t(1) << off;
    const std::size_t outer_count = state.dim() >> w;

    RegisterState out = state;
#pragma omp parallel for schedule(static) if (outer_count * M > 16384)
    for (std::int64_t outer = 0; outer < std::int64_t(outer_count); ++outer) {
        std::size_t low = std::size_t(outer) & (stride - 1);
        std::size_t high = (std::size_t(outer) >> off) << (off + w);
        std::size_t base = high | low;
        std::vector<cdouble> slice(M);
        for (std::size_t r = 0; r < M; ++r) slice[r] = state.amplitudes[base + (r << off)];
        slice = dft1d(slice, dir, FftNorm::unitary);
        for (std::size_t r = 0; r < M; ++r) out.amplitudes[base + (r << off)] = slice[r];
    }
    return out;
}

RegisterState shift_register_labels(const RegisterState& state, const std::string& reg) {
    const int w = state.layout.width(reg);
    const int off = state.layout.bit_offset(reg);
    const std::size_t top = std::size_t(1) << (off + w - 1); // flips value by M/2 mod M
    RegisterState out = state;
    for (std::size_t i = 0; i < state.dim(); ++i) out.amplitudes[i ^ top] = state.amplitudes[i];
    return out;
}

RegisterState append_ancilla(const RegisterState& state, const std::string& name) {
    RegisterState out;
    out.layout.registers.push_back({name, 1});
    for (const auto& r : state.layout.registers) out.layout.registers.push_back(r);
    out.amplitudes.assign(state.dim() * 2, cdouble(0.0, 0.0));
    std::copy(state.amplitudes.begin(), state.amplitudes.end(),
              out.amplitudes.begin() + std::ptrdiff_t(state.dim())); // ancilla = |1>
    out.source_norm = state.source_norm;
    return out;
}

RegisterState relabel(const RegisterState& state, RegisterLayout new_layout) {
    if (new_layout.total_qubits() != state.layout.total_qubits())
        throw std::invalid_argument("relabel: qubit counts differ");
    RegisterState out = state;
    out.layout = std::move(new_layout);
    return out;
}

RegisterState mri_reconstruct_quantum(const ComplexField& kspace) {
    RegisterState st = encode_amplitudes(kspace);
    st = qft_on_register(st, "row", FftDirection::inverse);
    st = qft_on_register(st, "col", FftDirection::inverse);
    return st;
}

// -------------------------------------------------------- dilated operator

struct DilatedHamiltonian::Spectral {
    Eigen::MatrixXd U;     // n_rows x k
    Eigen::MatrixXd V;     // n_cols x k
    Eigen::VectorXd sigma; // k
};

static std::int64_t next_pow2(std::int64_t v) {
    std::int64_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

DilatedHamiltonian::DilatedHamiltonian(SparseInterpMatrix A)
    : A_(std::move(A)), At_(transpose(A_.mat)) {
    block_dim_ = next_pow2(std::max(A_.rows(), A_.cols()));
    norm_bound_ = std::sqrt(schur_bound(A_).sigma_sq_bound);
}

const DilatedHamiltonian::Spectral& DilatedHamiltonian::spectral() const {
    if (!spectral_) {
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(A_.mat.n_rows, A_.mat.n_cols);
        for (std::int64_t r = 0; r < A_.mat.n_rows; ++r)
            for (std::uint32_t k = A_.mat.row_offsets[r]; k < A_.mat.row_offsets[r + 1]; ++k)
                dense(r, A_.mat.cols[k]) = A_.mat.weights[k];
        Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
        auto spec = std::make_shared<Spectral>();
        spec->U = svd.matrixU();
        spec->V = svd.matrixV();
        spec->sigma = svd.singularValues();
        spectral_ = std::move(spec);
    }
    return *spectral_;
}

std::vector<cdouble> DilatedHamiltonian::apply(std::span<const cdouble> x) const {
    if (std::ssize(x) != 2 * block_dim_)
        throw std::invalid_argument("DilatedHamiltonian::apply: bad vector length");
    std::vector<cdouble> y(x.size(), cdouble(0.0, 0.0));
    const cdouble* x0 = x.data();              // Cartesian block (ancilla |0>)
    const cdouble* x1 = x.data() + block_dim_; // polar block (ancilla |1>)
#pragma omp parallel for schedule(static) if (A_.mat.n_rows > 4096)
    for (std::int64_t r = 0; r < A_.mat.n_rows; ++r) {
        cdouble acc(0.0, 0.0);
        for (std::uint32_t k = A_.mat.row_offsets[r]; k < A_.mat.row_offsets[r + 1]; ++k)
            acc += A_.mat.weights[k] * x1[A_.mat.cols[k]];
        y[std::size_t(r)] = acc;
    }
#pragma omp parallel for schedule(static) if (At_.n_rows > 4096)
    for (std::int64_t c = 0; c < At_.n_rows; ++c) {
        cdouble acc(0.0, 0.0);
        for (std::uint32_t k = At_.row_offsets[c]; k < At_.row_offsets[c + 1]; ++k)
            acc += At_.weights[k] * x0[At_.cols[k]];
        y[std::size_t(block_dim_ + c)] = acc;
    }
    return y;
}

namespace {

// y_head = M * f(sigma) .* (W^T x_head), done on real/imag parts separately
void add_filtered(const Eigen::MatrixXd& M, const Eigen::MatrixXd& W,
                  const Eigen::ArrayXd& filter, const cdouble* x, std::int64_t head,
                  cdouble factor, cdouble* y) {
    Eigen::VectorXd re(head), im(head);
    for (std::int64_t i = 0; i < head; ++i) {
        re[i] = x[i].real();
        im[i] = x[i].imag();
    }
    Eigen::VectorXd cr = (W.transpose() * re).array() * filter;
    Eigen::VectorXd ci = (W.transpose() * im).array() * filter;
    Eigen::VectorXd yr = M * cr;
    Eigen::VectorXd yi = M * ci;
    for (std::int64_t i = 0; i < M.rows(); ++i)
        y[i] += factor * cdouble(yr[i], yi[i]);
}

} // namespace

std::vector<cdouble> DilatedHamiltonian::evolve_exact(std::span<const cdouble> x, double t) const {
    if (std::ssize(x) != 2 * block_dim_)
        throw std::invalid_argument("evolve_exact: bad vector length");
    const Spectral& sp = spectral();
    const std::int64_t nr = A_.mat.n_rows, nc = A_.mat.n_cols;
    // exp(-i A* t) = I + U(cos(St)-1)U^T block-diagonally, -i U sin(St) V^T off-diagonal
    std::vector<cdouble> y(x.begin(), x.end()); // identity part (covers padded tails too)
    Eigen::ArrayXd cosm1 = (sp.sigma.array() * t).cos() - 1.0;
    Eigen::ArrayXd sins = (sp.sigma.array() * t).sin();
    const cdouble* x0 = x.data();
    const cdouble* x1 = x.data() + block_dim_;
    add_filtered(sp.U, sp.U, cosm1, x0, nr, cdouble(1.0, 0.0), y.data());
    add_filtered(sp.U, sp.V, sins, x1, nc, cdouble(0.0, -1.0), y.data());
    add_filtered(sp.V, sp.V, cosm1, x1, nc, cdouble(1.0, 0.0), y.data() + block_dim_);
    add_filtered(sp.V, sp.U, sins, x0, nr, cdouble(0.0, -1.0), y.data() + block_dim_);
    return y;
}

std::vector<cdouble> DilatedHamiltonian::apply_sin(std::span<const cdouble> x, double t) const {
    if (std::ssize(x) != 2 * block_dim_)
        throw std::invalid_argument("apply_sin: bad vector length");
    const Spectral& sp = spectral();
    std::vector<cdouble> y(x.size(), cdouble(0.0, 0.0));
    Eigen::ArrayXd sins = (sp.sigma.array() * t).sin();
    const cdouble* x0 = x.data();
    const cdouble* x1 = x.data() + block_dim_;
    add_filtered(sp.U, sp.V, sins, x1, A_.mat.n_cols, cdouble(1.0, 0.0), y.data());
    add_filtered(sp.V, sp.U, sins, x0, A_.mat.n_rows, cdouble(1.0, 0.0), y.data() + block_dim_);
    return y;
}

// ---------------------------------------------------------------- evolution

double choose_evolution_time(double epsilon, double norm_bound) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("choose_evolution_time: epsilon must be > 0");
    if (!(norm_bound > 0.0))
        throw std::invalid_argument("choose_evolution_time: norm bound must be > 0");
    return std::cbrt(6.0 * epsilon) / norm_bound;
}

RegisterState evolve_dilated(const RegisterState& state, const DilatedHamiltonian& H, double t,
                             double epsilon, EvolutionEngine engine, int* taylor_order_out) {
    if (std::ssize(state.amplitudes) != 2 * H.block_dim())
        throw std::invalid_argument("evolve_dilated: state does not match the dilated space");
    RegisterState out = state;
    if (engine == EvolutionEngine::exact_spectral) {
        out.amplitudes = H.evolve_exact(state.amplitudes, t);
        if (taylor_order_out) *taylor_order_out = 0;
        return out;
    }

    // truncated series sum_k (-i A* t)^k / k!, order from the remainder bound
    const double target = std::min(epsilon / 10.0, 1e-13);
    const double bt = H.norm_bound() * std::abs(t);
    int order = 0;
    double term_bound = 1.0; // (bt)^(k+1) / (k+1)!
    do {
        ++order;
        term_bound *= bt / double(order + 0);
        if (order > 64)
            throw numerical_error("taylor order cap exceeded", term_bound);
    } while (term_bound * bt / double(order + 1) > target);

    std::vector<cdouble> acc = state.amplitudes;
    std::vector<cdouble> term(state.amplitudes.begin(), state.amplitudes.end());
    for (int k = 1; k <= order; ++k) {
        term = H.apply(term);
        cdouble f = cdouble(0.0, -t / double(k));
        for (std::size_t i = 0; i < term.size(); ++i) {
            term[i] *= f;
            acc[i] += term[i];
        }
    }
    double nrm = 0.0;
    for (const auto& z : acc) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    double drift = std::abs(nrm - 1.0);
    if (drift > epsilon)
        throw numerical_error("taylor renormalization drift exceeds epsilon", drift);
    for (auto& z : acc) z /= nrm;
    out.amplitudes = std::move(acc);
    if (taylor_order_out) *taylor_order_out = order;
    return out;
}

// -------------------------------------------------------------- measurement

static MeasurementResult collapse(const RegisterState& state, const std::string& reg,
                                  int outcome, double p) {
    const int off = state.layout.bit_offset(reg);
    const std::size_t bit = std::size_t(1) << off;
    MeasurementResult res;
    res.outcome = outcome;
    res.probability = p;
    RegisterState c;
    for (const auto& r : state.layout.registers)
        if (r.name != reg) c.layout.registers.push_back(r);
    c.amplitudes.resize(state.dim() / 2);
    c.source_norm = state.source_norm;
    double renorm = 1.0 / std::sqrt(p);
    for (std::size_t i = 0; i < state.dim(); ++i) {
        if (((i >> off) & 1) != std::size_t(outcome)) continue;
        std::size_t compact = ((i >> (off + 1)) << off) | (i & (bit - 1));
        c.amplitudes[compact] = state.amplitudes[i] * renorm;
    }
    res.collapsed = std::move(c);
    return res;
}

static double prob_of_one(const RegisterState& state, const std::string& reg) {
    if (state.layout.width(reg) != 1)
        throw std::invalid_argument("measure: register is not a single qubit");
    const int off = state.layout.bit_offset(reg);
    double p1 = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i)
        if ((i >> off) & 1) p1 += std::norm(state.amplitudes[i]);
    return p1;
}

MeasurementResult measure_ancilla_sample(const RegisterState& state, const std::string& reg,
                                         SplitMix64& rng) {
    double p1 = prob_of_one(state, reg);
    double p0 = 1.0 - p1;
    int outcome = (rng.uniform01() < p0) ? 0 : 1;
    return collapse(state, reg, outcome, outcome ? p1 : p0);
}

MeasurementResult measure_ancilla_postselect(const RegisterState& state, const std::string& reg,
                                             int outcome) {
    if (outcome != 0 && outcome != 1)
        throw std::invalid_argument("measure: outcome must be 0 or 1");
    double p1 = prob_of_one(state, reg);
    double p = outcome ? p1 : 1.0 - p1;
    if (!(p > 0.0))
        throw std::invalid_argument("measure: cannot postselect a zero-probability branch");
    return collapse(state, reg, outcome, p);
}

AmplificationCost amplification_cost(double p0) {
    if (!(p0 > 0.0) || p0 > 1.0)
        throw std::invalid_argument("amplification_cost: p0 must be in (0,1]");
    AmplificationCost c;
    c.plain = 1.0 / p0;
    c.amplified = std::ceil((M_PI / 4.0) / std::asin(std::sqrt(p0)));
    return c;
}

// ------------------------------------------------------------- CT pipeline

static double phase_aligned_distance(const std::vector<cdouble>& a,
                                     const std::vector<cdouble>& b) {
    cdouble inner(0.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) inner += std::conj(a[i]) * b[i];
    double d2 = 2.0 - 2.0 * std::abs(inner);
    return std::sqrt(std::max(0.0, d2));
}

QuantumCtResult run_ct_quantum_pipeline(const Sinogram& sino, InterpScheme scheme, double epsilon,
                                        EvolutionEngine engine, MeasureStrategy mode,
                                        std::uint64_t seed, std::uint64_t iteration_cap) {
    if (sino.n_rho != sino.n_theta)
        throw std::invalid_argument("quantum CT pipeline needs a square polar grid "
                                    "(n_rho == n_theta)");
    const int n = sino.n_rho;
    if (!is_pow2(n)) throw std::invalid_argument("quantum CT pipeline needs power-of-two grids");

    DilatedHamiltonian H(build_interp_matrix(n, n, n, scheme));
    const double t = choose_evolution_time(epsilon, H.norm_bound());

    // |rho,theta> data with rho relabeled so rho~0 is index 0, QFT, center bins
    RegisterState polar = encode_amplitudes(sino);
    polar = shift_register_labels(polar, "rho");
    polar = qft_on_register(polar, "rho", FftDirection::forward);
    polar = shift_register_labels(polar, "rho");
    const RegisterState polar0 = polar;

    QuantumCtResult result;
    result.report.epsilon = epsilon;
    result.report.t = t;

    SplitMix64 rng(seed);
    RegisterState cart;
    for (std::uint64_t iter = 1;; ++iter) {
        int order = 0;
        RegisterState evolved = evolve_dilated(append_ancilla(polar), H, t, epsilon, engine, &order);
        if (iter == 1) {
            result.report.taylor_order = order;
            result.report.p0 = 1.0 - prob_of_one(evolved, "anc");
        }
        MeasurementResult m = (mode == MeasureStrategy::postselect)
                                  ? measure_ancilla_postselect(evolved, "anc", 0)
                                  : measure_ancilla_sample(evolved, "anc", rng);
        if (mode == MeasureStrategy::sample) result.report.sampled_iterations = iter;
        if (m.outcome == 0) {
            cart = std::move(m.collapsed);
            break;
        }
        // measured |1>: the polar branch survives eps-close to the input; the
        // algorithm re-enters with it as written
        polar = std::move(m.collapsed);
        result.report.max_reentry_deviation =
            std::max(result.report.max_reentry_deviation,
                     phase_aligned_distance(polar.amplitudes, polar0.amplitudes));
        if (iter >= iteration_cap)
            throw numerical_error("quantum CT pipeline: iteration cap exceeded (measured p0 "
                                  "carried as diagnostic)",
                                  result.report.p0);
    }

    result.report.post_selected = (mode == MeasureStrategy::postselect);
    AmplificationCost cost = amplification_cost(result.report.p0);
    result.report.expected_iterations_plain = cost.plain;
    result.report.expected_iterations_amplified = cost.amplified;

    // the success branch enters as -i t A fhat; a global phase is
    // unobservable, so rotate it away before reading out pixel signs
    for (auto& z : cart.amplitudes) z *= cdouble(0.0, 1.0);

    // collapsed registers now index (ky, kx); uncenter, invert, pixel layout
    int half = log2_exact(n, "side");
    cart = relabel(cart, RegisterLayout{{{"row", half}, {"col", half}}});
    cart = shift_register_labels(cart, "row");
    cart = shift_register_labels(cart, "col");
    cart = qft_on_register(cart, "row", FftDirection::inverse);
    cart = qft_on_register(cart, "col", FftDirection::inverse);
    cart = shift_register_labels(cart, "row");
    cart = shift_register_labels(cart, "col");

    result.image = ImageGrid(n);
    for (std::size_t i = 0; i < cart.amplitudes.size(); ++i)
        result.image.data[i] = std::copysign(std::abs(cart.amplitudes[i]),
                                             cart.amplitudes[i].real());
    result.state = std::move(cart);
    return result;
}

std::vector<std::uint64_t> sample_pixels(const RegisterState& state, std::uint64_t shots,
                                         std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("sample_pixels: shots must be >= 1");
    std::vector<double> cumulative(state.dim());
    double acc = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        acc += std::norm(state.amplitudes[i]);
        cumulative[i] = acc;
    }
    std::vector<std::uint64_t> counts(state.dim(), 0);
    SplitMix64 rng(seed);
    for (std::uint64_t s = 0; s < shots; ++s) {
        double u = rng.uniform01() * acc;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        std::size_t idx = std::min(std::size_t(it - cumulative.begin()), state.dim() - 1);
        ++counts[idx];
    }
    return counts;
}

// ----------------------------------------------------------------- file I/O

void write_state(const RegisterState& state, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    out << "RVEC1 " << state.layout.total_qubits() << " " << state.layout.to_string() << "\n";
    out.write(reinterpret_cast<const char*>(state.amplitudes.data()),
              std::streamsize(state.amplitudes.size() * sizeof(cdouble)));
    if (!out) throw io_error("short write: " + path.string());
}

RegisterState read_state(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw io_error("truncated header: " + path.string());
    std::istringstream hs(header);
    std::string magic, layout_text;
    int q = 0;
    hs >> magic >> q >> layout_text;
    if (magic != "RVEC1" || q < 1) throw io_error("malformed rvec header: " + path.string());
    RegisterState st;
    try {
        st.layout = RegisterLayout::parse(layout_text);
    } catch (const std::invalid_argument& e) {
        throw io_error(std::string("malformed rvec layout: ") + e.what());
    }
    if (st.layout.total_qubits() != q)
        throw io_error("rvec layout does not match qubit count: " + path.string());
    st.amplitudes.resize(std::size_t(1) << q);
    in.read(reinterpret_cast<char*>(st.amplitudes.data()),
            std::streamsize(st.amplitudes.size() * sizeof(cdouble)));
    if (in.gcount() != std::streamsize(st.amplitudes.size() * sizeof(cdouble)))
        throw io_error("truncated rvec payload: " + path.string());
    return st;
}

} // namespace qtomo
