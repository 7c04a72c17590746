// Ancilla-coupled Floquet model: run parameters, Pauli-string observables,
// the coupling unitary, and per-realization spectral data.
#ifndef QSFF_MODEL_HPP
#define QSFF_MODEL_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsff/linalg.hpp"
#include "qsff/rng.hpp"

namespace qsff {

enum class EnsembleKind {
    ancilla,    // U = U_g (U0 x 1_2), dimension 2 D0
    pure_haar,  // single CUE matrix of dimension D0, no ancilla structure
};

struct ModelParams {
    Eigen::Index d0 = 32;        // environment dimension
    double gamma = 0.125;        // golden-rule rate per Floquet step
    std::uint64_t master_seed = 1;
    long n_samples = 10000;
    long t_max = 0;              // 0 -> default 4*dim applied by the config layer
    EnsembleKind ensemble = EnsembleKind::ancilla;
    bool zero_coupling = false;  // W = 0 override (decoupled limit)
    bool freeze_coupling = false;  // sample W once instead of per realization

    Eigen::Index d_full() const { return 2 * d0; }
    // dimension of the evolution operator actually diagonalized
    Eigen::Index dim() const { return ensemble == EnsembleKind::pure_haar ? d0 : d_full(); }
    double g() const { return std::sqrt(2.0 * gamma); }
    double mean_spacing() const { return 2.0 * kPi / static_cast<double>(d0); }
    double t_heisenberg() const { return static_cast<double>(d_full()); }

    void validate() const {
        if (d0 < 1) throw std::invalid_argument("D0 must be >= 1");
        if (gamma <= 0.0) throw std::invalid_argument("gamma must be > 0");
        if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
        if (t_max < 1) throw std::invalid_argument("t_max must be >= 1");
    }
};

// ---------------------------------------------------------------------------
// Pauli-string observables

namespace pauli {

inline ComplexMatrix identity2() { return ComplexMatrix::Identity(2, 2); }
inline ComplexMatrix x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline ComplexMatrix y() {
    ComplexMatrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}
inline ComplexMatrix z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}
inline ComplexMatrix by_label(char c) {
    switch (c) {
        case '1': return identity2();
        case 'x': return x();
        case 'y': return y();
        case 'z': return z();
    }
    throw std::invalid_argument(std::string("unknown Pauli label '") + c + "'");
}
// sigma_k on the ancilla factor, embedded in the full space (env x anc layout,
// ancilla index fast).
inline ComplexMatrix ancilla_sigma(int k, Eigen::Index d0);

}  // namespace pauli

struct PauliFactor {
    std::string site;  // "anc", "env", or "env_qK"
    char op;           // '1', 'x', 'y', 'z'
};

// Text grammar: comma-separated `site:op` pairs; case-insensitive,
// whitespace-tolerant; omitted sites default to identity.
struct PauliString {
    std::vector<PauliFactor> factors;
    std::string text;

    static PauliString parse(const std::string& input) {
        PauliString out;
        out.text = input;
        std::string cur;
        auto flush = [&](const std::string& token) {
            std::string t;
            for (char c : token)
                if (!std::isspace(static_cast<unsigned char>(c)))
                    t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (t.empty()) return;
            auto colon = t.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("PauliString: missing ':' in '" + token + "'");
            std::string site = t.substr(0, colon);
            std::string op = t.substr(colon + 1);
            if (op.size() != 1 || std::string("1xyz").find(op[0]) == std::string::npos)
                throw std::invalid_argument("PauliString: bad operator '" + op + "' in '" + token + "'");
            bool valid_site = site == "anc" || site == "env" ||
                              (site.rfind("env_q", 0) == 0 && site.size() > 5 &&
                               std::all_of(site.begin() + 5, site.end(), [](char c) {
                                   return std::isdigit(static_cast<unsigned char>(c));
                               }));
            if (!valid_site)
                throw std::invalid_argument("PauliString: unknown site tag '" + site + "'");
            out.factors.push_back(PauliFactor{site, op[0]});
        };
        std::string token;
        for (char c : input) {
            if (c == ',') {
                flush(token);
                token.clear();
            } else {
                token += c;
            }
        }
        flush(token);
        return out;
    }
};

// D x D operator built from a Pauli-string specification, with cached
// factor-space tracelessness flags.
struct Observable {
    ComplexMatrix matrix;
    PauliString spec;
    bool traceless_env = false;
    bool traceless_anc = false;

    Eigen::Index dim() const { return matrix.rows(); }
    // normalized expectation tr(.)/D of a product with another observable
    Complex pair_trace(const Observable& other) const {
        return (matrix * other.matrix).trace() / static_cast<double>(dim());
    }
};

namespace detail {

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// partial trace over the environment factor (layout env x anc, anc fast)
inline ComplexMatrix trace_env(const ComplexMatrix& o, Eigen::Index d0) {
    ComplexMatrix out = ComplexMatrix::Zero(2, 2);
    for (Eigen::Index mu = 0; mu < d0; ++mu)
        for (Eigen::Index a = 0; a < 2; ++a)
            for (Eigen::Index b = 0; b < 2; ++b)
                out(a, b) += o(mu * 2 + a, mu * 2 + b);
    return out;
}

inline ComplexMatrix trace_anc(const ComplexMatrix& o, Eigen::Index d0) {
    ComplexMatrix out = ComplexMatrix::Zero(d0, d0);
    for (Eigen::Index mu = 0; mu < d0; ++mu)
        for (Eigen::Index nu = 0; nu < d0; ++nu)
            for (Eigen::Index a = 0; a < 2; ++a)
                out(mu, nu) += o(mu * 2 + a, nu * 2 + a);
    return out;
}

}  // namespace detail

inline ComplexMatrix pauli::ancilla_sigma(int k, Eigen::Index d0) {
    ComplexMatrix s;
    switch (k) {
        case 1: s = pauli::x(); break;
        case 2: s = pauli::y(); break;
        case 3: s = pauli::z(); break;
        default: throw std::invalid_argument("ancilla_sigma: k must be 1..3");
    }
    return detail::kron(ComplexMatrix::Identity(d0, d0), s);
}

inline Observable build_observable(const PauliString& spec, const ModelParams& params) {
    const Eigen::Index d0 = params.d0;
    ComplexMatrix anc_op = pauli::identity2();

    // environment operator assembled from per-qubit factors (q0 = slowest)
    int n_env_qubits = 0;
    {
        Eigen::Index d = d0;
        while (d % 2 == 0 && d > 1) {
            d /= 2;
            ++n_env_qubits;
        }
        if (d != 1) n_env_qubits = -1;  // D0 not a power of two
    }
    std::vector<char> env_ops;
    if (n_env_qubits >= 0) env_ops.assign(static_cast<size_t>(n_env_qubits), '1');

    for (const auto& f : spec.factors) {
        if (f.site == "anc") {
            anc_op = pauli::by_label(f.op) * anc_op;
        } else if (f.site == "env") {
            if (f.op != '1')
                throw std::invalid_argument(
                    "build_observable: whole-environment site 'env' supports only op '1'; "
                    "use env_qK for Pauli factors");
        } else {
            if (n_env_qubits < 0)
                throw std::invalid_argument("build_observable: env_qK tags require D0 to be a power of two");
            int k = std::stoi(f.site.substr(5));
            if (k < 0 || k >= n_env_qubits)
                throw std::invalid_argument("build_observable: env qubit index " + std::to_string(k) +
                                            " out of range for D0=" + std::to_string(d0));
            if (env_ops[static_cast<size_t>(k)] != '1' && f.op != '1')
                throw std::invalid_argument("build_observable: repeated site " + f.site);
            env_ops[static_cast<size_t>(k)] = f.op;
        }
    }

    ComplexMatrix env_op = ComplexMatrix::Identity(1, 1);
    if (n_env_qubits >= 0) {
        for (char c : env_ops) env_op = detail::kron(env_op, pauli::by_label(c));
    } else {
        env_op = ComplexMatrix::Identity(d0, d0);
    }

    Observable out;
    out.spec = spec;
    out.matrix = detail::kron(env_op, anc_op);
    out.traceless_env = detail::trace_env(out.matrix, d0).norm() <= 1e-12;
    out.traceless_anc = detail::trace_anc(out.matrix, d0).norm() <= 1e-12;
    return out;
}

// ---------------------------------------------------------------------------
// Floquet operator

// U_g = exp(-i (W x sigma+ + W† x sigma-)) via the SVD closed form: with
// W = L S R†, the ancilla-block structure is
//   [[ L cos(S) L†,  -i L sin(S) R† ],
//    [ -i R sin(S) L†,  R cos(S) R† ]].
inline UnitaryMatrix coupling_unitary(const ComplexMatrix& w) {
    if (w.rows() != w.cols())
        throw DimensionError("coupling_unitary: W must be square");
    const Eigen::Index d0 = w.rows();
    SvdResult s = svd(w);
    RealVector cs = s.singular_values.array().cos();
    RealVector sn = s.singular_values.array().sin();
    ComplexMatrix b00 = s.left * cs.cast<Complex>().asDiagonal() * s.left.adjoint();
    ComplexMatrix b11 = s.right * cs.cast<Complex>().asDiagonal() * s.right.adjoint();
    ComplexMatrix b01 = Complex(0, -1) * (s.left * sn.cast<Complex>().asDiagonal() * s.right.adjoint());
    ComplexMatrix b10 = Complex(0, -1) * (s.right * sn.cast<Complex>().asDiagonal() * s.left.adjoint());

    // scatter the ancilla blocks into the env x anc (anc fast) layout
    ComplexMatrix ug(2 * d0, 2 * d0);
    for (Eigen::Index mu = 0; mu < d0; ++mu)
        for (Eigen::Index nu = 0; nu < d0; ++nu) {
            ug(2 * mu + 0, 2 * nu + 0) = b00(mu, nu);
            ug(2 * mu + 0, 2 * nu + 1) = b01(mu, nu);
            ug(2 * mu + 1, 2 * nu + 0) = b10(mu, nu);
            ug(2 * mu + 1, 2 * nu + 1) = b11(mu, nu);
        }
    return UnitaryMatrix(std::move(ug));
}

// W x sigma+ + W† x sigma-, for oracle cross-checks.
inline ComplexMatrix coupling_hamiltonian(const ComplexMatrix& w) {
    ComplexMatrix sp(2, 2), sm(2, 2);
    sp << 0, 1, 0, 0;  // sigma+ = (sigma1 + i sigma2)/2
    sm << 0, 0, 1, 0;
    return detail::kron(w, sp) + detail::kron(w.adjoint(), sm);
}

inline UnitaryMatrix floquet_step(const UnitaryMatrix& u0, const UnitaryMatrix& ug) {
    if (ug.dim() != 2 * u0.dim())
        throw DimensionError("floquet_step: dim(Ug) must be 2*dim(U0)");
    ComplexMatrix lifted = detail::kron(u0.matrix(), ComplexMatrix::Identity(2, 2));
    return UnitaryMatrix(ug.matrix() * lifted);
}

// Samples (U0, W) from the stream, builds U, and returns its eigenphase data.
// Deterministic per (master_seed, stream_id). `w_override` substitutes a fixed
// coupling matrix (frozen-W runs and the W = 0 decoupled limit).
inline EigenphaseSpectrum realization_spectrum(const ModelParams& params, const SeedStream& stream,
                                               const ComplexMatrix* w_override = nullptr) {
    auto eng = stream.engine();
    if (params.ensemble == EnsembleKind::pure_haar)
        return eigenphases(sample_haar(params.d0, eng));

    UnitaryMatrix u0 = sample_haar(params.d0, eng);
    ComplexMatrix w;
    if (w_override != nullptr)
        w = *w_override;
    else if (params.zero_coupling)
        w = ComplexMatrix::Zero(params.d0, params.d0);
    else
        w = sample_coupling(params.d0, params.gamma, eng);
    UnitaryMatrix u = floquet_step(u0, coupling_unitary(w));
    return eigenphases(u);
}

}  // namespace qsff

#endif  // QSFF_MODEL_HPP
