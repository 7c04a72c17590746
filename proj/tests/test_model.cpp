#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qsff/model.hpp"

using namespace qsff;

namespace {

ModelParams small_params(Eigen::Index d0, double gamma = 0.125) {
    ModelParams p;
    p.d0 = d0;
    p.gamma = gamma;
    p.n_samples = 10;
    p.t_max = 8;
    return p;
}

}  // namespace

TEST_CASE("derived parameter scales") {
    ModelParams p = small_params(32, 0.125);
    CHECK(p.d_full() == 64);
    CHECK(p.g() == doctest::Approx(0.5));
    CHECK(p.mean_spacing() == doctest::Approx(2.0 * kPi / 32.0));
    CHECK(p.t_heisenberg() == doctest::Approx(64.0));
}

TEST_CASE("pauli string parsing") {
    auto ps = PauliString::parse(" Anc : Z ,  ENV_Q0 : z ");
    REQUIRE(ps.factors.size() == 2);
    CHECK(ps.factors[0].site == "anc");
    CHECK(ps.factors[0].op == 'z');
    CHECK(ps.factors[1].site == "env_q0");

    CHECK_THROWS_AS(PauliString::parse("anc Z"), std::invalid_argument);
    CHECK_THROWS_AS(PauliString::parse("anc:Q"), std::invalid_argument);
    CHECK_THROWS_AS(PauliString::parse("qubit7:Z"), std::invalid_argument);
}

TEST_CASE("build_observable: the sigma3 x sigma3 observable") {
    ModelParams p = small_params(64);
    Observable o = build_observable(PauliString::parse("anc:Z, env_q0:Z"), p);
    CHECK(o.dim() == 128);
    CHECK(o.traceless_env);
    CHECK(o.traceless_anc);
    CHECK(o.pair_trace(o).real() == doctest::Approx(1.0));  // <A^2> = 1
    // entries are +/-1 on the diagonal
    CHECK(std::abs(o.matrix.diagonal().cwiseAbs().maxCoeff() - 1.0) <= 1e-15);
    CHECK(o.matrix.trace() == Complex(0, 0));
}

TEST_CASE("build_observable: identity and single-factor cases") {
    ModelParams p = small_params(8);
    Observable id = build_observable(PauliString::parse("anc:1, env:1"), p);
    CHECK((id.matrix - ComplexMatrix::Identity(16, 16)).norm() == 0.0);
    CHECK_FALSE(id.traceless_env);
    CHECK_FALSE(id.traceless_anc);

    Observable az = build_observable(PauliString::parse("anc:Z"), p);
    CHECK(az.traceless_anc);
    CHECK_FALSE(az.traceless_env);
}

TEST_CASE("build_observable validation") {
    ModelParams p = small_params(8);
    CHECK_THROWS_AS(build_observable(PauliString::parse("env_q5:Z"), p), std::invalid_argument);
    ModelParams p6 = small_params(6);
    CHECK_THROWS_AS(build_observable(PauliString::parse("env_q0:Z"), p6), std::invalid_argument);
    // non-power-of-two D0 without qubit tags is fine
    Observable o = build_observable(PauliString::parse("anc:Z"), p6);
    CHECK(o.dim() == 12);
}

TEST_CASE("coupling_unitary: zero coupling is the identity") {
    UnitaryMatrix ug = coupling_unitary(ComplexMatrix::Zero(4, 4));
    CHECK((ug.matrix() - ComplexMatrix::Identity(8, 8)).norm() <= 1e-14);
}

TEST_CASE("coupling_unitary: 2x2 analytic form at D0=1") {
    ComplexMatrix w(1, 1);
    w(0, 0) = std::polar(0.8, 0.3);
    UnitaryMatrix ug = coupling_unitary(w);
    ComplexMatrix want(2, 2);
    want << std::cos(0.8), Complex(0, -1) * std::polar(std::sin(0.8), 0.3),
        Complex(0, -1) * std::polar(std::sin(0.8), -0.3), std::cos(0.8);
    CHECK((ug.matrix() - want).norm() <= 1e-14);
}

TEST_CASE("coupling_unitary matches the matrix-exponential oracle") {
    for (std::uint64_t k = 0; k < 10; ++k) {
        ComplexMatrix w = sample_coupling(4, 0.3, derive_stream(12, k));
        ComplexMatrix oracle = expm_oracle(coupling_hamiltonian(w), 1.0);
        CHECK((coupling_unitary(w).matrix() - oracle).norm() <= 1e-10);
    }
}

TEST_CASE("coupling_unitary inverse property") {
    ComplexMatrix w = sample_coupling(8, 0.5, derive_stream(2, 2));
    UnitaryMatrix ug = coupling_unitary(w);
    CHECK((ug.matrix() * ug.matrix().adjoint() - ComplexMatrix::Identity(16, 16)).norm() <= 1e-10);
}

TEST_CASE("floquet_step composition") {
    auto u0 = sample_haar(4, derive_stream(3, 0));
    ComplexMatrix w = sample_coupling(4, 0.2, derive_stream(3, 1));
    UnitaryMatrix ug = coupling_unitary(w);

    // Ug = 1: U = U0 x 1, so tr(U^t) = 2 tr(U0^t)
    UnitaryMatrix dec = floquet_step(u0, UnitaryMatrix(ComplexMatrix::Identity(8, 8)));
    CHECK(std::abs(dec.matrix().trace() - 2.0 * u0.matrix().trace()) <= 1e-12);

    // U0 = 1: U = Ug
    UnitaryMatrix pure = floquet_step(UnitaryMatrix(ComplexMatrix::Identity(4, 4)), ug);
    CHECK((pure.matrix() - ug.matrix()).norm() <= 1e-13);

    // generic: dense product oracle
    ComplexMatrix lifted = ComplexMatrix::Zero(8, 8);
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
            for (int a = 0; a < 2; ++a) lifted(2 * mu + a, 2 * nu + a) = u0.matrix()(mu, nu);
    CHECK((floquet_step(u0, ug).matrix() - ug.matrix() * lifted).norm() <= 1e-13);

    CHECK_THROWS_AS(floquet_step(u0, UnitaryMatrix(ComplexMatrix::Identity(4, 4))),
                    DimensionError);
}

TEST_CASE("realization_spectrum: decoupled limit doubles the environment spectrum") {
    ModelParams p = small_params(8);
    p.zero_coupling = true;
    auto spec = realization_spectrum(p, derive_stream(p.master_seed, 0));
    REQUIRE(spec.phases.size() == 16);

    auto eng = derive_stream(p.master_seed, 0).engine();
    auto u0spec = eigenphases(sample_haar(8, eng));
    std::vector<double> doubled;
    for (Eigen::Index j = 0; j < 8; ++j) {
        doubled.push_back(u0spec.phases[j]);
        doubled.push_back(u0spec.phases[j]);
    }
    std::vector<double> got(spec.phases.data(), spec.phases.data() + 16);
    std::sort(doubled.begin(), doubled.end());
    std::sort(got.begin(), got.end());
    for (int j = 0; j < 16; ++j) CHECK(got[j] == doctest::Approx(doubled[j]).epsilon(1e-10));
}

TEST_CASE("realization_spectrum reconstruction and determinism") {
    ModelParams p = small_params(8);
    auto s1 = realization_spectrum(p, derive_stream(1, 7));
    auto s2 = realization_spectrum(p, derive_stream(1, 7));
    CHECK((s1.phases - s2.phases).norm() == 0.0);

    // frame reconstructs the Floquet operator
    auto eng = derive_stream(1, 7).engine();
    UnitaryMatrix u0 = sample_haar(8, eng);
    ComplexMatrix w = sample_coupling(8, p.gamma, eng);
    ComplexMatrix u = floquet_step(u0, coupling_unitary(w)).matrix();
    ComplexMatrix recon =
        s1.frame *
        (s1.phases.array().cast<Complex>() * Complex(0, 1)).exp().matrix().asDiagonal() *
        s1.frame.adjoint();
    CHECK((recon - u).norm() <= 1e-8 * 16);
}
