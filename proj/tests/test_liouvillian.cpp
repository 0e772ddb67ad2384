#include "qndspin/liouvillian.hpp"

#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace qnd;

namespace {

const double kS2 = 2.5e-3;
const double kS = std::sqrt(kS2);
const double kC = std::sqrt(1.0 - kS2);

void check_generator_shape(const Matrix6d& l) {
    for (int j = 0; j < 6; ++j) {
        CHECK(std::abs(l.col(j).sum()) < 1e-12 * std::max(1.0, l.cwiseAbs().maxCoeff()));
        for (int i = 0; i < 6; ++i) {
            if (i == j)
                CHECK(l(i, j) <= 0.0);
            else
                CHECK(l(i, j) >= 0.0);
        }
    }
}

RateSet t0_rates(double g0) {
    RateSet r;
    r.gin_down = g0;
    r.gout_up = g0;
    return r;
}

EigenBasis en_basis(double eps_e, double eps_n, double a) {
    SpinSystemSpec s;
    s.kind = SystemKind::HyperfineEN;
    s.eps_a = eps_e;
    s.eps_d = eps_n;
    s.coupling = a;
    return diagonalize(build_hamiltonian(s), s);
}

} // namespace

TEST_CASE("EE generator: zero-temperature loading column") {
    const auto lv = assemble_ee(kS, kC, t0_rates(1.0));
    check_generator_shape(lv.l);
    // Column of the 1P up-data state: load-down populates the hybridized pair.
    CHECK(lv.l(0, 4) == 0.0);
    CHECK(lv.l(1, 4) == doctest::Approx(kS2));
    CHECK(lv.l(2, 4) == doctest::Approx(1.0 - kS2));
    CHECK(lv.l(3, 4) == 0.0);
    CHECK(lv.l(4, 4) == doctest::Approx(-1.0));
    CHECK(lv.l(5, 4) == 0.0);
    // Unload-up column of up-up.
    CHECK(lv.l(4, 0) == doctest::Approx(1.0));
    CHECK(lv.l(0, 0) == doctest::Approx(-1.0));
}

TEST_CASE("EE generator: finite-temperature entries at f = 0.03") {
    RateSet r;
    r.gin_down = 0.97;
    r.gout_up = 0.97;
    r.gin_up = 0.03;
    r.gout_down = 0.03;
    const auto lv = assemble_ee(kS, kC, r);
    check_generator_shape(lv.l);
    CHECK(lv.l(4, 2) == doctest::Approx(0.03 * kC * kC)); // warm unload of ~dnA_upD
    CHECK(lv.l(5, 2) == doctest::Approx(0.97 * kS2));
    CHECK(lv.l(4, 1) == doctest::Approx(0.03 * kS2));
    CHECK(lv.l(0, 4) == doctest::Approx(0.03));
    CHECK(lv.l(2, 5) == doctest::Approx(0.03 * kS2)); // repaired A2 row-3 entry
    CHECK(lv.l(1, 5) == doctest::Approx(0.03 * kC * kC));
    CHECK(lv.l(5, 3) == doctest::Approx(0.03));
}

TEST_CASE("EE generator: T1 block and flip-flop rejection") {
    RateSet r = t0_rates(1.0);
    r.gamma_t1 = 0.1;
    const auto lv = assemble_ee(kS, kC, r);
    check_generator_shape(lv.l);
    CHECK(lv.l(1, 0) == doctest::Approx(0.1));
    CHECK(lv.l(2, 0) == doctest::Approx(0.1));
    CHECK(lv.l(3, 1) == doctest::Approx(0.1));
    CHECK(lv.l(3, 2) == doctest::Approx(0.1));
    CHECK(lv.l(5, 4) == doctest::Approx(0.1));

    r.gamma_ff = 0.01;
    CHECK_THROWS_AS(assemble_ee(kS, kC, r), std::invalid_argument);
}

TEST_CASE("EE generator: s=0 decouples the data-up and data-down blocks") {
    RateSet r;
    r.gin_down = 1.0;
    r.gout_up = 1.0;
    r.gin_up = 0.03;
    r.gout_down = 0.03;
    const auto lv = assemble_ee(0.0, 1.0, r);
    // Data-up states {0, 2, 4} never connect to data-down states {1, 3, 5}.
    for (int i : {0, 2, 4})
        for (int j : {1, 3, 5}) {
            CHECK(lv.l(i, j) == 0.0);
            CHECK(lv.l(j, i) == 0.0);
        }
}

TEST_CASE("EN generator: zero-temperature column of the 1P nuclear-down state") {
    const auto lv = assemble_en(kS, kC, t0_rates(1.0));
    check_generator_shape(lv.l);
    CHECK(lv.l(0, 5) == 0.0);
    CHECK(lv.l(1, 5) == 0.0);
    CHECK(lv.l(2, 5) == doctest::Approx(kS2));
    CHECK(lv.l(3, 5) == doctest::Approx(1.0));
    CHECK(lv.l(4, 5) == 0.0);
    CHECK(lv.l(5, 5) == doctest::Approx(-(1.0 + kS2)));
    // Unloading the electron-up states.
    CHECK(lv.l(4, 1) == doctest::Approx(kS2));
    CHECK(lv.l(5, 1) == doctest::Approx(1.0 - kS2));
}

TEST_CASE("EN generator: flip-flop and T1 entries") {
    RateSet r;
    r.gamma_ff = 53.3e-3;
    r.gamma_t1 = 0.2;
    const auto lv = assemble_en(kS, kC, r);
    check_generator_shape(lv.l);
    CHECK(lv.l(2, 1) == doctest::Approx(53.3e-3));
    CHECK(lv.l(1, 1) == doctest::Approx(-53.3e-3 - 0.2 * kC * kC));
    CHECK(lv.l(1, 0) == doctest::Approx(0.2 * kS2));
    CHECK(lv.l(2, 0) == doctest::Approx(0.2 * (1.0 - kS2)));
    CHECK(lv.l(3, 1) == doctest::Approx(0.2 * kC * kC));
    CHECK(lv.l(3, 2) == doctest::Approx(0.2 * kS2));
    // Nuclear 1P states are untouched by electron relaxation.
    CHECK(lv.l(5, 4) == 0.0);
}

TEST_CASE("EN generator: s=0, T=0 conserves nuclear populations") {
    const auto lv = assemble_en(0.0, 1.0, t0_rates(1.0));
    // Nuclear-up states {0, 2, 4} decoupled from nuclear-down {1, 3, 5}.
    for (int i : {0, 2, 4})
        for (int j : {1, 3, 5}) {
            CHECK(lv.l(i, j) == 0.0);
            CHECK(lv.l(j, i) == 0.0);
        }
}

TEST_CASE("anisotropic generator reduces to the isotropic one at D = 0") {
    const EigenBasis basis = en_basis(5.0e10, -1.5e7, 1.175e8);
    RateSet r;
    r.gin_down = 2.0e3;
    r.gout_up = 1.0e3;
    r.gin_up = 1.0e3;
    r.gout_down = 40.0;
    const auto aniso = assemble_aniso(transition_amplitudes(basis), r);
    const auto iso = assemble_en(basis.s(), basis.c(), r);
    check_generator_shape(aniso.l);
    CHECK((aniso.l - iso.l).cwiseAbs().maxCoeff() < 1e-9 * iso.l.cwiseAbs().maxCoeff());
    RateSet bad = r;
    bad.gamma_t1 = 1.0;
    CHECK_THROWS_AS(assemble_aniso(transition_amplitudes(basis), bad), std::invalid_argument);
}

TEST_CASE("anisotropic generator converges to isotropic as D -> 0") {
    SpinSystemSpec s;
    s.kind = SystemKind::AnisotropicEN;
    s.eps_a = 5.0e10;
    s.eps_d = -1.5e7;
    s.coupling = 1.175e8;
    RateSet r;
    r.gin_down = 2.0e3;
    r.gout_up = 1.0e3;
    r.gin_up = 1.0e3;
    r.gout_down = 40.0;

    const EigenBasis iso_basis = en_basis(s.eps_a, s.eps_d, s.coupling);
    const Matrix6d iso = assemble_en(iso_basis.s(), iso_basis.c(), r).l;

    double prev_err = -1.0;
    for (double d = 1.0e6; d >= 1.0e5; d /= 2.0) {
        s.dipolar(0, 2) = d;
        const auto basis = diagonalize(build_hamiltonian(s), s);
        const double err =
            (assemble_aniso(transition_amplitudes(basis), r).l - iso).cwiseAbs().maxCoeff();
        if (prev_err > 0.0) {
            // The deviation is dominated by s*D cross terms, so halving D
            // shrinks it at least linearly.
            CHECK(prev_err / err > 1.7);
            CHECK(err < prev_err);
        }
        prev_err = err;
    }
}

TEST_CASE("resonant tunneling: printed 4-state matrix and effective rate") {
    const double g = 2.8e4;
    const auto rt = assemble_rt(kS, g);
    const double s2 = kS2, c2 = 1.0 - kS2;
    // Column of the 1P Down state.
    CHECK(rt.four_state(0, 3) == doctest::Approx(g * s2));
    CHECK(rt.four_state(1, 3) == doctest::Approx(g));
    CHECK(rt.four_state(2, 3) == 0.0);
    CHECK(rt.four_state(3, 3) == doctest::Approx(-g * (1.0 + s2)));
    CHECK(rt.four_state(0, 2) == doctest::Approx(g * c2));
    for (int j = 0; j < 4; ++j)
        CHECK(std::abs(rt.four_state.col(j).sum()) < 1e-12 * g);
    // Half the charge equilibrium sits in the ionized state, halving the
    // per-direction nuclear flip rate.
    CHECK(rt.effective(0, 0) == doctest::Approx(-0.5 * g * s2));
    CHECK(rt.effective(1, 0) == doctest::Approx(0.5 * g * s2));
    CHECK(assemble_rt(0.0, g).effective.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("resonant tunneling: 4-state nuclear polarization matches 2-state") {
    const double g = 2.8e4;
    const double s = 1.0e-3; // s^2 = 1e-6
    const auto rt = assemble_rt(s, g);
    // Start in the fast-equilibrium manifold of the Up nucleus.
    Eigen::Vector4d rho;
    rho << 0.5, 0.0, 0.5, 0.0;
    Eigen::Vector2d nu;
    nu << 1.0, 0.0;
    // Long enough to resolve the slow nuclear flip itself.
    const double t = 5.0 / (g * s * s);
    const Eigen::Vector4d rho_t = (rt.four_state * t).exp() * rho;
    const Eigen::Vector2d nu_t = (rt.effective * t).exp() * nu;
    const double pol4 = rho_t[0] + rho_t[2];
    CHECK(pol4 == doctest::Approx(nu_t[0]).epsilon(1e-3));
    CHECK(pol4 == doctest::Approx(0.5 * (1.0 + std::exp(-g * s * s * t))).epsilon(1e-3));
}

TEST_CASE("assemble dispatches on kind and carries labels") {
    const EigenBasis basis = en_basis(5.0e10, -1.5e7, 1.175e8);
    const auto lv = assemble(basis, t0_rates(1.0e3));
    CHECK(lv.basis[0] == "up_Up");
    CHECK(lv.basis[4] == "Up");
    check_generator_shape(lv.l);
}

TEST_CASE("relabeling up <-> down is an exact symmetry of the EE generator") {
    RateSet r;
    r.gin_down = 0.97;
    r.gout_up = 0.97;
    r.gin_up = 0.03;
    r.gout_down = 0.03;
    const auto lv = assemble_ee(kS, kC, r);

    // Relabel up <-> down: swap states 0<->3, 1<->2, 4<->5 and the rates
    // within each direction (gin_up <-> gin_down, gout_up <-> gout_down).
    RateSet flip;
    flip.gin_up = r.gin_down;
    flip.gin_down = r.gin_up;
    flip.gout_up = r.gout_down;
    flip.gout_down = r.gout_up;
    const auto lv_flip = assemble_ee(kS, kC, flip);
    Eigen::PermutationMatrix<6> perm;
    perm.indices() << 3, 2, 1, 0, 5, 4;
    const Matrix6d rebuilt = perm.transpose() * lv_flip.l * perm;
    CHECK((rebuilt - lv.l).cwiseAbs().maxCoeff() == 0.0);
}
