#include "qndspin/protocol.hpp"

#include <doctest.h>

#include <cmath>

using namespace qnd;

namespace {

const double kS2 = 2.5e-3;
const double kS = std::sqrt(kS2);
const double kC = std::sqrt(1.0 - kS2);

RateSet fig2_t0() {
    RateSet r;
    r.gin_down = 1.0;
    r.gout_up = 1.0;
    return r;
}

RateSet fig2_f003() {
    RateSet r;
    r.gin_down = 0.97;
    r.gout_up = 0.97;
    r.gin_up = 0.03;
    r.gout_down = 0.03;
    return r;
}

ProtocolSpec standard_protocol(int cycles, double window, int initial) {
    ProtocolSpec p;
    p.segments = {Segment::pulse(), Segment::window(window, "read")};
    p.cycles = cycles;
    p.initial = basis_state(initial);
    return p;
}

SpinSystemSpec heisenberg_s2(double s2) {
    SpinSystemSpec s;
    s.kind = SystemKind::HeisenbergEE;
    s.eps_a = 1.0e10;
    s.eps_d = 0.0;
    s.coupling = 1.0e10 * std::tan(2.0 * std::asin(std::sqrt(s2)));
    return s;
}

} // namespace

TEST_CASE("pulse exchanges the addressed pair and respects fidelity") {
    StateVector rho = basis_state(0);
    const StateVector up = apply_pulse(rho, CrMode::Up, 1.0);
    CHECK(up.rho[0] == 0.0);
    CHECK(up.rho[2] == 1.0);
    const StateVector down = apply_pulse(rho, CrMode::Down, 1.0);
    CHECK(down.rho[0] == 1.0); // CR(down) does not address up-up

    const StateVector partial = apply_pulse(rho, CrMode::Up, 0.9);
    CHECK(partial.rho[0] == doctest::Approx(0.1));
    CHECK(partial.rho[2] == doctest::Approx(0.9));
    CHECK(partial.rho.sum() == doctest::Approx(1.0));
}

TEST_CASE("propagation matches a fine-step first-order integrator") {
    const auto lv = assemble_ee(kS, kC, fig2_f003());
    StateVector rho = basis_state(3);
    const double t = 5.0;
    const auto traj = propagate(rho, lv, t, 11);
    REQUIRE(traj.size() == 11);

    // Explicit Euler with a very small step as an independent oracle.
    Vector6d v = rho.rho;
    const int n = 2000000;
    const double dt = t / n;
    const Matrix6d step = Matrix6d::Identity() + lv.l * dt;
    for (int i = 0; i < n; ++i)
        v = step * v;
    for (int k = 0; k < 6; ++k)
        CHECK(traj.back().rho[k] == doctest::Approx(v[k]).epsilon(1e-6).scale(1.0));
}

TEST_CASE("probability is conserved through a full protocol") {
    const auto spec = heisenberg_s2(kS2);
    std::map<std::string, RateSet> rates = {{"read", fig2_f003()}};
    ProtocolSpec p = standard_protocol(200, 5.0, 3);
    p.cr_schedule = CrSchedule::Alternating;
    const auto rec = run_qnd(spec, rates, p);
    for (const auto& st : rec.states)
        CHECK(std::abs(st.rho.sum() - 1.0) < 1e-9);
    CHECK(rec.cycle_times.size() == 200);
    CHECK(rec.p_up_series.size() == 200);
    CHECK(rec.cycle_times.back() == doctest::Approx(1000.0));
}

TEST_CASE("Ising systems never flip the data at T = 0") {
    SpinSystemSpec s;
    s.kind = SystemKind::IsingEE;
    s.eps_a = 1.0e10;
    s.eps_d = 1.0e9;
    s.coupling = 1.0e9;
    std::map<std::string, RateSet> rates = {{"read", fig2_t0()}};
    ProtocolSpec p = standard_protocol(50, 5.0, 2);
    const auto rec = run_qnd(s, rates, p);
    for (const auto& st : rec.states)
        CHECK(st.p_up() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("cr_schedule expands to the per-cycle pulse mode") {
    const auto spec = heisenberg_s2(kS2);
    std::map<std::string, RateSet> rates = {{"read", fig2_t0()}};

    // With no data-down population, CR(down) cycles leave a ~down-up initial
    // state untouched at T=0 apart from the slow hybridized leak.
    ProtocolSpec p = standard_protocol(1, 5.0, 2);
    p.cr_schedule = CrSchedule::FixedDown;
    const auto rec = run_qnd(spec, rates, p);
    CHECK(rec.p_up_series[0] > 0.98);

    p.cr_schedule = CrSchedule::FixedUp;
    const auto rec_up = run_qnd(spec, rates, p);
    // CR(up) moves ~down-up to up-up which tunnels out and reloads.
    CHECK(rec_up.cycle_end_states[0].rho[2] > 0.9);
}

TEST_CASE("cycle map reproduces one protocol cycle") {
    const auto spec = heisenberg_s2(kS2);
    const EigenBasis basis = diagonalize(build_hamiltonian(spec), spec);
    std::map<std::string, Liouvillian> gens = {{"read", assemble(basis, fig2_f003())}};
    ProtocolSpec p = standard_protocol(1, 5.0, 3);
    const Matrix6d map = cycle_map(gens, p, CrMode::Up);
    const auto rec = run_protocol(gens, p);
    const Vector6d direct = map * p.initial.rho;
    CHECK((direct - rec.cycle_end_states[0].rho).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rt protocol embeds the resonant window") {
    SpinSystemSpec s;
    s.kind = SystemKind::HyperfineEN;
    s.eps_a = 5.0e10;
    s.eps_d = -1.5e7;
    s.coupling = 1.175e8;

    RateSet rt;
    rt.gin_down = 2.8e4;
    rt.gout_down = 2.8e4;
    rt.gin_up = 140.0;
    rt.gout_up = 5.6e4;

    std::map<std::string, RateSet> rates = {{"read", fig2_f003()}, {"rt", rt}};
    ProtocolSpec p;
    p.segments = {Segment::pulse(), Segment::window(1.0e-3, "read"),
                  Segment::window(0.7e-3, "rt"), Segment::window(0.3e-3, "read")};
    p.cycles = 5;
    p.initial = basis_state(2);
    const auto rec = run_rt_protocol(s, rates, p);
    for (const auto& st : rec.states)
        CHECK(std::abs(st.rho.sum() - 1.0) < 1e-9);

    std::map<std::string, RateSet> no_rt = {{"read", fig2_f003()}};
    ProtocolSpec p2 = standard_protocol(1, 1.0e-3, 2);
    CHECK_THROWS_AS(run_rt_protocol(s, no_rt, p2), std::invalid_argument);
}

TEST_CASE("protocol validation") {
    ProtocolSpec p;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument); // no segments
    p.segments = {Segment::window(1.0, "read")};
    p.initial = basis_state(0);
    p.cycles = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.cycles = 1;
    CHECK_NOTHROW(p.validate());
    p.segments = {Segment::window(-1.0, "read")};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
