#include "qndspin/analysis.hpp"
#include "qndspin/config.hpp"
#include "qndspin/liouvillian.hpp"
#include "qndspin/protocol.hpp"
#include "qndspin/reservoir.hpp"
#include "qndspin/spin_system.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qnd;

PYBIND11_MODULE(_qndspin, m) {
    m.doc() = "Rate-equation engine for repetitive spin-qubit readout";

    py::enum_<SystemKind>(m, "SystemKind")
        .value("ISING_EE", SystemKind::IsingEE)
        .value("HEISENBERG_EE", SystemKind::HeisenbergEE)
        .value("HYPERFINE_EN", SystemKind::HyperfineEN)
        .value("ANISOTROPIC_EN", SystemKind::AnisotropicEN);

    py::enum_<Channel>(m, "Channel")
        .value("UP", Channel::Up)
        .value("DOWN", Channel::Down)
        .value("FORBIDDEN", Channel::Forbidden);

    py::enum_<CrMode>(m, "CrMode").value("UP", CrMode::Up).value("DOWN", CrMode::Down);

    py::enum_<CrSchedule>(m, "CrSchedule")
        .value("FIXED_UP", CrSchedule::FixedUp)
        .value("FIXED_DOWN", CrSchedule::FixedDown)
        .value("ALTERNATING", CrSchedule::Alternating);

    py::class_<SpinSystemSpec>(m, "SpinSystemSpec")
        .def(py::init<>())
        .def_readwrite("kind", &SpinSystemSpec::kind)
        .def_readwrite("eps_a", &SpinSystemSpec::eps_a)
        .def_readwrite("eps_d", &SpinSystemSpec::eps_d)
        .def_readwrite("coupling", &SpinSystemSpec::coupling)
        .def_readwrite("dipolar", &SpinSystemSpec::dipolar)
        .def_readwrite("degenerate_mode", &SpinSystemSpec::degenerate_mode)
        .def("validate", &SpinSystemSpec::validate);

    py::class_<EigenBasis>(m, "EigenBasis")
        .def_readonly("kind", &EigenBasis::kind)
        .def_readonly("labels_2p", &EigenBasis::labels_2p)
        .def_readonly("energies_2p", &EigenBasis::energies_2p)
        .def_readonly("amplitudes", &EigenBasis::amplitudes)
        .def_readonly("labels_1p", &EigenBasis::labels_1p)
        .def_readonly("energies_1p", &EigenBasis::energies_1p)
        .def_readonly("theta", &EigenBasis::theta)
        .def("s", &EigenBasis::s)
        .def("c", &EigenBasis::c);

    py::class_<TunnelingMatrix>(m, "TunnelingMatrix")
        .def_readonly("m", &TunnelingMatrix::m)
        .def_readonly("channel", &TunnelingMatrix::channel);

    py::class_<Transition>(m, "Transition")
        .def_readonly("i1p", &Transition::i1p)
        .def_readonly("i2p", &Transition::i2p)
        .def_readonly("mu", &Transition::mu)
        .def_readonly("channel", &Transition::channel);

    py::class_<LeadSpec>(m, "LeadSpec")
        .def(py::init<>())
        .def_readwrite("gamma0", &LeadSpec::gamma0)
        .def_readwrite("mu_lead", &LeadSpec::mu_lead)
        .def_readwrite("temperature", &LeadSpec::temperature);

    py::class_<RateSet>(m, "RateSet")
        .def(py::init<>())
        .def_readwrite("gin_up", &RateSet::gin_up)
        .def_readwrite("gout_up", &RateSet::gout_up)
        .def_readwrite("gin_down", &RateSet::gin_down)
        .def_readwrite("gout_down", &RateSet::gout_down)
        .def_readwrite("gamma_t1", &RateSet::gamma_t1)
        .def_readwrite("gamma_ff", &RateSet::gamma_ff);

    py::class_<TransitionRates>(m, "TransitionRates")
        .def_readonly("transition", &TransitionRates::transition)
        .def_readonly("gamma_in", &TransitionRates::gamma_in)
        .def_readonly("gamma_out", &TransitionRates::gamma_out);

    py::class_<ScenarioPreset>(m, "ScenarioPreset")
        .def_readonly("rates", &ScenarioPreset::rates)
        .def_readonly("window_s", &ScenarioPreset::window_s)
        .def_readonly("description", &ScenarioPreset::description);

    py::class_<Liouvillian>(m, "Liouvillian")
        .def_readonly("basis", &Liouvillian::basis)
        .def_readonly("l", &Liouvillian::l);

    py::class_<StateVector>(m, "StateVector")
        .def(py::init<>())
        .def_readwrite("rho", &StateVector::rho)
        .def("validate", &StateVector::validate, py::arg("tol") = 1e-9)
        .def("p_up", &StateVector::p_up);

    py::class_<RtGenerators>(m, "RtGenerators")
        .def_readonly("four_state", &RtGenerators::four_state)
        .def_readonly("effective", &RtGenerators::effective);

    py::class_<Segment> segment(m, "Segment");
    segment.def_static("pulse", &Segment::pulse, py::arg("mode") = std::nullopt,
                       py::arg("fidelity") = 1.0)
        .def_static("window", &Segment::window, py::arg("duration_s"), py::arg("rate_label"))
        .def_readwrite("duration", &Segment::duration)
        .def_readwrite("rate_label", &Segment::rate_label)
        .def_readwrite("fidelity", &Segment::fidelity)
        .def_readwrite("mode", &Segment::mode);

    py::class_<ProtocolSpec>(m, "ProtocolSpec")
        .def(py::init<>())
        .def_readwrite("segments", &ProtocolSpec::segments)
        .def_readwrite("cycles", &ProtocolSpec::cycles)
        .def_readwrite("cr_schedule", &ProtocolSpec::cr_schedule)
        .def_readwrite("initial", &ProtocolSpec::initial)
        .def_readwrite("sample_points", &ProtocolSpec::sample_points)
        .def("validate", &ProtocolSpec::validate);

    py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
        .def_readonly("basis", &TrajectoryRecord::basis)
        .def_readonly("times", &TrajectoryRecord::times)
        .def_readonly("states", &TrajectoryRecord::states)
        .def_readonly("cycle_times", &TrajectoryRecord::cycle_times)
        .def_readonly("cycle_end_states", &TrajectoryRecord::cycle_end_states)
        .def_readonly("p_up_series", &TrajectoryRecord::p_up_series);

    py::class_<FlipRateFit>(m, "FlipRateFit")
        .def_readonly("gamma_up", &FlipRateFit::gamma_up)
        .def_readonly("gamma_down", &FlipRateFit::gamma_down)
        .def_readonly("residual_rms", &FlipRateFit::residual_rms)
        .def_readonly("equilibrium_p_up", &FlipRateFit::equilibrium_p_up)
        .def_readonly("lower_bound_warning", &FlipRateFit::lower_bound_warning)
        .def_readonly("iterations", &FlipRateFit::iterations);

    py::class_<Series>(m, "Series")
        .def(py::init<>())
        .def(py::init([](std::vector<double> t, std::vector<double> p) {
                 return Series{std::move(t), std::move(p)};
             }),
             py::arg("t"), py::arg("p_up"))
        .def_readwrite("t", &Series::t)
        .def_readwrite("p_up", &Series::p_up);

    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("b0", &SweepResult::b0)
        .def_readonly("dxz", &SweepResult::dxz)
        .def_readonly("m_up_dndn", &SweepResult::m_up_dndn)
        .def_readonly("m_up_updn", &SweepResult::m_up_updn);

    m.attr("K_BOLTZMANN_HZ_PER_K") = kBoltzmannHzPerK;

    m.def("build_hamiltonian", &build_hamiltonian, py::arg("spec"));
    m.def("diagonalize", &diagonalize, py::arg("h"), py::arg("spec"));
    m.def("transition_amplitudes", &transition_amplitudes, py::arg("basis"));
    m.def("chemical_potentials", &chemical_potentials, py::arg("basis"), py::arg("offset"));
    m.def("fermi_occupation", &fermi_occupation, py::arg("energy_hz"), py::arg("lead"));
    m.def("golden_rule_rates", &golden_rule_rates, py::arg("m"), py::arg("mus"), py::arg("lead"),
          py::arg("per_transition_fermi") = false);
    m.def("preset", &preset, py::arg("name"), py::arg("gamma0") = 1.0,
          py::arg("base_rates") = std::nullopt);
    m.def("preset_names", &preset_names);
    m.def("basis_state", &basis_state, py::arg("index"));
    m.def("assemble_ee", &assemble_ee, py::arg("s"), py::arg("c"), py::arg("rates"));
    m.def("assemble_en", &assemble_en, py::arg("s"), py::arg("c"), py::arg("rates"));
    m.def("assemble_aniso", &assemble_aniso, py::arg("m"), py::arg("rates"));
    m.def("assemble_rt", &assemble_rt, py::arg("s"), py::arg("gamma_rt"));
    m.def("assemble", &assemble, py::arg("basis"), py::arg("rates"));
    m.def("apply_pulse", &apply_pulse, py::arg("rho"), py::arg("mode"), py::arg("fidelity"));
    m.def("propagate", &propagate, py::arg("rho"), py::arg("l"), py::arg("t"), py::arg("samples"));
    m.def("run_qnd", &run_qnd, py::arg("system"), py::arg("rates_by_label"), py::arg("protocol"));
    m.def("run_rt_protocol", &run_rt_protocol, py::arg("system"), py::arg("rates_by_label"),
          py::arg("protocol"));
    m.def("cycle_map", &cycle_map, py::arg("generators"), py::arg("protocol"), py::arg("mode"));
    m.def("fit_flip_rates", &fit_flip_rates, py::arg("from_up"), py::arg("from_down"));
    m.def("stationary_state",
          py::overload_cast<const Liouvillian&>(&stationary_state), py::arg("l"));
    m.def("stationary_generator",
          py::overload_cast<const Eigen::MatrixXd&>(&stationary_state), py::arg("l"));
    m.def("stationary_map", &stationary_map, py::arg("map"));
    m.def("sweep_hybridization", &sweep_hybridization, py::arg("base"), py::arg("b0_min"),
          py::arg("b0_max"), py::arg("nb0"), py::arg("dxz_min"), py::arg("dxz_max"),
          py::arg("ndxz"), py::arg("gamma_n"), py::arg("gamma_e"), py::arg("jobs") = 1);

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<FitError>(m, "FitError");
    py::register_exception<NumericalError>(m, "NumericalError");
    py::register_exception<DegenerateStationaryError>(m, "DegenerateStationaryError");
}
