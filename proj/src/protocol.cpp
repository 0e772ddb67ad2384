#include "qndspin/protocol.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace qnd {

namespace {

Matrix6d window_exponential(const Liouvillian& l, double dt) {
    const Matrix6d e = (l.l * dt).exp();
    if (!e.allFinite())
        throw NumericalError("matrix exponential is not finite");
    return e;
}

void check_state(const Vector6d& rho) {
    if (!rho.allFinite())
        throw NumericalError("state vector is not finite");
    if (std::abs(rho.sum() - 1.0) > 1e-6)
        throw NumericalError("population leak during propagation");
}

CrMode cycle_mode(CrSchedule schedule, int cycle) {
    switch (schedule) {
    case CrSchedule::FixedUp:
        return CrMode::Up;
    case CrSchedule::FixedDown:
        return CrMode::Down;
    case CrSchedule::Alternating:
        return cycle % 2 == 0 ? CrMode::Up : CrMode::Down;
    }
    return CrMode::Up;
}

} // namespace

Segment Segment::pulse(std::optional<CrMode> m, double fidelity) {
    Segment seg;
    seg.type = Type::Pulse;
    seg.fidelity = fidelity;
    seg.mode = m;
    return seg;
}

Segment Segment::window(double duration_s, std::string rate_label) {
    Segment seg;
    seg.type = Type::Window;
    seg.duration = duration_s;
    seg.rate_label = std::move(rate_label);
    return seg;
}

void ProtocolSpec::validate() const {
    if (segments.empty())
        throw std::invalid_argument("protocol needs at least one segment");
    if (cycles < 1)
        throw std::invalid_argument("cycles must be positive");
    if (sample_points < 2)
        throw std::invalid_argument("sample_points must be at least 2");
    for (const auto& seg : segments) {
        if (seg.type == Segment::Type::Window) {
            if (seg.duration <= 0.0 || !std::isfinite(seg.duration))
                throw std::invalid_argument("window duration must be positive");
            if (seg.rate_label.empty())
                throw std::invalid_argument("window segment needs a rate label");
        } else if (seg.fidelity < 0.0 || seg.fidelity > 1.0) {
            throw std::invalid_argument("pulse fidelity must be in [0, 1]");
        }
    }
    initial.validate();
}

StateVector apply_pulse(const StateVector& rho, CrMode mode, double fidelity) {
    // CR(up) exchanges populations of the pair addressed when the data qubit
    // is up: {up-up, ~down-up}; CR(down) addresses {~up-down, down-down}.
    const int a = mode == CrMode::Up ? 0 : 1;
    const int b = mode == CrMode::Up ? 2 : 3;
    StateVector out = rho;
    const double pa = rho.rho[a], pb = rho.rho[b];
    out.rho[a] = fidelity * pb + (1.0 - fidelity) * pa;
    out.rho[b] = fidelity * pa + (1.0 - fidelity) * pb;
    return out;
}

std::vector<StateVector> propagate(const StateVector& rho, const Liouvillian& l,
                                   double t, int samples) {
    if (t < 0.0 || samples < 2)
        throw std::invalid_argument("propagate needs t >= 0 and samples >= 2");
    const double dt = t / (samples - 1);
    const Matrix6d step = window_exponential(l, dt);
    std::vector<StateVector> out;
    out.reserve(static_cast<size_t>(samples));
    out.push_back(rho);
    Vector6d v = rho.rho;
    for (int i = 1; i < samples; ++i) {
        v = step * v;
        check_state(v);
        out.push_back(StateVector{v});
    }
    return out;
}

TrajectoryRecord run_protocol(const std::map<std::string, Liouvillian>& generators,
                              const ProtocolSpec& protocol) {
    protocol.validate();
    for (const auto& seg : protocol.segments)
        if (seg.type == Segment::Type::Window && !generators.count(seg.rate_label))
            throw std::invalid_argument("no generator for rate label '" + seg.rate_label + "'");

    // One step matrix per window segment, reused across cycles.
    std::vector<Matrix6d> steps(protocol.segments.size());
    for (size_t i = 0; i < protocol.segments.size(); ++i) {
        const auto& seg = protocol.segments[i];
        if (seg.type == Segment::Type::Window)
            steps[i] = window_exponential(generators.at(seg.rate_label),
                                          seg.duration / (protocol.sample_points - 1));
    }

    TrajectoryRecord rec;
    if (!generators.empty())
        rec.basis = generators.begin()->second.basis;

    StateVector state = protocol.initial;
    double t = 0.0;
    rec.times.push_back(t);
    rec.states.push_back(state);

    for (int cyc = 0; cyc < protocol.cycles; ++cyc) {
        const CrMode mode = cycle_mode(protocol.cr_schedule, cyc);
        for (size_t i = 0; i < protocol.segments.size(); ++i) {
            const auto& seg = protocol.segments[i];
            if (seg.type == Segment::Type::Pulse) {
                state = apply_pulse(state, seg.mode.value_or(mode), seg.fidelity);
                rec.times.push_back(t);
                rec.states.push_back(state);
            } else {
                const double dt = seg.duration / (protocol.sample_points - 1);
                Vector6d v = state.rho;
                for (int k = 1; k < protocol.sample_points; ++k) {
                    v = steps[i] * v;
                    check_state(v);
                    rec.times.push_back(t + k * dt);
                    rec.states.push_back(StateVector{v});
                }
                state.rho = v;
                t += seg.duration;
            }
        }
        rec.cycle_times.push_back(t);
        rec.cycle_end_states.push_back(state);
        rec.p_up_series.push_back(state.p_up());
    }
    return rec;
}

TrajectoryRecord run_qnd(const SpinSystemSpec& system,
                         const std::map<std::string, RateSet>& rates_by_label,
                         const ProtocolSpec& protocol) {
    const EigenBasis basis = diagonalize(build_hamiltonian(system), system);
    std::map<std::string, Liouvillian> generators;
    for (const auto& [label, rates] : rates_by_label)
        generators.emplace(label, assemble(basis, rates));
    return run_protocol(generators, protocol);
}

TrajectoryRecord run_rt_protocol(const SpinSystemSpec& system,
                                 const std::map<std::string, RateSet>& rates_by_label,
                                 const ProtocolSpec& protocol) {
    if (!system.is_electron_nuclear())
        throw std::invalid_argument("resonant tunneling requires an electron-nuclear system");
    const EigenBasis basis = diagonalize(build_hamiltonian(system), system);

    std::map<std::string, Liouvillian> generators;
    bool has_rt = false;
    for (const auto& [label, rates] : rates_by_label) {
        if (label == "rt") {
            // Symmetric resonant exchange: embed the 4-state generator over
            // {~down-Up, down-Down, Up, Down} into the 6-state basis.
            if (rates.gin_down != rates.gout_down)
                throw std::invalid_argument("resonant tunneling needs gin_down == gout_down");
            const RtGenerators rt = assemble_rt(basis.s(), rates.gin_down);
            Liouvillian lv;
            lv.basis = {basis.labels_2p[0], basis.labels_2p[1], basis.labels_2p[2],
                        basis.labels_2p[3], basis.labels_1p[0], basis.labels_1p[1]};
            const int idx[4] = {2, 3, 4, 5};
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    lv.l(idx[a], idx[b]) = rt.four_state(a, b);
            generators.emplace(label, lv);
            has_rt = true;
        } else {
            generators.emplace(label, assemble(basis, rates));
        }
    }
    if (!has_rt)
        throw std::invalid_argument("run_rt_protocol needs a window labeled 'rt'");
    return run_protocol(generators, protocol);
}

Matrix6d cycle_map(const std::map<std::string, Liouvillian>& generators,
                   const ProtocolSpec& protocol, CrMode mode) {
    protocol.validate();
    Matrix6d map = Matrix6d::Identity();
    for (const auto& seg : protocol.segments) {
        if (seg.type == Segment::Type::Pulse) {
            const CrMode m = seg.mode.value_or(mode);
            const int a = m == CrMode::Up ? 0 : 1;
            const int b = m == CrMode::Up ? 2 : 3;
            Matrix6d p = Matrix6d::Identity();
            p(a, a) = 1.0 - seg.fidelity;
            p(b, b) = 1.0 - seg.fidelity;
            p(a, b) = seg.fidelity;
            p(b, a) = seg.fidelity;
            map = p * map;
        } else {
            const auto it = generators.find(seg.rate_label);
            if (it == generators.end())
                throw std::invalid_argument("no generator for rate label '" + seg.rate_label + "'");
            map = window_exponential(it->second, seg.duration) * map;
        }
    }
    return map;
}

} // namespace qnd
