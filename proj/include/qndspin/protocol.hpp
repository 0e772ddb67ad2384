#pragma once

#include "qndspin/liouvillian.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Scripted QND measurement sequences: conditional pi-pulses and read/load or
// resonant-tunneling windows, propagated as classical population vectors.

namespace qnd {

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CrMode { Up, Down };
enum class CrSchedule { FixedUp, FixedDown, Alternating };

struct Segment {
    enum class Type { Pulse, Window };
    Type type = Type::Pulse;
    double duration = 0.0;        // s, windows only
    std::string rate_label;       // windows only
    double fidelity = 1.0;        // pulses only
    std::optional<CrMode> mode;   // pulses; empty = follow the cycle schedule

    static Segment pulse(std::optional<CrMode> m = std::nullopt, double fidelity = 1.0);
    static Segment window(double duration_s, std::string rate_label);
};

struct ProtocolSpec {
    std::vector<Segment> segments; // one measurement cycle
    int cycles = 1;
    CrSchedule cr_schedule = CrSchedule::FixedUp;
    StateVector initial;
    int sample_points = 2; // per window, endpoints included
    void validate() const;
};

struct TrajectoryRecord {
    std::array<std::string, 6> basis;
    std::vector<double> times;         // within-window samples, absolute s
    std::vector<StateVector> states;
    std::vector<double> cycle_times;   // absolute time at each cycle end
    std::vector<StateVector> cycle_end_states;
    std::vector<double> p_up_series;   // P(up) at each cycle end
};

// Classical population mix of the addressed pair: CR(up) acts on
// {up-up, ~down-up}, CR(down) on {~up-down, down-down}.
StateVector apply_pulse(const StateVector& rho, CrMode mode, double fidelity);

// rho(t_k) = exp(L t_k) rho(0) at `samples` uniform times spanning [0, t].
std::vector<StateVector> propagate(const StateVector& rho, const Liouvillian& l,
                                   double t, int samples);

// Core engine: executes `cycles` repetitions of the segment list, switching
// generators per window label.
TrajectoryRecord run_protocol(const std::map<std::string, Liouvillian>& generators,
                              const ProtocolSpec& protocol);

// Assembles the generator for each rate label from the system spec and runs.
TrajectoryRecord run_qnd(const SpinSystemSpec& system,
                         const std::map<std::string, RateSet>& rates_by_label,
                         const ProtocolSpec& protocol);

// Same contract as run_qnd for sequences containing resonant-tunneling
// windows; requires at least one window using the rt rates.
TrajectoryRecord run_rt_protocol(const SpinSystemSpec& system,
                                 const std::map<std::string, RateSet>& rates_by_label,
                                 const ProtocolSpec& protocol);

// Linear map of one full cycle (pulse mode fixed), for stationary analysis.
Matrix6d cycle_map(const std::map<std::string, Liouvillian>& generators,
                   const ProtocolSpec& protocol, CrMode mode);

} // namespace qnd
