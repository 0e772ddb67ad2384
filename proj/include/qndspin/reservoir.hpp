#pragma once

#include "qndspin/spin_system.hpp"

#include <optional>
#include <string>
#include <vector>

// Fermi occupation of the lead and golden-rule tunnel rates, plus the named
// rate presets used by the scenario configs.

namespace qnd {

// Boltzmann constant in Hz/K (energies are expressed as frequencies).
inline constexpr double kBoltzmannHzPerK = 2.083661912e10;

struct LeadSpec {
    double gamma0 = 1.0;      // bare tunnel rate, 1/s
    double mu_lead = 0.0;     // lead chemical potential, Hz
    double temperature = 0.0; // K
    void validate() const;
};

// The four spin-resolved tunnel rates plus optional relaxation channels.
struct RateSet {
    double gin_up = 0.0;
    double gout_up = 0.0;
    double gin_down = 0.0;
    double gout_down = 0.0;
    double gamma_t1 = 0.0; // electron T1 relaxation
    double gamma_ff = 0.0; // electron-nuclear flip-flop (EN kinds only)
    void validate() const;
};

// f(E) = 1 / (1 + exp((E - mu_L) / kB T)); exact step function at T = 0.
double fermi_occupation(double energy_hz, const LeadSpec& lead);

struct TransitionRates {
    Transition transition;
    double gamma_in = 0.0;
    double gamma_out = 0.0;
};

// Gamma_in = Gamma0 * M * f(mu), Gamma_out = Gamma0 * M * (1 - f(mu)).
// By default f is evaluated once per chemical-potential group (the mean mu of
// the up and down channels); per_transition_fermi evaluates it per transition.
std::vector<TransitionRates> golden_rule_rates(const TunnelingMatrix& m,
                                               const std::vector<Transition>& mus,
                                               const LeadSpec& lead,
                                               bool per_transition_fermi = false);

struct ScenarioPreset {
    RateSet rates;
    std::optional<double> window_s; // window duration when the scenario fixes it
    std::string description;
};

// Named presets: fig2_T0, fig2_f003, fig3a, fig4_ff, rt_window, custom.
// fig2_* scale with gamma0; fig3a and fig4_ff require the four calibrated
// tunnel rates (shipped in configs/fig3a.ini) passed as base_rates.
ScenarioPreset preset(const std::string& name, double gamma0 = 1.0,
                      const std::optional<RateSet>& base_rates = std::nullopt);

std::vector<std::string> preset_names();

} // namespace qnd
