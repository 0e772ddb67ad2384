#include "qndspin/reservoir.hpp"

#include <cmath>
#include <stdexcept>

namespace qnd {

void LeadSpec::validate() const {
    if (gamma0 <= 0.0)
        throw std::invalid_argument("gamma0 must be positive");
    if (temperature < 0.0)
        throw std::invalid_argument("temperature must be nonnegative");
}

void RateSet::validate() const {
    for (double r : {gin_up, gout_up, gin_down, gout_down, gamma_t1, gamma_ff})
        if (r < 0.0 || !std::isfinite(r))
            throw std::invalid_argument("rates must be finite and nonnegative");
}

double fermi_occupation(double energy_hz, const LeadSpec& lead) {
    const double de = energy_hz - lead.mu_lead;
    if (lead.temperature == 0.0) {
        if (de < 0.0)
            return 1.0;
        if (de > 0.0)
            return 0.0;
        return 0.5;
    }
    const double x = de / (kBoltzmannHzPerK * lead.temperature);
    // Avoid overflow in exp for large |x|.
    if (x > 700.0)
        return 0.0;
    if (x < -700.0)
        return 1.0;
    return 1.0 / (1.0 + std::exp(x));
}

std::vector<TransitionRates> golden_rule_rates(const TunnelingMatrix& m,
                                               const std::vector<Transition>& mus,
                                               const LeadSpec& lead,
                                               bool per_transition_fermi) {
    lead.validate();

    double f_group[2] = {0.0, 0.0}; // indexed by Channel::Up, Channel::Down
    if (!per_transition_fermi) {
        double sum[2] = {0.0, 0.0};
        int count[2] = {0, 0};
        for (const auto& t : mus) {
            const int g = t.channel == Channel::Up ? 0 : 1;
            sum[g] += t.mu;
            ++count[g];
        }
        for (int g = 0; g < 2; ++g)
            if (count[g] > 0)
                f_group[g] = fermi_occupation(sum[g] / count[g], lead);
    }

    std::vector<TransitionRates> out;
    out.reserve(mus.size());
    for (const auto& t : mus) {
        const double f = per_transition_fermi
                             ? fermi_occupation(t.mu, lead)
                             : f_group[t.channel == Channel::Up ? 0 : 1];
        const double gm = lead.gamma0 * m.m(t.i1p, t.i2p);
        out.push_back({t, gm * f, gm * (1.0 - f)});
    }
    return out;
}

ScenarioPreset preset(const std::string& name, double gamma0,
                      const std::optional<RateSet>& base_rates) {
    ScenarioPreset p;
    if (name == "fig2_T0") {
        p.rates.gin_down = gamma0;
        p.rates.gout_up = gamma0;
        p.window_s = 5.0 / gamma0;
        p.description = "zero-temperature readout: only load-down and unload-up open";
    } else if (name == "fig2_f003") {
        p.rates.gin_down = 0.97 * gamma0;
        p.rates.gout_up = 0.97 * gamma0;
        p.rates.gin_up = 0.03 * gamma0;
        p.rates.gout_down = 0.03 * gamma0;
        p.window_s = 5.0 / gamma0;
        p.description = "finite-temperature readout with lead occupation f = 0.03";
    } else if (name == "fig3a" || name == "fig4_ff") {
        if (!base_rates)
            throw std::invalid_argument("preset '" + name +
                                        "' needs calibrated tunnel rates (base_rates)");
        p.rates = *base_rates;
        p.window_s = 1e-3;
        if (name == "fig4_ff") {
            p.rates.gamma_ff = 53.3e-3;
            p.description = "calibrated electron-nuclear readout with flip-flop relaxation";
        } else {
            p.description = "calibrated electron-nuclear single-shot readout";
        }
    } else if (name == "rt_window") {
        p.rates.gin_down = 2.8e4;
        p.rates.gout_down = 2.8e4;
        p.rates.gin_up = 140.0;
        p.rates.gout_up = 5.6e4;
        p.window_s = 0.7e-3;
        p.description = "resonant-tunneling exchange window";
    } else if (name == "custom") {
        if (base_rates)
            p.rates = *base_rates;
        p.description = "user-specified rates";
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    p.rates.validate();
    return p;
}

std::vector<std::string> preset_names() {
    return {"fig2_T0", "fig2_f003", "fig3a", "fig4_ff", "rt_window", "custom"};
}

} // namespace qnd
