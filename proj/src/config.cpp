#include "qndspin/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace qnd {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// section -> key -> value, insertion-ordered sections
struct Tree {
    std::vector<std::string> section_order;
    std::map<std::string, std::map<std::string, std::string>> sections;

    void set(const std::string& section, const std::string& key, const std::string& value) {
        if (!sections.count(section))
            section_order.push_back(section);
        sections[section][key] = value;
    }
};

Tree parse_tree(const std::string& text, const std::vector<std::string>& overrides) {
    Tree tree;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno), "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno), "empty section name");
            if (!tree.sections.count(section))
                tree.section_order.push_back(section);
            tree.sections[section]; // create
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno), "key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno), "empty key");
        tree.set(section, key, value);
    }
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError(ov, "override must be section.key=value");
        const std::string path = trim(ov.substr(0, eq));
        const std::string value = trim(ov.substr(eq + 1));
        const auto dot = path.rfind('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
            throw ConfigError(path, "override must be section.key=value");
        tree.set(path.substr(0, dot), path.substr(dot + 1), value);
    }
    return tree;
}

double parse_double(const std::string& section, const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(x))
            throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(section + "." + key, "not a number: '" + v + "'");
    }
}

int parse_int(const std::string& section, const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(section + "." + key, "not an integer: '" + v + "'");
    }
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw ConfigError(section + "." + key, "not a boolean: '" + v + "'");
}

// Pulls keys out of `kv`, erroring on leftovers at the end.
struct KeyReader {
    const std::string section;
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) > 0; }
    std::string take(const std::string& key) {
        const auto it = kv.find(key);
        const std::string v = it->second;
        kv.erase(it);
        return v;
    }
    double take_double(const std::string& key) { return parse_double(section, key, take(key)); }
    int take_int(const std::string& key) { return parse_int(section, key, take(key)); }
    bool take_bool(const std::string& key) { return parse_bool(section, key, take(key)); }
    void finish() const {
        if (!kv.empty())
            throw ConfigError(section + "." + kv.begin()->first, "unknown key");
    }
};

SpinSystemSpec parse_system(KeyReader& r) {
    SpinSystemSpec spec;
    if (!r.has("kind"))
        throw ConfigError(r.section + ".kind", "missing required key");
    const std::string kind = r.take("kind");
    if (kind == "ising_ee")
        spec.kind = SystemKind::IsingEE;
    else if (kind == "heisenberg_ee")
        spec.kind = SystemKind::HeisenbergEE;
    else if (kind == "hyperfine_en")
        spec.kind = SystemKind::HyperfineEN;
    else if (kind == "anisotropic_en")
        spec.kind = SystemKind::AnisotropicEN;
    else
        throw ConfigError(r.section + ".kind", "unknown system kind '" + kind + "'");

    const bool derived = r.has("b0") || r.has("gamma_e") || r.has("gamma_n");
    const bool explicit_eps = r.has("eps_a") || r.has("eps_d");
    if (derived && explicit_eps)
        throw ConfigError(r.section,
                          "b0-derived splittings (b0, gamma_e, gamma_n) and explicit "
                          "eps_a/eps_d are mutually exclusive");
    if (derived) {
        for (const char* k : {"b0", "gamma_e", "gamma_n"})
            if (!r.has(k))
                throw ConfigError(r.section + "." + k, "missing (needed for derived splittings)");
        const double b0 = r.take_double("b0");
        spec.eps_a = r.take_double("gamma_e") * b0;
        spec.eps_d = r.take_double("gamma_n") * b0;
    } else {
        if (r.has("eps_a"))
            spec.eps_a = r.take_double("eps_a");
        if (r.has("eps_d"))
            spec.eps_d = r.take_double("eps_d");
    }

    if (r.has("coupling") && r.has("s2"))
        throw ConfigError(r.section, "coupling and s2 are mutually exclusive");
    if (r.has("coupling")) {
        spec.coupling = r.take_double("coupling");
    } else if (r.has("s2")) {
        const double s2 = r.take_double("s2");
        if (s2 <= 0.0 || s2 >= 0.5)
            throw ConfigError(r.section + ".s2", "must be in (0, 0.5)");
        spec.coupling = (spec.eps_a - spec.eps_d) * std::tan(2.0 * std::asin(std::sqrt(s2)));
    }

    const std::pair<const char*, std::pair<int, int>> dip[] = {
        {"dipolar_xx", {0, 0}}, {"dipolar_xz", {0, 2}}, {"dipolar_yy", {1, 1}},
        {"dipolar_zx", {2, 0}}, {"dipolar_zz", {2, 2}}};
    for (const auto& [key, idx] : dip)
        if (r.has(key))
            spec.dipolar(idx.first, idx.second) = r.take_double(key);

    if (r.has("degenerate_mode"))
        spec.degenerate_mode = r.take_bool("degenerate_mode");

    r.finish();
    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw ConfigError(r.section, e.what());
    }
    return spec;
}

void parse_rates(const std::string& label, KeyReader& r, RunConfig& cfg) {
    RateSet rates;
    if (r.has("preset")) {
        const std::string name = r.take("preset");
        const double gamma0 = r.has("gamma0") ? r.take_double("gamma0") : 1.0;
        std::optional<RateSet> base;
        if (name == "fig3a" || name == "fig4_ff" || name == "custom") {
            RateSet b;
            if (r.has("gin_up"))
                b.gin_up = r.take_double("gin_up");
            if (r.has("gout_up"))
                b.gout_up = r.take_double("gout_up");
            if (r.has("gin_down"))
                b.gin_down = r.take_double("gin_down");
            if (r.has("gout_down"))
                b.gout_down = r.take_double("gout_down");
            base = b;
        }
        try {
            const ScenarioPreset p = preset(name, gamma0, base);
            rates = p.rates;
            if (p.window_s)
                cfg.preset_windows[label] = *p.window_s;
        } catch (const std::exception& e) {
            throw ConfigError(r.section + ".preset", e.what());
        }
        cfg.rate_presets[label] = name;
    } else {
        for (const auto& [key, field] :
             std::initializer_list<std::pair<const char*, double RateSet::*>>{
                 {"gin_up", &RateSet::gin_up},
                 {"gout_up", &RateSet::gout_up},
                 {"gin_down", &RateSet::gin_down},
                 {"gout_down", &RateSet::gout_down}})
            if (r.has(key))
                rates.*field = r.take_double(key);
    }
    if (r.has("gamma_t1"))
        rates.gamma_t1 = r.take_double("gamma_t1");
    if (r.has("gamma_ff"))
        rates.gamma_ff = r.take_double("gamma_ff");
    r.finish();
    try {
        rates.validate();
    } catch (const std::exception& e) {
        throw ConfigError(r.section, e.what());
    }
    cfg.rates[label] = rates;
}

std::vector<Segment> parse_segments(const std::string& section, const std::string& value,
                                    const RunConfig& cfg, double pulse_fidelity) {
    std::vector<Segment> out;
    std::istringstream in(value);
    std::string token;
    while (in >> token) {
        if (token == "pulse" || token == "pulse(up)" || token == "pulse(down)") {
            std::optional<CrMode> mode;
            if (token == "pulse(up)")
                mode = CrMode::Up;
            else if (token == "pulse(down)")
                mode = CrMode::Down;
            out.push_back(Segment::pulse(mode, pulse_fidelity));
            continue;
        }
        // window:<label>:<duration_s | preset>
        if (token.rfind("window:", 0) == 0) {
            const std::string rest = token.substr(7);
            const auto colon = rest.find(':');
            if (colon == std::string::npos)
                throw ConfigError(section + ".segments",
                                  "window token must be window:<label>:<duration>");
            const std::string label = rest.substr(0, colon);
            const std::string dur = rest.substr(colon + 1);
            if (!cfg.rates.count(label))
                throw ConfigError(section + ".segments",
                                  "window references undefined rate label '" + label + "'");
            double duration;
            if (dur == "preset") {
                const auto it = cfg.preset_windows.find(label);
                if (it == cfg.preset_windows.end())
                    throw ConfigError(section + ".segments",
                                      "duration 'preset' needs [rates." + label +
                                          "] to name a preset that fixes a window");
                duration = it->second;
            } else {
                duration = parse_double(section, "segments", dur);
            }
            out.push_back(Segment::window(duration, label));
            continue;
        }
        throw ConfigError(section + ".segments", "unknown segment token '" + token + "'");
    }
    if (out.empty())
        throw ConfigError(section + ".segments", "no segments given");
    return out;
}

void parse_protocol(KeyReader& r, RunConfig& cfg) {
    ProtocolSpec& p = cfg.protocol;

    double pulse_fidelity = 1.0;
    if (r.has("pulse_fidelity"))
        pulse_fidelity = r.take_double("pulse_fidelity");
    if (pulse_fidelity < 0.0 || pulse_fidelity > 1.0)
        throw ConfigError(r.section + ".pulse_fidelity", "must be in [0, 1]");

    if (!r.has("segments"))
        throw ConfigError(r.section + ".segments", "missing required key");
    p.segments = parse_segments(r.section, r.take("segments"), cfg, pulse_fidelity);

    if (r.has("cycles"))
        p.cycles = r.take_int("cycles");
    if (p.cycles < 1)
        throw ConfigError(r.section + ".cycles", "must be positive");

    if (r.has("cr_schedule")) {
        const std::string s = r.take("cr_schedule");
        if (s == "fixed_up")
            p.cr_schedule = CrSchedule::FixedUp;
        else if (s == "fixed_down")
            p.cr_schedule = CrSchedule::FixedDown;
        else if (s == "alternating")
            p.cr_schedule = CrSchedule::Alternating;
        else
            throw ConfigError(r.section + ".cr_schedule", "unknown schedule '" + s + "'");
    }

    cfg.initial_side = r.has("initial") ? r.take("initial") : "up";
    if (cfg.initial_side == "up") {
        p.initial = basis_state(2); // data up, ancilla relaxed
    } else if (cfg.initial_side == "down") {
        p.initial = basis_state(3);
    } else if (cfg.initial_side == "custom") {
        if (!r.has("initial_state"))
            throw ConfigError(r.section + ".initial_state",
                              "required when initial = custom (6 comma-separated populations)");
        const std::string v = r.take("initial_state");
        std::istringstream in(v);
        std::string part;
        int i = 0;
        while (std::getline(in, part, ',')) {
            if (i >= 6)
                throw ConfigError(r.section + ".initial_state", "expected 6 values");
            p.initial.rho[i++] = parse_double(r.section, "initial_state", trim(part));
        }
        if (i != 6)
            throw ConfigError(r.section + ".initial_state", "expected 6 values");
        try {
            p.initial.validate();
        } catch (const std::exception& e) {
            throw ConfigError(r.section + ".initial_state", e.what());
        }
    } else {
        throw ConfigError(r.section + ".initial", "must be up, down or custom");
    }

    if (r.has("sample_points"))
        p.sample_points = r.take_int("sample_points");
    if (p.sample_points < 2)
        throw ConfigError(r.section + ".sample_points", "must be at least 2");

    r.finish();
}

SweepConfig parse_sweep(KeyReader& r) {
    SweepConfig s;
    for (const char* k : {"b0_min", "b0_max", "b0_steps", "dxz_min", "dxz_max", "dxz_steps",
                          "gamma_n", "gamma_e"})
        if (!r.has(k))
            throw ConfigError(r.section + "." + k, "missing required key");
    s.b0_min = r.take_double("b0_min");
    s.b0_max = r.take_double("b0_max");
    s.b0_steps = r.take_int("b0_steps");
    s.dxz_min = r.take_double("dxz_min");
    s.dxz_max = r.take_double("dxz_max");
    s.dxz_steps = r.take_int("dxz_steps");
    s.gamma_n = r.take_double("gamma_n");
    s.gamma_e = r.take_double("gamma_e");
    if (s.b0_steps < 1 || s.dxz_steps < 1)
        throw ConfigError(r.section, "step counts must be at least 1");
    r.finish();
    return s;
}

} // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
    const Tree tree = parse_tree(text, overrides);

    if (!tree.sections.count("system"))
        throw ConfigError("system",
                          "missing required section ([system]; plus [rates.<label>] and "
                          "[protocol] for simulation, or [sweep])");

    RunConfig cfg;
    std::set<std::string> known;

    {
        KeyReader r{"system", tree.sections.at("system")};
        cfg.system = parse_system(r);
        known.insert("system");
    }

    for (const auto& section : tree.section_order) {
        if (section.rfind("rates.", 0) == 0) {
            const std::string label = section.substr(6);
            if (label.empty())
                throw ConfigError(section, "rate section needs a label: [rates.<label>]");
            KeyReader r{section, tree.sections.at(section)};
            parse_rates(label, r, cfg);
            known.insert(section);
        }
    }

    const bool has_sweep = tree.sections.count("sweep") > 0;
    const bool has_protocol = tree.sections.count("protocol") > 0;
    if (!has_protocol && !has_sweep)
        throw ConfigError("protocol", "missing required section (or a [sweep] section)");

    if (has_protocol) {
        if (cfg.rates.empty())
            throw ConfigError("rates", "at least one [rates.<label>] section is required");
        KeyReader r{"protocol", tree.sections.at("protocol")};
        parse_protocol(r, cfg);
        known.insert("protocol");
        try {
            cfg.protocol.validate();
        } catch (const std::exception& e) {
            throw ConfigError("protocol", e.what());
        }
    }

    if (has_sweep) {
        KeyReader r{"sweep", tree.sections.at("sweep")};
        cfg.sweep = parse_sweep(r);
        known.insert("sweep");
        if (cfg.system.kind != SystemKind::AnisotropicEN)
            throw ConfigError("sweep", "hybridization sweep requires system.kind = anisotropic_en");
    }

    if (tree.sections.count("output")) {
        KeyReader r{"output", tree.sections.at("output")};
        if (r.has("dir"))
            cfg.output.dir = r.take("dir");
        if (r.has("prefix"))
            cfg.output.prefix = r.take("prefix");
        r.finish();
        known.insert("output");
    }

    for (const auto& section : tree.section_order)
        if (!known.count(section))
            throw ConfigError(section, "unknown section");

    return cfg;
}

RunConfig parse_config_file(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path, "cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), overrides);
}

} // namespace qnd
