#include "qndspin/analysis.hpp"
#include "qndspin/config.hpp"
#include "qndspin/protocol.hpp"
#include "qndspin/reservoir.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using namespace qnd;

// Scientific notation, 12 significant digits.
std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", x);
    return buf;
}

struct CsvWriter {
    std::ofstream out;
    explicit CsvWriter(const fs::path& path) : out(path, std::ios::binary) {
        if (!out)
            throw std::runtime_error("cannot open output file " + path.string());
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i)
            out << (i ? "," : "") << cells[i];
        out << "\n";
    }
};

fs::path output_path(const RunConfig& cfg, const std::string& out_dir, const std::string& suffix) {
    const fs::path dir = out_dir.empty() ? fs::path(cfg.output.dir) : fs::path(out_dir);
    fs::create_directories(dir);
    return dir / (cfg.output.prefix + "_" + suffix + ".csv");
}

bool uses_rt(const RunConfig& cfg) {
    return cfg.rates.count("rt") > 0;
}

TrajectoryRecord run(const RunConfig& cfg, const ProtocolSpec& protocol) {
    return uses_rt(cfg) ? run_rt_protocol(cfg.system, cfg.rates, protocol)
                        : run_qnd(cfg.system, cfg.rates, protocol);
}

void write_trajectory(const RunConfig& cfg, const TrajectoryRecord& rec,
                      const std::string& out_dir) {
    CsvWriter w(output_path(cfg, out_dir, "trajectory"));
    std::vector<std::string> header = {"time_s"};
    for (const auto& label : rec.basis)
        header.push_back(label);
    w.row(header);
    for (size_t i = 0; i < rec.times.size(); ++i) {
        std::vector<std::string> cells = {num(rec.times[i])};
        for (int k = 0; k < 6; ++k)
            cells.push_back(num(rec.states[i].rho[k]));
        w.row(cells);
    }
}

void write_cycles(const RunConfig& cfg, const TrajectoryRecord& rec, const std::string& out_dir) {
    CsvWriter w(output_path(cfg, out_dir, "cycles"));
    std::vector<std::string> header = {"cycle", "time_s", "p_up"};
    for (const auto& label : rec.basis)
        header.push_back(label);
    w.row(header);
    for (size_t i = 0; i < rec.cycle_times.size(); ++i) {
        std::vector<std::string> cells = {std::to_string(i + 1), num(rec.cycle_times[i]),
                                          num(rec.p_up_series[i])};
        for (int k = 0; k < 6; ++k)
            cells.push_back(num(rec.cycle_end_states[i].rho[k]));
        w.row(cells);
    }
}

void print_fit(const FlipRateFit& fit) {
    std::cout << "gamma_up=" << num(fit.gamma_up) << "\n"
              << "gamma_down=" << num(fit.gamma_down) << "\n"
              << "equilibrium_p_up=" << num(fit.equilibrium_p_up) << "\n"
              << "residual_rms=" << num(fit.residual_rms) << "\n"
              << "iterations=" << fit.iterations << "\n"
              << "lower_bound_warning=" << (fit.lower_bound_warning ? "true" : "false") << "\n";
}

Series cycle_series(const TrajectoryRecord& rec) {
    return Series{rec.cycle_times, rec.p_up_series};
}

int cmd_simulate(const std::string& config_path, const std::vector<std::string>& sets,
                 const std::string& out_dir) {
    const RunConfig cfg = parse_config_file(config_path, sets);
    const TrajectoryRecord rec = run(cfg, cfg.protocol);
    write_trajectory(cfg, rec, out_dir);
    write_cycles(cfg, rec, out_dir);

    std::cout << "cycles=" << rec.cycle_times.size() << "\n"
              << "final_time_s=" << num(rec.cycle_times.back()) << "\n"
              << "final_p_up=" << num(rec.p_up_series.back()) << "\n";
    if (rec.cycle_times.size() >= 3) {
        try {
            const Series s = cycle_series(rec);
            const FlipRateFit fit = cfg.initial_side == "down"
                                        ? fit_flip_rates(Series{}, s)
                                        : fit_flip_rates(s, Series{});
            print_fit(fit);
        } catch (const FitError& e) {
            std::cerr << "note: flip-rate fit skipped (" << e.what() << ")\n";
        }
    }
    return 0;
}

Series read_cycle_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ": empty file");
    std::vector<std::string> header;
    {
        std::istringstream h(line);
        std::string cell;
        while (std::getline(h, cell, ','))
            header.push_back(cell);
    }
    int t_col = -1, p_col = -1;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "time_s")
            t_col = static_cast<int>(i);
        if (header[i] == "p_up")
            p_col = static_cast<int>(i);
    }
    if (t_col < 0 || p_col < 0)
        throw std::runtime_error(path + ": needs time_s and p_up columns");
    Series s;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ','))
            cells.push_back(cell);
        s.t.push_back(std::stod(cells.at(static_cast<size_t>(t_col))));
        s.p_up.push_back(std::stod(cells.at(static_cast<size_t>(p_col))));
    }
    return s;
}

int cmd_fit(const std::string& config_path, const std::vector<std::string>& sets,
            const std::string& csv_up, const std::string& csv_down) {
    Series up, down;
    if (!csv_up.empty() || !csv_down.empty()) {
        if (!csv_up.empty())
            up = read_cycle_csv(csv_up);
        if (!csv_down.empty())
            down = read_cycle_csv(csv_down);
    } else if (!config_path.empty()) {
        const RunConfig cfg = parse_config_file(config_path, sets);
        ProtocolSpec p_up_init = cfg.protocol;
        p_up_init.initial = basis_state(2);
        ProtocolSpec p_down_init = cfg.protocol;
        p_down_init.initial = basis_state(3);
        up = cycle_series(run(cfg, p_up_init));
        down = cycle_series(run(cfg, p_down_init));
    } else {
        throw ConfigError("fit", "needs --config or --csv-up/--csv-down");
    }
    print_fit(fit_flip_rates(up, down));
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& sets,
              const std::string& out_dir, int jobs) {
    const RunConfig cfg = parse_config_file(config_path, sets);
    if (!cfg.sweep)
        throw ConfigError("sweep", "config has no [sweep] section");
    const SweepConfig& s = *cfg.sweep;
    const SweepResult res =
        sweep_hybridization(cfg.system, s.b0_min, s.b0_max, s.b0_steps, s.dxz_min, s.dxz_max,
                            s.dxz_steps, s.gamma_n, s.gamma_e, jobs);
    CsvWriter w(output_path(cfg, out_dir, "sweep"));
    w.row({"b0_T", "dxz_hz", "m_up_dndn", "m_up_updn"});
    for (size_t i = 0; i < res.b0.size(); ++i)
        for (size_t j = 0; j < res.dxz.size(); ++j)
            w.row({num(res.b0[i]), num(res.dxz[j]),
                   num(res.m_up_dndn(static_cast<int>(i), static_cast<int>(j))),
                   num(res.m_up_updn(static_cast<int>(i), static_cast<int>(j)))});
    std::cout << "points=" << res.b0.size() * res.dxz.size() << "\n";
    return 0;
}

int cmd_presets() {
    for (const auto& name : preset_names()) {
        ScenarioPreset p;
        if (name == "fig3a" || name == "fig4_ff")
            p = preset(name, 1.0, RateSet{});
        else
            p = preset(name);
        std::cout << name << ": " << p.description;
        if (p.window_s)
            std::cout << " (window " << *p.window_s << " s at gamma0 = 1)";
        std::cout << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rate-equation simulator for repetitive spin-qubit readout"};
    app.require_subcommand(1);

    std::string config_path, out_dir, csv_up, csv_down;
    std::vector<std::string> sets;
    int jobs = 1;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", config_path, "run configuration file");
        if (config_required)
            c->required();
        sub->add_option("--set", sets, "override a config key (section.key=value)");
        sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
        sub->add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
    };

    auto* sim = app.add_subcommand("simulate", "run a protocol and write trajectory/cycle CSVs");
    add_common(sim, true);

    auto* fit = app.add_subcommand("fit", "extract flipping rates from a config or CSV pair");
    add_common(fit, false);
    fit->add_option("--csv-up", csv_up, "cycle CSV of the run initialized up");
    fit->add_option("--csv-down", csv_down, "cycle CSV of the run initialized down");

    auto* sweep = app.add_subcommand("sweep", "grid of selection-rule amplitudes");
    add_common(sweep, true);

    app.add_subcommand("presets", "list named rate presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(config_path, sets, out_dir);
        if (fit->parsed())
            return cmd_fit(config_path, sets, csv_up, csv_down);
        if (sweep->parsed())
            return cmd_sweep(config_path, sets, out_dir, jobs);
        return cmd_presets();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const FitError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return 4;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
