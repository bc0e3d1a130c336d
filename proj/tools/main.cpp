#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "combsync/json_io.hpp"
#include "combsync/presets.hpp"
#include "combsync/sim.hpp"

namespace fs = std::filesystem;
using combsync::noise::PhaseNoiseProfile;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1; // bad scenario / missing preset / bad args
constexpr int kExitIo = 2;      // output write failure

struct GlobalOpts {
    std::string scenario_path;
    std::string out_dir = ".";
    std::int64_t seed_override = -1;
    std::string format = "table"; // table | json | csv
    bool msg_log = false;
};

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

combsync::sim::Scenario load_scenario_or_default(const GlobalOpts& opts) {
    if (opts.scenario_path.empty()) return combsync::sim::default_scenario();
    return combsync::io::load_scenario(opts.scenario_path);
}

std::string summary_line(const combsync::sim::ScenarioReport& report) {
    std::ostringstream line;
    line << "summary scenario=" << report.scenario_name << " seed=" << report.seed;
    line << std::setprecision(6);
    for (std::size_t r = 0; r < report.metrics.size(); ++r) {
        const auto& m = report.metrics[r];
        const std::string suffix = r == 0 ? "" : "_ru" + std::to_string(r);
        line << " rms_wander_ps" << suffix << "=" << m.rms_wander_s * 1e12;
        line << " max_offset_ps" << suffix << "=" << m.max_abs_offset_s * 1e12;
        line << " wrap_slips" << suffix << "=" << m.wrap_slip_count;
    }
    for (const auto& row : report.jitter) {
        line << " jitter_fs[" << row.preset << "]=" << row.rms_jitter_s * 1e15;
    }
    line << " fading_amplitude=" << report.fading.amplitude;
    if (!std::isnan(report.ber_estimate)) line << " ber=" << report.ber_estimate;
    return line.str();
}

int run_one_scenario(combsync::sim::Scenario scenario, const GlobalOpts& opts,
                     const fs::path& out_dir) {
    if (opts.seed_override >= 0) scenario.seed = static_cast<std::uint64_t>(opts.seed_override);

    const combsync::sim::ScenarioReport report = combsync::sim::run_scenario(scenario);

    try {
        fs::create_directories(out_dir);
        write_file(out_dir / "report.json", combsync::io::report_to_json(report));

        std::ostringstream offsets;
        combsync::io::write_offsets_csv(offsets, report);
        write_file(out_dir / "offsets.csv", offsets.str());

        std::ostringstream hist;
        combsync::io::write_histogram_csv(hist, report.offset_histogram);
        write_file(out_dir / "histogram.csv", hist.str());

        if (opts.msg_log) {
            for (std::size_t r = 0; r < report.update_logs.size(); ++r) {
                const auto path = out_dir / ("messages_ru" + std::to_string(r) + ".bin");
                std::ofstream bin(path, std::ios::binary);
                if (!bin) throw std::runtime_error("cannot open for writing: " + path.string());
                combsync::protocol::write_update_log(bin, report.update_logs[r]);

                std::ostringstream events;
                combsync::io::write_updates_csv(events, report.update_logs[r]);
                write_file(out_dir / ("messages_ru" + std::to_string(r) + ".csv"), events.str());
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }

    std::cout << summary_line(report) << "\n";
    return kExitOk;
}

int cmd_run(const GlobalOpts& opts) {
    // A directory of scenarios runs each one into its own subdirectory.
    if (!opts.scenario_path.empty() && fs::is_directory(opts.scenario_path)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(opts.scenario_path)) {
            if (entry.path().extension() == ".json") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            std::cerr << "error: no .json scenarios in " << opts.scenario_path << "\n";
            return kExitInvalid;
        }
        for (const fs::path& file : files) {
            combsync::sim::Scenario scenario;
            try {
                scenario = combsync::io::load_scenario(file.string());
            } catch (const std::exception& e) {
                std::cerr << "error: " << file.string() << ": " << e.what() << "\n";
                return kExitInvalid;
            }
            const int rc = run_one_scenario(scenario, opts, fs::path(opts.out_dir) / file.stem());
            if (rc != kExitOk) return rc;
        }
        return kExitOk;
    }

    combsync::sim::Scenario scenario;
    try {
        scenario = load_scenario_or_default(opts);
    } catch (const std::exception& e) {
        std::cerr << "error: invalid scenario: " << e.what() << "\n";
        return kExitInvalid;
    }
    return run_one_scenario(std::move(scenario), opts, opts.out_dir);
}

int cmd_validate(const GlobalOpts& opts) {
    try {
        const combsync::sim::Scenario scenario = load_scenario_or_default(opts);
        scenario.validate();
        std::cout << "scenario OK: " << scenario.name << " (duration " << scenario.duration_s
                  << " s, " << scenario.n_rus << " RU)\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: invalid scenario: " << e.what() << "\n";
        return kExitInvalid;
    }
}

int cmd_presets(const GlobalOpts& opts) {
    try {
        const auto names = combsync::presets::names();
        if (opts.format == "json") {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& name : names) {
                const PhaseNoiseProfile p = combsync::presets::load(name);
                const auto fig = combsync::noise::integrate_jitter(p, combsync::presets::standard_band());
                arr.push_back({{"name", name},
                               {"description", combsync::presets::describe(name)},
                               {"carrier_hz", p.carrier_hz()},
                               {"rms_jitter_s", fig.rms_jitter_s}});
            }
            std::cout << arr.dump(2) << "\n";
        } else if (opts.format == "csv") {
            std::cout << "name,carrier_hz,rms_jitter_s\n" << std::setprecision(17);
            for (const auto& name : names) {
                const PhaseNoiseProfile p = combsync::presets::load(name);
                const auto fig = combsync::noise::integrate_jitter(p, combsync::presets::standard_band());
                std::cout << name << ',' << p.carrier_hz() << ',' << fig.rms_jitter_s << '\n';
            }
        } else {
            for (const auto& name : names) {
                const PhaseNoiseProfile p = combsync::presets::load(name);
                const auto fig = combsync::noise::integrate_jitter(p, combsync::presets::standard_band());
                std::cout << name << "  carrier " << p.carrier_hz() / 1e9 << " GHz  jitter "
                          << fig.rms_jitter_s * 1e15 << " fs  (" << combsync::presets::describe(name)
                          << ")\n";
            }
        }
        if (opts.out_dir != ".") {
            fs::create_directories(opts.out_dir);
            for (const auto& name : names) {
                combsync::io::save_profile(combsync::presets::load(name),
                                           (fs::path(opts.out_dir) / (name + ".json")).string());
            }
            std::cout << "exported " << names.size() << " presets to " << opts.out_dir << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}

int cmd_fading_table(const GlobalOpts& opts, double dispersion_ps_nm_km,
                     std::vector<double> filters_ghz, std::vector<double> lengths_km) {
    try {
        const combsync::sim::Scenario scenario = load_scenario_or_default(opts);
        if (filters_ghz.empty()) filters_ghz = {25.0, 50.0, 100.0, 200.0};
        if (lengths_km.empty()) lengths_km = {0.0, 1.0, 2.0, 5.0, 13.0, 25.0};

        std::ostringstream csv;
        csv << "filter_ghz,length_km,k,freq_hz,amplitude\n";
        csv << std::setprecision(17);
        for (const double filter_ghz : filters_ghz) {
            const auto filtered = combsync::optics::filtered_comb(scenario.comb, filter_ghz * 1e9);
            for (const double length_km : lengths_km) {
                combsync::optics::DispersiveSpan span;
                span.length_m = length_km * 1000.0;
                span.dispersion_s_per_m2 =
                    combsync::optics::dispersion_si_from_ps_nm_km(dispersion_ps_nm_km);
                span.reference_wavelength_m = scenario.comb.center_wavelength_m;
                for (const auto& h :
                     combsync::optics::rf_comb_harmonics(filtered, span, scenario.pd)) {
                    csv << filter_ghz << ',' << length_km << ',' << h.k << ',' << h.freq_hz << ','
                        << h.amplitude << '\n';
                }
            }
        }

        if (opts.out_dir != ".") {
            fs::create_directories(opts.out_dir);
            write_file(fs::path(opts.out_dir) / "fading_table.csv", csv.str());
            std::cout << "wrote " << (fs::path(opts.out_dir) / "fading_table.csv").string() << "\n";
        } else {
            std::cout << csv.str();
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}

int cmd_jitter(const GlobalOpts& opts) {
    try {
        const combsync::sim::Scenario scenario = load_scenario_or_default(opts);
        const auto names = scenario.noise_presets.empty() ? combsync::presets::names()
                                                          : scenario.noise_presets;
        const auto rows = combsync::sim::jitter_report(names);
        const auto fading = combsync::sim::fading_check(scenario);

        if (opts.format == "json") {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& row : rows) {
                arr.push_back({{"preset", row.preset},
                               {"carrier_hz", row.carrier_hz},
                               {"rms_jitter_s", row.rms_jitter_s}});
            }
            nlohmann::json obj{{"jitter", arr},
                               {"fading", {{"harmonic_k", fading.harmonic_k},
                                           {"freq_hz", fading.freq_hz},
                                           {"amplitude", fading.amplitude},
                                           {"survives", fading.survives}}}};
            std::cout << obj.dump(2) << "\n";
        } else if (opts.format == "csv") {
            std::cout << "preset,carrier_hz,rms_jitter_s\n" << std::setprecision(17);
            for (const auto& row : rows) {
                std::cout << row.preset << ',' << row.carrier_hz << ',' << row.rms_jitter_s << '\n';
            }
            std::cout << "fading_k,fading_freq_hz,fading_amplitude,survives\n"
                      << fading.harmonic_k << ',' << fading.freq_hz << ',' << fading.amplitude
                      << ',' << (fading.survives ? 1 : 0) << '\n';
        } else {
            std::cout << std::left;
            for (const auto& row : rows) {
                std::ostringstream jit;
                if (row.rms_jitter_s >= 1e-12) {
                    jit << std::setprecision(4) << row.rms_jitter_s * 1e12 << " ps";
                } else {
                    jit << std::setprecision(4) << row.rms_jitter_s * 1e15 << " fs";
                }
                std::cout << std::setw(24) << row.preset << std::setw(10)
                          << row.carrier_hz / 1e9 << " GHz   " << jit.str() << "\n";
            }
            std::cout << "carrier fading: k=" << fading.harmonic_k << " ("
                      << fading.freq_hz / 1e9 << " GHz) amplitude=" << std::setprecision(4)
                      << fading.amplitude << " survives=" << (fading.survives ? "yes" : "no")
                      << " lines=" << fading.lines_after_filter << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"combsync: clock phase caching and comb carrier distribution simulator"};
    app.require_subcommand(1);

    GlobalOpts opts;
    double dispersion_ps_nm_km = 17.0;
    std::vector<double> filters_ghz, lengths_km;

    const auto add_common = [&opts](CLI::App* cmd, bool with_out) {
        cmd->add_option("--scenario", opts.scenario_path, "Scenario JSON file (built-in default when omitted)");
        if (with_out) cmd->add_option("--out", opts.out_dir, "Output directory");
        cmd->add_option("--seed", opts.seed_override, "Override the scenario seed");
        cmd->add_option("--format", opts.format, "Output format: table|json")
            ->check(CLI::IsMember({"table", "json", "csv"}));
    };

    CLI::App* run = app.add_subcommand("run", "Run a scenario and write report + CSV series");
    add_common(run, true);
    run->add_flag("--msg-log", opts.msg_log, "Also write binary phase-update logs per RU");

    CLI::App* validate = app.add_subcommand("validate", "Check a scenario file without writing anything");
    add_common(validate, false);

    CLI::App* presets_cmd = app.add_subcommand("presets", "List (and optionally export) noise presets");
    add_common(presets_cmd, true);

    CLI::App* fading = app.add_subcommand("fading-table",
                                          "Harmonic amplitude vs filter bandwidth and fiber length");
    add_common(fading, true);
    fading->add_option("--dispersion-ps-nm-km", dispersion_ps_nm_km, "Fiber dispersion for the sweep");
    fading->add_option("--filters-ghz", filters_ghz, "Filter bandwidths to sweep");
    fading->add_option("--lengths-km", lengths_km, "Fiber lengths to sweep");

    CLI::App* jitter = app.add_subcommand("jitter", "Preset jitter table and carrier fading check");
    add_common(jitter, false);

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(opts);
    if (validate->parsed()) return cmd_validate(opts);
    if (presets_cmd->parsed()) return cmd_presets(opts);
    if (fading->parsed()) return cmd_fading_table(opts, dispersion_ps_nm_km, filters_ghz, lengths_km);
    if (jitter->parsed()) return cmd_jitter(opts);
    return kExitInvalid;
}
