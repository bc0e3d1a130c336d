#include "combsync/json_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "combsync/util.hpp"

namespace combsync::io {

using nlohmann::json;

namespace {

json profile_to_obj(const noise::PhaseNoiseProfile& profile) {
    json segs = json::array();
    for (const noise::Segment& s : profile.segments()) {
        segs.push_back({{"f_start_hz", s.f_start_hz},
                        {"f_end_hz", s.f_end_hz},
                        {"level_dbc_hz", s.level_dbc_hz},
                        {"slope_db_per_decade", s.slope_db_per_decade}});
    }
    return json{{"carrier_hz", profile.carrier_hz()},
                {"white_floor_dbc_hz", profile.white_floor_dbc_hz()},
                {"segments", segs}};
}

noise::PhaseNoiseProfile profile_from_obj(const json& obj) {
    std::vector<noise::Segment> segs;
    for (const json& s : obj.at("segments")) {
        segs.push_back({s.at("f_start_hz").get<double>(), s.at("f_end_hz").get<double>(),
                        s.at("level_dbc_hz").get<double>(),
                        s.at("slope_db_per_decade").get<double>()});
    }
    const double floor = obj.value("white_floor_dbc_hz", -130.0);
    return noise::PhaseNoiseProfile(obj.at("carrier_hz").get<double>(), std::move(segs), floor);
}

json comb_to_obj(const optics::CombSpec& comb) {
    return json{{"f_rep_hz", comb.f_rep_hz},
                {"center_wavelength_m", comb.center_wavelength_m},
                {"envelope", comb.envelope}};
}

optics::CombSpec comb_from_obj(const json& obj) {
    optics::CombSpec comb;
    comb.f_rep_hz = obj.at("f_rep_hz").get<double>();
    comb.center_wavelength_m = obj.at("center_wavelength_m").get<double>();
    if (obj.contains("envelope") && obj["envelope"].is_array()) {
        comb.envelope = obj["envelope"].get<std::vector<double>>();
    } else {
        const int n_lines = obj.at("n_lines").get<int>();
        const std::string kind = obj.value("envelope", "uniform");
        if (kind == "uniform") {
            comb = optics::make_uniform_comb(comb.f_rep_hz, comb.center_wavelength_m, n_lines);
        } else if (kind == "gaussian") {
            const double fwhm = obj.value("gaussian_fwhm_lines", n_lines / 2.0);
            comb = optics::make_gaussian_comb(comb.f_rep_hz, comb.center_wavelength_m, n_lines, fwhm);
        } else {
            throw std::invalid_argument("comb envelope must be an array, \"uniform\" or \"gaussian\"");
        }
    }
    comb.validate();
    return comb;
}

json budget_to_obj(const optics::LinkBudget& budget) {
    json stages = json::array();
    for (const auto& [name, dbm] : budget.stages_dbm) {
        stages.push_back({{"name", name}, {"power_dbm", dbm}});
    }
    return json{{"stages", stages}, {"clock_to_data_ratio_db", budget.clock_to_data_ratio_db}};
}

optics::LinkBudget budget_from_obj(const json& obj) {
    optics::LinkBudget budget;
    for (const json& s : obj.at("stages")) {
        budget.stages_dbm.emplace_back(s.at("name").get<std::string>(),
                                       s.at("power_dbm").get<double>());
    }
    budget.clock_to_data_ratio_db = obj.at("clock_to_data_ratio_db").get<double>();
    budget.validate();
    return budget;
}

json temperature_to_obj(const fiber::TemperatureProfile& p) {
    using Kind = fiber::TemperatureProfile::Kind;
    switch (p.kind()) {
    case Kind::Sinusoid:
        return json{{"kind", "sinusoid"},
                    {"amplitude_K", p.amplitude_K()},
                    {"period_s", p.period_s()},
                    {"phase_rad", p.phase_rad()},
                    {"mean_K", p.mean_K()}};
    case Kind::Ramp:
        return json{{"kind", "ramp"}, {"rate_K_per_s", p.rate_K_per_s()}, {"start_K", p.start_K()}};
    case Kind::Trace:
        return json{{"kind", "trace"}, {"time_s", p.trace_time_s()}, {"temp_K", p.trace_temp_K()}};
    }
    throw std::logic_error("temperature_to_obj: bad kind");
}

fiber::TemperatureProfile temperature_from_obj(const json& obj, const std::string& base_dir) {
    const std::string kind = obj.at("kind").get<std::string>();
    if (kind == "sinusoid") {
        return fiber::TemperatureProfile::sinusoid(
            obj.value("amplitude_K", 0.0), obj.value("period_s", 86400.0),
            obj.value("phase_rad", 0.0), obj.value("mean_K", 293.15));
    }
    if (kind == "ramp") {
        return fiber::TemperatureProfile::ramp(obj.value("rate_K_per_s", 0.0),
                                               obj.value("start_K", 293.15));
    }
    if (kind == "trace") {
        if (obj.contains("file")) {
            const auto path = std::filesystem::path(base_dir) / obj["file"].get<std::string>();
            std::ifstream in(path);
            if (!in) throw std::runtime_error("cannot open temperature trace: " + path.string());
            return read_temperature_trace_csv(in);
        }
        return fiber::TemperatureProfile::trace(obj.at("time_s").get<std::vector<double>>(),
                                                obj.at("temp_K").get<std::vector<double>>());
    }
    throw std::invalid_argument("temperature kind must be sinusoid, ramp or trace");
}

json link_to_obj(const fiber::FiberLink& link) {
    return json{{"length_km", link.length_km},
                {"thermal_coeff_ps_per_km_K", link.thermal_coeff_ps_per_km_K},
                {"base_delay_s", link.base_delay_s},
                {"attenuation_db_per_km", link.attenuation_db_per_km},
                {"temperature", temperature_to_obj(link.profile)}};
}

fiber::FiberLink link_from_obj(const json& obj, const fiber::TemperatureProfile& fallback,
                               const std::string& base_dir) {
    fiber::FiberLink link;
    link.length_km = obj.at("length_km").get<double>();
    link.thermal_coeff_ps_per_km_K = obj.value("thermal_coeff_ps_per_km_K", 39.0);
    link.base_delay_s = obj.contains("base_delay_s")
                            ? obj["base_delay_s"].get<double>()
                            : fiber::base_delay_from_length(link.length_km);
    link.attenuation_db_per_km = obj.value("attenuation_db_per_km", 0.2);
    link.profile = obj.contains("temperature")
                       ? temperature_from_obj(obj["temperature"], base_dir)
                       : fallback;
    link.validate();
    return link;
}

json caching_to_obj(const protocol::CachingConfig& cfg) {
    return json{{"update_interval_s", cfg.update_interval_s},
                {"unit_interval_s", cfg.unit_interval_s},
                {"pi_resolution_s", cfg.pi_resolution_s},
                {"measurement_noise_sigma_s", cfg.measurement_noise_sigma_s},
                {"eval_rate_hz", cfg.eval_rate_hz},
                {"transport_latency_updates", cfg.transport_latency_updates},
                {"loss_probability", cfg.loss_probability}};
}

protocol::CachingConfig caching_from_obj(const json& obj) {
    protocol::CachingConfig cfg;
    cfg.update_interval_s = obj.value("update_interval_s", cfg.update_interval_s);
    cfg.unit_interval_s = obj.value("unit_interval_s", cfg.unit_interval_s);
    cfg.pi_resolution_s = obj.value("pi_resolution_s", cfg.pi_resolution_s);
    cfg.measurement_noise_sigma_s = obj.value("measurement_noise_sigma_s", cfg.measurement_noise_sigma_s);
    cfg.eval_rate_hz = obj.value("eval_rate_hz", cfg.eval_rate_hz);
    cfg.transport_latency_updates = obj.value("transport_latency_updates", cfg.transport_latency_updates);
    cfg.loss_probability = obj.value("loss_probability", cfg.loss_probability);
    cfg.validate();
    return cfg;
}

json span_to_obj(const optics::DispersiveSpan& span) {
    return json{{"length_km", span.length_m / 1000.0},
                {"dispersion_ps_per_nm_km", optics::dispersion_ps_nm_km_from_si(span.dispersion_s_per_m2)},
                {"reference_wavelength_m", span.reference_wavelength_m}};
}

optics::DispersiveSpan span_from_obj(const json& obj, double fallback_lambda) {
    optics::DispersiveSpan span;
    span.length_m = obj.at("length_km").get<double>() * 1000.0;
    span.dispersion_s_per_m2 =
        optics::dispersion_si_from_ps_nm_km(obj.at("dispersion_ps_per_nm_km").get<double>());
    span.reference_wavelength_m = obj.value("reference_wavelength_m", fallback_lambda);
    return span;
}

json scenario_to_obj(const sim::Scenario& s) {
    json feeders = json::array();
    for (const fiber::FiberLink& f : s.feeders) feeders.push_back(link_to_obj(f));
    return json{{"name", s.name},
                {"seed", s.seed},
                {"duration_s", s.duration_s},
                {"n_rus", s.n_rus},
                {"caching_enabled", s.caching_enabled},
                {"trunk", link_to_obj(s.trunk)},
                {"feeders", feeders},
                {"asymmetry", s.asymmetry},
                {"caching", caching_to_obj(s.caching)},
                {"eval_noise_sigma_s", s.eval_noise_sigma_s},
                {"comb", comb_to_obj(s.comb)},
                {"obpf_bandwidth_hz", s.obpf_bandwidth_hz},
                {"pd", json{{"bandwidth_hz", s.pd.bandwidth_hz},
                            {"responsivity_relative", s.pd.responsivity_relative}}},
                {"comb_span", span_to_obj(s.comb_span)},
                {"link_budget", budget_to_obj(s.budget)},
                {"noise_presets", s.noise_presets},
                {"histogram_bin_width_s", s.histogram_bin_width_s}};
}

sim::Scenario scenario_from_obj(const json& obj, const std::string& base_dir) {
    sim::Scenario s;
    s.name = obj.value("name", "scenario");
    s.seed = obj.value("seed", static_cast<std::uint64_t>(1));
    s.duration_s = obj.at("duration_s").get<double>();
    s.n_rus = obj.value("n_rus", 1);
    s.caching_enabled = obj.value("caching_enabled", true);

    const fiber::TemperatureProfile shared =
        obj.contains("temperature") ? temperature_from_obj(obj["temperature"], base_dir)
                                    : fiber::TemperatureProfile::sinusoid(0.0, 86400.0, 0.0, 293.15);

    s.trunk = link_from_obj(obj.at("trunk"), shared, base_dir);

    if (obj.contains("feeders")) {
        for (const json& f : obj["feeders"]) s.feeders.push_back(link_from_obj(f, shared, base_dir));
    } else if (obj.contains("feeder")) {
        for (int i = 0; i < s.n_rus; ++i) {
            s.feeders.push_back(link_from_obj(obj["feeder"], shared, base_dir));
        }
    }
    s.asymmetry = obj.value("asymmetry", 0.0);

    if (obj.contains("caching")) s.caching = caching_from_obj(obj["caching"]);
    s.eval_noise_sigma_s = obj.value("eval_noise_sigma_s", s.eval_noise_sigma_s);

    s.comb = comb_from_obj(obj.at("comb"));
    s.obpf_bandwidth_hz = obj.value("obpf_bandwidth_hz", 50e9);
    if (obj.contains("pd")) {
        s.pd.bandwidth_hz = obj["pd"].value("bandwidth_hz", 40e9);
        s.pd.responsivity_relative = obj["pd"].value("responsivity_relative", 1.0);
    }
    if (obj.contains("comb_span")) {
        s.comb_span = span_from_obj(obj["comb_span"], s.comb.center_wavelength_m);
    }
    if (obj.contains("link_budget")) s.budget = budget_from_obj(obj["link_budget"]);
    s.noise_presets = obj.value("noise_presets", std::vector<std::string>{});
    s.histogram_bin_width_s = obj.value("histogram_bin_width_s", 1e-12);

    s.validate();
    return s;
}

std::string dump_pretty(const json& obj) { return obj.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Full round-trip precision for offsets; they feed exact identity checks.
void print_full(std::ostream& out, double v) {
    out << std::setprecision(17) << v;
}

} // namespace

std::string profile_to_json(const noise::PhaseNoiseProfile& profile) {
    return dump_pretty(profile_to_obj(profile));
}

noise::PhaseNoiseProfile profile_from_json(const std::string& text) {
    return profile_from_obj(json::parse(text));
}

void save_profile(const noise::PhaseNoiseProfile& profile, const std::string& path) {
    write_text_file(path, profile_to_json(profile));
}

noise::PhaseNoiseProfile load_profile(const std::string& path) {
    return profile_from_json(read_text_file(path));
}

std::string comb_to_json(const optics::CombSpec& comb) { return dump_pretty(comb_to_obj(comb)); }

optics::CombSpec comb_from_json(const std::string& text) {
    return comb_from_obj(json::parse(text));
}

std::string budget_to_json(const optics::LinkBudget& budget) {
    return dump_pretty(budget_to_obj(budget));
}

optics::LinkBudget budget_from_json(const std::string& text) {
    return budget_from_obj(json::parse(text));
}

std::string scenario_to_json(const sim::Scenario& scenario) {
    return dump_pretty(scenario_to_obj(scenario));
}

sim::Scenario scenario_from_json(const std::string& text, const std::string& base_dir) {
    return scenario_from_obj(json::parse(text), base_dir);
}

sim::Scenario load_scenario(const std::string& path) {
    const auto dir = std::filesystem::path(path).parent_path();
    return scenario_from_json(read_text_file(path), dir.empty() ? "." : dir.string());
}

void save_scenario(const sim::Scenario& scenario, const std::string& path) {
    write_text_file(path, scenario_to_json(scenario));
}

std::uint64_t scenario_config_hash(const sim::Scenario& scenario) {
    return fnv1a64(scenario_to_obj(scenario).dump());
}

std::string report_to_json(const sim::ScenarioReport& report) {
    json rus = json::array();
    for (std::size_t i = 0; i < report.metrics.size(); ++i) {
        const sim::RuMetrics& m = report.metrics[i];
        rus.push_back({{"ru", i},
                       {"rms_wander_s", m.rms_wander_s},
                       {"rms_wander_ps", m.rms_wander_s * 1e12},
                       {"max_abs_offset_s", m.max_abs_offset_s},
                       {"max_abs_offset_ps", m.max_abs_offset_s * 1e12},
                       {"wrap_slip_count", m.wrap_slip_count},
                       {"updates_applied", m.updates_applied},
                       {"updates_lost", m.updates_lost},
                       {"samples", report.series.at(i).time_s.size()}});
    }
    json jitter = json::array();
    for (const sim::JitterRow& row : report.jitter) {
        jitter.push_back({{"preset", row.preset},
                          {"carrier_hz", row.carrier_hz},
                          {"rms_jitter_s", row.rms_jitter_s},
                          {"rms_jitter_fs", row.rms_jitter_s * 1e15}});
    }
    std::ostringstream hash_hex;
    hash_hex << std::hex << std::setw(16) << std::setfill('0') << report.config_hash;
    json obj{{"scenario", report.scenario_name},
             {"seed", report.seed},
             {"config_hash", hash_hex.str()},
             {"eval_rate_hz", report.eval_rate_hz},
             {"rus", rus},
             {"jitter", jitter},
             {"fading", json{{"harmonic_k", report.fading.harmonic_k},
                             {"freq_hz", report.fading.freq_hz},
                             {"amplitude", report.fading.amplitude},
                             {"survives", report.fading.survives},
                             {"lines_after_filter", report.fading.lines_after_filter}}},
             {"ber_estimate", report.ber_estimate},
             {"histogram", json{{"bin_width_s", report.offset_histogram.bin_width_s},
                                {"bins", report.offset_histogram.counts.size()},
                                {"total", report.offset_histogram.total()}}}};
    return dump_pretty(obj);
}

void write_phase_record_csv(std::ostream& out, const noise::PhaseRecord& record) {
    out << "time_s,phase_s\n";
    for (std::size_t i = 0; i < record.samples_s.size(); ++i) {
        print_full(out, static_cast<double>(i) / record.sample_rate_hz);
        out << ',';
        print_full(out, record.samples_s[i]);
        out << '\n';
    }
}

noise::PhaseRecord read_phase_record_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("phase record CSV: empty");
    std::vector<double> times, phases;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("phase record CSV: bad row");
        times.push_back(std::stod(line.substr(0, comma)));
        phases.push_back(std::stod(line.substr(comma + 1)));
    }
    if (times.size() < 2) throw std::runtime_error("phase record CSV: need at least two rows");
    noise::PhaseRecord record;
    record.sample_rate_hz = 1.0 / (times[1] - times[0]);
    record.samples_s = std::move(phases);
    return record;
}

void write_updates_csv(std::ostream& out, const std::vector<protocol::PhaseUpdateMsg>& msgs) {
    out << "sequence,timestamp_s,residual_two_way_s\n";
    for (const protocol::PhaseUpdateMsg& m : msgs) {
        out << m.sequence_number << ',';
        print_full(out, m.timestamp_s);
        out << ',';
        print_full(out, m.residual_two_way_s);
        out << '\n';
    }
}

void write_harmonics_csv(std::ostream& out, const std::vector<optics::Harmonic>& harmonics) {
    out << "k,freq_hz,amplitude\n";
    for (const optics::Harmonic& h : harmonics) {
        out << h.k << ',';
        print_full(out, h.freq_hz);
        out << ',';
        print_full(out, h.amplitude);
        out << '\n';
    }
}

void write_temperature_trace_csv(std::ostream& out, const fiber::TemperatureProfile& profile) {
    if (profile.kind() != fiber::TemperatureProfile::Kind::Trace) {
        throw std::invalid_argument("write_temperature_trace_csv: not a trace profile");
    }
    out << "time_s,temp_K\n";
    const auto& t = profile.trace_time_s();
    const auto& temp = profile.trace_temp_K();
    for (std::size_t i = 0; i < t.size(); ++i) {
        print_full(out, t[i]);
        out << ',';
        print_full(out, temp[i]);
        out << '\n';
    }
}

fiber::TemperatureProfile read_temperature_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("temperature CSV: empty");
    std::vector<double> times, temps;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("temperature CSV: bad row");
        times.push_back(std::stod(line.substr(0, comma)));
        temps.push_back(std::stod(line.substr(comma + 1)));
    }
    return fiber::TemperatureProfile::trace(std::move(times), std::move(temps));
}

void write_offsets_csv(std::ostream& out, const sim::ScenarioReport& report) {
    out << "time_s";
    for (std::size_t r = 0; r < report.series.size(); ++r) {
        out << ",ru" << r << "_two_way_s,ru" << r << "_synchronized_s,ru" << r
            << "_estimated_uncompensated_s";
    }
    out << '\n';
    if (report.series.empty()) return;
    const std::size_t n = report.series.front().time_s.size();
    for (std::size_t i = 0; i < n; ++i) {
        print_full(out, report.series.front().time_s[i]);
        for (const sim::RuSeries& s : report.series) {
            out << ',';
            print_full(out, s.two_way_measured_s[i]);
            out << ',';
            print_full(out, s.synchronized_s[i]);
            out << ',';
            print_full(out, s.estimated_uncompensated_s[i]);
        }
        out << '\n';
    }
}

void write_histogram_csv(std::ostream& out, const sim::HistogramBins& bins) {
    out << "bin_center_s,count\n";
    for (std::size_t i = 0; i < bins.counts.size(); ++i) {
        print_full(out, bins.bin_center_s(i));
        out << ',' << bins.counts[i] << '\n';
    }
}

} // namespace combsync::io
