#include "combsync/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "combsync/json_io.hpp"
#include "combsync/presets.hpp"
#include "combsync/util.hpp"

namespace combsync::sim {

void Scenario::validate() const {
    if (!(duration_s > 0.0)) throw std::invalid_argument("Scenario: duration must be > 0");
    if (n_rus < 1) throw std::invalid_argument("Scenario: need at least one RU");
    if (!feeders.empty() && static_cast<int>(feeders.size()) != n_rus) {
        throw std::invalid_argument("Scenario: feeder count must match n_rus (or be empty)");
    }
    if (asymmetry < -1.0 || asymmetry > 1.0) {
        throw std::invalid_argument("Scenario: asymmetry must be in [-1, 1]");
    }
    trunk.validate();
    for (const fiber::FiberLink& f : feeders) f.validate();
    caching.validate();
    if (eval_noise_sigma_s < 0.0) throw std::invalid_argument("Scenario: eval noise must be >= 0");
    comb.validate();
    if (!(obpf_bandwidth_hz > 0.0)) throw std::invalid_argument("Scenario: OBPF bandwidth must be > 0");
    if (!(pd.bandwidth_hz > 0.0)) throw std::invalid_argument("Scenario: PD bandwidth must be > 0");
    if (!(histogram_bin_width_s > 0.0)) {
        throw std::invalid_argument("Scenario: histogram bin width must be > 0");
    }
    for (const std::string& name : noise_presets) {
        if (!presets::exists(name)) throw std::invalid_argument("Scenario: unknown preset " + name);
    }
    // Trace profiles must cover the run.
    const auto check_span = [this](const fiber::TemperatureProfile& p) {
        if (p.kind() == fiber::TemperatureProfile::Kind::Trace) {
            if (p.trace_time_s().front() > 0.0 || p.trace_time_s().back() < duration_s) {
                throw std::invalid_argument("Scenario: temperature trace shorter than the run");
            }
        }
    };
    check_span(trunk.profile);
    for (const fiber::FiberLink& f : feeders) check_span(f.profile);
}

HistogramBins histogram(const std::vector<double>& offsets, double bin_width_s) {
    if (offsets.empty()) throw std::invalid_argument("histogram: empty series");
    if (!(bin_width_s > 0.0)) throw std::invalid_argument("histogram: bin width must be > 0");

    const auto [min_it, max_it] = std::minmax_element(offsets.begin(), offsets.end());
    const double lo = *min_it;
    const double span = *max_it - lo;
    const std::size_t n_bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / bin_width_s)));

    HistogramBins bins;
    bins.bin_width_s = bin_width_s;
    bins.origin_s = lo;
    bins.counts.assign(n_bins, 0);
    for (const double x : offsets) {
        auto idx = static_cast<std::size_t>((x - lo) / bin_width_s);
        if (idx >= n_bins) idx = n_bins - 1; // max lands in the top bin
        ++bins.counts[idx];
    }
    return bins;
}

std::vector<JitterRow> jitter_report(const std::vector<std::string>& preset_names) {
    std::vector<JitterRow> rows;
    rows.reserve(preset_names.size());
    for (const std::string& name : preset_names) {
        const noise::PhaseNoiseProfile profile = presets::load(name);
        const noise::JitterFigure fig = noise::integrate_jitter(profile, presets::standard_band());
        rows.push_back({name, profile.carrier_hz(), fig.rms_jitter_s});
    }
    return rows;
}

FadingCheck fading_check(const Scenario& scenario, double carrier_hz) {
    const optics::CombSpec filtered = optics::filtered_comb(scenario.comb, scenario.obpf_bandwidth_hz);
    const auto harmonics = optics::rf_comb_harmonics(filtered, scenario.comb_span, scenario.pd);

    FadingCheck check;
    check.harmonic_k = static_cast<int>(std::llround(carrier_hz / scenario.comb.f_rep_hz));
    check.lines_after_filter = filtered.n_lines();
    for (const optics::Harmonic& h : harmonics) {
        if (h.k == check.harmonic_k) {
            check.freq_hz = h.freq_hz;
            check.amplitude = h.amplitude;
            check.survives = h.amplitude >= 0.9;
            return check;
        }
    }
    // Carrier not reachable (filtered comb too narrow or PD too slow).
    check.freq_hz = carrier_hz;
    check.amplitude = 0.0;
    check.survives = false;
    return check;
}

namespace {

struct PendingMsg {
    std::int64_t due_step;
    protocol::PhaseUpdateMsg msg;
    double true_two_way_at_measurement_s;
};

struct RuSession {
    protocol::CachingState state;
    std::deque<PendingMsg> in_flight;
    Rng measurement_rng;
    Rng loss_rng;
    Rng eval_rng;
    protocol::WrapSlipMonitor slips;
    std::uint64_t lost = 0;
    std::vector<protocol::PhaseUpdateMsg> log;

    RuSession(std::uint64_t scenario_seed, int ru_index, double unit_interval_s)
        : measurement_rng(derive_seed(scenario_seed, 0x10 + static_cast<std::uint64_t>(ru_index) * 4)),
          loss_rng(derive_seed(scenario_seed, 0x11 + static_cast<std::uint64_t>(ru_index) * 4)),
          eval_rng(derive_seed(scenario_seed, 0x12 + static_cast<std::uint64_t>(ru_index) * 4)),
          slips(unit_interval_s) {}
};

} // namespace

ScenarioReport run_scenario(const Scenario& scenario) {
    scenario.validate();

    const protocol::CachingConfig& cfg = scenario.caching;
    const double dt = cfg.update_interval_s;
    const auto n_steps = static_cast<std::int64_t>(std::llround(scenario.duration_s / dt));
    if (n_steps < 1) throw std::invalid_argument("run_scenario: duration shorter than one update");
    const double eval_dt = 1.0 / cfg.eval_rate_hz;

    const int n_rus = scenario.n_rus;
    std::vector<RuSession> sessions;
    sessions.reserve(static_cast<std::size_t>(n_rus));
    for (int r = 0; r < n_rus; ++r) {
        sessions.emplace_back(scenario.seed, r, cfg.unit_interval_s);
    }

    ScenarioReport report;
    report.scenario_name = scenario.name;
    report.seed = scenario.seed;
    report.config_hash = io::scenario_config_hash(scenario);
    report.eval_rate_hz = cfg.eval_rate_hz;
    report.series.resize(static_cast<std::size_t>(n_rus));

    const auto expected_samples =
        static_cast<std::size_t>(std::ceil(scenario.duration_s * cfg.eval_rate_hz));
    for (RuSeries& s : report.series) {
        s.time_s.reserve(expected_samples);
        s.two_way_measured_s.reserve(expected_samples);
        s.synchronized_s.reserve(expected_samples);
        s.estimated_uncompensated_s.reserve(expected_samples);
        s.true_one_way_s.reserve(expected_samples);
        s.true_two_way_s.reserve(expected_samples);
    }

    const auto one_way_at = [&scenario](int ru, double t) {
        double shift = fiber::one_way_shift(scenario.trunk, t);
        if (!scenario.feeders.empty()) {
            shift += fiber::one_way_shift(scenario.feeders[static_cast<std::size_t>(ru)], t);
        }
        return shift;
    };

    std::int64_t next_eval = 0; // shared sample clock across RUs

    for (std::int64_t step = 0; step < n_steps; ++step) {
        const double t = static_cast<double>(step) * dt;

        for (int r = 0; r < n_rus; ++r) {
            RuSession& session = sessions[static_cast<std::size_t>(r)];
            const double one_way = one_way_at(r, t);
            const double two_way = 2.0 * one_way;

            if (scenario.caching_enabled) {
                // Updates land at the RU before the next round-trip phase is
                // measured: data arriving at the DU now already carries every
                // correction delivered up to this step.
                const auto deliver_due = [&session, &cfg, step] {
                    while (!session.in_flight.empty() && session.in_flight.front().due_step <= step) {
                        const PendingMsg pending = session.in_flight.front();
                        session.in_flight.pop_front();
                        protocol::ru_apply_update(pending.msg, session.state, cfg);
                        session.slips.observe(session.state.cached_two_way_s,
                                              pending.true_two_way_at_measurement_s);
                    }
                };
                deliver_due();
                protocol::PhaseUpdateMsg msg =
                    protocol::du_measure(two_way, session.state, cfg, session.measurement_rng,
                                         static_cast<std::uint32_t>(step), t);
                session.log.push_back(msg);
                const bool lost = cfg.loss_probability > 0.0 &&
                                  session.loss_rng.uniform01() < cfg.loss_probability;
                if (lost) {
                    ++session.lost;
                } else {
                    session.in_flight.push_back({step + cfg.transport_latency_updates, msg, two_way});
                }
                deliver_due(); // zero-latency transport applies immediately
            }
        }

        // Evaluation-link samples due before the next protocol step.
        const double t_next = static_cast<double>(step + 1) * dt;
        while (true) {
            const double t_eval = static_cast<double>(next_eval) * eval_dt;
            if (t_eval >= t_next || t_eval >= scenario.duration_s) break;
            for (int r = 0; r < n_rus; ++r) {
                RuSession& session = sessions[static_cast<std::size_t>(r)];
                RuSeries& out = report.series[static_cast<std::size_t>(r)];
                const double one_way = one_way_at(r, t_eval);
                const double forward = (1.0 + scenario.asymmetry) * one_way;
                const double measured_two_way = session.state.cached_two_way_s;
                const double synchronized =
                    protocol::ru_clock_offset(session.state, forward) +
                    session.eval_rng.gaussian(scenario.eval_noise_sigma_s);
                out.time_s.push_back(t_eval);
                out.two_way_measured_s.push_back(measured_two_way);
                out.synchronized_s.push_back(synchronized);
                out.estimated_uncompensated_s.push_back(synchronized + measured_two_way / 2.0);
                out.true_one_way_s.push_back(one_way);
                out.true_two_way_s.push_back(2.0 * one_way);
            }
            ++next_eval;
        }
    }

    report.metrics.resize(static_cast<std::size_t>(n_rus));
    for (int r = 0; r < n_rus; ++r) {
        const RuSeries& s = report.series[static_cast<std::size_t>(r)];
        RuMetrics& m = report.metrics[static_cast<std::size_t>(r)];
        if (!s.synchronized_s.empty()) {
            m.rms_wander_s = noise::rms_of_record({cfg.eval_rate_hz, s.synchronized_s});
            double max_abs = 0.0;
            for (const double x : s.synchronized_s) max_abs = std::max(max_abs, std::abs(x));
            m.max_abs_offset_s = max_abs;
        }
        const RuSession& session = sessions[static_cast<std::size_t>(r)];
        m.wrap_slip_count = session.slips.slip_count();
        m.updates_applied = session.state.update_count;
        m.updates_lost = session.lost;
        report.update_logs.push_back(session.log);
    }

    if (!report.series.empty() && !report.series.front().synchronized_s.empty()) {
        report.offset_histogram =
            histogram(report.series.front().synchronized_s, scenario.histogram_bin_width_s);
    }

    report.jitter = jitter_report(scenario.noise_presets);
    report.fading = fading_check(scenario);
    report.ber_estimate = scenario.budget.stages_dbm.empty()
                              ? std::numeric_limits<double>::quiet_NaN()
                              : optics::estimate_ber(scenario.budget, optics::kDefaultQReference);
    return report;
}

Scenario default_scenario() {
    Scenario s;
    s.name = "default-16h";
    s.seed = 1;
    s.duration_s = 57600.0;
    s.n_rus = 2;

    const auto lab = fiber::TemperatureProfile::sinusoid(1.0, 86400.0, 0.0, 293.15);

    s.trunk.length_km = 13.0;
    s.trunk.thermal_coeff_ps_per_km_K = 39.0;
    s.trunk.base_delay_s = fiber::base_delay_from_length(13.0);
    s.trunk.attenuation_db_per_km = 0.2;
    s.trunk.profile = lab;

    fiber::FiberLink feeder;
    feeder.length_km = 0.08;
    feeder.thermal_coeff_ps_per_km_K = 39.0;
    feeder.base_delay_s = fiber::base_delay_from_length(0.08);
    feeder.attenuation_db_per_km = 0.2;
    feeder.profile = lab;
    s.feeders = {feeder, feeder};

    s.caching = protocol::CachingConfig{};
    s.eval_noise_sigma_s = 6.5e-12;

    s.comb = optics::make_uniform_comb(2.5e9, 1551.1e-9, 81);
    s.obpf_bandwidth_hz = 50e9;
    s.pd = optics::PhotodetectorSpec{40e9, 1.0};

    // Comb path: trunk plus feeder, dispersion-trimmed so the 25 GHz beat
    // tone keeps >90% of its strength (full SSMF dispersion over 13 km
    // lands that tone near a fading null; see the fading-table command).
    s.comb_span.length_m = 13080.0;
    s.comb_span.dispersion_s_per_m2 = optics::dispersion_si_from_ps_nm_km(4.0);
    s.comb_span.reference_wavelength_m = 1551.1e-9;

    s.budget.stages_dbm = {
        {"comb_after_obpf", -10.17}, {"data_tx", -19.75},      {"launch", 10.35},
        {"data_at_recombine", -9.77}, {"ru_received", -7.08},  {"ru_return_tx", -1.00},
        {"du_received", -17.7},
    };
    s.budget.clock_to_data_ratio_db = 6.57;

    s.noise_presets = {"carrier-25g", "clock-2g5", "clock-2g5-with-data", "embedded-clock-2g5"};
    s.histogram_bin_width_s = 1e-12;
    return s;
}

Scenario short_scenario(double duration_s) {
    Scenario s = default_scenario();
    s.name = "short-smoke";
    s.duration_s = duration_s;
    s.n_rus = 1;
    s.feeders.resize(1);
    // Faster temperature swing so a short run still exercises real drift.
    const auto lab = fiber::TemperatureProfile::sinusoid(0.2, 10.0 * duration_s, 0.0, 293.15);
    s.trunk.profile = lab;
    s.feeders.front().profile = lab;
    return s;
}

} // namespace combsync::sim
