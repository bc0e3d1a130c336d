#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "combsync/json_io.hpp"
#include "combsync/presets.hpp"
#include "combsync/sim.hpp"
#include "combsync/util.hpp"
#include "support.hpp"

using namespace combsync;
using sim::Scenario;
using sim::ScenarioReport;

namespace {

// Small quiet scenario: 13 km trunk, no feeders, all noise off.
Scenario quiet_scenario(double duration_s, double amplitude_K, double period_s) {
    Scenario s = sim::default_scenario();
    s.name = "quiet";
    s.duration_s = duration_s;
    s.n_rus = 1;
    s.feeders.resize(1);
    s.caching.measurement_noise_sigma_s = 0.0;
    s.eval_noise_sigma_s = 0.0;
    s.noise_presets.clear();
    const auto lab = fiber::TemperatureProfile::sinusoid(amplitude_K, period_s, 0.0, 293.15);
    s.trunk.profile = lab;
    for (auto& f : s.feeders) f.profile = lab;
    return s;
}

double mean_removed_rms(const std::vector<double>& xs) {
    return noise::rms_of_record({1.0, xs});
}

} // namespace

TEST_SUITE("sim") {

TEST_CASE("zero drift and zero noise give a zero offset") {
    const Scenario s = quiet_scenario(30.0, 0.0, 600.0);
    const ScenarioReport report = sim::run_scenario(s);
    REQUIRE(report.series.size() == 1);
    for (const double x : report.series[0].synchronized_s) CHECK(x == 0.0);
    CHECK(report.metrics[0].rms_wander_s == 0.0);
    CHECK(report.metrics[0].wrap_slip_count == 0);
}

TEST_CASE("green-curve identity holds bitwise") {
    Scenario s = sim::short_scenario(30.0);
    s.noise_presets.clear();
    const ScenarioReport report = sim::run_scenario(s);
    for (const sim::RuSeries& series : report.series) {
        const auto recomputed =
            protocol::estimate_uncompensated(series.synchronized_s, series.two_way_measured_s);
        REQUIRE(recomputed.size() == series.estimated_uncompensated_s.size());
        for (std::size_t i = 0; i < recomputed.size(); ++i) {
            CHECK(recomputed[i] == series.estimated_uncompensated_s[i]); // exact
        }
    }
}

TEST_CASE("disabled caching records the raw drift") {
    Scenario s = quiet_scenario(120.0, 1.0, 240.0);
    s.caching_enabled = false;
    const ScenarioReport report = sim::run_scenario(s);
    const sim::RuSeries& series = report.series[0];

    // No updates ever sent: the measured round-trip series is zero and the
    // reconstruction collapses onto the synchronized series.
    CHECK(report.metrics[0].updates_applied == 0);
    for (const double x : series.two_way_measured_s) CHECK(x == 0.0);
    for (std::size_t i = 0; i < series.synchronized_s.size(); ++i) {
        CHECK(series.estimated_uncompensated_s[i] == series.synchronized_s[i]);
    }

    // With noise off the synchronized offset is exactly the one-way drift.
    const double rms_est = mean_removed_rms(series.estimated_uncompensated_s);
    const double rms_truth = mean_removed_rms(series.true_one_way_s);
    CHECK(testsupport::close_rel(rms_est, rms_truth, 1e-12));
    CHECK(rms_truth > 10e-12); // the run actually drifted
}

TEST_CASE("short default scenario stays under the positioning bound") {
    const Scenario s = sim::short_scenario(60.0);
    const ScenarioReport report = sim::run_scenario(s);
    CHECK(report.metrics[0].rms_wander_s < 30e-12);
    CHECK(report.metrics[0].wrap_slip_count == 0);
    CHECK(report.series[0].time_s.size() == 600);
}

TEST_CASE("identical scenarios reproduce bit-identical reports") {
    const Scenario s = sim::short_scenario(20.0);
    const ScenarioReport a = sim::run_scenario(s);
    const ScenarioReport b = sim::run_scenario(s);
    CHECK(a.config_hash == b.config_hash);
    CHECK(a.series[0].synchronized_s == b.series[0].synchronized_s);
    CHECK(a.series[0].two_way_measured_s == b.series[0].two_way_measured_s);
    CHECK(io::report_to_json(a) == io::report_to_json(b));
}

TEST_CASE("different seeds give different noise realizations") {
    Scenario s = sim::short_scenario(20.0);
    s.seed = 7;
    const ScenarioReport a = sim::run_scenario(s);
    s.seed = 8;
    const ScenarioReport b = sim::run_scenario(s);
    CHECK(a.series[0].synchronized_s != b.series[0].synchronized_s);
    CHECK(a.metrics[0].rms_wander_s < 30e-12);
    CHECK(b.metrics[0].rms_wander_s < 30e-12);
}

TEST_CASE("histogram basics") {
    const sim::HistogramBins single = sim::histogram({4.2e-12, 4.2e-12, 4.2e-12}, 1e-12);
    CHECK(single.counts.size() == 1);
    CHECK(single.total() == 3);

    CHECK_THROWS_AS(sim::histogram({}, 1e-12), std::invalid_argument);
    CHECK_THROWS_AS(sim::histogram({1e-12}, 0.0), std::invalid_argument);
}

TEST_CASE("histogram of uniform samples is flat and complete") {
    Rng rng(101);
    std::vector<double> xs(200000);
    for (double& x : xs) x = rng.uniform01() * 100e-12;
    const sim::HistogramBins bins = sim::histogram(xs, 10e-12);
    CHECK(bins.total() == xs.size());
    const double expected = static_cast<double>(xs.size()) / static_cast<double>(bins.counts.size());
    for (const auto count : bins.counts) {
        // ~5 sigma of a binomial around the flat expectation
        CHECK(std::abs(static_cast<double>(count) - expected) < 5.0 * std::sqrt(expected));
    }
}

TEST_CASE("histogram is consistent with the wander metric") {
    const Scenario s = sim::short_scenario(60.0);
    const ScenarioReport report = sim::run_scenario(s);
    CHECK(report.offset_histogram.total() == report.series[0].synchronized_s.size());
    // Reconstruct the rms from the histogram; bin centers are within half a
    // bin of the true values.
    double mean = 0.0;
    for (std::size_t i = 0; i < report.offset_histogram.counts.size(); ++i) {
        mean += report.offset_histogram.bin_center_s(i) *
                static_cast<double>(report.offset_histogram.counts[i]);
    }
    mean /= static_cast<double>(report.offset_histogram.total());
    double var = 0.0;
    for (std::size_t i = 0; i < report.offset_histogram.counts.size(); ++i) {
        const double d = report.offset_histogram.bin_center_s(i) - mean;
        var += d * d * static_cast<double>(report.offset_histogram.counts[i]);
    }
    var /= static_cast<double>(report.offset_histogram.total());
    CHECK(std::sqrt(var) ==
          doctest::Approx(report.metrics[0].rms_wander_s).epsilon(0.1));
}

TEST_CASE("compensation shrinks the drift by more than 20x") {
    Scenario s = quiet_scenario(60.0, 1.0, 60.0); // full 1 ns swing inside the run
    s.caching.measurement_noise_sigma_s = 1e-12;
    s.eval_noise_sigma_s = 1e-12;
    const ScenarioReport report = sim::run_scenario(s);
    const sim::RuSeries& series = report.series[0];

    const auto [lo, hi] = std::minmax_element(series.estimated_uncompensated_s.begin(),
                                              series.estimated_uncompensated_s.end());
    CHECK(*hi - *lo > 100e-12); // the drift being compensated is real
    CHECK(report.metrics[0].rms_wander_s <
          0.05 * mean_removed_rms(series.estimated_uncompensated_s));
}

TEST_CASE("halving the update interval never hurts noiseless tracking") {
    Scenario coarse = quiet_scenario(300.0, 1.0, 600.0);
    coarse.caching.pi_resolution_s = 1e-18;
    coarse.caching.update_interval_s = 0.2;
    Scenario fine = coarse;
    fine.caching.update_interval_s = 0.1;

    const double rms_coarse = sim::run_scenario(coarse).metrics[0].rms_wander_s;
    const double rms_fine = sim::run_scenario(fine).metrics[0].rms_wander_s;
    CHECK(rms_fine <= rms_coarse * (1.0 + 1e-9));
    CHECK(rms_fine < rms_coarse); // strictly better for a smooth drift
}

TEST_CASE("wander metric is stable under eval-rate decimation") {
    Scenario slow = sim::short_scenario(600.0);
    slow.caching.eval_rate_hz = 10.0;
    Scenario fast = slow;
    fast.caching.eval_rate_hz = 100.0;
    const double rms_slow = sim::run_scenario(slow).metrics[0].rms_wander_s;
    const double rms_fast = sim::run_scenario(fast).metrics[0].rms_wander_s;
    CHECK(std::abs(rms_slow - rms_fast) / rms_slow < 0.05);
}

TEST_CASE("kilohertz evaluation rates stay configurable for short runs") {
    Scenario s = sim::short_scenario(2.0);
    s.caching.eval_rate_hz = 9540.0;
    const ScenarioReport report = sim::run_scenario(s);
    CHECK(report.series[0].time_s.size() == 19080);
    CHECK(report.metrics[0].rms_wander_s < 30e-12);
}

TEST_CASE("lost updates are tolerated and counted") {
    Scenario s = sim::short_scenario(120.0);
    s.caching.loss_probability = 0.2;
    const ScenarioReport report = sim::run_scenario(s);
    CHECK(report.metrics[0].updates_lost > 100);
    CHECK(report.metrics[0].updates_applied + report.metrics[0].updates_lost >= 1190);
    CHECK(report.metrics[0].rms_wander_s < 30e-12); // loop rides through losses
    CHECK(report.metrics[0].wrap_slip_count == 0);
}

TEST_CASE("update logs replay onto the live cache") {
    Scenario s = sim::short_scenario(60.0);
    const ScenarioReport report = sim::run_scenario(s);
    REQUIRE(report.update_logs.size() == 1);
    CHECK(report.update_logs[0].size() == 600);

    const protocol::CachingState replayed =
        protocol::replay_updates(report.update_logs[0], s.caching);
    CHECK(std::abs(replayed.cached_two_way_s - report.series[0].two_way_measured_s.back()) <
          2e-12); // live cache as of the last eval sample, modulo in-flight updates
}

TEST_CASE("jitter_report covers the requested presets") {
    const auto rows = sim::jitter_report({"clock-2g5", "embedded-clock-2g5"});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].rms_jitter_s == doctest::Approx(70.3e-15).epsilon(5e-3));
    CHECK(rows[1].rms_jitter_s == doctest::Approx(18e-12).epsilon(5e-3));
    CHECK_THROWS_AS(sim::jitter_report({"no-such-preset"}), std::out_of_range);
}

TEST_CASE("default scenario fading check clears the carrier") {
    const sim::FadingCheck check = sim::fading_check(sim::default_scenario());
    CHECK(check.harmonic_k == 10);
    CHECK(check.freq_hz == doctest::Approx(25e9));
    CHECK(check.lines_after_filter == 19);
    CHECK(check.amplitude >= 0.9);
    CHECK(check.survives);
}

TEST_CASE("full-dispersion trunk fades the carrier, motivating the trim") {
    Scenario s = sim::default_scenario();
    s.comb_span.dispersion_s_per_m2 = optics::dispersion_si_from_ps_nm_km(17.0);
    const sim::FadingCheck check = sim::fading_check(s);
    CHECK(check.amplitude < 0.1);
    CHECK_FALSE(check.survives);
}

TEST_CASE("scenario JSON round trip preserves the config hash") {
    const Scenario s = sim::default_scenario();
    const std::string text = io::scenario_to_json(s);
    const Scenario back = io::scenario_from_json(text);
    CHECK(io::scenario_config_hash(back) == io::scenario_config_hash(s));
    CHECK(io::scenario_to_json(back) == text);
}

TEST_CASE("bundled scenario files match the built-in definitions") {
    const auto here = std::filesystem::path(COMBSYNC_SOURCE_DIR);
    const Scenario file_default = io::load_scenario((here / "scenarios" / "default.json").string());
    CHECK(io::scenario_config_hash(file_default) ==
          io::scenario_config_hash(sim::default_scenario()));
    const Scenario file_short = io::load_scenario((here / "scenarios" / "short.json").string());
    CHECK(io::scenario_config_hash(file_short) ==
          io::scenario_config_hash(sim::short_scenario(60.0)));
}

TEST_CASE("scenario validation rejects bad configurations") {
    Scenario s = sim::default_scenario();
    s.n_rus = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    s = sim::default_scenario();
    s.feeders.resize(1); // two RUs, one feeder
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    s = sim::default_scenario();
    s.noise_presets.push_back("no-such-preset");
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    s = sim::default_scenario();
    s.trunk.profile = fiber::TemperatureProfile::trace({0.0, 100.0}, {293.0, 294.0});
    CHECK_THROWS_AS(s.validate(), std::invalid_argument); // trace shorter than 16 h

    s = sim::default_scenario();
    s.duration_s = -1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("path asymmetry leaks into the synchronized offset as a*drift") {
    // The halving rule assumes symmetric paths; with forward share (1+a)
    // the residual offset converges to a * one-way drift.
    Scenario s = quiet_scenario(120.0, 1.0, 240.0);
    s.asymmetry = 0.1;
    s.caching.pi_resolution_s = 1e-18;
    const ScenarioReport report = sim::run_scenario(s);
    const sim::RuSeries& series = report.series[0];
    const std::size_t last = series.synchronized_s.size() - 1;
    const double expected = s.asymmetry * series.true_one_way_s[last];
    CHECK(series.synchronized_s[last] == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("zero transport latency tightens the tracking bound to one update") {
    const double rate_ps_s = 50.0;
    Scenario s = quiet_scenario(30.0, 0.0, 600.0);
    s.caching.pi_resolution_s = 1e-18;
    s.caching.transport_latency_updates = 0;
    s.caching.eval_rate_hz = 100.0;
    const double ramp_K_per_s =
        rate_ps_s * 1e-12 / (s.trunk.length_km * s.trunk.thermal_coeff_ps_per_km_K * 1e-12);
    s.trunk.profile = fiber::TemperatureProfile::ramp(ramp_K_per_s, 293.15);
    s.feeders.front().length_km = 0.0;

    const ScenarioReport report = sim::run_scenario(s);
    const double bound = rate_ps_s * 1e-12 * s.caching.update_interval_s + 1e-15;
    for (const double x : report.series[0].synchronized_s) {
        CHECK(std::abs(x) <= bound);
    }
}

TEST_CASE("multi-RU runs keep sessions independent") {
    Scenario s = sim::short_scenario(30.0);
    s.n_rus = 3;
    s.feeders.assign(3, s.feeders.front());
    s.feeders[2].length_km = 0.5; // one RU on a longer feeder
    const ScenarioReport report = sim::run_scenario(s);
    REQUIRE(report.series.size() == 3);
    // Distinct noise streams per RU.
    CHECK(report.series[0].synchronized_s != report.series[1].synchronized_s);
    // The longer feeder sees a different true drift.
    CHECK(report.series[2].true_one_way_s != report.series[0].true_one_way_s);
    for (const auto& m : report.metrics) CHECK(m.rms_wander_s < 30e-12);
}

} // TEST_SUITE
