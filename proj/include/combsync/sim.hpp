#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "combsync/fiber.hpp"
#include "combsync/noise.hpp"
#include "combsync/optics.hpp"
#include "combsync/protocol.hpp"

namespace combsync::sim {

/// Everything one simulated run needs: topology, loop configuration, comb
/// and detection chain, and the noise presets to report on.
struct Scenario {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    double duration_s = 57600.0; // 16 h
    int n_rus = 1;
    bool caching_enabled = true;

    fiber::FiberLink trunk;                // DU -> splitter, shared by every RU
    std::vector<fiber::FiberLink> feeders; // one per RU
    double asymmetry = 0.0;                // forward/return imbalance of the drift

    protocol::CachingConfig caching;
    /// Noise of the offset-recording measurement itself (the short coax
    /// evaluation link at the DU), separate from the in-loop measurement
    /// noise. Calibrated so the stock 16 h scenario lands near the headline
    /// wander figure.
    double eval_noise_sigma_s = 6.5e-12;

    optics::CombSpec comb;           // as generated, before the optical filter
    double obpf_bandwidth_hz = 50e9; // optical bandpass ahead of the launch
    optics::PhotodetectorSpec pd;
    /// Dispersion seen by the comb on its way to the RU photodiode.
    optics::DispersiveSpan comb_span;
    optics::LinkBudget budget;

    std::vector<std::string> noise_presets;
    double histogram_bin_width_s = 1e-12;

    void validate() const;
};

/// Recorded series for one RU, sampled at the evaluation rate.
struct RuSeries {
    std::vector<double> time_s;
    std::vector<double> two_way_measured_s;          // DU cache, i.e. sum of sent updates
    std::vector<double> synchronized_s;              // RU clock offset vs the DU
    std::vector<double> estimated_uncompensated_s;   // synchronized + two_way/2
    std::vector<double> true_one_way_s;              // ground truth drift (simulation only)
    std::vector<double> true_two_way_s;
};

struct RuMetrics {
    double rms_wander_s = 0.0;
    double max_abs_offset_s = 0.0;
    std::uint64_t wrap_slip_count = 0;
    std::uint64_t updates_applied = 0;
    std::uint64_t updates_lost = 0;
};

struct JitterRow {
    std::string preset;
    double carrier_hz = 0.0;
    double rms_jitter_s = 0.0;
};

/// Dispersion-fading health of the selected RF carrier after the optical
/// filter and the comb-path dispersion.
struct FadingCheck {
    int harmonic_k = 0;
    double freq_hz = 0.0;
    double amplitude = 0.0;
    bool survives = false; // amplitude >= 0.9
    int lines_after_filter = 0;
};

struct HistogramBins {
    double bin_width_s = 0.0;
    double origin_s = 0.0; // low edge of the first bin
    std::vector<std::uint64_t> counts;

    double bin_center_s(std::size_t i) const {
        return origin_s + (static_cast<double>(i) + 0.5) * bin_width_s;
    }
    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (const auto c : counts) t += c;
        return t;
    }
};

struct ScenarioReport {
    std::string scenario_name;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    double eval_rate_hz = 0.0;

    std::vector<RuSeries> series;   // one per RU
    std::vector<RuMetrics> metrics; // one per RU
    std::vector<JitterRow> jitter;
    FadingCheck fading;
    HistogramBins offset_histogram; // RU 0 synchronized offsets
    double ber_estimate = 0.0;

    /// All DU->RU updates per RU, for logging/replay.
    std::vector<std::vector<protocol::PhaseUpdateMsg>> update_logs;
};

/// Counts per bin covering [min, max] of the series. Single-valued series
/// collapse to one bin. Throws on an empty series or non-positive width.
HistogramBins histogram(const std::vector<double>& offsets, double bin_width_s);

/// Jitter of each preset over the standard band.
std::vector<JitterRow> jitter_report(const std::vector<std::string>& preset_names);

/// Fading check for the harmonic nearest `carrier_hz` with the given filter
/// and span applied to the scenario comb.
FadingCheck fading_check(const Scenario& scenario, double carrier_hz = 25e9);

/// Advance the caching loop over the full duration in update-interval steps
/// and assemble series, metrics, histogram, jitter table and fading check.
/// Deterministic: identical scenarios (seed included) give identical
/// reports.
ScenarioReport run_scenario(const Scenario& scenario);

/// The stock 16-hour two-RU scenario at desk scale.
Scenario default_scenario();

/// A short variant of the stock scenario for smoke runs.
Scenario short_scenario(double duration_s = 60.0);

} // namespace combsync::sim
