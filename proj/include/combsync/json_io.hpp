#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "combsync/fiber.hpp"
#include "combsync/noise.hpp"
#include "combsync/optics.hpp"
#include "combsync/sim.hpp"

namespace combsync::io {

// Phase-noise profiles:
//   {"carrier_hz": ..., "white_floor_dbc_hz": ...,
//    "segments": [{"f_start_hz", "f_end_hz", "level_dbc_hz", "slope_db_per_decade"}, ...]}
std::string profile_to_json(const noise::PhaseNoiseProfile& profile);
noise::PhaseNoiseProfile profile_from_json(const std::string& text);
void save_profile(const noise::PhaseNoiseProfile& profile, const std::string& path);
noise::PhaseNoiseProfile load_profile(const std::string& path);

std::string comb_to_json(const optics::CombSpec& comb);
optics::CombSpec comb_from_json(const std::string& text);

std::string budget_to_json(const optics::LinkBudget& budget);
optics::LinkBudget budget_from_json(const std::string& text);

// Scenario files. Temperature traces may be inline arrays or a "file"
// reference to a CSV, resolved against `base_dir` (the scenario file's
// directory when loaded from disk).
std::string scenario_to_json(const sim::Scenario& scenario);
sim::Scenario scenario_from_json(const std::string& text, const std::string& base_dir = ".");
sim::Scenario load_scenario(const std::string& path);
void save_scenario(const sim::Scenario& scenario, const std::string& path);

/// Stable 64-bit hash of the canonical serialized scenario.
std::uint64_t scenario_config_hash(const sim::Scenario& scenario);

/// Metrics-level report (no sample series; those go to CSV).
std::string report_to_json(const sim::ScenarioReport& report);

// CSV: (time_s, phase_s)
void write_phase_record_csv(std::ostream& out, const noise::PhaseRecord& record);
noise::PhaseRecord read_phase_record_csv(std::istream& in);

// CSV: (sequence, timestamp_s, residual_two_way_s) session event log
void write_updates_csv(std::ostream& out, const std::vector<protocol::PhaseUpdateMsg>& msgs);

// CSV: (k, freq_hz, amplitude)
void write_harmonics_csv(std::ostream& out, const std::vector<optics::Harmonic>& harmonics);

// CSV: (time_s, temp_K), linear interpolation on load
void write_temperature_trace_csv(std::ostream& out, const fiber::TemperatureProfile& profile);
fiber::TemperatureProfile read_temperature_trace_csv(std::istream& in);

// CSV: time_s plus per-RU offset columns, full double round-trip precision
void write_offsets_csv(std::ostream& out, const sim::ScenarioReport& report);

// CSV: (bin_center_s, count)
void write_histogram_csv(std::ostream& out, const sim::HistogramBins& bins);

} // namespace combsync::io
