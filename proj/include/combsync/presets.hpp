#pragma once

#include <string>
#include <vector>

#include "combsync/noise.hpp"

namespace combsync::presets {

/// Directory searched before the built-ins when resolving a preset name
/// (expects <name>.json files).
inline constexpr const char* kPresetDirEnvVar = "COMBSYNC_PRESET_DIR";

/// The standard integration band for the shipped presets: 1 kHz - 10 MHz.
noise::Band standard_band();

/// Two-piece profile, calibrated so that integrate_jitter over `band`
/// returns exactly `target_jitter_s`: a -20 dB/decade piece falling from the
/// low band edge to a corner, then the flat floor out to the high edge. The
/// corner solves a quadratic in closed form. Throws if the target is below
/// what the floor alone integrates to, or the corner lands above the band.
noise::PhaseNoiseProfile corner_calibrated_profile(double carrier_hz, double target_jitter_s,
                                                   double floor_dbc_hz, const noise::Band& band);

/// Built-in preset names, in display order.
std::vector<std::string> names();

/// True if `name` resolves (directory override or built-in).
bool exists(const std::string& name);

/// Resolve a preset: $COMBSYNC_PRESET_DIR/<name>.json when present,
/// otherwise the built-in. Throws std::out_of_range for unknown names.
noise::PhaseNoiseProfile load(const std::string& name);

/// The built-in definition, ignoring any directory override.
noise::PhaseNoiseProfile built_in(const std::string& name);

/// One-line description for listings.
std::string describe(const std::string& name);

} // namespace combsync::presets
