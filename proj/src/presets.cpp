#include "combsync/presets.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>

#include "combsync/json_io.hpp"

namespace combsync::presets {

using noise::Band;
using noise::PhaseNoiseProfile;
using noise::Segment;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct PresetDef {
    const char* name;
    const char* description;
    double carrier_hz;
    double target_jitter_s;
    double floor_dbc_hz;
};

// Jitter totals are the calibration targets; the curve shapes are a modeling
// choice (single 1/f^2 corner over the flat floor).
constexpr PresetDef kPresets[] = {
    {"carrier-25g", "25 GHz RF carrier from the detected comb", 25e9, 90e-15, -135.0},
    {"clock-2g5", "2.5 GHz clock from the detected comb, no co-received data", 2.5e9, 70.3e-15, -135.0},
    {"clock-2g5-with-data", "2.5 GHz clock with co-received data", 2.5e9, 93.1e-15, -135.0},
    {"embedded-clock-2g5", "2.5 GHz clock tone embedded in PRBS data", 2.5e9, 18e-12, -110.0},
};

const PresetDef* find_def(const std::string& name) {
    for (const PresetDef& def : kPresets) {
        if (name == def.name) return &def;
    }
    return nullptr;
}

} // namespace

Band standard_band() { return Band{1e3, 10e6}; }

PhaseNoiseProfile corner_calibrated_profile(double carrier_hz, double target_jitter_s,
                                            double floor_dbc_hz, const Band& band) {
    if (!(carrier_hz > 0.0) || !(target_jitter_s > 0.0)) {
        throw std::invalid_argument("corner_calibrated_profile: carrier and target must be > 0");
    }
    const double fl = band.f_low_hz;
    const double fh = band.f_high_hz;
    if (!(fl > 0.0) || !(fh > fl)) {
        throw std::invalid_argument("corner_calibrated_profile: bad band");
    }

    const double floor_lin = std::pow(10.0, floor_dbc_hz / 10.0);
    const double variance = std::pow(kTwoPi * carrier_hz * target_jitter_s, 2.0);

    // With a 1/f^2 piece from fl to the corner fx (continuous with the floor
    // there), the band variance is 2·Sf·(fx²/fl - 2·fx + fh); solving the
    // quadratic for the target gives the corner directly.
    const double discriminant = 1.0 - (fh - variance / (2.0 * floor_lin)) / fl;
    if (discriminant < 0.0) {
        throw std::invalid_argument(
            "corner_calibrated_profile: target jitter below the floor-only integral; lower the floor");
    }
    const double fx = fl * (1.0 + std::sqrt(discriminant));
    if (fx > fh) {
        throw std::invalid_argument(
            "corner_calibrated_profile: corner above the band; raise the floor");
    }

    std::vector<Segment> segments;
    if (fx <= fl * (1.0 + 1e-12)) {
        segments.push_back({fl, fh, floor_dbc_hz, 0.0});
    } else {
        const double level_at_fl = floor_dbc_hz + 20.0 * std::log10(fx / fl);
        segments.push_back({fl, fx, level_at_fl, -20.0});
        segments.push_back({fx, fh, floor_dbc_hz, 0.0});
    }
    return PhaseNoiseProfile(carrier_hz, std::move(segments), floor_dbc_hz);
}

std::vector<std::string> names() {
    std::vector<std::string> out;
    for (const PresetDef& def : kPresets) out.emplace_back(def.name);
    return out;
}

bool exists(const std::string& name) {
    if (find_def(name) != nullptr) return true;
    if (const char* dir = std::getenv(kPresetDirEnvVar)) {
        return std::filesystem::exists(std::filesystem::path(dir) / (name + ".json"));
    }
    return false;
}

PhaseNoiseProfile built_in(const std::string& name) {
    const PresetDef* def = find_def(name);
    if (def == nullptr) throw std::out_of_range("unknown preset: " + name);
    return corner_calibrated_profile(def->carrier_hz, def->target_jitter_s, def->floor_dbc_hz,
                                     standard_band());
}

PhaseNoiseProfile load(const std::string& name) {
    if (const char* dir = std::getenv(kPresetDirEnvVar)) {
        const auto path = std::filesystem::path(dir) / (name + ".json");
        if (std::filesystem::exists(path)) {
            return io::load_profile(path.string());
        }
    }
    return built_in(name);
}

std::string describe(const std::string& name) {
    const PresetDef* def = find_def(name);
    return def != nullptr ? def->description : "user preset";
}

} // namespace combsync::presets
