#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "combsync/util.hpp"

namespace combsync::protocol {

/// Loop timing and hardware granularity of one DU-RU caching session.
struct CachingConfig {
    double update_interval_s = 0.1;          // round-trip phase measurement cadence
    double unit_interval_s = 400e-12;        // one bit period of the line rate
    double pi_resolution_s = 3.125e-12;      // phase-interpolator step (UI/128)
    double measurement_noise_sigma_s = 1e-12; // per-update gaussian noise at the DU
    double eval_rate_hz = 10.0;              // offset recording rate
    int transport_latency_updates = 1;       // DU->RU update delivery, in update intervals
    double loss_probability = 0.0;           // per-message drop chance

    void validate() const;
};

/// Cache and interpolator state shared by one DU-RU pair. The cache is the
/// unwrapped running estimate of the round-trip drift; both interpolator
/// settings are integer multiples of the PI step.
struct CachingState {
    double cached_two_way_s = 0.0;
    double last_wrapped_measurement_s = 0.0;
    double return_pi_setting_s = 0.0; // -quantize(cached), pre-corrects RU->DU data
    double clock_pi_setting_s = 0.0;  // -quantize(cached/2), corrects the RU clock
    std::uint64_t update_count = 0;
    std::int64_t last_sequence = -1;
};

/// One phase update sent from the DU to an RU.
struct PhaseUpdateMsg {
    std::uint32_t sequence_number = 0;
    double residual_two_way_s = 0.0; // wrapped to (-UI/2, +UI/2]
    double timestamp_s = 0.0;
};

struct ReorderingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Map x into the half-open interval (-ui/2, +ui/2].
double wrap_to_half_ui(double x, double ui);

/// Round to the nearest integer multiple of `step` (half away from zero).
double quantize_to_step(double x, double step);

/// DU-side measurement at the phase update rate: the round-trip drift of
/// data arriving from the RU, already pre-corrected by the RU's return
/// interpolator, measured modulo one UI with additive gaussian noise.
/// Records the wrapped value in `state` and emits the update message.
PhaseUpdateMsg du_measure(double true_two_way_s, CachingState& state,
                          const CachingConfig& cfg, Rng& rng, std::uint32_t sequence,
                          double timestamp_s);

/// RU-side cache update: accumulate the residual, requantize both
/// interpolators (return data by -cache, clock by -cache/2). Messages must
/// arrive in increasing sequence order; gaps (lost updates) are fine.
void ru_apply_update(const PhaseUpdateMsg& msg, CachingState& state, const CachingConfig& cfg);

/// Residual RU-vs-DU clock offset a zero-length evaluation link would see:
/// the uncorrected forward drift plus the clock interpolator setting.
double ru_clock_offset(const CachingState& state, double true_one_way_forward_s);

/// Reconstruct the drift that would have occurred without compensation:
/// element-wise synchronized + two_way/2. Throws on length mismatch.
std::vector<double> estimate_uncompensated(const std::vector<double>& synchronized_offsets,
                                           const std::vector<double>& two_way_series);

/// Detects cache wrap slips by comparing the unwrapped cache against a
/// wrap-free observer of the true round-trip drift. A slip is a change in
/// the whole-UI cycle count of the tracking error; once slipped, a pure
/// accumulator never recovers on its own.
class WrapSlipMonitor {
public:
    explicit WrapSlipMonitor(double unit_interval_s) : ui_(unit_interval_s) {}

    void observe(double cached_two_way_s, double true_two_way_s) {
        const double err = cached_two_way_s - true_two_way_s;
        const std::int64_t cycles = static_cast<std::int64_t>(std::llround(err / ui_));
        if (armed_ && cycles != prev_cycles_) ++slips_;
        prev_cycles_ = cycles;
        armed_ = true;
    }

    std::uint64_t slip_count() const { return slips_; }
    bool slipped() const { return slips_ > 0; }

private:
    double ui_;
    std::int64_t prev_cycles_ = 0;
    std::uint64_t slips_ = 0;
    bool armed_ = false;
};

// --- wire format ------------------------------------------------------
//
// Fixed 20-byte little-endian frame for logs and record/replay:
//   u32 sequence_number | i64 residual_femtoseconds | u64 timestamp_nanoseconds

inline constexpr std::size_t kWireFrameSize = 20;

std::array<std::uint8_t, kWireFrameSize> encode_update(const PhaseUpdateMsg& msg);
PhaseUpdateMsg decode_update(const std::array<std::uint8_t, kWireFrameSize>& frame);

void write_update_log(std::ostream& out, const std::vector<PhaseUpdateMsg>& msgs);
std::vector<PhaseUpdateMsg> read_update_log(std::istream& in);

/// Replay a recorded update stream onto a fresh cache.
CachingState replay_updates(const std::vector<PhaseUpdateMsg>& msgs, const CachingConfig& cfg);

} // namespace combsync::protocol
