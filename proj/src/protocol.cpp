#include "combsync/protocol.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace combsync::protocol {

void CachingConfig::validate() const {
    if (!(update_interval_s > 0.0)) throw std::invalid_argument("CachingConfig: update interval must be > 0");
    if (!(unit_interval_s > 0.0)) throw std::invalid_argument("CachingConfig: unit interval must be > 0");
    if (!(pi_resolution_s > 0.0)) throw std::invalid_argument("CachingConfig: PI resolution must be > 0");
    if (measurement_noise_sigma_s < 0.0) throw std::invalid_argument("CachingConfig: noise sigma must be >= 0");
    if (!(eval_rate_hz > 0.0)) throw std::invalid_argument("CachingConfig: eval rate must be > 0");
    if (transport_latency_updates < 0) throw std::invalid_argument("CachingConfig: latency must be >= 0");
    if (loss_probability < 0.0 || loss_probability >= 1.0) {
        throw std::invalid_argument("CachingConfig: loss probability must be in [0, 1)");
    }
}

double wrap_to_half_ui(double x, double ui) {
    double r = std::fmod(x, ui);
    if (r <= -ui / 2.0) r += ui;
    else if (r > ui / 2.0) r -= ui;
    return r;
}

double quantize_to_step(double x, double step) {
    return step * std::round(x / step);
}

PhaseUpdateMsg du_measure(double true_two_way_s, CachingState& state,
                          const CachingConfig& cfg, Rng& rng, std::uint32_t sequence,
                          double timestamp_s) {
    // Data arriving from the RU already carries -quantize(cache) from the
    // return interpolator; the DU phase detector sees the remainder modulo
    // one UI, plus measurement noise.
    const double raw = true_two_way_s + state.return_pi_setting_s +
                       rng.gaussian(cfg.measurement_noise_sigma_s);
    const double wrapped = wrap_to_half_ui(raw, cfg.unit_interval_s);
    state.last_wrapped_measurement_s = wrapped;

    PhaseUpdateMsg msg;
    msg.sequence_number = sequence;
    msg.residual_two_way_s = wrapped;
    msg.timestamp_s = timestamp_s;
    return msg;
}

void ru_apply_update(const PhaseUpdateMsg& msg, CachingState& state, const CachingConfig& cfg) {
    if (static_cast<std::int64_t>(msg.sequence_number) <= state.last_sequence) {
        throw ReorderingError("ru_apply_update: sequence " + std::to_string(msg.sequence_number) +
                              " not after " + std::to_string(state.last_sequence));
    }
    state.last_sequence = static_cast<std::int64_t>(msg.sequence_number);
    state.cached_two_way_s += msg.residual_two_way_s;
    state.return_pi_setting_s = -quantize_to_step(state.cached_two_way_s, cfg.pi_resolution_s);
    state.clock_pi_setting_s = -quantize_to_step(state.cached_two_way_s / 2.0, cfg.pi_resolution_s);
    ++state.update_count;
}

double ru_clock_offset(const CachingState& state, double true_one_way_forward_s) {
    return true_one_way_forward_s + state.clock_pi_setting_s;
}

std::vector<double> estimate_uncompensated(const std::vector<double>& synchronized_offsets,
                                           const std::vector<double>& two_way_series) {
    if (synchronized_offsets.size() != two_way_series.size()) {
        throw std::invalid_argument("estimate_uncompensated: series length mismatch");
    }
    std::vector<double> out(synchronized_offsets.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = synchronized_offsets[i] + two_way_series[i] / 2.0;
    }
    return out;
}

namespace {

void put_u32le(std::uint8_t* p, std::uint32_t v) {
    p[0] = static_cast<std::uint8_t>(v);
    p[1] = static_cast<std::uint8_t>(v >> 8);
    p[2] = static_cast<std::uint8_t>(v >> 16);
    p[3] = static_cast<std::uint8_t>(v >> 24);
}

void put_u64le(std::uint8_t* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64le(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

} // namespace

std::array<std::uint8_t, kWireFrameSize> encode_update(const PhaseUpdateMsg& msg) {
    std::array<std::uint8_t, kWireFrameSize> frame{};
    const std::int64_t residual_fs = static_cast<std::int64_t>(std::llround(msg.residual_two_way_s * 1e15));
    const std::uint64_t ts_ns = static_cast<std::uint64_t>(std::llround(msg.timestamp_s * 1e9));
    put_u32le(frame.data(), msg.sequence_number);
    put_u64le(frame.data() + 4, static_cast<std::uint64_t>(residual_fs));
    put_u64le(frame.data() + 12, ts_ns);
    return frame;
}

PhaseUpdateMsg decode_update(const std::array<std::uint8_t, kWireFrameSize>& frame) {
    PhaseUpdateMsg msg;
    msg.sequence_number = get_u32le(frame.data());
    msg.residual_two_way_s = static_cast<double>(static_cast<std::int64_t>(get_u64le(frame.data() + 4))) * 1e-15;
    msg.timestamp_s = static_cast<double>(get_u64le(frame.data() + 12)) * 1e-9;
    return msg;
}

void write_update_log(std::ostream& out, const std::vector<PhaseUpdateMsg>& msgs) {
    for (const PhaseUpdateMsg& m : msgs) {
        const auto frame = encode_update(m);
        out.write(reinterpret_cast<const char*>(frame.data()), static_cast<std::streamsize>(frame.size()));
    }
    if (!out) throw std::runtime_error("write_update_log: stream failure");
}

std::vector<PhaseUpdateMsg> read_update_log(std::istream& in) {
    std::vector<PhaseUpdateMsg> msgs;
    std::array<std::uint8_t, kWireFrameSize> frame{};
    while (in.read(reinterpret_cast<char*>(frame.data()), static_cast<std::streamsize>(frame.size()))) {
        msgs.push_back(decode_update(frame));
    }
    if (in.gcount() != 0 && static_cast<std::size_t>(in.gcount()) != kWireFrameSize) {
        throw std::runtime_error("read_update_log: truncated frame");
    }
    return msgs;
}

CachingState replay_updates(const std::vector<PhaseUpdateMsg>& msgs, const CachingConfig& cfg) {
    CachingState state;
    for (const PhaseUpdateMsg& m : msgs) {
        ru_apply_update(m, state, cfg);
        state.last_wrapped_measurement_s = m.residual_two_way_s;
    }
    return state;
}

} // namespace combsync::protocol
