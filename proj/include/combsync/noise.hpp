#pragma once

#include <cstdint>
#include <vector>

namespace combsync::noise {

/// One power-law piece of an SSB phase-noise profile. The level is given at
/// the low edge and follows `slope_db_per_decade` across the piece on a
/// log-frequency axis. Pieces are half-open [f_start, f_end); the last piece
/// of a profile also owns its upper edge.
struct Segment {
    double f_start_hz = 0.0;
    double f_end_hz = 0.0;
    double level_dbc_hz = 0.0;        // L(f_start), dBc/Hz
    double slope_db_per_decade = 0.0; // 0 = flat
};

/// Offset-frequency band [f_low, f_high] for jitter integration.
struct Band {
    double f_low_hz = 0.0;
    double f_high_hz = 0.0;
};

/// Piecewise power-law SSB phase-noise PSD L(f) for a carrier at
/// `carrier_hz`. Segments must be contiguous and strictly increasing in
/// offset frequency; the profile is explicit everywhere it is defined (the
/// white floor is represented by a flat segment, never applied as a max).
class PhaseNoiseProfile {
public:
    PhaseNoiseProfile(double carrier_hz, std::vector<Segment> segments,
                      double white_floor_dbc_hz);

    double carrier_hz() const { return carrier_hz_; }
    const std::vector<Segment>& segments() const { return segments_; }
    double white_floor_dbc_hz() const { return white_floor_dbc_hz_; }
    double f_min_hz() const { return segments_.front().f_start_hz; }
    double f_max_hz() const { return segments_.back().f_end_hz; }

private:
    double carrier_hz_;
    std::vector<Segment> segments_;
    double white_floor_dbc_hz_;
};

/// RMS jitter integrated over a band, in seconds at `carrier_hz`.
struct JitterFigure {
    double rms_jitter_s = 0.0;
    Band integration_band;
    double carrier_hz = 0.0;
};

/// Time-equivalent phase samples (phase/(2π f_c)), in seconds.
struct PhaseRecord {
    double sample_rate_hz = 0.0;
    std::vector<double> samples_s;
};

/// L(f) in dBc/Hz at `offset_hz`. Throws std::out_of_range outside the
/// profile's covered span. At an interior breakpoint the segment starting
/// there wins (right-open convention).
double evaluate_psd(const PhaseNoiseProfile& profile, double offset_hz);

/// Phase variance 2·∫ 10^(L(f)/10) df over the band, rad². Closed form per
/// power-law segment.
double phase_variance_rad2(const PhaseNoiseProfile& profile, const Band& band);

/// sqrt(2·∫ 10^(L/10) df) / (2π f_c). Band must lie within the profile span;
/// f_low == f_high yields zero, f_low > f_high throws.
JitterFigure integrate_jitter(const PhaseNoiseProfile& profile, const Band& band);

/// Ideal divide-by-`ratio`: carrier divided, every level reduced by
/// 20·log10(ratio) dB. Absolute jitter in seconds is invariant.
PhaseNoiseProfile apply_divider(const PhaseNoiseProfile& profile, unsigned ratio);

/// Colored phase-noise synthesis: unit white spectrum shaped by
/// sqrt(two-sided PSD) = sqrt(10^(L/10)), Hermitian spectrum, inverse FFT,
/// scaled to seconds. Deterministic for a fixed seed. `n` must be a power of
/// two and sample_rate/2 must cover the profile's top offset. Bins outside
/// the profile span carry no power.
PhaseRecord synthesize_phase(const PhaseNoiseProfile& profile, double sample_rate_hz,
                             std::size_t n, std::uint64_t seed);

/// Mean-removed RMS of the record, seconds. Throws on an empty record.
double rms_of_record(const PhaseRecord& record);

} // namespace combsync::noise
