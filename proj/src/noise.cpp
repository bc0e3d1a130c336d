#include "combsync/noise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "combsync/fft.hpp"
#include "combsync/util.hpp"

namespace combsync::noise {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Relative slack for "contiguous" breakpoint checks; profiles are authored
// in JSON and may carry round-trip noise.
constexpr double kEdgeTol = 1e-9;

double linear_psd(double level_dbc_hz) { return std::pow(10.0, level_dbc_hz / 10.0); }

// L(f) within one segment.
double segment_level(const Segment& s, double f) {
    if (s.slope_db_per_decade == 0.0) return s.level_dbc_hz;
    return s.level_dbc_hz + s.slope_db_per_decade * std::log10(f / s.f_start_hz);
}

// ∫ 10^(L(f)/10) df over [a, b] ⊆ [s.f_start, s.f_end]. Within a segment the
// linear PSD is S0·(f/f0)^p with p = slope/10, which integrates in closed
// form (log form at p = -1).
double segment_integral(const Segment& s, double a, double b) {
    const double s0 = linear_psd(s.level_dbc_hz);
    const double p = s.slope_db_per_decade / 10.0;
    const double f0 = s.f_start_hz;
    if (std::abs(p + 1.0) < 1e-12) {
        return s0 * f0 * std::log(b / a);
    }
    const double q = p + 1.0;
    return s0 * f0 / q * (std::pow(b / f0, q) - std::pow(a / f0, q));
}

} // namespace

PhaseNoiseProfile::PhaseNoiseProfile(double carrier_hz, std::vector<Segment> segments,
                                     double white_floor_dbc_hz)
    : carrier_hz_(carrier_hz),
      segments_(std::move(segments)),
      white_floor_dbc_hz_(white_floor_dbc_hz) {
    if (!(carrier_hz_ > 0.0) || !std::isfinite(carrier_hz_)) {
        throw std::invalid_argument("PhaseNoiseProfile: carrier frequency must be > 0");
    }
    if (segments_.empty()) {
        throw std::invalid_argument("PhaseNoiseProfile: at least one segment required");
    }
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const Segment& s = segments_[i];
        if (!(s.f_start_hz > 0.0) || !(s.f_end_hz > s.f_start_hz)) {
            throw std::invalid_argument("PhaseNoiseProfile: segment offsets must be positive and increasing");
        }
        if (!std::isfinite(s.level_dbc_hz) || !std::isfinite(s.slope_db_per_decade)) {
            throw std::invalid_argument("PhaseNoiseProfile: non-finite segment parameters");
        }
        if (i > 0) {
            const double prev_end = segments_[i - 1].f_end_hz;
            if (std::abs(s.f_start_hz - prev_end) > kEdgeTol * prev_end) {
                throw std::invalid_argument("PhaseNoiseProfile: segments must be contiguous");
            }
        }
    }
}

double evaluate_psd(const PhaseNoiseProfile& profile, double offset_hz) {
    const auto& segs = profile.segments();
    if (!(offset_hz >= profile.f_min_hz()) || !(offset_hz <= profile.f_max_hz())) {
        throw std::out_of_range("evaluate_psd: offset " + std::to_string(offset_hz) +
                                " Hz outside profile span");
    }
    // Right-open pieces: the segment starting at a breakpoint owns it. The
    // top edge of the profile belongs to the last segment.
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const bool last = (i + 1 == segs.size());
        if (offset_hz < segs[i].f_end_hz || (last && offset_hz <= segs[i].f_end_hz)) {
            return segment_level(segs[i], offset_hz);
        }
    }
    return segment_level(segs.back(), offset_hz); // unreachable
}

double phase_variance_rad2(const PhaseNoiseProfile& profile, const Band& band) {
    if (!(band.f_low_hz <= band.f_high_hz)) {
        throw std::invalid_argument("phase_variance_rad2: band low edge above high edge");
    }
    if (band.f_low_hz < profile.f_min_hz() * (1.0 - kEdgeTol) ||
        band.f_high_hz > profile.f_max_hz() * (1.0 + kEdgeTol)) {
        throw std::out_of_range("phase_variance_rad2: band outside profile span");
    }
    if (band.f_low_hz == band.f_high_hz) return 0.0;

    double integral = 0.0;
    for (const Segment& s : profile.segments()) {
        const double a = std::max(band.f_low_hz, s.f_start_hz);
        const double b = std::min(band.f_high_hz, s.f_end_hz);
        if (b > a) integral += segment_integral(s, a, b);
    }
    return 2.0 * integral;
}

JitterFigure integrate_jitter(const PhaseNoiseProfile& profile, const Band& band) {
    const double var = phase_variance_rad2(profile, band);
    JitterFigure fig;
    fig.rms_jitter_s = std::sqrt(var) / (kTwoPi * profile.carrier_hz());
    fig.integration_band = band;
    fig.carrier_hz = profile.carrier_hz();
    return fig;
}

PhaseNoiseProfile apply_divider(const PhaseNoiseProfile& profile, unsigned ratio) {
    if (ratio == 0) throw std::invalid_argument("apply_divider: ratio must be >= 1");
    if (ratio == 1) return profile;
    const double drop_db = 20.0 * std::log10(static_cast<double>(ratio));
    std::vector<Segment> segs = profile.segments();
    for (Segment& s : segs) s.level_dbc_hz -= drop_db;
    return PhaseNoiseProfile(profile.carrier_hz() / static_cast<double>(ratio),
                             std::move(segs), profile.white_floor_dbc_hz() - drop_db);
}

PhaseRecord synthesize_phase(const PhaseNoiseProfile& profile, double sample_rate_hz,
                             std::size_t n, std::uint64_t seed) {
    if (!is_power_of_two(n) || n < 2) {
        throw std::invalid_argument("synthesize_phase: n must be a power of two >= 2");
    }
    if (!(sample_rate_hz > 0.0) || sample_rate_hz / 2.0 < profile.f_max_hz()) {
        throw std::invalid_argument("synthesize_phase: sample rate too low for profile band");
    }

    Rng rng(seed);
    const double df = sample_rate_hz / static_cast<double>(n);
    std::vector<std::complex<double>> spectrum(n, {0.0, 0.0});

    // Hermitian spectrum with E|X[m]|^2 = S_two(f_m)·fs·n so the one-sided
    // periodogram 2|X|^2/(fs·n) lands on S_one = 2·10^(L/10). DC and Nyquist
    // stay empty; so do bins outside the profile span.
    const double inv_sqrt2 = 0.70710678118654752440;
    for (std::size_t m = 1; m < n / 2; ++m) {
        const double f = df * static_cast<double>(m);
        if (f < profile.f_min_hz() || f > profile.f_max_hz()) continue;
        const double s_two = linear_psd(evaluate_psd(profile, f));
        const double amp = std::sqrt(s_two * sample_rate_hz * static_cast<double>(n));
        const std::complex<double> g(rng.gaussian(), rng.gaussian());
        spectrum[m] = amp * inv_sqrt2 * g;
        spectrum[n - m] = std::conj(spectrum[m]);
    }

    fft_radix2(spectrum, /*inverse=*/true);

    PhaseRecord record;
    record.sample_rate_hz = sample_rate_hz;
    record.samples_s.resize(n);
    const double scale = 1.0 / (static_cast<double>(n) * kTwoPi * profile.carrier_hz());
    for (std::size_t k = 0; k < n; ++k) {
        record.samples_s[k] = spectrum[k].real() * scale;
    }
    return record;
}

double rms_of_record(const PhaseRecord& record) {
    if (record.samples_s.empty()) {
        throw std::invalid_argument("rms_of_record: empty record");
    }
    const double n = static_cast<double>(record.samples_s.size());
    double mean = 0.0;
    for (const double x : record.samples_s) mean += x;
    mean /= n;
    double acc = 0.0;
    for (const double x : record.samples_s) {
        const double d = x - mean;
        acc += d * d;
    }
    return std::sqrt(acc / n);
}

} // namespace combsync::noise
