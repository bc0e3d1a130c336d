#pragma once

// Shared test utilities: independent oracles (quadrature, naive DFT, brute
// force field propagation, ensemble periodograms) and random input
// generators. Everything here must stay independent of the library code
// paths it is used to check.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "combsync/fft.hpp"
#include "combsync/noise.hpp"
#include "combsync/optics.hpp"
#include "combsync/util.hpp"

namespace testsupport {

inline constexpr double kPi = 3.14159265358979323846;

inline bool close_rel(double a, double b, double rel) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= rel * std::max(scale, 1e-300);
}

inline bool close_abs_or_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol || close_rel(a, b, tol);
}

// --- adaptive Simpson quadrature ---------------------------------------

namespace detail {
inline double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                            double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1);
}
} // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double rel_tol = 1e-12, int depth = 52) {
    if (b <= a) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = detail::simpson(a, fa, b, fb, fm);
    const double tol = std::abs(whole) * rel_tol + 1e-300;
    return detail::adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, depth);
}

// Quadrature route for the jitter integral: integrates 10^(L(f)/10) through
// evaluate_psd only, segment by segment so breakpoints are never straddled.
inline double jitter_by_quadrature(const combsync::noise::PhaseNoiseProfile& profile,
                                   const combsync::noise::Band& band) {
    double integral = 0.0;
    for (const auto& seg : profile.segments()) {
        const double a = std::max(band.f_low_hz, seg.f_start_hz);
        const double b = std::min(band.f_high_hz, seg.f_end_hz);
        if (b <= a) continue;
        integral += adaptive_simpson(
            [&profile](double f) {
                return std::pow(10.0, combsync::noise::evaluate_psd(profile, f) / 10.0);
            },
            a, b);
    }
    return std::sqrt(2.0 * integral) / (2.0 * kPi * profile.carrier_hz());
}

// --- naive DFT (oracle for the radix-2 FFT) ----------------------------

inline std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x,
                                                   bool inverse = false) {
    const std::size_t n = x.size();
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = sign * 2.0 * kPi * static_cast<double>(k * j % n) / static_cast<double>(n);
            acc += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

// --- brute-force dispersion fading oracle -------------------------------
//
// Complex field per comb line with the full quadratic dispersion phase,
// square-law detection sampled over one repetition period, Fourier
// extraction of harmonic k, normalized by the dispersion-free case.

inline double comb_harmonic_oracle(const combsync::optics::CombSpec& comb,
                                   const combsync::optics::DispersiveSpan& span, int k) {
    const int n = comb.n_lines();
    const double center = (n - 1) / 2.0;
    const double lambda = span.reference_wavelength_m > 0.0 ? span.reference_wavelength_m
                                                            : comb.center_wavelength_m;
    const double beta2 = -span.dispersion_s_per_m2 * lambda * lambda /
                         (2.0 * kPi * combsync::kSpeedOfLight);

    std::size_t nt = 8;
    while (nt < static_cast<std::size_t>(4 * n)) nt *= 2;

    const auto harmonic_mag = [&](double length_m) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t j = 0; j < nt; ++j) {
            const double t = static_cast<double>(j) / (static_cast<double>(nt) * comb.f_rep_hz);
            std::complex<double> field(0.0, 0.0);
            for (int m = 0; m < n; ++m) {
                const double omega = 2.0 * kPi * (m - center) * comb.f_rep_hz;
                const double phase = omega * t + 0.5 * beta2 * omega * omega * length_m;
                field += comb.envelope[static_cast<std::size_t>(m)] *
                         std::complex<double>(std::cos(phase), std::sin(phase));
            }
            const double intensity = std::norm(field);
            const double ang = -2.0 * kPi * static_cast<double>(k) * static_cast<double>(j) /
                               static_cast<double>(nt);
            acc += intensity * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        return std::abs(acc);
    };

    const double reference = harmonic_mag(0.0);
    if (reference <= 0.0) return 0.0;
    return harmonic_mag(span.length_m) / reference;
}

// --- ensemble periodogram ------------------------------------------------
//
// Averages one-sided periodograms of synthesized records over seeds, then
// over logarithmic frequency bands, and reports the worst deviation in dB
// from the band-averaged model PSD.

inline double max_periodogram_deviation_db(const combsync::noise::PhaseNoiseProfile& profile,
                                           double sample_rate_hz, std::size_t n, int n_seeds,
                                           double f_lo, double f_hi, int bands_per_decade = 6,
                                           std::size_t min_bins_per_band = 8) {
    const double df = sample_rate_hz / static_cast<double>(n);
    std::vector<double> mean_power(n / 2, 0.0);

    for (int seed = 1; seed <= n_seeds; ++seed) {
        const auto record = combsync::noise::synthesize_phase(profile, sample_rate_hz, n,
                                                              static_cast<std::uint64_t>(seed));
        std::vector<std::complex<double>> spectrum(n);
        const double to_rad = 2.0 * kPi * profile.carrier_hz();
        for (std::size_t i = 0; i < n; ++i) spectrum[i] = record.samples_s[i] * to_rad;
        combsync::fft_radix2(spectrum, false);
        for (std::size_t m = 1; m < n / 2; ++m) mean_power[m] += std::norm(spectrum[m]);
    }
    const double norm = 1.0 / (static_cast<double>(n_seeds) * sample_rate_hz * static_cast<double>(n));
    for (double& p : mean_power) p *= 2.0 * norm; // one-sided PSD, rad^2/Hz

    double worst_db = 0.0;
    const double band_ratio = std::pow(10.0, 1.0 / bands_per_decade);
    double band_lo = f_lo;
    while (band_lo < f_hi * 0.999) {
        double band_hi = std::min(band_lo * band_ratio, f_hi);
        std::size_t m_lo = static_cast<std::size_t>(std::ceil(band_lo / df));
        std::size_t m_hi = static_cast<std::size_t>(std::floor(band_hi / df));
        // Grow thin bands upward until they hold enough bins to average.
        while (m_hi - m_lo + 1 < min_bins_per_band && band_hi < f_hi * 0.999) {
            band_hi = std::min(band_hi * band_ratio, f_hi);
            m_hi = static_cast<std::size_t>(std::floor(band_hi / df));
        }
        if (m_lo < 1) m_lo = 1;
        if (m_hi >= n / 2) m_hi = n / 2 - 1;
        if (m_hi < m_lo) break;

        double est = 0.0, model = 0.0;
        for (std::size_t m = m_lo; m <= m_hi; ++m) {
            est += mean_power[m];
            const double f = df * static_cast<double>(m);
            model += 2.0 * std::pow(10.0, combsync::noise::evaluate_psd(profile, f) / 10.0);
        }
        const double dev_db = 10.0 * std::log10(est / model);
        worst_db = std::max(worst_db, std::abs(dev_db));
        band_lo = band_hi;
    }
    return worst_db;
}

// --- random generators ---------------------------------------------------

inline combsync::noise::PhaseNoiseProfile random_profile(combsync::Rng& rng) {
    const int n_segs = 1 + static_cast<int>(rng.uniform01() * 4.0);
    const double f0 = std::pow(10.0, 1.0 + rng.uniform01() * 3.0); // 10 Hz .. 10 kHz
    static const double slopes[] = {-40.0, -30.0, -20.0, -10.0, 0.0, 10.0};

    std::vector<combsync::noise::Segment> segs;
    double f_start = f0;
    double level = -80.0 - rng.uniform01() * 60.0;
    for (int i = 0; i < n_segs; ++i) {
        const double span_decades = 0.5 + rng.uniform01() * 2.0;
        const double f_end = f_start * std::pow(10.0, span_decades);
        const double slope = slopes[rng.next_u64() % 6];
        segs.push_back({f_start, f_end, level, slope});
        level += slope * span_decades;
        f_start = f_end;
    }
    const double carrier = std::pow(10.0, 8.0 + rng.uniform01() * 2.5);
    return combsync::noise::PhaseNoiseProfile(carrier, std::move(segs), -130.0);
}

inline combsync::optics::CombSpec random_comb(combsync::Rng& rng, int max_lines = 64) {
    const int n = 2 + static_cast<int>(rng.uniform01() * static_cast<double>(max_lines - 1));
    combsync::optics::CombSpec comb;
    comb.f_rep_hz = (0.5 + rng.uniform01() * 9.5) * 1e9;
    comb.center_wavelength_m = 1551.1e-9;
    comb.envelope.resize(static_cast<std::size_t>(std::min(n, max_lines)));
    for (double& w : comb.envelope) w = 0.05 + rng.uniform01() * 0.95;
    return comb;
}

} // namespace testsupport
