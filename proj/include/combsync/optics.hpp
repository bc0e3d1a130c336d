#pragma once

#include <string>
#include <utility>
#include <vector>

namespace combsync::optics {

/// Optical frequency comb: `envelope.size()` lines spaced `f_rep_hz` apart,
/// centered on `center_wavelength_m`. Weights are linear field amplitudes,
/// non-negative and not all zero.
struct CombSpec {
    double f_rep_hz = 0.0;
    double center_wavelength_m = 0.0;
    std::vector<double> envelope;

    int n_lines() const { return static_cast<int>(envelope.size()); }
    void validate() const;
};

CombSpec make_uniform_comb(double f_rep_hz, double center_wavelength_m, int n_lines);
/// Gaussian field envelope with the given FWHM expressed in line counts.
CombSpec make_gaussian_comb(double f_rep_hz, double center_wavelength_m, int n_lines,
                            double fwhm_lines);

/// Fiber span reduced to its chromatic dispersion: quadratic spectral phase
/// only (β₂ = -D·λ²/(2πc)).
struct DispersiveSpan {
    double length_m = 0.0;
    double dispersion_s_per_m2 = 0.0; // SI form of ps/(nm·km): 1 ps/(nm·km) = 1e-6 s/m²
    double reference_wavelength_m = 1550e-9;
};

inline double dispersion_si_from_ps_nm_km(double d_ps_nm_km) { return d_ps_nm_km * 1e-6; }
inline double dispersion_ps_nm_km_from_si(double d_si) { return d_si * 1e6; }

struct PhotodetectorSpec {
    double bandwidth_hz = 40e9;
    double responsivity_relative = 1.0;
};

/// One photodetected beat tone at k·f_rep with its dispersion-faded relative
/// amplitude (1.0 at zero dispersion).
struct Harmonic {
    int k = 0;
    double freq_hz = 0.0;
    double amplitude = 0.0;
};

/// Pairwise beat phase step θ = 2π·f_rep²·D·L·λ²/c. Harmonic k of the
/// detected RF comb sums comb-line pairs with phases θ·k·m, so its
/// normalized amplitude is |Σ w_m·w_{m+k}·e^{iθkm}| / Σ w_m·w_{m+k}.
double beat_phase_theta(const CombSpec& comb, const DispersiveSpan& span);

/// RF comb out of square-law detection, harmonics k = 0..min(⌊BW/f_rep⌋,
/// n_lines-1). Empty when even the fundamental exceeds the PD bandwidth.
std::vector<Harmonic> rf_comb_harmonics(const CombSpec& comb, const DispersiveSpan& span,
                                        const PhotodetectorSpec& pd);

/// Ideal rectangular optical bandpass: keeps lines strictly inside
/// ±bandwidth/2 of the comb center. Throws if nothing survives.
CombSpec filtered_comb(const CombSpec& comb, double filter_bandwidth_hz);

/// Ordered optical power ledger through the link plus the clock/data power
/// ratio presented to the photodiode.
struct LinkBudget {
    std::vector<std::pair<std::string, double>> stages_dbm;
    double clock_to_data_ratio_db = 0.0;

    void validate() const;
};

/// Q-factor degradation per unit linear clock/data power ratio in the
/// crosstalk penalty model Q_eff = Q·(1 - α·r).
inline constexpr double kDefaultCrosstalkAlpha = 0.015;
inline constexpr double kDefaultQReference = 7.0;

/// BER = 0.5·erfc(Q_eff/√2) with Q_eff penalized by clock-over-data
/// crosstalk. Monotone decreasing in q_at_reference.
double estimate_ber(const LinkBudget& budget, double q_at_reference,
                    double crosstalk_alpha = kDefaultCrosstalkAlpha);

} // namespace combsync::optics
