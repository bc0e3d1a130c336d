#include "combsync/optics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

#include "combsync/util.hpp"

namespace combsync::optics {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void CombSpec::validate() const {
    if (!(f_rep_hz > 0.0)) throw std::invalid_argument("CombSpec: f_rep must be > 0");
    if (!(center_wavelength_m > 0.0)) {
        throw std::invalid_argument("CombSpec: center wavelength must be > 0");
    }
    if (envelope.empty()) throw std::invalid_argument("CombSpec: no lines");
    double total = 0.0;
    for (const double w : envelope) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("CombSpec: weights must be finite and >= 0");
        }
        total += w;
    }
    if (total == 0.0) throw std::invalid_argument("CombSpec: all weights are zero");
}

CombSpec make_uniform_comb(double f_rep_hz, double center_wavelength_m, int n_lines) {
    if (n_lines < 1) throw std::invalid_argument("make_uniform_comb: n_lines must be >= 1");
    CombSpec comb{f_rep_hz, center_wavelength_m,
                  std::vector<double>(static_cast<std::size_t>(n_lines), 1.0)};
    comb.validate();
    return comb;
}

CombSpec make_gaussian_comb(double f_rep_hz, double center_wavelength_m, int n_lines,
                            double fwhm_lines) {
    if (n_lines < 1) throw std::invalid_argument("make_gaussian_comb: n_lines must be >= 1");
    if (!(fwhm_lines > 0.0)) throw std::invalid_argument("make_gaussian_comb: fwhm must be > 0");
    const double center = (n_lines - 1) / 2.0;
    const double sigma = fwhm_lines / 2.3548200450309493; // FWHM -> sigma
    std::vector<double> env(static_cast<std::size_t>(n_lines));
    for (int i = 0; i < n_lines; ++i) {
        const double d = (i - center) / sigma;
        env[static_cast<std::size_t>(i)] = std::exp(-0.5 * d * d);
    }
    CombSpec comb{f_rep_hz, center_wavelength_m, std::move(env)};
    comb.validate();
    return comb;
}

double beat_phase_theta(const CombSpec& comb, const DispersiveSpan& span) {
    const double lambda = span.reference_wavelength_m > 0.0 ? span.reference_wavelength_m
                                                            : comb.center_wavelength_m;
    return kTwoPi * comb.f_rep_hz * comb.f_rep_hz * span.dispersion_s_per_m2 *
           span.length_m * lambda * lambda / kSpeedOfLight;
}

std::vector<Harmonic> rf_comb_harmonics(const CombSpec& comb, const DispersiveSpan& span,
                                        const PhotodetectorSpec& pd) {
    comb.validate();
    if (!(pd.bandwidth_hz > 0.0)) {
        throw std::invalid_argument("rf_comb_harmonics: PD bandwidth must be > 0");
    }
    if (span.length_m < 0.0) {
        throw std::invalid_argument("rf_comb_harmonics: span length must be >= 0");
    }

    const int n = comb.n_lines();
    const int k_bw = static_cast<int>(std::floor(pd.bandwidth_hz / comb.f_rep_hz));
    const int k_max = std::min(k_bw, n - 1);
    const double theta = beat_phase_theta(comb, span);

    std::vector<Harmonic> harmonics;
    if (k_bw < 1) return harmonics; // comb spacing beyond the PD: no RF tones

    harmonics.reserve(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) {
        std::complex<double> acc(0.0, 0.0);
        double norm = 0.0;
        for (int m = 0; m + k < n; ++m) {
            const double ww = comb.envelope[static_cast<std::size_t>(m)] *
                              comb.envelope[static_cast<std::size_t>(m + k)];
            const double phase = theta * static_cast<double>(m) * static_cast<double>(k);
            acc += ww * std::complex<double>(std::cos(phase), std::sin(phase));
            norm += ww;
        }
        const double amplitude = norm > 0.0 ? std::abs(acc) / norm : 0.0;
        harmonics.push_back({k, static_cast<double>(k) * comb.f_rep_hz, amplitude});
    }
    return harmonics;
}

CombSpec filtered_comb(const CombSpec& comb, double filter_bandwidth_hz) {
    comb.validate();
    if (!(filter_bandwidth_hz > 0.0)) {
        throw std::invalid_argument("filtered_comb: bandwidth must be > 0");
    }
    const int n = comb.n_lines();
    const double center = (n - 1) / 2.0;
    const double half_bw = filter_bandwidth_hz / 2.0;

    int first = n, last = -1;
    for (int i = 0; i < n; ++i) {
        const double offset = std::abs((i - center) * comb.f_rep_hz);
        if (offset < half_bw) { // strictly inside the passband
            first = std::min(first, i);
            last = std::max(last, i);
        }
    }
    if (last < first) throw std::invalid_argument("filtered_comb: filter removes every line");

    // A symmetric passband on a centered comb keeps a centered block.
    CombSpec out{comb.f_rep_hz, comb.center_wavelength_m, {}};
    out.envelope.assign(comb.envelope.begin() + first, comb.envelope.begin() + last + 1);
    out.validate();
    return out;
}

void LinkBudget::validate() const {
    if (stages_dbm.empty()) throw std::invalid_argument("LinkBudget: empty ledger");
    for (const auto& [name, dbm] : stages_dbm) {
        if (name.empty() || !std::isfinite(dbm)) {
            throw std::invalid_argument("LinkBudget: bad ledger entry");
        }
    }
}

double estimate_ber(const LinkBudget& budget, double q_at_reference, double crosstalk_alpha) {
    budget.validate();
    if (!(q_at_reference > 0.0)) {
        throw std::invalid_argument("estimate_ber: Q must be > 0");
    }
    const double ratio_linear = std::pow(10.0, budget.clock_to_data_ratio_db / 10.0);
    const double q_eff = std::max(0.0, q_at_reference * (1.0 - crosstalk_alpha * ratio_linear));
    return 0.5 * std::erfc(q_eff / 1.4142135623730950488);
}

} // namespace combsync::optics
