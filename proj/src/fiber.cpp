#include "combsync/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "combsync/util.hpp"

namespace combsync::fiber {

TemperatureProfile TemperatureProfile::sinusoid(double amplitude_K, double period_s,
                                                double phase_rad, double mean_K) {
    if (!(period_s > 0.0)) throw std::invalid_argument("TemperatureProfile: period must be > 0");
    TemperatureProfile p;
    p.kind_ = Kind::Sinusoid;
    p.amplitude_K_ = amplitude_K;
    p.period_s_ = period_s;
    p.phase_rad_ = phase_rad;
    p.mean_K_ = mean_K;
    return p;
}

TemperatureProfile TemperatureProfile::ramp(double rate_K_per_s, double start_K) {
    TemperatureProfile p;
    p.kind_ = Kind::Ramp;
    p.rate_K_per_s_ = rate_K_per_s;
    p.start_K_ = start_K;
    return p;
}

TemperatureProfile TemperatureProfile::trace(std::vector<double> time_s,
                                             std::vector<double> temp_K) {
    if (time_s.size() != temp_K.size() || time_s.empty()) {
        throw std::invalid_argument("TemperatureProfile: trace arrays empty or mismatched");
    }
    for (std::size_t i = 1; i < time_s.size(); ++i) {
        if (!(time_s[i] > time_s[i - 1])) {
            throw std::invalid_argument("TemperatureProfile: trace timestamps must be strictly increasing");
        }
    }
    TemperatureProfile p;
    p.kind_ = Kind::Trace;
    p.time_s_ = std::move(time_s);
    p.temp_K_ = std::move(temp_K);
    return p;
}

double TemperatureProfile::at(double t_s) const {
    switch (kind_) {
    case Kind::Sinusoid:
        return mean_K_ + amplitude_K_ * std::sin(6.283185307179586 * t_s / period_s_ + phase_rad_);
    case Kind::Ramp:
        return start_K_ + rate_K_per_s_ * t_s;
    case Kind::Trace: {
        if (t_s < time_s_.front() || t_s > time_s_.back()) {
            throw std::out_of_range("TemperatureProfile: query outside trace span");
        }
        const auto it = std::upper_bound(time_s_.begin(), time_s_.end(), t_s);
        if (it == time_s_.begin()) return temp_K_.front();
        if (it == time_s_.end()) return temp_K_.back();
        const std::size_t hi = static_cast<std::size_t>(it - time_s_.begin());
        const std::size_t lo = hi - 1;
        const double w = (t_s - time_s_[lo]) / (time_s_[hi] - time_s_[lo]);
        return temp_K_[lo] + w * (temp_K_[hi] - temp_K_[lo]);
    }
    }
    return mean_K_;
}

void FiberLink::validate() const {
    if (length_km < 0.0) throw std::invalid_argument("FiberLink: length must be >= 0");
    if (base_delay_s < 0.0) throw std::invalid_argument("FiberLink: base delay must be >= 0");
    if (!std::isfinite(thermal_coeff_ps_per_km_K)) {
        throw std::invalid_argument("FiberLink: bad thermal coefficient");
    }
}

double base_delay_from_length(double length_km, double group_index) {
    return length_km * 1000.0 * group_index / kSpeedOfLight;
}

double one_way_shift(const FiberLink& link, double t_s) {
    const double delta_T = link.profile.at(t_s) - link.profile.at(0.0);
    return link.length_km * link.thermal_coeff_ps_per_km_K * 1e-12 * delta_T;
}

TwoWayShift two_way_shift(const FiberLink& link, double t_s, double asymmetry) {
    if (asymmetry < -1.0 || asymmetry > 1.0) {
        throw std::invalid_argument("two_way_shift: asymmetry must be in [-1, 1]");
    }
    const double one_way = one_way_shift(link, t_s);
    TwoWayShift out;
    out.forward_s = (1.0 + asymmetry) * one_way;
    out.backward_s = (1.0 - asymmetry) * one_way;
    out.two_way_s = out.forward_s + out.backward_s;
    return out;
}

} // namespace combsync::fiber
