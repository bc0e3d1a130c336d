#pragma once

#include <vector>

namespace combsync::fiber {

/// Temperature as a function of time: sinusoid, linear ramp, or a sampled
/// trace with linear interpolation. Immutable after construction.
class TemperatureProfile {
public:
    enum class Kind { Sinusoid, Ramp, Trace };

    static TemperatureProfile sinusoid(double amplitude_K, double period_s, double phase_rad,
                                       double mean_K);
    static TemperatureProfile ramp(double rate_K_per_s, double start_K);
    /// Timestamps must be strictly increasing; queries outside the sampled
    /// span throw std::out_of_range.
    static TemperatureProfile trace(std::vector<double> time_s, std::vector<double> temp_K);

    double at(double t_s) const;
    Kind kind() const { return kind_; }

    // Parameter access for serialization.
    double amplitude_K() const { return amplitude_K_; }
    double period_s() const { return period_s_; }
    double phase_rad() const { return phase_rad_; }
    double mean_K() const { return mean_K_; }
    double rate_K_per_s() const { return rate_K_per_s_; }
    double start_K() const { return start_K_; }
    const std::vector<double>& trace_time_s() const { return time_s_; }
    const std::vector<double>& trace_temp_K() const { return temp_K_; }

private:
    TemperatureProfile() = default;

    Kind kind_ = Kind::Sinusoid;
    double amplitude_K_ = 0.0, period_s_ = 1.0, phase_rad_ = 0.0, mean_K_ = 293.15;
    double rate_K_per_s_ = 0.0, start_K_ = 293.15;
    std::vector<double> time_s_, temp_K_;
};

/// Fiber span with a temperature-driven propagation delay. Thermal delay
/// drift is quasi-static: the delay follows the bound temperature profile
/// instantly (drift timescales are hours, transit times microseconds).
struct FiberLink {
    double length_km = 0.0;
    double thermal_coeff_ps_per_km_K = 39.0; // standard single-mode fiber
    double base_delay_s = 0.0;
    double attenuation_db_per_km = 0.2;
    TemperatureProfile profile = TemperatureProfile::sinusoid(0.0, 86400.0, 0.0, 293.15);

    void validate() const;
};

/// Group delay of `length_km` of fiber at the reference temperature.
double base_delay_from_length(double length_km, double group_index = 1.468);

/// One-way thermal delay drift δφ(t) = length·coeff·(T(t) - T(0)), seconds.
/// Drift only; the static base delay is reported separately.
double one_way_shift(const FiberLink& link, double t_s);

/// Forward/backward split of the round-trip drift. `asymmetry` in [-1, 1]
/// biases the forward path: forward = (1+a)·δφ, backward = (1-a)·δφ, so the
/// round trip is 2δφ regardless and the halving rule mis-estimates the
/// forward path by a·δφ.
struct TwoWayShift {
    double forward_s = 0.0;
    double backward_s = 0.0;
    double two_way_s = 0.0;
};

TwoWayShift two_way_shift(const FiberLink& link, double t_s, double asymmetry = 0.0);

} // namespace combsync::fiber
