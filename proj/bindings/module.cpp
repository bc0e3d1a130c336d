#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "combsync/fiber.hpp"
#include "combsync/json_io.hpp"
#include "combsync/noise.hpp"
#include "combsync/optics.hpp"
#include "combsync/presets.hpp"
#include "combsync/protocol.hpp"
#include "combsync/sim.hpp"

namespace py = pybind11;
using namespace combsync;

namespace {

noise::Band band_from_tuple(std::pair<double, double> band) {
    return noise::Band{band.first, band.second};
}

std::map<std::string, std::vector<double>> scenario_series(const std::string& scenario_json, int ru) {
    const sim::Scenario scenario = io::scenario_from_json(scenario_json);
    const sim::ScenarioReport report = sim::run_scenario(scenario);
    const sim::RuSeries& s = report.series.at(static_cast<std::size_t>(ru));
    return {{"time_s", s.time_s},
            {"two_way_measured_s", s.two_way_measured_s},
            {"synchronized_s", s.synchronized_s},
            {"estimated_uncompensated_s", s.estimated_uncompensated_s},
            {"true_one_way_s", s.true_one_way_s},
            {"true_two_way_s", s.true_two_way_s}};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Clock phase caching and comb RF carrier distribution simulator";

    // --- noise ---------------------------------------------------------
    py::class_<noise::Segment>(m, "Segment")
        .def(py::init<double, double, double, double>(), py::arg("f_start_hz"),
             py::arg("f_end_hz"), py::arg("level_dbc_hz"), py::arg("slope_db_per_decade") = 0.0)
        .def_readwrite("f_start_hz", &noise::Segment::f_start_hz)
        .def_readwrite("f_end_hz", &noise::Segment::f_end_hz)
        .def_readwrite("level_dbc_hz", &noise::Segment::level_dbc_hz)
        .def_readwrite("slope_db_per_decade", &noise::Segment::slope_db_per_decade);

    py::class_<noise::PhaseNoiseProfile>(m, "PhaseNoiseProfile")
        .def(py::init<double, std::vector<noise::Segment>, double>(), py::arg("carrier_hz"),
             py::arg("segments"), py::arg("white_floor_dbc_hz") = -130.0)
        .def_property_readonly("carrier_hz", &noise::PhaseNoiseProfile::carrier_hz)
        .def_property_readonly("segments", &noise::PhaseNoiseProfile::segments)
        .def_property_readonly("white_floor_dbc_hz", &noise::PhaseNoiseProfile::white_floor_dbc_hz)
        .def("to_json", [](const noise::PhaseNoiseProfile& p) { return io::profile_to_json(p); })
        .def_static("from_json",
                    [](const std::string& text) { return io::profile_from_json(text); });

    py::class_<noise::JitterFigure>(m, "JitterFigure")
        .def_readonly("rms_jitter_s", &noise::JitterFigure::rms_jitter_s)
        .def_readonly("carrier_hz", &noise::JitterFigure::carrier_hz)
        .def_property_readonly("integration_band", [](const noise::JitterFigure& f) {
            return std::make_pair(f.integration_band.f_low_hz, f.integration_band.f_high_hz);
        });

    m.def("evaluate_psd", [](const noise::PhaseNoiseProfile& p, double offset_hz) {
        return noise::evaluate_psd(p, offset_hz);
    }, py::arg("profile"), py::arg("offset_hz"));

    m.def("integrate_jitter",
          [](const noise::PhaseNoiseProfile& p, std::pair<double, double> band) {
              return noise::integrate_jitter(p, band_from_tuple(band));
          },
          py::arg("profile"), py::arg("band") = std::make_pair(1e3, 10e6));

    m.def("apply_divider", &noise::apply_divider, py::arg("profile"), py::arg("ratio"));

    m.def("synthesize_phase",
          [](const noise::PhaseNoiseProfile& p, double sample_rate_hz, std::size_t n,
             std::uint64_t seed) {
              const noise::PhaseRecord record = noise::synthesize_phase(p, sample_rate_hz, n, seed);
              return record.samples_s;
          },
          py::arg("profile"), py::arg("sample_rate_hz"), py::arg("n"), py::arg("seed") = 1);

    m.def("rms_of_record", [](const std::vector<double>& samples, double sample_rate_hz) {
        return noise::rms_of_record({sample_rate_hz, samples});
    }, py::arg("samples"), py::arg("sample_rate_hz") = 1.0);

    m.def("preset_names", &presets::names);
    m.def("load_preset", &presets::load, py::arg("name"));
    m.def("describe_preset", &presets::describe, py::arg("name"));

    // --- optics --------------------------------------------------------
    py::class_<optics::CombSpec>(m, "CombSpec")
        .def(py::init([](double f_rep_hz, double center_wavelength_m, std::vector<double> envelope) {
                 optics::CombSpec comb{f_rep_hz, center_wavelength_m, std::move(envelope)};
                 comb.validate();
                 return comb;
             }),
             py::arg("f_rep_hz"), py::arg("center_wavelength_m"), py::arg("envelope"))
        .def_readwrite("f_rep_hz", &optics::CombSpec::f_rep_hz)
        .def_readwrite("center_wavelength_m", &optics::CombSpec::center_wavelength_m)
        .def_readwrite("envelope", &optics::CombSpec::envelope)
        .def_property_readonly("n_lines", &optics::CombSpec::n_lines);

    m.def("make_uniform_comb", &optics::make_uniform_comb, py::arg("f_rep_hz"),
          py::arg("center_wavelength_m"), py::arg("n_lines"));
    m.def("make_gaussian_comb", &optics::make_gaussian_comb, py::arg("f_rep_hz"),
          py::arg("center_wavelength_m"), py::arg("n_lines"), py::arg("fwhm_lines"));

    py::class_<optics::DispersiveSpan>(m, "DispersiveSpan")
        .def(py::init([](double length_m, double dispersion_ps_per_nm_km, double reference_wavelength_m) {
                 return optics::DispersiveSpan{length_m,
                                               optics::dispersion_si_from_ps_nm_km(dispersion_ps_per_nm_km),
                                               reference_wavelength_m};
             }),
             py::arg("length_m"), py::arg("dispersion_ps_per_nm_km") = 17.0,
             py::arg("reference_wavelength_m") = 1550e-9)
        .def_readwrite("length_m", &optics::DispersiveSpan::length_m)
        .def_readwrite("dispersion_s_per_m2", &optics::DispersiveSpan::dispersion_s_per_m2)
        .def_readwrite("reference_wavelength_m", &optics::DispersiveSpan::reference_wavelength_m);

    py::class_<optics::PhotodetectorSpec>(m, "PhotodetectorSpec")
        .def(py::init<double, double>(), py::arg("bandwidth_hz") = 40e9,
             py::arg("responsivity_relative") = 1.0)
        .def_readwrite("bandwidth_hz", &optics::PhotodetectorSpec::bandwidth_hz)
        .def_readwrite("responsivity_relative", &optics::PhotodetectorSpec::responsivity_relative);

    m.def("rf_comb_harmonics",
          [](const optics::CombSpec& comb, const optics::DispersiveSpan& span,
             const optics::PhotodetectorSpec& pd) {
              std::vector<std::tuple<int, double, double>> rows;
              for (const auto& h : optics::rf_comb_harmonics(comb, span, pd)) {
                  rows.emplace_back(h.k, h.freq_hz, h.amplitude);
              }
              return rows;
          },
          py::arg("comb"), py::arg("span"), py::arg("pd") = optics::PhotodetectorSpec{});

    m.def("filtered_comb", &optics::filtered_comb, py::arg("comb"), py::arg("filter_bandwidth_hz"));

    m.def("estimate_ber",
          [](double clock_to_data_ratio_db, double q_at_reference, double alpha) {
              optics::LinkBudget budget;
              budget.stages_dbm = {{"reference", 0.0}};
              budget.clock_to_data_ratio_db = clock_to_data_ratio_db;
              return optics::estimate_ber(budget, q_at_reference, alpha);
          },
          py::arg("clock_to_data_ratio_db") = 6.57, py::arg("q_at_reference") = optics::kDefaultQReference,
          py::arg("alpha") = optics::kDefaultCrosstalkAlpha);

    // --- fiber ---------------------------------------------------------
    py::class_<fiber::TemperatureProfile>(m, "TemperatureProfile")
        .def_static("sinusoid", &fiber::TemperatureProfile::sinusoid, py::arg("amplitude_K"),
                    py::arg("period_s"), py::arg("phase_rad") = 0.0, py::arg("mean_K") = 293.15)
        .def_static("ramp", &fiber::TemperatureProfile::ramp, py::arg("rate_K_per_s"),
                    py::arg("start_K") = 293.15)
        .def_static("trace", &fiber::TemperatureProfile::trace, py::arg("time_s"), py::arg("temp_K"))
        .def("at", &fiber::TemperatureProfile::at, py::arg("t_s"));

    py::class_<fiber::FiberLink>(m, "FiberLink")
        .def(py::init([](double length_km, double thermal_coeff_ps_per_km_K,
                         const fiber::TemperatureProfile& profile) {
                 fiber::FiberLink link;
                 link.length_km = length_km;
                 link.thermal_coeff_ps_per_km_K = thermal_coeff_ps_per_km_K;
                 link.base_delay_s = fiber::base_delay_from_length(length_km);
                 link.profile = profile;
                 link.validate();
                 return link;
             }),
             py::arg("length_km"), py::arg("thermal_coeff_ps_per_km_K") = 39.0,
             py::arg("profile") = fiber::TemperatureProfile::sinusoid(0.0, 86400.0, 0.0, 293.15))
        .def_readwrite("length_km", &fiber::FiberLink::length_km)
        .def_readwrite("thermal_coeff_ps_per_km_K", &fiber::FiberLink::thermal_coeff_ps_per_km_K)
        .def_readwrite("base_delay_s", &fiber::FiberLink::base_delay_s);

    m.def("one_way_shift", &fiber::one_way_shift, py::arg("link"), py::arg("t_s"));
    m.def("two_way_shift",
          [](const fiber::FiberLink& link, double t_s, double asymmetry) {
              const auto shift = fiber::two_way_shift(link, t_s, asymmetry);
              return std::make_tuple(shift.forward_s, shift.backward_s, shift.two_way_s);
          },
          py::arg("link"), py::arg("t_s"), py::arg("asymmetry") = 0.0);

    // --- protocol ------------------------------------------------------
    m.def("wrap_to_half_ui", &protocol::wrap_to_half_ui, py::arg("x"), py::arg("ui"));
    m.def("quantize_to_step", &protocol::quantize_to_step, py::arg("x"), py::arg("step"));
    m.def("estimate_uncompensated", &protocol::estimate_uncompensated,
          py::arg("synchronized_offsets"), py::arg("two_way_series"));

    // --- sim -----------------------------------------------------------
    m.def("default_scenario_json", [] { return io::scenario_to_json(sim::default_scenario()); });
    m.def("short_scenario_json",
          [](double duration_s) { return io::scenario_to_json(sim::short_scenario(duration_s)); },
          py::arg("duration_s") = 60.0);
    m.def("run_scenario_json",
          [](const std::string& scenario_json) {
              return io::report_to_json(sim::run_scenario(io::scenario_from_json(scenario_json)));
          },
          py::arg("scenario_json"));
    m.def("run_scenario_series", &scenario_series, py::arg("scenario_json"), py::arg("ru") = 0);
    m.def("histogram",
          [](const std::vector<double>& offsets, double bin_width_s) {
              const sim::HistogramBins bins = sim::histogram(offsets, bin_width_s);
              return std::make_tuple(bins.origin_s, bins.bin_width_s, bins.counts);
          },
          py::arg("offsets"), py::arg("bin_width_s"));
    m.def("jitter_report", [](const std::vector<std::string>& names) {
        std::vector<std::tuple<std::string, double, double>> rows;
        for (const auto& row : sim::jitter_report(names)) {
            rows.emplace_back(row.preset, row.carrier_hz, row.rms_jitter_s);
        }
        return rows;
    }, py::arg("preset_names"));
}
