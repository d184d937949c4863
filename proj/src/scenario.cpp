#include "spdcsim/scenario.hpp"

#include "spdcsim/io.hpp"
#include "spdcsim/kernels.hpp"
#include "spdcsim/mode_comb.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

namespace spdcsim {

const char* const project_version = "1.0.0";

BiphotonParams ScenarioConfig::biphoton() const
{
    BiphotonParams p =
        BiphotonParams::from_pump(pump_power, pairs_per_watt, signal_decay, idler_decay);
    return p;
}

const std::vector<HyperfineLine>& ScenarioConfig::line_table() const
{
    return lines.empty() ? rb_d1_lines() : lines;
}

const std::vector<std::string>& ScenarioConfig::known_scenarios()
{
    static const std::vector<std::string> ids = {"fig1c", "fig2a", "fig2b", "fig3a",
                                                 "fig3b", "fig4a", "fig4b", "custom"};
    return ids;
}

ScenarioConfig default_config()
{
    ScenarioConfig cfg;
    cfg.crystal = CrystalSpec::ktp_default();
    return cfg;
}

void apply_preset(ScenarioConfig& cfg, const std::string& id)
{
    const auto& known = ScenarioConfig::known_scenarios();
    if (std::find(known.begin(), known.end(), id) == known.end())
        throw std::invalid_argument("unknown scenario '" + id + "'");
    cfg.id = id;
    if (id == "fig1c") {
        cfg.duration = 60.0;
    } else if (id == "fig2a") {
        const double lo = -10.0 / cfg.signal_decay, hi = 10.0 / cfg.idler_decay;
        cfg.modulation = ModulationProfile::square((hi - lo) / 7.0, 0.5, 7, lo);
    } else if (id == "fig2b") {
        cfg.modulation = ModulationProfile::step_profile(0.0, /*open_after=*/false);
    } else if (id == "fig3b" || id == "fig4a" || id == "fig4b") {
        // put the mode chain on the two 87Rb target lines: mode M1 sits on
        // the F=1 -> F'=2 transition at the reference temperature
        cfg.anchor_detuning = 6131.316e6;
    }
}

namespace {

std::string axis_string(Axis a) { return axis_name(a); }

void sellmeier_to_tree(ConfigTree& t, const std::string& prefix, const SellmeierSet& s)
{
    t.set(prefix + ".a", s.a);
    t.set(prefix + ".b1", s.b1);
    t.set(prefix + ".c1", s.c1);
    t.set(prefix + ".b2", s.b2);
    t.set(prefix + ".c2", s.c2);
    t.set(prefix + ".d", s.d);
    t.set(prefix + ".dn_dt_per_k", s.dn_dt);
    t.set(prefix + ".t_ref_k", s.t_ref);
    t.set(prefix + ".band_lo_um", s.band_lo * 1e6);
    t.set(prefix + ".band_hi_um", s.band_hi * 1e6);
}

void sellmeier_from_tree(const ConfigTree& t, const std::string& prefix, SellmeierSet& s)
{
    s.a = t.get_double(prefix + ".a", s.a);
    s.b1 = t.get_double(prefix + ".b1", s.b1);
    s.c1 = t.get_double(prefix + ".c1", s.c1);
    s.b2 = t.get_double(prefix + ".b2", s.b2);
    s.c2 = t.get_double(prefix + ".c2", s.c2);
    s.d = t.get_double(prefix + ".d", s.d);
    s.dn_dt = t.get_double(prefix + ".dn_dt_per_k", s.dn_dt);
    s.t_ref = t.get_double(prefix + ".t_ref_k", s.t_ref);
    s.band_lo = t.get_double(prefix + ".band_lo_um", s.band_lo * 1e6) * 1e-6;
    s.band_hi = t.get_double(prefix + ".band_hi_um", s.band_hi * 1e6) * 1e-6;
}

std::string doubles_to_string(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? "," : "") + io::format_number(v[i]);
    return out;
}

} // namespace

ConfigTree config_to_tree(const ScenarioConfig& cfg)
{
    ConfigTree t;
    t.set("scenario.id", cfg.id);

    const CrystalSpec& c = cfg.crystal;
    t.set("crystal.length_mm", c.length * 1e3);
    t.set("crystal.poling_period_um", c.poling_period * 1e6);
    t.set("crystal.temperature_k", c.temperature);
    t.set("crystal.reference_temperature_k", c.reference_temperature);
    t.set("crystal.alpha_t_ghz_per_k", c.alpha_t * 1e-9);
    t.set("crystal.pump_wavelength_nm", c.pump_wavelength * 1e9);
    t.set("crystal.double_pass", c.double_pass);
    t.set("crystal.signal_axis", axis_string(c.signal_axis));
    t.set("crystal.idler_axis", axis_string(c.idler_axis));
    t.set("crystal.fd_step_nm", c.fd_step * 1e9);
    t.set("crystal.gain_peak_offset_mhz", c.gain_peak_offset * 1e-6);
    t.set("crystal.anchor_detuning_mhz", cfg.anchor_detuning * 1e-6);
    sellmeier_to_tree(t, "crystal.sellmeier.x", c.sellmeier[0]);
    sellmeier_to_tree(t, "crystal.sellmeier.y", c.sellmeier[1]);
    sellmeier_to_tree(t, "crystal.sellmeier.z", c.sellmeier[2]);

    t.set("biphoton.signal_lifetime_ns", 1e9 / cfg.signal_decay);
    t.set("biphoton.idler_lifetime_ns", 1e9 / cfg.idler_decay);
    t.set("biphoton.pump_power_uw", cfg.pump_power * 1e6);
    t.set("biphoton.pairs_per_watt", cfg.pairs_per_watt);

    const DetectionConfig& d = cfg.detection;
    t.set("detection.eta", d.eta);
    t.set("detection.t_signal", d.t_signal);
    t.set("detection.t_idler", d.t_idler);
    t.set("detection.jitter_model",
          d.jitter_model == DetectionConfig::Jitter::gaussian ? "gaussian" : "uniform");
    t.set("detection.resolution_ps", d.resolution * 1e12);
    t.set("detection.tau_c_ns", d.tau_c * 1e9);
    t.set("detection.bg_signal_cps", d.bg_signal);
    t.set("detection.bg_idler_cps", d.bg_idler);
    t.set("detection.bs_ratio", d.bs_ratio);
    t.set("detection.dead_time_ns", d.dead_time * 1e9);

    const VaporCellSpec& v = cfg.cell;
    t.set("cell.length_mm", v.length * 1e3);
    t.set("cell.temperature_k", v.temperature);
    t.set("cell.fraction_rb87", v.fraction_rb87);
    t.set("cell.window_transmission", v.window_transmission);
    t.set("cell.b_field_mt", v.b_field * 1e3);
    t.set("cell.g_eff", v.g_eff);
    t.set("cell.field_nonuniformity", v.field_nonuniformity);
    t.set("cell.average_nonuniformity", v.average_nonuniformity);
    if (!cfg.lines_file.empty())
        t.set("cell.lines_file", cfg.lines_file);

    const ModulationProfile& m = cfg.modulation;
    switch (m.kind) {
    case ModulationProfile::Kind::identity: t.set("modulation.kind", "identity"); break;
    case ModulationProfile::Kind::square_train: t.set("modulation.kind", "square-train"); break;
    case ModulationProfile::Kind::step: t.set("modulation.kind", "step"); break;
    case ModulationProfile::Kind::sampled: t.set("modulation.kind", "sampled"); break;
    }
    t.set("modulation.latency_ns", m.latency * 1e9);
    t.set("modulation.period_ns", m.period * 1e9);
    t.set("modulation.duty", m.duty);
    t.set("modulation.count", (double)m.count);
    t.set("modulation.start_ns", m.start * 1e9);
    t.set("modulation.edge_ns", m.edge * 1e9);
    t.set("modulation.sense", m.open_after ? "open-after" : "close-after");
    if (!m.grid.empty()) {
        std::vector<double> ns(m.grid);
        for (double& g : ns)
            g *= 1e9;
        t.set("modulation.grid_ns", doubles_to_string(ns));
        t.set("modulation.amplitude", doubles_to_string(m.amplitude));
    }

    t.set("run.duration_s", cfg.duration);
    t.set("run.bin_ps", cfg.bin * 1e12);
    t.set("run.window_ns", cfg.window * 1e9);
    t.set("run.sweep_pump_uw", doubles_to_string(cfg.sweep_pump_uw));
    t.set("run.sweep_duration_s", cfg.sweep_duration);
    t.set("run.seed", std::to_string(cfg.seed));

    t.set("scan.fig3a_half_span_mk", cfg.fig3a_half_span * 1e3);
    t.set("scan.fig3a_step_mk", cfg.fig3a_step * 1e3);
    t.set("scan.peak_cps", cfg.scan_peak_cps);
    t.set("scan.floor_cps", cfg.scan_floor_cps);
    t.set("scan.fig3b_lo_mk", cfg.fig3b_lo * 1e3);
    t.set("scan.fig3b_hi_mk", cfg.fig3b_hi * 1e3);
    t.set("scan.fig3b_step_mk", cfg.fig3b_step * 1e3);
    t.set("scan.fig4a_t_lo_k", cfg.fig4a_t_lo);
    t.set("scan.fig4a_t_hi_k", cfg.fig4a_t_hi);
    t.set("scan.fig4a_points", (double)cfg.fig4a_points);
    t.set("scan.fig4b_span_mt", cfg.fig4b_span * 1e3);
    t.set("scan.fig4b_points", (double)cfg.fig4b_points);

    t.set("output.dir", cfg.out_dir);
    t.set("output.format", cfg.format);
    t.set("output.gnuplot", cfg.emit_gnuplot);
    return t;
}

ScenarioConfig config_from_tree(const ConfigTree& t)
{
    ScenarioConfig cfg = default_config();
    const std::string id = t.get_string("scenario.id", cfg.id);
    apply_preset(cfg, id);

    CrystalSpec& c = cfg.crystal;
    c.length = t.get_double("crystal.length_mm", c.length * 1e3) * 1e-3;
    c.poling_period = t.get_double("crystal.poling_period_um", c.poling_period * 1e6) * 1e-6;
    c.temperature = t.get_double("crystal.temperature_k", c.temperature);
    c.reference_temperature =
        t.get_double("crystal.reference_temperature_k", c.reference_temperature);
    c.alpha_t = t.get_double("crystal.alpha_t_ghz_per_k", c.alpha_t * 1e-9) * 1e9;
    c.pump_wavelength = t.get_double("crystal.pump_wavelength_nm", c.pump_wavelength * 1e9) * 1e-9;
    c.double_pass = t.get_bool("crystal.double_pass", c.double_pass);
    c.signal_axis = axis_from_name(t.get_string("crystal.signal_axis", axis_string(c.signal_axis))[0]);
    c.idler_axis = axis_from_name(t.get_string("crystal.idler_axis", axis_string(c.idler_axis))[0]);
    c.fd_step = t.get_double("crystal.fd_step_nm", c.fd_step * 1e9) * 1e-9;
    c.gain_peak_offset = t.get_double("crystal.gain_peak_offset_mhz", c.gain_peak_offset * 1e-6) * 1e6;
    cfg.anchor_detuning = t.get_double("crystal.anchor_detuning_mhz", cfg.anchor_detuning * 1e-6) * 1e6;
    sellmeier_from_tree(t, "crystal.sellmeier.x", c.sellmeier[0]);
    sellmeier_from_tree(t, "crystal.sellmeier.y", c.sellmeier[1]);
    sellmeier_from_tree(t, "crystal.sellmeier.z", c.sellmeier[2]);

    cfg.signal_decay = 1e9 / t.get_double("biphoton.signal_lifetime_ns", 1e9 / cfg.signal_decay);
    cfg.idler_decay = 1e9 / t.get_double("biphoton.idler_lifetime_ns", 1e9 / cfg.idler_decay);
    cfg.pump_power = t.get_double("biphoton.pump_power_uw", cfg.pump_power * 1e6) * 1e-6;
    cfg.pairs_per_watt = t.get_double("biphoton.pairs_per_watt", cfg.pairs_per_watt);

    DetectionConfig& d = cfg.detection;
    d.eta = t.get_double("detection.eta", d.eta);
    d.t_signal = t.get_double("detection.t_signal", d.t_signal);
    d.t_idler = t.get_double("detection.t_idler", d.t_idler);
    const std::string jm = t.get_string("detection.jitter_model", "gaussian");
    if (jm == "gaussian")
        d.jitter_model = DetectionConfig::Jitter::gaussian;
    else if (jm == "uniform")
        d.jitter_model = DetectionConfig::Jitter::uniform;
    else
        throw std::runtime_error("detection.jitter_model must be gaussian or uniform");
    d.resolution = t.get_double("detection.resolution_ps", d.resolution * 1e12) * 1e-12;
    d.tau_c = t.get_double("detection.tau_c_ns", d.tau_c * 1e9) * 1e-9;
    d.bg_signal = t.get_double("detection.bg_signal_cps", d.bg_signal);
    d.bg_idler = t.get_double("detection.bg_idler_cps", d.bg_idler);
    d.bs_ratio = t.get_double("detection.bs_ratio", d.bs_ratio);
    d.dead_time = t.get_double("detection.dead_time_ns", d.dead_time * 1e9) * 1e-9;

    VaporCellSpec& v = cfg.cell;
    v.length = t.get_double("cell.length_mm", v.length * 1e3) * 1e-3;
    v.temperature = t.get_double("cell.temperature_k", v.temperature);
    v.fraction_rb87 = t.get_double("cell.fraction_rb87", v.fraction_rb87);
    v.window_transmission = t.get_double("cell.window_transmission", v.window_transmission);
    v.b_field = t.get_double("cell.b_field_mt", v.b_field * 1e3) * 1e-3;
    v.g_eff = t.get_double("cell.g_eff", v.g_eff);
    v.field_nonuniformity = t.get_double("cell.field_nonuniformity", v.field_nonuniformity);
    v.average_nonuniformity = t.get_bool("cell.average_nonuniformity", v.average_nonuniformity);
    cfg.lines_file = t.get_string("cell.lines_file", cfg.lines_file);
    if (!cfg.lines_file.empty())
        cfg.lines = load_lines(cfg.lines_file);

    const char* preset_kind = "identity";
    switch (cfg.modulation.kind) {
    case ModulationProfile::Kind::square_train: preset_kind = "square-train"; break;
    case ModulationProfile::Kind::step: preset_kind = "step"; break;
    case ModulationProfile::Kind::sampled: preset_kind = "sampled"; break;
    default: break;
    }
    const std::string kind = t.get_string("modulation.kind", preset_kind);
    const double latency = t.get_double("modulation.latency_ns", cfg.modulation.latency * 1e9) * 1e-9;
    if (kind == "identity") {
        if (t.has("modulation.kind"))
            cfg.modulation = ModulationProfile::identity_profile();
    } else if (kind == "square-train") {
        cfg.modulation = ModulationProfile::square(
            t.get_double("modulation.period_ns", cfg.modulation.period * 1e9) * 1e-9,
            t.get_double("modulation.duty", cfg.modulation.duty),
            (int)t.get_int("modulation.count", cfg.modulation.count),
            t.get_double("modulation.start_ns", cfg.modulation.start * 1e9) * 1e-9, latency);
    } else if (kind == "step") {
        cfg.modulation = ModulationProfile::step_profile(
            t.get_double("modulation.edge_ns", cfg.modulation.edge * 1e9) * 1e-9,
            t.get_string("modulation.sense", cfg.modulation.open_after ? "open-after"
                                                                       : "close-after") == "open-after",
            latency);
    } else if (kind == "sampled") {
        auto grid = t.get_doubles("modulation.grid_ns", {});
        for (double& g : grid)
            g *= 1e-9;
        cfg.modulation =
            ModulationProfile::sampled_profile(grid, t.get_doubles("modulation.amplitude", {}), latency);
    } else {
        throw std::runtime_error("modulation.kind must be identity, square-train, step or sampled");
    }

    cfg.duration = t.get_double("run.duration_s", cfg.duration);
    cfg.bin = t.get_double("run.bin_ps", cfg.bin * 1e12) * 1e-12;
    cfg.window = t.get_double("run.window_ns", cfg.window * 1e9) * 1e-9;
    cfg.sweep_pump_uw = t.get_doubles("run.sweep_pump_uw", cfg.sweep_pump_uw);
    cfg.sweep_duration = t.get_double("run.sweep_duration_s", cfg.sweep_duration);
    cfg.seed = (std::uint64_t)t.get_int("run.seed", (long)cfg.seed);

    cfg.fig3a_half_span = t.get_double("scan.fig3a_half_span_mk", cfg.fig3a_half_span * 1e3) * 1e-3;
    cfg.fig3a_step = t.get_double("scan.fig3a_step_mk", cfg.fig3a_step * 1e3) * 1e-3;
    cfg.scan_peak_cps = t.get_double("scan.peak_cps", cfg.scan_peak_cps);
    cfg.scan_floor_cps = t.get_double("scan.floor_cps", cfg.scan_floor_cps);
    cfg.fig3b_lo = t.get_double("scan.fig3b_lo_mk", cfg.fig3b_lo * 1e3) * 1e-3;
    cfg.fig3b_hi = t.get_double("scan.fig3b_hi_mk", cfg.fig3b_hi * 1e3) * 1e-3;
    cfg.fig3b_step = t.get_double("scan.fig3b_step_mk", cfg.fig3b_step * 1e3) * 1e-3;
    cfg.fig4a_t_lo = t.get_double("scan.fig4a_t_lo_k", cfg.fig4a_t_lo);
    cfg.fig4a_t_hi = t.get_double("scan.fig4a_t_hi_k", cfg.fig4a_t_hi);
    cfg.fig4a_points = (int)t.get_int("scan.fig4a_points", cfg.fig4a_points);
    cfg.fig4b_span = t.get_double("scan.fig4b_span_mt", cfg.fig4b_span * 1e3) * 1e-3;
    cfg.fig4b_points = (int)t.get_int("scan.fig4b_points", cfg.fig4b_points);

    cfg.out_dir = t.get_string("output.dir", cfg.out_dir);
    cfg.format = t.get_string("output.format", cfg.format);
    cfg.emit_gnuplot = t.get_bool("output.gnuplot", cfg.emit_gnuplot);
    return cfg;
}

std::vector<Violation> validate_config(const ScenarioConfig& cfg)
{
    std::vector<Violation> v;
    auto require = [&v](bool ok, const char* field, const std::string& message) {
        if (!ok)
            v.push_back({field, message});
    };

    const auto& known = ScenarioConfig::known_scenarios();
    require(std::find(known.begin(), known.end(), cfg.id) != known.end(), "scenario.id",
            "unknown scenario '" + cfg.id + "'");

    const CrystalSpec& c = cfg.crystal;
    require(c.length > 0.0, "crystal.length_mm", "crystal length must be > 0");
    require(c.poling_period > 0.0, "crystal.poling_period_um", "poling period must be > 0");
    require(c.alpha_t > 0.0, "crystal.alpha_t_ghz_per_k", "temperature tuning coefficient must be > 0");
    require(c.pump_wavelength > 0.0, "crystal.pump_wavelength_nm", "pump wavelength must be > 0");
    require(c.fd_step > 0.0, "crystal.fd_step_nm", "finite-difference step must be > 0");

    // refractive-index invariant sampled over the stated band and 0..100 C
    for (Axis axis : {c.signal_axis, c.idler_axis}) {
        const SellmeierSet& s = c.sellmeier[(int)axis];
        bool ok = s.band_hi > s.band_lo;
        if (ok) {
            for (int i = 0; i <= 24 && ok; ++i) {
                const double lam = std::max(0.5e-6, s.band_lo) +
                                   (std::min(1.2e-6, s.band_hi) - std::max(0.5e-6, s.band_lo)) * i / 24.0;
                for (double tk : {273.15, 323.15, 373.15}) {
                    const double n = refractive_index(c, axis, lam, tk);
                    if (!(std::isfinite(n) && n > 1.0 && n < 3.0))
                        ok = false;
                }
            }
        }
        require(ok, "crystal.sellmeier",
                std::string("refractive index on axis ") + axis_name(axis) +
                    " must stay finite and in (1, 3) over the validity band");
    }

    require(cfg.signal_decay > 0.0, "biphoton.signal_lifetime_ns", "signal decay rate must be > 0");
    require(cfg.idler_decay > 0.0, "biphoton.idler_lifetime_ns", "idler decay rate must be > 0");
    require(cfg.pump_power >= 0.0, "biphoton.pump_power_uw", "pump power must be >= 0");
    require(cfg.pairs_per_watt >= 0.0, "biphoton.pairs_per_watt", "pair-rate calibration must be >= 0");

    const DetectionConfig& d = cfg.detection;
    require(d.eta > 0.0 && d.eta <= 1.0, "detection.eta", "quantum efficiency must be in (0, 1]");
    require(d.t_signal > 0.0 && d.t_signal <= 1.0, "detection.t_signal",
            "signal transmittance must be in (0, 1]");
    require(d.t_idler > 0.0 && d.t_idler <= 1.0, "detection.t_idler",
            "idler transmittance must be in (0, 1]");
    require(d.resolution >= 0.0, "detection.resolution_ps", "timing resolution must be >= 0");
    require(d.tau_c > 0.0, "detection.tau_c_ns", "coincidence window must be > 0");
    require(d.bg_signal >= 0.0 && d.bg_idler >= 0.0, "detection.bg", "background rates must be >= 0");
    require(d.bs_ratio >= 0.0 && d.bs_ratio <= 1.0, "detection.bs_ratio",
            "beam-splitter ratio must be in [0, 1]");
    require(d.dead_time >= 0.0, "detection.dead_time_ns", "dead time must be >= 0");

    const VaporCellSpec& cell = cfg.cell;
    require(cell.length > 0.0, "cell.length_mm", "cell length must be > 0");
    require(cell.temperature >= 250.0 && cell.temperature <= 400.0, "cell.temperature_k",
            "cell temperature must be within the 250..400 K correlation range");
    require(cell.fraction_rb87 >= 0.0 && cell.fraction_rb87 <= 1.0, "cell.fraction_rb87",
            "isotope fraction must be in [0, 1]");
    require(cell.window_transmission > 0.0 && cell.window_transmission <= 1.0,
            "cell.window_transmission", "window transmission must be in (0, 1]");
    require(std::fabs(cell.b_field) <= 0.1, "cell.b_field_mt",
            "linear Zeeman model limited to |B| <= 100 mT");
    require(cell.field_nonuniformity >= 0.0 && cell.field_nonuniformity <= 1.0,
            "cell.field_nonuniformity", "field non-uniformity must be in [0, 1]");

    const ModulationProfile& m = cfg.modulation;
    if (m.kind == ModulationProfile::Kind::square_train) {
        require(m.period > 0.0, "modulation.period_ns", "square train period must be > 0");
        require(m.duty >= 0.0 && m.duty <= 1.0, "modulation.duty", "duty must be in [0, 1]");
        require(m.count >= 0, "modulation.count", "pulse count must be >= 0");
    }
    if (m.kind == ModulationProfile::Kind::sampled)
        for (double a : m.amplitude)
            require(a >= 0.0 && a <= 1.0, "modulation.amplitude",
                    "amplitude transmission must be in [0, 1]");

    require(cfg.duration > 0.0, "run.duration_s", "run duration must be > 0");
    require(cfg.bin >= 1e-12, "run.bin_ps", "histogram bin must be >= 1 ps");
    require(cfg.window > cfg.bin, "run.window_ns", "histogram window must exceed the bin width");
    require(cfg.sweep_duration > 0.0, "run.sweep_duration_s", "sweep duration must be > 0");

    require(cfg.fig3a_step > 0.0, "scan.fig3a_step_mk", "fig3a scan step must be > 0");
    if (cfg.fig3a_step > 0.0 && c.length > 0.0 && c.alpha_t > 0.0) {
        try {
            const double ldeg = c.degenerate_wavelength();
            const double hop = mode_hop_spacing(
                differential_fsr(c, ldeg, ldeg, c.reference_temperature), c.alpha_t);
            require(cfg.fig3a_step <= hop / 5.0, "scan.fig3a_step_mk",
                    "fig3a step must be <= dT_m/5 = " + io::format_number(hop / 5.0 * 1e3) +
                        " mK to resolve the mode structure");
        } catch (const std::exception&) {
            // dispersion errors are reported by the sellmeier check above
        }
    }
    require(cfg.fig3b_step > 0.0, "scan.fig3b_step_mk", "fig3b scan step must be > 0");
    require(cfg.fig3b_hi > cfg.fig3b_lo, "scan.fig3b_lo_mk", "fig3b scan range is empty");
    require(cfg.fig4a_points >= 2, "scan.fig4a_points", "fig4a needs at least 2 points");
    require(cfg.fig4a_t_hi > cfg.fig4a_t_lo, "scan.fig4a_t_lo_k", "fig4a scan range is empty");
    require(cfg.fig4a_t_lo >= 250.0 && cfg.fig4a_t_hi <= 400.0, "scan.fig4a_t_lo_k",
            "fig4a cell temperatures must stay within 250..400 K");
    require(cfg.fig4b_points >= 3, "scan.fig4b_points", "fig4b needs at least 3 points");
    require(cfg.fig4b_span > 0.0 && cfg.fig4b_span <= 0.1, "scan.fig4b_span_mt",
            "fig4b span must be in (0, 100] mT");
    require(cfg.format == "csv" || cfg.format == "json", "output.format",
            "output format must be csv or json");
    return v;
}

std::uint64_t config_hash(const ScenarioConfig& cfg)
{
    const ConfigTree t = config_to_tree(cfg);
    std::string dump;
    for (const auto& [k, val] : t.entries()) {
        if (k.rfind("output.", 0) == 0)
            continue;
        dump += k + " = " + val + "\n";
    }
    return fnv1a64(dump);
}

std::string Manifest::to_json() const
{
    nlohmann::json j;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["config_hash"] = config_hash;
    j["version"] = version;
    j["files"] = files;
    j["metrics"] = metrics;
    return j.dump(2) + "\n";
}

namespace {

namespace fs = std::filesystem;

struct Emitter {
    const ScenarioConfig& cfg;
    Manifest& manifest;
    std::vector<std::string> plots;

    std::string path(const std::string& name) const
    {
        return (fs::path(cfg.out_dir) / name).string();
    }

    void xy(const std::string& base, const std::string& xname, const std::string& yname,
            const std::vector<std::pair<double, double>>& rows)
    {
        if (cfg.format == "json") {
            nlohmann::json j;
            auto& jx = j[xname] = nlohmann::json::array();
            auto& jy = j[yname] = nlohmann::json::array();
            for (const auto& [x, y] : rows) {
                jx.push_back(x);
                jy.push_back(y);
            }
            io::write_text(path(base + ".json"), j.dump(2) + "\n");
            manifest.files.push_back(base + ".json");
            return;
        }
        std::vector<std::vector<double>> r;
        r.reserve(rows.size());
        for (const auto& [x, y] : rows)
            r.push_back({x, y});
        io::write_csv(path(base + ".csv"), xname + "," + yname, r);
        manifest.files.push_back(base + ".csv");
        plots.push_back(base);
    }

    void waveform(const std::string& base, const Waveform& w, const std::string& yname)
    {
        std::vector<std::pair<double, double>> rows;
        rows.reserve(w.tau.size());
        for (std::size_t i = 0; i < w.tau.size(); ++i)
            rows.emplace_back(w.tau[i] * 1e9, w.value[i]);
        xy(base, "tau_ns", yname, rows);
    }
};

std::size_t count_support_intervals(const Waveform& w)
{
    std::size_t runs = 0;
    bool in_run = false;
    for (double v : w.value) {
        if (v > 0.0 && !in_run) {
            ++runs;
            in_run = true;
        } else if (v == 0.0) {
            in_run = false;
        }
    }
    return runs;
}

// side JSON with parameters and provenance next to waveform outputs
void write_provenance(const Emitter& em, const ScenarioConfig& cfg)
{
    nlohmann::json j;
    j["scenario"] = cfg.id;
    j["seed"] = cfg.seed;
    j["config_hash"] = [&] {
        char buf[19];
        std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)config_hash(cfg));
        return std::string(buf);
    }();
    j["kernel_backend"] = kernels::backend_name(kernels::active_backend());
    j["gamma_s_per_s"] = cfg.signal_decay;
    j["gamma_i_per_s"] = cfg.idler_decay;
    j["pump_power_w"] = cfg.pump_power;
    io::write_text(em.path("params.json"), j.dump(2) + "\n");
}

void run_fig1c(const ScenarioConfig& cfg, Emitter& em)
{
    const BiphotonParams p = cfg.biphoton();
    const EventStream stream = simulate_stream(p, cfg.detection, cfg.duration, cfg.seed);
    const CountSummary sum = summarize(stream, cfg.detection, cfg.bin, cfg.window);
    em.waveform("histogram", sum.histogram, "counts");

    // analytic overlay: expected counts per bin from Eq.-style density + accidentals
    const double pair_det = p.pair_rate * cfg.detection.eta * cfg.detection.t_signal *
                            cfg.detection.bs_ratio * cfg.detection.eta * cfg.detection.t_idler;
    Waveform analytic = sum.histogram;
    {
        const double norm = p.gamma_s * p.gamma_i / (p.gamma_s + p.gamma_i);
        std::vector<double> dens(analytic.tau.size());
        kernels::double_exp_grid(analytic.tau.data(), dens.data(), dens.size(), p.gamma_s,
                                 p.gamma_i, norm);
        const double accidental = sum.r_s * sum.r_i * analytic.step * cfg.duration;
        for (std::size_t i = 0; i < dens.size(); ++i)
            analytic.value[i] = pair_det * dens[i] * analytic.step * cfg.duration + accidental;
    }
    em.waveform("analytic", analytic, "counts");

    {
        std::vector<std::pair<double, double>> rows;
        for (std::size_t i = 0; i < sum.alpha2d.size(); ++i)
            rows.emplace_back(sum.histogram.tau[i] * 1e9, sum.alpha2d[i]);
        em.xy("alpha2d", "tau_ns", "alpha2d", rows);
    }
    {
        std::vector<std::pair<double, double>> rows;
        for (std::size_t i = 0; i < cfg.sweep_pump_uw.size(); ++i) {
            const double uw = cfg.sweep_pump_uw[i];
            const BiphotonParams ps = BiphotonParams::from_pump(uw * 1e-6, cfg.pairs_per_watt,
                                                                cfg.signal_decay, cfg.idler_decay);
            const EventStream s =
                simulate_stream(ps, cfg.detection, cfg.sweep_duration, cfg.seed + 101 + i);
            rows.emplace_back(uw, alpha_3d(s, cfg.detection.tau_c));
        }
        em.xy("alpha3d_vs_pump", "pump_uw", "alpha3d", rows);
    }

    const DecayFit fit = fit_decay_rates(sum.histogram);
    em.manifest.metrics["fitted_gamma_s_per_s"] = fit.gamma_s;
    em.manifest.metrics["fitted_gamma_i_per_s"] = fit.gamma_i;
    em.manifest.metrics["fitted_bandwidth_mhz"] = bandwidth(fit.gamma_s, fit.gamma_i) * 1e-6;
    em.manifest.metrics["alpha3d"] = sum.alpha3d;
    em.manifest.metrics["r_s_cps"] = sum.r_s;
    em.manifest.metrics["r_i_cps"] = sum.r_i;
    em.manifest.metrics["detected_pair_rate_cps"] = sum.r_si;
}

void run_fig2(const ScenarioConfig& cfg, Emitter& em)
{
    const BiphotonParams p = cfg.biphoton();
    const Waveform w = conditional_density(p);
    const Waveform m = apply_to_waveform(w, cfg.modulation);
    em.waveform("waveform_unmodulated", w, "density");
    em.waveform("waveform_modulated", m, "density");

    double retained = 0.0;
    for (std::size_t i = 0; i + 1 < m.value.size(); ++i)
        retained += 0.5 * (m.value[i] + m.value[i + 1]) * m.step;
    em.manifest.metrics["support_intervals"] = (double)count_support_intervals(m);
    em.manifest.metrics["retained_fraction"] = retained;
}

std::pair<ModeComb, ModeComb> build_combs(const ScenarioConfig& cfg)
{
    const double half_pump = 0.5 * cfg.crystal.pump_frequency();
    return {build_comb(cfg.crystal, cfg.crystal.signal_axis, cfg.signal_decay,
                       half_pump + cfg.anchor_detuning),
            build_comb(cfg.crystal, cfg.crystal.idler_axis, cfg.idler_decay,
                       half_pump - cfg.anchor_detuning)};
}

void run_fig3a(const ScenarioConfig& cfg, Emitter& em)
{
    const auto [sc, ic] = build_combs(cfg);
    TemperatureScanParams params;
    params.t_lo = cfg.crystal.reference_temperature - cfg.fig3a_half_span;
    params.t_hi = cfg.crystal.reference_temperature + cfg.fig3a_half_span;
    params.step = cfg.fig3a_step;
    params.peak_rate_cps = cfg.scan_peak_cps;
    params.floor_cps = cfg.scan_floor_cps;
    const auto scan = temperature_scan(cfg.crystal, sc, ic, params);

    std::vector<std::vector<double>> rows;
    rows.reserve(scan.size());
    for (const auto& pt : scan)
        rows.push_back({pt.t_k, pt.rate_cps, (double)pt.signal_index, (double)pt.idler_index,
                        pt.nu_s});
    io::write_csv(em.path("temperature_scan.csv"),
                  "T_K,rate_cps,selected_signal_index,selected_idler_index,nu_s_Hz", rows);
    em.manifest.files.push_back("temperature_scan.csv");
    em.plots.push_back("temperature_scan");

    std::vector<double> ys;
    ys.reserve(scan.size());
    for (const auto& pt : scan)
        ys.push_back(pt.rate_cps);
    const double top = *std::max_element(ys.begin(), ys.end());
    const auto peaks = detect_peaks(ys, cfg.scan_floor_cps + 0.3 * (top - cfg.scan_floor_cps));
    em.manifest.metrics["peak_count"] = (double)peaks.size();
    if (peaks.size() >= 2) {
        double spacing = 0.0;
        for (std::size_t i = 1; i < peaks.size(); ++i)
            spacing += scan[peaks[i]].t_k - scan[peaks[i - 1]].t_k;
        em.manifest.metrics["peak_spacing_mk"] = spacing / (peaks.size() - 1) * 1e3;
    }
    em.manifest.metrics["mode_hop_spacing_mk"] =
        mode_hop_spacing(sc.fsr - ic.fsr, cfg.crystal.alpha_t) * 1e3;
}

void run_fig3b(const ScenarioConfig& cfg, Emitter& em)
{
    const auto [sc, ic] = build_combs(cfg);
    const double bw = bandwidth(cfg.signal_decay, cfg.idler_decay);
    const double t0 = cfg.crystal.reference_temperature;
    const auto scan = crystal_temperature_scan(cfg.crystal, sc, ic, cfg.cell, cfg.line_table(),
                                               t0 + cfg.fig3b_lo, t0 + cfg.fig3b_hi,
                                               cfg.fig3b_step, bw);
    em.xy("transmittance_scan", "x", "transmittance", scan);

    std::vector<double> ys;
    ys.reserve(scan.size());
    for (const auto& [t, tr] : scan)
        ys.push_back(tr);
    const auto dips =
        detect_dips(ys, cfg.cell.window_transmission - 0.05, 0.01);
    em.manifest.metrics["dip_count"] = (double)dips.size();
    if (dips.size() >= 2)
        em.manifest.metrics["dip_separation_mk"] =
            (scan[dips[1]].first - scan[dips[0]].first) * 1e3;
    em.manifest.metrics["mode_hop_spacing_mk"] =
        mode_hop_spacing(sc.fsr - ic.fsr, cfg.crystal.alpha_t) * 1e3;
}

double emission_detuning(const ScenarioConfig& cfg)
{
    const auto [sc, ic] = build_combs(cfg);
    const double pump = cfg.crystal.pump_frequency();
    const double window = 0.45 * cluster_spacing(sc, ic);
    const double tol = 0.5 * std::fabs(sc.fsr - ic.fsr) * 1.0001 +
                       std::max(sc.linewidth, ic.linewidth);
    const auto pairs = doubly_resonant_pairs(cfg.crystal, sc, ic, pump, cfg.crystal.temperature,
                                             window, tol);
    return select_emission_mode(pairs, pump).nu_s - 0.5 * pump;
}

void run_fig4a(const ScenarioConfig& cfg, Emitter& em)
{
    const double nu = emission_detuning(cfg);
    const double bw = bandwidth(cfg.signal_decay, cfg.idler_decay);
    std::vector<std::pair<double, double>> rows;
    for (int i = 0; i < cfg.fig4a_points; ++i) {
        VaporCellSpec cell = cfg.cell;
        cell.temperature = cfg.fig4a_t_lo +
                           (cfg.fig4a_t_hi - cfg.fig4a_t_lo) * i / (cfg.fig4a_points - 1);
        rows.emplace_back(cell.temperature,
                          photon_transmittance(nu, bw, cell, cfg.line_table()));
    }
    em.xy("cell_temperature_scan", "x", "transmittance", rows);
    em.manifest.metrics["photon_detuning_mhz"] = nu * 1e-6;
}

void run_fig4b(const ScenarioConfig& cfg, Emitter& em)
{
    const double nu = emission_detuning(cfg);
    const double bw = bandwidth(cfg.signal_decay, cfg.idler_decay);
    std::vector<std::pair<double, double>> rows;
    double min_b = 0.0, min_t = 1e300;
    for (int i = 0; i < cfg.fig4b_points; ++i) {
        VaporCellSpec cell = cfg.cell;
        cell.b_field = -cfg.fig4b_span + 2.0 * cfg.fig4b_span * i / (cfg.fig4b_points - 1);
        const double tr = photon_transmittance(nu, bw, cell, cfg.line_table());
        rows.emplace_back(cell.b_field * 1e3, tr);
        if (tr < min_t) {
            min_t = tr;
            min_b = cell.b_field;
        }
    }
    em.xy("bfield_scan", "x", "transmittance", rows);
    em.manifest.metrics["min_transmittance"] = min_t;
    em.manifest.metrics["min_b_mt"] = min_b * 1e3;
    em.manifest.metrics["photon_detuning_mhz"] = nu * 1e-6;
}

void run_custom(const ScenarioConfig& cfg, Emitter& em)
{
    const BiphotonParams p = cfg.biphoton();
    EventStream stream = simulate_stream(p, cfg.detection, cfg.duration, cfg.seed);
    if (cfg.modulation.kind != ModulationProfile::Kind::identity)
        stream = apply_to_stream(stream, cfg.modulation, cfg.seed ^ 0x4d4f44);
    io::write_stream_binary(em.path("events.bin"), stream);
    em.manifest.files.push_back("events.bin");
    io::write_stream_csv(em.path("events.csv"), stream);
    em.manifest.files.push_back("events.csv");
    const CountSummary sum = summarize(stream, cfg.detection, cfg.bin, cfg.window);
    em.waveform("histogram", sum.histogram, "counts");
    {
        std::vector<std::pair<double, double>> rows;
        for (std::size_t i = 0; i < sum.alpha2d.size(); ++i)
            rows.emplace_back(sum.histogram.tau[i] * 1e9, sum.alpha2d[i]);
        em.xy("alpha2d", "tau_ns", "alpha2d", rows);
    }
    em.manifest.metrics["r_s_cps"] = sum.r_s;
    em.manifest.metrics["r_sp_cps"] = sum.r_sp;
    em.manifest.metrics["r_i_cps"] = sum.r_i;
    em.manifest.metrics["r_si_cps"] = sum.r_si;
    em.manifest.metrics["alpha3d"] = sum.alpha3d;
    em.manifest.metrics["events"] = (double)stream.events.size();
}

void emit_gnuplot_script(const Emitter& em)
{
    std::string g = "set datafile separator ','\nset key autotitle columnhead\n";
    for (const auto& base : em.plots)
        g += "plot '" + base + ".csv' using 1:2 with lines\npause -1\n";
    io::write_text(em.path("plot.gp"), g);
}

} // namespace

std::vector<std::size_t> detect_peaks(std::span<const double> y, double threshold)
{
    std::vector<std::size_t> peaks;
    std::size_t i = 0;
    while (i < y.size()) {
        if (y[i] <= threshold) {
            ++i;
            continue;
        }
        std::size_t best = i;
        while (i < y.size() && y[i] > threshold) {
            if (y[i] > y[best])
                best = i;
            ++i;
        }
        peaks.push_back(best);
    }
    return peaks;
}

std::vector<std::size_t> detect_dips(std::span<const double> y, double threshold,
                                     double prominence)
{
    std::vector<std::size_t> dips;
    std::size_t i = 0;
    while (i < y.size()) {
        if (y[i] >= threshold) {
            ++i;
            continue;
        }
        const std::size_t a = i;
        while (i < y.size() && y[i] < threshold)
            ++i;
        const std::size_t b = i; // run is [a, b)

        // local minima of the run (first sample of any flat bottom)
        std::vector<std::size_t> minima;
        for (std::size_t j = a; j < b; ++j) {
            const bool left_ok = j == a || y[j] < y[j - 1];
            const bool right_ok = j + 1 == b || y[j] <= y[j + 1];
            if (left_ok && right_ok)
                minima.push_back(j);
        }
        // merge minima not separated by an internal rise >= prominence
        std::vector<std::size_t> kept;
        for (const std::size_t m : minima) {
            if (kept.empty()) {
                kept.push_back(m);
                continue;
            }
            const std::size_t k = kept.back();
            double barrier = y[k];
            for (std::size_t j = k; j <= m; ++j)
                barrier = std::max(barrier, y[j]);
            if (barrier - y[k] >= prominence && barrier - y[m] >= prominence)
                kept.push_back(m);
            else if (y[m] < y[k])
                kept.back() = m;
        }
        dips.insert(dips.end(), kept.begin(), kept.end());
    }
    return dips;
}

Manifest run_scenario(const ScenarioConfig& cfg)
{
    const auto violations = validate_config(cfg);
    if (!violations.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& v : violations)
            msg += "\n  " + v.field + ": " + v.message;
        throw std::invalid_argument(msg);
    }

    fs::create_directories(cfg.out_dir);
    Manifest manifest;
    manifest.scenario = cfg.id;
    manifest.seed = cfg.seed;
    manifest.version = project_version;
    {
        char buf[19];
        std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)config_hash(cfg));
        manifest.config_hash = buf;
    }
    Emitter em{cfg, manifest, {}};

    if (cfg.id == "fig1c")
        run_fig1c(cfg, em);
    else if (cfg.id == "fig2a" || cfg.id == "fig2b")
        run_fig2(cfg, em);
    else if (cfg.id == "fig3a")
        run_fig3a(cfg, em);
    else if (cfg.id == "fig3b")
        run_fig3b(cfg, em);
    else if (cfg.id == "fig4a")
        run_fig4a(cfg, em);
    else if (cfg.id == "fig4b")
        run_fig4b(cfg, em);
    else
        run_custom(cfg, em);

    write_provenance(em, cfg);
    manifest.files.push_back("params.json");
    if (cfg.emit_gnuplot && cfg.format == "csv") {
        emit_gnuplot_script(em);
        manifest.files.push_back("plot.gp");
    }
    io::write_text(em.path("manifest.json"), manifest.to_json());
    return manifest;
}

} // namespace spdcsim
