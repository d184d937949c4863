#pragma once

#include "spdcsim/biphoton.hpp"
#include "spdcsim/config.hpp"
#include "spdcsim/crystal.hpp"
#include "spdcsim/modulation.hpp"
#include "spdcsim/photon_stats.hpp"
#include "spdcsim/vapor.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace spdcsim {

/// Full parameter tree for one scenario run. Defaults reproduce the
/// shipped source configuration; figure presets overlay scan ranges,
/// modulation profiles and the comb anchor.
struct ScenarioConfig {
    std::string id = "custom"; // fig1c..fig4b or custom

    CrystalSpec crystal;
    double signal_decay = 1.0 / 20.7e-9; // 1/s
    double idler_decay = 1.0 / 24.4e-9;  // 1/s
    double pump_power = 30e-6;           // W
    double pairs_per_watt = 1.652034e9;  // generated pairs/s per W
    double anchor_detuning = 0.0;        // Hz: signal comb ref = pump/2 + this,
                                         // idler comb ref = pump/2 - this
    DetectionConfig detection;
    VaporCellSpec cell;
    std::vector<HyperfineLine> lines;    // empty = builtin table
    std::string lines_file;              // optional external table

    ModulationProfile modulation;

    // photon-statistics run
    double duration = 30.0;   // s
    double bin = 0.35e-9;     // s
    double window = 250e-9;   // s (histogram half-window)
    std::vector<double> sweep_pump_uw = {10, 30, 50, 75, 100};
    double sweep_duration = 20.0; // s per sweep point

    // mode-structure scans
    double fig3a_half_span = 75e-3; // K around T0
    double fig3a_step = 5e-5;       // K
    double scan_peak_cps = 2868.0;
    double scan_floor_cps = 100.0;

    double fig3b_lo = -90e-3, fig3b_hi = 60e-3; // K relative to T0
    double fig3b_step = 1e-3;                   // K

    double fig4a_t_lo = 293.0, fig4a_t_hi = 333.0; // K cell temperature
    int fig4a_points = 41;
    double fig4b_span = 50e-3; // T, scan is [-span, +span]
    int fig4b_points = 21;

    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string format = "csv"; // csv | json (json adds sidecar files)
    bool emit_gnuplot = false;

    BiphotonParams biphoton() const;
    const std::vector<HyperfineLine>& line_table() const;

    static const std::vector<std::string>& known_scenarios();
};

/// Shipped defaults (fig1c parameter set, custom scenario).
ScenarioConfig default_config();

/// Figure preset overlays applied to the defaults.
void apply_preset(ScenarioConfig& cfg, const std::string& id);

/// Defaults + preset + config-file overlay (file keys win).
ScenarioConfig config_from_tree(const ConfigTree& tree);
ConfigTree config_to_tree(const ScenarioConfig& cfg);

struct Violation {
    std::string field;
    std::string message;
};

/// Every type invariant across the parameter tree; empty means valid.
std::vector<Violation> validate_config(const ScenarioConfig& cfg);

struct Manifest {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string config_hash; // hex FNV-1a of the canonical parameter dump
    std::string version;
    std::vector<std::string> files; // relative to out_dir
    std::map<std::string, double> metrics;

    std::string to_json() const;
};

/// Semantic configuration hash: output location and format do not change
/// it, every physical parameter does.
std::uint64_t config_hash(const ScenarioConfig& cfg);

/// Runs one scenario, writes its data files under cfg.out_dir and returns
/// the manifest (also written as manifest.json). Deterministic: identical
/// config and seed give byte-identical files.
Manifest run_scenario(const ScenarioConfig& cfg);

/// Indices of local maxima above `threshold`, one per above-threshold run.
std::vector<std::size_t> detect_peaks(std::span<const double> y, double threshold);

/// Indices of dip minima below `threshold`; minima inside one run merge
/// unless separated by an internal rise of at least `prominence`.
std::vector<std::size_t> detect_dips(std::span<const double> y, double threshold,
                                     double prominence);

extern const char* const project_version;

} // namespace spdcsim
