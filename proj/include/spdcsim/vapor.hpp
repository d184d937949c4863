#pragma once

#include "spdcsim/mode_comb.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spdcsim {

/// One hyperfine component of the Rb D1 line. Detunings are relative to
/// the frequency lock, the 85Rb F=3 -> F'=2 transition; the shipped
/// strengths fold the ground-state population fraction into the hyperfine
/// transition strength.
struct HyperfineLine {
    int isotope = 87; // 85 or 87
    int f_ground = 2;
    int f_excited = 1;
    double detuning = 0.0;  // Hz relative to the lock
    double strength = 1.0;  // dimensionless
    double gamma_nat = 5.75e6; // Hz FWHM
};

struct VaporCellSpec {
    double length = 75e-3;              // m
    double temperature = 295.0;         // K
    double fraction_rb87 = 1.0;         // isotopic fraction (rest is 85Rb)
    double window_transmission = 0.85;  // off-resonance baseline
    double b_field = 0.0;               // T, axial
    double g_eff = 0.7;                 // effective Zeeman g-factor
    double field_nonuniformity = 0.10;  // fractional spread across the cell
    bool average_nonuniformity = false;
};

/// Built-in D1 line table (8 lines, both isotopes).
const std::vector<HyperfineLine>& rb_d1_lines();

/// Parse a plain-text line table: columns
/// isotope Fg Fe detuning_MHz strength gamma_nat_MHz.
std::vector<HyperfineLine> load_lines(const std::string& path);

double isotope_mass_kg(int isotope);

/// Rubidium number density from the standard vapor-pressure correlation
/// (solid/liquid branches switch at the 312.46 K melting point).
/// Valid for T in [250, 400] K.
double vapor_density(double t_k);

/// Doppler FWHM, nu0 sqrt(8 ln2 kB T / (m c^2)).
double doppler_width(double t_k, double nu0_hz, double mass_kg);

/// Effective two-component linear Zeeman splitting: (shift, weight) pairs.
/// B = 0 gives a single unshifted component.
std::vector<std::pair<double, double>> zeeman_components(double b_field_t, double g_eff);

/// Optical depth at detuning nu (Hz relative to the lock).
double optical_depth(double nu, const VaporCellSpec& cell, std::span<const HyperfineLine> lines);

/// T_win exp(-OD); the 85% baseline is the window/noise-photon floor.
double transmittance(double nu, const VaporCellSpec& cell, std::span<const HyperfineLine> lines);

/// Transmittance averaged over a unit-area Lorentzian photon spectrum of
/// FWHM bandwidth_hz centered at nu_c (Hz relative to the lock).
double photon_transmittance(double nu_c, double bandwidth_hz, const VaporCellSpec& cell,
                            std::span<const HyperfineLine> lines);

/// Photon transmittance versus crystal temperature (the fig3b scenario
/// observable). The emission frequency at each temperature comes from
/// select_emission_mode; detunings are measured from pump/2 (the
/// lock-referenced frequency).
std::vector<std::pair<double, double>> crystal_temperature_scan(
    const CrystalSpec& crystal, const ModeComb& signal, const ModeComb& idler,
    const VaporCellSpec& cell, std::span<const HyperfineLine> lines, double t_lo, double t_hi,
    double step, double photon_bandwidth_hz);

} // namespace spdcsim
