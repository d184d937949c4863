#pragma once

#include "spdcsim/crystal.hpp"

#include <span>
#include <vector>

namespace spdcsim {

/// Resonance comb of one polarization axis. Mode 0 sits at `reference`
/// when the crystal is at its reference temperature; the whole comb
/// shifts by alpha_t (T - T0) with crystal temperature.
struct ModeComb {
    Axis axis = Axis::z;
    double reference = 0.0; // Hz, mode-0 frequency at T0
    double fsr = 0.0;       // Hz
    double linewidth = 0.0; // Hz FWHM, decay rate / 2pi
    int index_min = -256;
    int index_max = 256;

    double frequency(int m, double thermal_shift_hz = 0.0) const
    {
        return reference + m * fsr + thermal_shift_hz;
    }
};

/// One doubly resonant signal/idler mode pair.
struct ResonantPair {
    int signal_index = 0;
    int idler_index = 0;
    double nu_s = 0.0;     // Hz
    double nu_i = 0.0;     // Hz
    double detuning = 0.0; // nu_s + nu_i - nu_p, Hz
    double gain = 0.0;     // [0,1]
    double overlap = 0.0;  // [0,1]
};

/// Builds a comb anchored so mode 0 coincides with `reference_hz`
/// (defaults to pump/2). Throws if the comb is unresolved
/// (linewidth >= FSR) or the decay rate is non-positive.
ModeComb build_comb(const CrystalSpec& crystal, Axis axis, double decay_rate);
ModeComb build_comb(const CrystalSpec& crystal, Axis axis, double decay_rate,
                    double reference_hz);

/// All pairs (m, n) with |nu_s(m) + nu_i(n) - nu_p| <= tolerance and
/// |nu_s - nu_p/2| <= window at crystal temperature t_k, annotated with the
/// gain-envelope weight and the double-resonance Lorentzian overlap,
/// sorted by |nu_s - nu_p/2|. An empty result is a valid outcome.
std::vector<ResonantPair> doubly_resonant_pairs(const CrystalSpec& crystal,
                                                const ModeComb& signal, const ModeComb& idler,
                                                double pump_hz, double t_k, double window_hz,
                                                double tolerance_hz);

/// Vernier spacing of successive doubly resonant pairs,
/// FSR_s FSR_i / |FSR_s - FSR_i|. Throws on equal FSRs.
double cluster_spacing(const ModeComb& signal, const ModeComb& idler);

/// Temperature spacing of adjacent mode pairs, dT_m = dnu / (2 alpha_T).
double mode_hop_spacing(double delta_nu_hz, double alpha_t_hz_per_k);

/// Pair maximizing gain x overlap; near-ties resolve toward smaller
/// |nu_s - nu_p/2|, then toward lower signal frequency. Throws on an
/// empty list.
const ResonantPair& select_emission_mode(std::span<const ResonantPair> pairs, double pump_hz);

struct TemperatureScanPoint {
    double t_k = 0.0;
    double rate_cps = 0.0;
    int signal_index = 0;
    int idler_index = 0;
    double nu_s = 0.0;
};

struct TemperatureScanParams {
    double t_lo = 0.0, t_hi = 0.0; // K
    double step = 5e-5;            // K
    double peak_rate_cps = 2868.0; // coincidence rate of a fully resonant pair
    double floor_cps = 100.0;      // accidental floor
    double window_hz = 0.0;        // 0 = three cluster spacings
};

/// Expected coincidence rate versus crystal temperature (the fig3a
/// scenario observable): rate = peak x gain x overlap of the selected
/// pair + accidental floor. Requires step <= dT_m / 5.
std::vector<TemperatureScanPoint> temperature_scan(const CrystalSpec& crystal,
                                                   const ModeComb& signal, const ModeComb& idler,
                                                   const TemperatureScanParams& params);

} // namespace spdcsim
