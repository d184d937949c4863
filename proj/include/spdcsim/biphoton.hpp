#pragma once

#include <vector>

namespace spdcsim {

/// Parameter set of the biphoton correlation function: total cavity decay
/// rates (angular, 1/s), parametric coupling strength and pair rate.
/// kappa^2 is proportional to pump power; construct with from_pump to
/// keep rate and coupling consistent.
struct BiphotonParams {
    double gamma_s = 1.0 / 20.7e-9; // 1/s
    double gamma_i = 1.0 / 24.4e-9; // 1/s
    double kappa = 0.0;             // 1/s
    double pair_rate = 0.0;         // generated pairs/s
    double pump_power = 0.0;        // W

    static BiphotonParams from_pump(double pump_w, double pairs_per_watt, double gamma_s,
                                    double gamma_i);
};

/// Uniformly sampled delay waveform (correlation density or counts per bin).
struct Waveform {
    std::vector<double> tau;   // s, uniform, strictly increasing
    std::vector<double> value; // >= 0
    double step = 0.0;         // s
    double lo = 0.0, hi = 0.0; // window bounds, s
};

/// Glauber correlation G2(tau) = R^2 + [4 k^2 Gs Gi/(Gs+Gi)^2] *
/// { exp(Gs tau), tau < 0 ; exp(-Gi tau), tau > 0 }, continuous at 0.
double g2(double tau, const BiphotonParams& p);

/// Correlated coincidence density above the R^2 floor at tau = 0.
double g2_peak_height(const BiphotonParams& p);

/// G2 sampled on a uniform grid.
Waveform g2_waveform(const BiphotonParams& p, double lo, double hi, double step);

/// Background-subtracted, unit-normalized heralded wave packet
/// p(tau) = N exp(Gs tau) (tau<0), N exp(-Gi tau) (tau>0),
/// N = Gs Gi/(Gs+Gi); renormalized so the trapezoid integral over the
/// window is exactly 1. Throws if the window captures < 99.99% of the
/// analytic mass (the error suggests adequate bounds). Default window is
/// [-10/Gs, +10/Gi] with 0.35 ns step.
Waveform conditional_density(const BiphotonParams& p);
Waveform conditional_density(const BiphotonParams& p, double lo, double hi, double step);

/// Analytic fraction of the wave packet inside [lo, hi].
double conditional_mass(const BiphotonParams& p, double lo, double hi);

/// FWHM of a sampled waveform via log-linear interpolation (exact for
/// piecewise-exponential shapes).
double waveform_fwhm(const Waveform& w);

/// Photon bandwidth in ordinary frequency (Hz):
/// [(sqrt(Gs^4 + 6 Gs^2 Gi^2 + Gi^4) - Gs^2 - Gi^2)/2]^(1/2) / 2pi.
double bandwidth(double gamma_s, double gamma_i);

/// Generated spectral brightness, s^-1 mW^-1 MHz^-1:
/// R_det / (eta_s eta_i T_s T_i P[mW] dnu[MHz]).
double generated_brightness(double detected_pairs_per_s, double eta_s, double eta_i, double t_s,
                            double t_i, double pump_w, double bandwidth_hz);

/// Pair rate linear in pump power.
double rate_from_pump(double pump_w, double pairs_per_watt);

/// Coupling strength such that the integrated correlated part of G2
/// equals the pair rate: 4 k^2 Gs Gi/(Gs+Gi)^2 (1/Gs + 1/Gi) = R.
double kappa_from_rate(double pair_rate, double gamma_s, double gamma_i);

} // namespace spdcsim
