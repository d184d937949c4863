#pragma once

#include "spdcsim/constants.hpp"

namespace spdcsim {

enum class Axis { x = 0, y = 1, z = 2 };
const char* axis_name(Axis a);
Axis axis_from_name(char c);

/// One-axis Sellmeier model with a linear thermo-optic correction:
///   n^2(lambda) = a + b1/(l^2 - c1) + b2/(l^2 - c2) - d l^2,  l in um,
///   n(lambda, T) = n(lambda) + dn_dt (T - t_ref).
struct SellmeierSet {
    double a = 4.0;
    double b1 = 0.0, c1 = 0.0;
    double b2 = 0.0, c2 = 0.0;
    double d = 0.0;
    double dn_dt = 0.0;       // 1/K
    double t_ref = 298.15;    // K
    double band_lo = 0.5e-6;  // m, validity band
    double band_hi = 1.2e-6;
};

/// Monolithic type-II crystal cavity. The default models a PPKTP cavity
/// with signal on z and idler on y; the length is a calibration choice
/// that puts the signal FSR near the 87Rb D1 target-line spacing.
struct CrystalSpec {
    double length = 10.55e-3;              // m
    double poling_period = 10.0e-6;        // m (nominal, configuration only)
    double temperature = 303.15;           // K, operating point
    double reference_temperature = 303.15; // K, comb/gain anchor T0
    double alpha_t = 7.8e9;                // Hz/K temperature tuning coefficient
    double pump_wavelength = 397.5e-9;     // m
    bool double_pass = true;
    Axis signal_axis = Axis::z;
    Axis idler_axis = Axis::y;
    double fd_step = 1e-11;                // m, group-index stencil
    double gain_peak_offset = 0.0;         // Hz, gain peak offset from pump/2 at T0
    SellmeierSet sellmeier[3];

    double pump_frequency() const { return c_light / pump_wavelength; }
    double degenerate_wavelength() const { return 2.0 * pump_wavelength; }

    static CrystalSpec ktp_default();
};

/// Phase index from the configured Sellmeier model. Throws std::domain_error
/// outside the validity band.
double refractive_index(const CrystalSpec& spec, Axis axis, double lambda_m, double t_k);

/// Group index n_g = n - lambda dn/dlambda, central finite difference with
/// step spec.fd_step. Requires one stencil step of margin inside the band.
double group_index(const CrystalSpec& spec, Axis axis, double lambda_m, double t_k);

/// FSR = c / (2 n_g L)
double fsr(const CrystalSpec& spec, Axis axis, double lambda_m, double t_k);

/// Signed differential FSR, FSR_signal - FSR_idler.
double differential_fsr(const CrystalSpec& spec, double lambda_s, double lambda_i, double t_k);

/// n_g(signal axis) - n_g(idler axis), signed.
double differential_group_index(const CrystalSpec& spec, double lambda_s, double lambda_i,
                                double t_k);

/// FWHM of the double-pass type-II gain envelope, 0.44 c / (|dn_g| L);
/// doubled when double_pass is off. Throws on degenerate dispersion.
double gain_linewidth(const CrystalSpec& spec, double lambda_s, double lambda_i, double t_k);

/// Normalized sinc^2 phase-matching envelope in [0, 1]; peak at
/// nu_p/2 + gain_peak_offset + alpha_t (T - T0), FWHM = gain_linewidth.
double gain_envelope(const CrystalSpec& spec, double nu_s_hz, double t_k);

/// Half-power argument of sinc^2: sinc^2(x_half) = 1/2.
double sinc_sq_half_point();

} // namespace spdcsim
