#include "spdcsim/crystal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spdcsim {

const char* axis_name(Axis a)
{
    switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    default: return "z";
    }
}

Axis axis_from_name(char c)
{
    switch (c) {
    case 'x': case 'X': return Axis::x;
    case 'y': case 'Y': return Axis::y;
    case 'z': case 'Z': return Axis::z;
    default: throw std::invalid_argument(std::string("unknown optical axis '") + c + "'");
    }
}

CrystalSpec CrystalSpec::ktp_default()
{
    CrystalSpec s;
    // Fan et al., Appl. Opt. 26, 2390 (1987); thermo-optic slopes follow
    // Emanueli & Arie near 795 nm.
    s.sellmeier[static_cast<int>(Axis::x)] =
        {3.0065, 0.03901, 0.04251, 0.0, 0.0, 0.01327, 1.1e-5, 298.15, 0.45e-6, 1.2e-6};
    s.sellmeier[static_cast<int>(Axis::y)] =
        {3.0333, 0.04154, 0.04547, 0.0, 0.0, 0.01408, 1.1e-5, 298.15, 0.45e-6, 1.2e-6};
    s.sellmeier[static_cast<int>(Axis::z)] =
        {3.3134, 0.05694, 0.05658, 0.0, 0.0, 0.01682, 1.65e-5, 298.15, 0.45e-6, 1.2e-6};
    return s;
}

namespace {

const SellmeierSet& axis_set(const CrystalSpec& spec, Axis axis)
{
    return spec.sellmeier[static_cast<int>(axis)];
}

void check_band(const SellmeierSet& set, Axis axis, double lambda_m, double margin)
{
    if (!(lambda_m >= set.band_lo + margin && lambda_m <= set.band_hi - margin)) {
        throw std::domain_error(
            "wavelength " + std::to_string(lambda_m * 1e9) +
            " nm outside Sellmeier validity band [" + std::to_string(set.band_lo * 1e9) +
            ", " + std::to_string(set.band_hi * 1e9) + "] nm on axis " + axis_name(axis) +
            (margin > 0 ? " (group-index stencil needs margin)" : ""));
    }
}

double index_unchecked(const SellmeierSet& set, double lambda_m, double t_k)
{
    const double l2 = lambda_m * 1e6 * lambda_m * 1e6; // um^2
    double n2 = set.a - set.d * l2;
    if (set.b1 != 0.0)
        n2 += set.b1 / (l2 - set.c1);
    if (set.b2 != 0.0)
        n2 += set.b2 / (l2 - set.c2);
    if (!(n2 > 0.0))
        throw std::domain_error("Sellmeier model gives non-physical n^2 <= 0 at " +
                                std::to_string(lambda_m * 1e9) + " nm");
    return std::sqrt(n2) + set.dn_dt * (t_k - set.t_ref);
}

} // namespace

double refractive_index(const CrystalSpec& spec, Axis axis, double lambda_m, double t_k)
{
    const SellmeierSet& set = axis_set(spec, axis);
    check_band(set, axis, lambda_m, 0.0);
    return index_unchecked(set, lambda_m, t_k);
}

double group_index(const CrystalSpec& spec, Axis axis, double lambda_m, double t_k)
{
    const SellmeierSet& set = axis_set(spec, axis);
    const double h = spec.fd_step;
    check_band(set, axis, lambda_m, h);
    const double dndl =
        (index_unchecked(set, lambda_m + h, t_k) - index_unchecked(set, lambda_m - h, t_k)) /
        (2.0 * h);
    return index_unchecked(set, lambda_m, t_k) - lambda_m * dndl;
}

double fsr(const CrystalSpec& spec, Axis axis, double lambda_m, double t_k)
{
    return c_light / (2.0 * group_index(spec, axis, lambda_m, t_k) * spec.length);
}

double differential_fsr(const CrystalSpec& spec, double lambda_s, double lambda_i, double t_k)
{
    return fsr(spec, spec.signal_axis, lambda_s, t_k) - fsr(spec, spec.idler_axis, lambda_i, t_k);
}

double differential_group_index(const CrystalSpec& spec, double lambda_s, double lambda_i,
                                double t_k)
{
    return group_index(spec, spec.signal_axis, lambda_s, t_k) -
           group_index(spec, spec.idler_axis, lambda_i, t_k);
}

double gain_linewidth(const CrystalSpec& spec, double lambda_s, double lambda_i, double t_k)
{
    const double dng = std::fabs(differential_group_index(spec, lambda_s, lambda_i, t_k));
    if (dng < 1e-12)
        throw std::domain_error("degenerate dispersion: signal and idler group indices are "
                                "equal, the gain envelope is unbounded in this model");
    const double fwhm = 0.44 * c_light / (dng * spec.length);
    return spec.double_pass ? fwhm : 2.0 * fwhm;
}

double sinc_sq_half_point()
{
    // sin(x)/x = 1/sqrt(2); bisection, computed once
    static const double x_half = [] {
        double lo = 1.0, hi = 2.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (std::sin(mid) / mid > 1.0 / std::sqrt(2.0) ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }();
    return x_half;
}

double gain_envelope(const CrystalSpec& spec, double nu_s_hz, double t_k)
{
    // width pinned at the reference temperature: only the peak tunes with T
    const double ldeg = spec.degenerate_wavelength();
    const double fwhm = gain_linewidth(spec, ldeg, ldeg, spec.reference_temperature);
    const double peak = 0.5 * spec.pump_frequency() + spec.gain_peak_offset +
                        spec.alpha_t * (t_k - spec.reference_temperature);
    const double x = sinc_sq_half_point() * (nu_s_hz - peak) / (0.5 * fwhm);
    if (x == 0.0)
        return 1.0;
    const double s = std::sin(x) / x;
    return s * s;
}

} // namespace spdcsim
