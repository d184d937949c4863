#include "spdcsim/biphoton.hpp"

#include "spdcsim/constants.hpp"
#include "spdcsim/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spdcsim {

BiphotonParams BiphotonParams::from_pump(double pump_w, double pairs_per_watt, double gamma_s,
                                         double gamma_i)
{
    if (!(gamma_s > 0.0) || !(gamma_i > 0.0))
        throw std::invalid_argument("cavity decay rates must be positive");
    BiphotonParams p;
    p.gamma_s = gamma_s;
    p.gamma_i = gamma_i;
    p.pump_power = pump_w;
    p.pair_rate = rate_from_pump(pump_w, pairs_per_watt);
    p.kappa = kappa_from_rate(p.pair_rate, gamma_s, gamma_i);
    return p;
}

double g2_peak_height(const BiphotonParams& p)
{
    const double sum = p.gamma_s + p.gamma_i;
    return 4.0 * p.kappa * p.kappa * p.gamma_s * p.gamma_i / (sum * sum);
}

double g2(double tau, const BiphotonParams& p)
{
    const double corr = tau < 0.0 ? std::exp(p.gamma_s * tau) : std::exp(-p.gamma_i * tau);
    return p.pair_rate * p.pair_rate + g2_peak_height(p) * corr;
}

namespace {

Waveform sampled_double_exp(double lo, double hi, double step, double rise, double fall,
                            double scale, double floor)
{
    if (!(step > 0.0) || !(hi > lo))
        throw std::invalid_argument("bad waveform window");
    const std::size_t n = (std::size_t)std::floor((hi - lo) / step) + 1;
    Waveform w;
    w.step = step;
    w.lo = lo;
    w.hi = hi;
    w.tau.resize(n);
    w.value.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        w.tau[i] = lo + i * step;
    kernels::double_exp_grid(w.tau.data(), w.value.data(), n, rise, fall, scale);
    if (floor != 0.0)
        for (double& v : w.value)
            v += floor;
    return w;
}

} // namespace

Waveform g2_waveform(const BiphotonParams& p, double lo, double hi, double step)
{
    return sampled_double_exp(lo, hi, step, p.gamma_s, p.gamma_i, g2_peak_height(p),
                              p.pair_rate * p.pair_rate);
}

double conditional_mass(const BiphotonParams& p, double lo, double hi)
{
    if (lo > 0.0 || hi < 0.0)
        throw std::invalid_argument("window must bracket tau = 0");
    const double norm = p.gamma_s * p.gamma_i / (p.gamma_s + p.gamma_i);
    const double miss_left = norm / p.gamma_s * std::exp(p.gamma_s * lo);
    const double miss_right = norm / p.gamma_i * std::exp(-p.gamma_i * hi);
    return 1.0 - miss_left - miss_right;
}

Waveform conditional_density(const BiphotonParams& p)
{
    return conditional_density(p, -10.0 / p.gamma_s, 10.0 / p.gamma_i, 0.35e-9);
}

Waveform conditional_density(const BiphotonParams& p, double lo, double hi, double step)
{
    if (!(p.kappa > 0.0) && !(p.pair_rate > 0.0))
        throw std::invalid_argument("conditional density needs kappa > 0");
    const double captured = conditional_mass(p, lo, hi);
    if (captured < 0.9999) {
        throw std::invalid_argument(
            "waveform window captures only " + std::to_string(captured * 100.0) +
            "% of the wave packet (need 99.99%); suggest [-" +
            std::to_string(11.5 / p.gamma_s * 1e9) + " ns, +" +
            std::to_string(11.5 / p.gamma_i * 1e9) + " ns]");
    }
    const double norm = p.gamma_s * p.gamma_i / (p.gamma_s + p.gamma_i);
    Waveform w = sampled_double_exp(lo, hi, step, p.gamma_s, p.gamma_i, norm, 0.0);
    // renormalize so the discrete (trapezoid) integral is exactly 1
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < w.value.size(); ++i)
        sum += 0.5 * (w.value[i] + w.value[i + 1]) * w.step;
    for (double& v : w.value)
        v /= sum;
    return w;
}

double waveform_fwhm(const Waveform& w)
{
    const auto n = w.value.size();
    if (n < 3)
        throw std::invalid_argument("waveform too short for a FWHM");
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (w.value[i] > w.value[imax])
            imax = i;
    const double half = 0.5 * w.value[imax];
    auto cross = [&](std::size_t i, std::size_t j) {
        // log-linear interpolation between samples i and j
        const double la = std::log(w.value[i]), lb = std::log(w.value[j]);
        const double f = (std::log(half) - la) / (lb - la);
        return w.tau[i] + f * (w.tau[j] - w.tau[i]);
    };
    double left = w.tau.front(), right = w.tau.back();
    for (std::size_t i = imax; i-- > 0;) {
        if (w.value[i] < half) {
            left = cross(i, i + 1);
            break;
        }
    }
    for (std::size_t i = imax + 1; i < n; ++i) {
        if (w.value[i] < half) {
            right = cross(i - 1, i);
            break;
        }
    }
    return right - left;
}

double bandwidth(double gamma_s, double gamma_i)
{
    if (!(gamma_s > 0.0) || !(gamma_i > 0.0))
        throw std::invalid_argument("cavity decay rates must be positive");
    // canonical argument order keeps the symmetry exact in floating point;
    // the radical is rearranged as 4 s^2 i^2 / (sqrt(...) + s^2 + i^2) to
    // avoid cancellation for very unequal rates
    const double lo = gamma_s < gamma_i ? gamma_s : gamma_i;
    const double hi = gamma_s < gamma_i ? gamma_i : gamma_s;
    const double r = lo / hi;
    const double r2 = r * r;
    const double radical = std::sqrt(r2 * r2 + 6.0 * r2 + 1.0);
    return hi * r * std::sqrt(2.0 / (radical + r2 + 1.0)) / two_pi;
}

double generated_brightness(double detected_pairs_per_s, double eta_s, double eta_i, double t_s,
                            double t_i, double pump_w, double bandwidth_hz)
{
    for (double e : {eta_s, eta_i, t_s, t_i})
        if (!(e > 0.0) || e > 1.0)
            throw std::domain_error("detector efficiencies and transmittances must be in (0, 1]");
    if (!(pump_w > 0.0) || !(bandwidth_hz > 0.0))
        throw std::domain_error("pump power and bandwidth must be positive");
    return detected_pairs_per_s /
           (eta_s * eta_i * t_s * t_i * (pump_w * 1e3) * (bandwidth_hz * 1e-6));
}

double rate_from_pump(double pump_w, double pairs_per_watt)
{
    if (!(pump_w >= 0.0) || !(pairs_per_watt >= 0.0))
        throw std::invalid_argument("pump power and calibration must be non-negative");
    return pump_w * pairs_per_watt;
}

double kappa_from_rate(double pair_rate, double gamma_s, double gamma_i)
{
    if (!(pair_rate >= 0.0))
        throw std::invalid_argument("pair rate must be non-negative");
    return 0.5 * std::sqrt(pair_rate * (gamma_s + gamma_i));
}

} // namespace spdcsim
