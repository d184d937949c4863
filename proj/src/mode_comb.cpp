#include "spdcsim/mode_comb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spdcsim {

ModeComb build_comb(const CrystalSpec& crystal, Axis axis, double decay_rate)
{
    return build_comb(crystal, axis, decay_rate, 0.5 * crystal.pump_frequency());
}

ModeComb build_comb(const CrystalSpec& crystal, Axis axis, double decay_rate,
                    double reference_hz)
{
    if (!(decay_rate > 0.0))
        throw std::invalid_argument("cavity decay rate must be positive");
    ModeComb comb;
    comb.axis = axis;
    comb.reference = reference_hz;
    comb.fsr = fsr(crystal, axis, c_light / reference_hz, crystal.reference_temperature);
    comb.linewidth = decay_rate / two_pi;
    if (!(comb.linewidth < comb.fsr))
        throw std::invalid_argument("unresolved comb: mode linewidth exceeds the FSR");
    return comb;
}

namespace {

double lorentzian(double detuning, double fwhm)
{
    const double h = 0.5 * fwhm;
    return h * h / (detuning * detuning + h * h);
}

} // namespace

std::vector<ResonantPair> doubly_resonant_pairs(const CrystalSpec& crystal,
                                                const ModeComb& signal, const ModeComb& idler,
                                                double pump_hz, double t_k, double window_hz,
                                                double tolerance_hz)
{
    if (!(window_hz > 0.0) || !(tolerance_hz > 0.0))
        throw std::invalid_argument("pair search window and tolerance must be positive");

    const double shift = crystal.alpha_t * (t_k - crystal.reference_temperature);
    const double half_pump = 0.5 * pump_hz;
    std::vector<ResonantPair> pairs;

    const int m_lo = std::max(signal.index_min,
                              (int)std::floor((half_pump - window_hz - signal.reference - shift) /
                                              signal.fsr));
    const int m_hi = std::min(signal.index_max,
                              (int)std::ceil((half_pump + window_hz - signal.reference - shift) /
                                             signal.fsr));
    for (int m = m_lo; m <= m_hi; ++m) {
        const double nu_s = signal.frequency(m, shift);
        if (std::fabs(nu_s - half_pump) > window_hz)
            continue;
        const double target = pump_hz - nu_s;
        const int n = (int)std::lround((target - idler.reference - shift) / idler.fsr);
        if (n < idler.index_min || n > idler.index_max)
            continue;
        const double nu_i = idler.frequency(n, shift);
        const double detuning = nu_s + nu_i - pump_hz;
        if (std::fabs(detuning) > tolerance_hz)
            continue;
        ResonantPair p;
        p.signal_index = m;
        p.idler_index = n;
        p.nu_s = nu_s;
        p.nu_i = nu_i;
        p.detuning = detuning;
        p.gain = gain_envelope(crystal, nu_s, t_k);
        // photons emit at the symmetric energy-conserving split of the detuning
        p.overlap = lorentzian(0.5 * detuning, signal.linewidth) *
                    lorentzian(0.5 * detuning, idler.linewidth);
        pairs.push_back(p);
    }
    std::sort(pairs.begin(), pairs.end(), [half_pump](const ResonantPair& a, const ResonantPair& b) {
        const double da = std::fabs(a.nu_s - half_pump), db = std::fabs(b.nu_s - half_pump);
        if (da != db)
            return da < db;
        return a.nu_s < b.nu_s;
    });
    return pairs;
}

double cluster_spacing(const ModeComb& signal, const ModeComb& idler)
{
    const double d = signal.fsr - idler.fsr;
    if (d == 0.0)
        throw std::domain_error("degenerate combs: equal FSRs have no vernier spacing");
    return signal.fsr * idler.fsr / std::fabs(d);
}

double mode_hop_spacing(double delta_nu_hz, double alpha_t_hz_per_k)
{
    if (!(alpha_t_hz_per_k > 0.0))
        throw std::invalid_argument("temperature tuning coefficient must be positive");
    return std::fabs(delta_nu_hz) / (2.0 * alpha_t_hz_per_k);
}

const ResonantPair& select_emission_mode(std::span<const ResonantPair> pairs, double pump_hz)
{
    if (pairs.empty())
        throw std::invalid_argument("no resonant mode pair to select from");
    const double half_pump = 0.5 * pump_hz;
    const ResonantPair* best = &pairs[0];
    for (const ResonantPair& p : pairs.subspan(1)) {
        const double wp = p.gain * p.overlap;
        const double wb = best->gain * best->overlap;
        const double tie = 1e-12 * std::max(wp, wb);
        if (wp > wb + tie) {
            best = &p;
        } else if (wp >= wb - tie) {
            const double dp = std::fabs(p.nu_s - half_pump);
            const double db = std::fabs(best->nu_s - half_pump);
            if (dp < db || (dp == db && p.nu_s < best->nu_s))
                best = &p;
        }
    }
    return *best;
}

std::vector<TemperatureScanPoint> temperature_scan(const CrystalSpec& crystal,
                                                   const ModeComb& signal, const ModeComb& idler,
                                                   const TemperatureScanParams& params)
{
    if (!(params.step > 0.0) || !(params.t_hi >= params.t_lo))
        throw std::invalid_argument("bad temperature scan range");
    const double dnu = std::fabs(signal.fsr - idler.fsr);
    const double hop = mode_hop_spacing(dnu, crystal.alpha_t);
    if (params.step > hop / 5.0)
        throw std::invalid_argument("scan step too coarse to resolve the mode structure "
                                    "(need step <= dT_m / 5)");
    const double window = params.window_hz > 0.0 ? params.window_hz
                                                 : 3.0 * cluster_spacing(signal, idler);
    // wide enough that the nearest in-cluster pair is always a candidate
    const double tolerance =
        0.5 * dnu * 1.0001 + std::max(signal.linewidth, idler.linewidth);
    const double pump = crystal.pump_frequency();

    std::vector<TemperatureScanPoint> out;
    const long steps = std::lround((params.t_hi - params.t_lo) / params.step);
    out.reserve(steps + 1);
    for (long i = 0; i <= steps; ++i) {
        const double t = params.t_lo + i * params.step;
        const auto pairs = doubly_resonant_pairs(crystal, signal, idler, pump, t, window, tolerance);
        TemperatureScanPoint pt;
        pt.t_k = t;
        if (pairs.empty()) {
            pt.rate_cps = params.floor_cps;
        } else {
            const ResonantPair& sel = select_emission_mode(pairs, pump);
            pt.rate_cps = params.peak_rate_cps * sel.gain * sel.overlap + params.floor_cps;
            pt.signal_index = sel.signal_index;
            pt.idler_index = sel.idler_index;
            pt.nu_s = sel.nu_s;
        }
        out.push_back(pt);
    }
    return out;
}

} // namespace spdcsim
