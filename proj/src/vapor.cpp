#include "spdcsim/vapor.hpp"

#include "spdcsim/constants.hpp"
#include "spdcsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spdcsim {

const std::vector<HyperfineLine>& rb_d1_lines()
{
    // Detunings from the 85Rb F=3 -> F'=2 lock line; ground splitting
    // 6834.683 / 3035.732 MHz, excited splitting 816.656 / 361.580 MHz,
    // isotope shift 77.583 MHz. Strengths include the ground-state
    // population fraction.
    static const std::vector<HyperfineLine> lines = {
        {87, 2, 1, -1520.023e6, 5.0 / 8 * 1.0 / 2, 5.75e6},
        {87, 2, 2, -703.367e6, 5.0 / 8 * 1.0 / 2, 5.75e6},
        {87, 1, 1, 5314.660e6, 3.0 / 8 * 1.0 / 6, 5.75e6},
        {87, 1, 2, 6131.316e6, 3.0 / 8 * 5.0 / 6, 5.75e6},
        {85, 3, 2, 0.0, 7.0 / 12 * 5.0 / 9, 5.75e6},
        {85, 3, 3, 361.580e6, 7.0 / 12 * 4.0 / 9, 5.75e6},
        {85, 2, 2, 3035.732e6, 5.0 / 12 * 2.0 / 9, 5.75e6},
        {85, 2, 3, 3397.312e6, 5.0 / 12 * 7.0 / 9, 5.75e6},
    };
    return lines;
}

std::vector<HyperfineLine> load_lines(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open line table '" + path + "'");
    std::vector<HyperfineLine> lines;
    std::string row;
    int lineno = 0;
    while (std::getline(in, row)) {
        ++lineno;
        const auto hash = row.find('#');
        if (hash != std::string::npos)
            row.erase(hash);
        std::istringstream ss(row);
        HyperfineLine l;
        double det_mhz, gamma_mhz;
        if (!(ss >> l.isotope))
            continue; // blank or comment-only line
        if (!(ss >> l.f_ground >> l.f_excited >> det_mhz >> l.strength >> gamma_mhz))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 6 columns (isotope Fg Fe detuning_MHz "
                                     "strength gamma_nat_MHz)");
        if (l.isotope != 85 && l.isotope != 87)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": isotope must be 85 or 87");
        if (!(l.strength > 0.0) || !(gamma_mhz > 0.0))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": strength and natural linewidth must be positive");
        l.detuning = det_mhz * 1e6;
        l.gamma_nat = gamma_mhz * 1e6;
        lines.push_back(l);
    }
    if (lines.empty())
        throw std::runtime_error("line table '" + path + "' holds no lines");
    return lines;
}

double isotope_mass_kg(int isotope)
{
    switch (isotope) {
    case 85: return 84.911789738 * atomic_mass;
    case 87: return 86.909180531 * atomic_mass;
    default: throw std::invalid_argument("unknown rubidium isotope " + std::to_string(isotope));
    }
}

double vapor_density(double t_k)
{
    if (!(t_k >= 250.0 && t_k <= 400.0))
        throw std::domain_error("vapor-pressure correlation valid for 250..400 K, got " +
                                std::to_string(t_k) + " K");
    // log10 P[torr]; melting point 312.46 K
    const double log10p = t_k < 312.46 ? 2.881 + 4.857 - 4215.0 / t_k
                                       : 2.881 + 4.312 - 4040.0 / t_k;
    const double pascal = 133.322368 * std::pow(10.0, log10p);
    return pascal / (k_boltzmann * t_k);
}

double doppler_width(double t_k, double nu0_hz, double mass_kg)
{
    if (!(t_k > 0.0) || !(nu0_hz > 0.0) || !(mass_kg > 0.0))
        throw std::invalid_argument("doppler_width needs positive inputs");
    return nu0_hz * std::sqrt(8.0 * std::log(2.0) * k_boltzmann * t_k / (mass_kg * c_light * c_light));
}

std::vector<std::pair<double, double>> zeeman_components(double b_field_t, double g_eff)
{
    if (std::fabs(b_field_t) > 0.1)
        throw std::domain_error("linear Zeeman model limited to |B| <= 0.1 T");
    if (b_field_t == 0.0)
        return {{0.0, 1.0}};
    // canonical +-|shift| ordering keeps the model exactly even in B
    const double shift = std::fabs(g_eff * mu_bohr * b_field_t / h_planck);
    return {{-shift, 0.5}, {+shift, 0.5}};
}

namespace {

constexpr double fwhm_to_sigma = 2.3548200450309493; // 2 sqrt(2 ln 2)
constexpr double lock_wavelength = 794.979e-9;       // m, Rb D1

struct LineShape {
    double center;   // Hz
    double weight;   // OD at line center before the Voigt kernel
    double inv_sig2; // 1/(sigma sqrt 2)
    double y;        // Lorentz/Gauss ratio for the Faddeeva kernel
};

std::vector<LineShape> build_shapes(const VaporCellSpec& cell,
                                    std::span<const HyperfineLine> lines, double b_field)
{
    const double n_total = vapor_density(cell.temperature);
    const double sigma0 = 3.0 * lock_wavelength * lock_wavelength / (2.0 * pi);
    const double nu0 = c_light / lock_wavelength;
    const auto zeeman = zeeman_components(b_field, cell.g_eff);

    std::vector<LineShape> shapes;
    shapes.reserve(lines.size() * zeeman.size());
    for (const HyperfineLine& line : lines) {
        const double frac = line.isotope == 87 ? cell.fraction_rb87 : 1.0 - cell.fraction_rb87;
        if (frac <= 0.0)
            continue;
        const double dop = doppler_width(cell.temperature, nu0, isotope_mass_kg(line.isotope));
        const double sigma = dop / fwhm_to_sigma;
        const double gamma_hwhm = 0.5 * line.gamma_nat;
        const double area_coeff = n_total * frac * cell.length * line.strength * sigma0 * pi *
                                  gamma_hwhm / (sigma * std::sqrt(two_pi));
        for (const auto& [shift, w] : zeeman) {
            LineShape s;
            s.center = line.detuning + shift;
            s.weight = w * area_coeff;
            s.inv_sig2 = 1.0 / (sigma * std::sqrt(2.0));
            s.y = gamma_hwhm * s.inv_sig2;
            shapes.push_back(s);
        }
    }
    return shapes;
}

double od_from_shapes(double nu, const std::vector<LineShape>& shapes)
{
    double od = 0.0;
    for (const LineShape& s : shapes)
        od += s.weight * kernels::faddeeva_re((nu - s.center) * s.inv_sig2, s.y);
    return od;
}

void od_grid_from_shapes(const double* nu, double* od, std::size_t n,
                         const std::vector<LineShape>& shapes)
{
    std::vector<double> x(n), k(n);
    std::fill(od, od + n, 0.0);
    for (const LineShape& s : shapes) {
        for (std::size_t i = 0; i < n; ++i)
            x[i] = (nu[i] - s.center) * s.inv_sig2;
        kernels::faddeeva_re_grid(x.data(), k.data(), n, s.y);
        for (std::size_t i = 0; i < n; ++i)
            od[i] += s.weight * k[i];
    }
}

double od_point(double nu, const VaporCellSpec& cell, std::span<const HyperfineLine> lines,
                double b_field)
{
    if (lines.empty())
        throw std::invalid_argument("optical depth needs a non-empty line list");
    return od_from_shapes(nu, build_shapes(cell, lines, b_field));
}

// 8-point Gauss-Legendre average of OD over B in [B(1-u), B(1+u)]
double od_field_averaged(double nu, const VaporCellSpec& cell,
                         std::span<const HyperfineLine> lines)
{
    static const double gx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                 0.9602898564975363};
    static const double gw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};
    const double u = cell.field_nonuniformity;
    double od = 0.0;
    for (int i = 0; i < 4; ++i) {
        od += gw[i] * od_point(nu, cell, lines, cell.b_field * (1.0 + u * gx[i]));
        od += gw[i] * od_point(nu, cell, lines, cell.b_field * (1.0 - u * gx[i]));
    }
    return 0.5 * od;
}

} // namespace

double optical_depth(double nu, const VaporCellSpec& cell, std::span<const HyperfineLine> lines)
{
    if (cell.average_nonuniformity && cell.b_field != 0.0)
        return od_field_averaged(nu, cell, lines);
    return od_point(nu, cell, lines, cell.b_field);
}

double transmittance(double nu, const VaporCellSpec& cell, std::span<const HyperfineLine> lines)
{
    return cell.window_transmission * std::exp(-optical_depth(nu, cell, lines));
}

namespace {

// Segment boundaries in theta = atan((nu - nu_c)/(bw/2)): static seeds for
// the photon-spectrum core plus knots bracketing every line component.
std::vector<double> quadrature_breakpoints(double nu_c, double bw,
                                           const std::vector<LineShape>& shapes)
{
    std::vector<double> theta = {-0.49999 * pi, -0.4999 * pi, -0.499 * pi, -0.495 * pi,
                                 -0.48 * pi, -0.45 * pi, -0.375 * pi, -0.25 * pi, -0.125 * pi,
                                 0.0, 0.125 * pi, 0.25 * pi, 0.375 * pi, 0.45 * pi, 0.48 * pi,
                                 0.495 * pi, 0.499 * pi, 0.4999 * pi, 0.49999 * pi};
    for (const LineShape& s : shapes) {
        const double dop_sigma = 1.0 / (s.inv_sig2 * std::sqrt(2.0));
        for (double k : {-20.0, -8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0, 20.0}) {
            const double nu = s.center + k * dop_sigma * fwhm_to_sigma;
            theta.push_back(std::atan((nu - nu_c) / (0.5 * bw)));
        }
    }
    std::sort(theta.begin(), theta.end());
    theta.erase(std::unique(theta.begin(), theta.end(),
                            [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
                theta.end());
    theta.insert(theta.begin(), -0.5 * pi + 1e-9);
    theta.push_back(0.5 * pi - 1e-9);
    return theta;
}

} // namespace

double photon_transmittance(double nu_c, double bandwidth_hz, const VaporCellSpec& cell,
                            std::span<const HyperfineLine> lines)
{
    if (!(bandwidth_hz > 0.0))
        throw std::invalid_argument("photon bandwidth must be positive");
    if (lines.empty())
        throw std::invalid_argument("photon transmittance needs a non-empty line list");
    // int S(nu) T(nu) dnu with S a unit-area Lorentzian: substitute
    // nu = nu_c + (bw/2) tan(theta) so the integral is (1/pi) int T dtheta.
    const bool avg = cell.average_nonuniformity && cell.b_field != 0.0;
    const auto shapes = build_shapes(cell, lines, cell.b_field);
    const auto theta = quadrature_breakpoints(nu_c, bandwidth_hz, shapes);

    static const double gx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                 0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
    static const double gw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                 0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};

    double integral = 0.0;
    std::vector<double> nodes, od;
    for (std::size_t seg = 0; seg + 1 < theta.size(); ++seg) {
        const double mid = 0.5 * (theta[seg] + theta[seg + 1]);
        const double half = 0.5 * (theta[seg + 1] - theta[seg]);
        if (half <= 0.0)
            continue;
        nodes.clear();
        for (int i = 0; i < 8; ++i) {
            nodes.push_back(nu_c + 0.5 * bandwidth_hz * std::tan(mid - half * gx[i]));
            nodes.push_back(nu_c + 0.5 * bandwidth_hz * std::tan(mid + half * gx[i]));
        }
        od.resize(nodes.size());
        if (avg) {
            for (std::size_t i = 0; i < nodes.size(); ++i)
                od[i] = od_field_averaged(nodes[i], cell, lines);
        } else {
            od_grid_from_shapes(nodes.data(), od.data(), nodes.size(), shapes);
        }
        double seg_sum = 0.0;
        for (int i = 0; i < 8; ++i)
            seg_sum += gw[i] * (std::exp(-od[2 * i]) + std::exp(-od[2 * i + 1]));
        integral += half * seg_sum;
    }
    return cell.window_transmission * integral / pi;
}

std::vector<std::pair<double, double>> crystal_temperature_scan(
    const CrystalSpec& crystal, const ModeComb& signal, const ModeComb& idler,
    const VaporCellSpec& cell, std::span<const HyperfineLine> lines, double t_lo, double t_hi,
    double step, double photon_bandwidth_hz)
{
    if (!(step > 0.0) || !(t_hi >= t_lo))
        throw std::invalid_argument("bad crystal temperature scan range");
    const double pump = crystal.pump_frequency();
    // the observable emission stays in the central cluster; side-lobe
    // clusters carry < 1e-3 of the gain
    const double window = 0.45 * cluster_spacing(signal, idler);
    const double tolerance = 0.5 * std::fabs(signal.fsr - idler.fsr) * 1.0001 +
                             std::max(signal.linewidth, idler.linewidth);
    std::vector<std::pair<double, double>> out;
    const long steps = std::lround((t_hi - t_lo) / step);
    out.reserve(steps + 1);
    for (long i = 0; i <= steps; ++i) {
        const double t = t_lo + i * step;
        double trans;
        if (lines.empty()) {
            trans = cell.window_transmission;
        } else {
            const auto pairs =
                doubly_resonant_pairs(crystal, signal, idler, pump, t, window, tolerance);
            const ResonantPair& sel = select_emission_mode(pairs, pump);
            trans = photon_transmittance(sel.nu_s - 0.5 * pump, photon_bandwidth_hz, cell, lines);
        }
        out.emplace_back(t, trans);
    }
    return out;
}

} // namespace spdcsim
