#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "spdcsim/biphoton.hpp"
#include "spdcsim/constants.hpp"
#include "spdcsim/scenario.hpp"
#include "spdcsim/vapor.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

using namespace spdcsim;

namespace {

VaporCellSpec default_cell()
{
    return VaporCellSpec{};
}

// the two 87Rb target transitions
const HyperfineLine& target_line_low()
{
    for (const auto& l : rb_d1_lines())
        if (l.isotope == 87 && l.f_ground == 2 && l.f_excited == 1)
            return l;
    throw std::logic_error("missing line");
}
const HyperfineLine& target_line_high()
{
    for (const auto& l : rb_d1_lines())
        if (l.isotope == 87 && l.f_ground == 1 && l.f_excited == 2)
            return l;
    throw std::logic_error("missing line");
}

} // namespace

TEST_CASE("line table")
{
    const auto& lines = rb_d1_lines();
    CHECK(lines.size() == 8);
    // target-line spacing used for the FSR calibration: ground + excited
    // hyperfine splittings, summed by hand
    const double spacing = target_line_high().detuning - target_line_low().detuning;
    CHECK(spacing == doctest::Approx(7.651339e9).epsilon(1e-6));
    for (const auto& l : lines) {
        CHECK(l.strength > 0.0);
        CHECK(l.gamma_nat > 0.0);
    }

    // the shipped data file parses to the builtin table
    const auto file = load_lines(SPDCSIM_SOURCE_DIR "/data/rb_d1_lines.dat");
    REQUIRE(file.size() == lines.size());
    for (std::size_t i = 0; i < file.size(); ++i) {
        CHECK(file[i].isotope == lines[i].isotope);
        CHECK(file[i].detuning == doctest::Approx(lines[i].detuning).epsilon(1e-9));
        CHECK(file[i].strength == doctest::Approx(lines[i].strength).epsilon(1e-4));
    }
}

TEST_CASE("vapor density")
{
    // strictly increasing over the valid range
    double prev = 0.0;
    for (double t = 250.0; t <= 400.0; t += 1.0) {
        const double n = vapor_density(t);
        CHECK(n > prev);
        prev = n;
    }
    // room-temperature anchors from the vapor-pressure correlation
    CHECK(vapor_density(295.0) == doctest::Approx(9.2228e15).epsilon(1e-3));
    CHECK(vapor_density(295.0) > 0.5e16 / 1.0);
    CHECK(vapor_density(295.0) < 2e16);
    const double ratio = vapor_density(305.0) / vapor_density(295.0);
    CHECK(ratio > 1.5);
    CHECK(ratio < 4.0);

    CHECK_THROWS_AS(vapor_density(200.0), std::domain_error);
    CHECK_THROWS_AS(vapor_density(450.0), std::domain_error);
}

TEST_CASE("doppler width")
{
    // plug-in arithmetic oracle, frozen before the build
    const double w = doppler_width(300.0, c_light / 795e-9, 87.0 * atomic_mass);
    CHECK(w == doctest::Approx(5.0154e8).epsilon(0.01));

    // sqrt(T) scaling to 1e-12 across 270..370 K
    const double nu0 = c_light / 795e-9;
    const double m = isotope_mass_kg(87);
    for (double t = 270.0; t <= 370.0; t += 10.0) {
        CHECK(doppler_width(t, nu0, m) ==
              doctest::Approx(doppler_width(270.0, nu0, m) * std::sqrt(t / 270.0))
                  .epsilon(1e-12));
    }
    // linear in the carrier frequency
    CHECK(doppler_width(300.0, 2 * nu0, m) ==
          doctest::Approx(2 * doppler_width(300.0, nu0, m)).epsilon(1e-12));
}

TEST_CASE("zeeman components")
{
    const auto none = zeeman_components(0.0, 0.7);
    REQUIRE(none.size() == 1);
    CHECK(none[0].first == 0.0);
    CHECK(none[0].second == 1.0);

    // 9.8 MHz/mT at g_eff = 0.7
    const auto split = zeeman_components(1e-3, 0.7);
    REQUIRE(split.size() == 2);
    CHECK(split[1].first == doctest::Approx(9.797e6).epsilon(1e-3));
    CHECK(split[0].first == -split[1].first);
    CHECK(split[0].second == 0.5);

    // components are identical for +-B (evenness by construction)
    const auto pos = zeeman_components(17e-3, 0.7);
    const auto neg = zeeman_components(-17e-3, 0.7);
    CHECK(pos[0].first == neg[0].first);
    CHECK(pos[1].first == neg[1].first);

    CHECK_THROWS_AS(zeeman_components(0.5, 0.7), std::domain_error);
}

TEST_CASE("optical depth")
{
    const VaporCellSpec cell = default_cell();
    const auto& lines = rb_d1_lines();
    const double nu1 = target_line_high().detuning;

    // zero density: a pure-87 cell sees nothing on a pure-85 line list
    std::vector<HyperfineLine> lines85;
    for (const auto& l : lines)
        if (l.isotope == 85)
            lines85.push_back(l);
    VaporCellSpec pure87 = cell;
    pure87.fraction_rb87 = 1.0;
    for (double nu : {0.0, 1e9, -3e9})
        CHECK(optical_depth(nu, pure87, lines85) == 0.0);

    // linear in density (via temperature) and in cell length
    VaporCellSpec twice = cell;
    twice.length = 2.0 * cell.length;
    CHECK(optical_depth(nu1, twice, lines) ==
          doctest::Approx(2.0 * optical_depth(nu1, cell, lines)).epsilon(1e-12));

    // far detuning: less than 1e-3 of the on-resonance depth
    const double far = nu1 + 10.0 * doppler_width(cell.temperature, c_light / 795e-9,
                                                  isotope_mass_kg(87));
    CHECK(optical_depth(far, cell, lines) < 1e-3 * optical_depth(nu1, cell, lines));

    CHECK_THROWS_AS(optical_depth(0.0, cell, std::span<const HyperfineLine>{}),
                    std::invalid_argument);
}

TEST_CASE("transmittance")
{
    const VaporCellSpec cell = default_cell();
    const auto& lines = rb_d1_lines();
    const double nu1 = target_line_high().detuning;

    // OD -> 0 gives exactly the window transmission
    VaporCellSpec cold = cell;
    cold.temperature = 250.0; // density down ~4 orders
    CHECK(transmittance(nu1 + 100e9, cold, lines) ==
          doctest::Approx(0.85).epsilon(1e-9));

    // in (0, T_win] everywhere
    oracles::PropRng rng(3);
    for (int i = 0; i < 200; ++i) {
        const double tr = transmittance(rng.uniform(-20e9, 20e9), cell, lines);
        CHECK(tr > 0.0);
        CHECK(tr <= 0.85);
    }

    // monotone decreasing in cell temperature on resonance
    double prev = 1.0;
    for (double t = 290.0; t <= 340.0; t += 2.5) {
        VaporCellSpec c2 = cell;
        c2.temperature = t;
        const double tr = transmittance(nu1, c2, lines);
        CHECK(tr < prev);
        prev = tr;
    }

    // Beer-Lambert: two cells in series equal one long cell
    VaporCellSpec a = cell, b = cell, ab = cell;
    a.length = 30e-3;
    b.length = 45e-3;
    ab.length = 75e-3;
    const double ta = transmittance(nu1, a, lines) / cell.window_transmission;
    const double tb = transmittance(nu1, b, lines) / cell.window_transmission;
    const double tab = transmittance(nu1, ab, lines) / cell.window_transmission;
    CHECK(ta * tb == doctest::Approx(tab).epsilon(1e-12));
}

TEST_CASE("voigt limits through the optical depth")
{
    // Gaussian limit: natural linewidth -> 0
    VaporCellSpec cell = default_cell();
    std::vector<HyperfineLine> narrow = {{87, 1, 2, 0.0, 1.0, 1e-3}};
    const double dop = doppler_width(cell.temperature, c_light / 794.979e-9,
                                     isotope_mass_kg(87));
    const double od0 = optical_depth(0.0, cell, narrow);
    for (double k : {0.5, 1.0, 1.5}) {
        const double expect = od0 * std::exp(-4.0 * std::log(2.0) * k * k);
        CHECK(optical_depth(k * dop, cell, narrow) ==
              doctest::Approx(expect).epsilon(1e-4));
    }

    // Lorentzian limit: the natural width dwarfs the Doppler width
    std::vector<HyperfineLine> wide = {{87, 1, 2, 0.0, 1.0, 200e9}};
    const double g = 0.5 * 200e9;
    const double odc = optical_depth(0.0, cell, wide);
    for (double d : {20e9, 50e9, 100e9}) {
        const double expect = odc * (g * g) / (d * d + g * g);
        CHECK(optical_depth(d, cell, wide) == doctest::Approx(expect).epsilon(1e-4));
    }
}

TEST_CASE("photon transmittance")
{
    const VaporCellSpec cell = default_cell();
    const auto& lines = rb_d1_lines();
    const double nu1 = target_line_high().detuning;
    const double bw = bandwidth(1.0 / 20.7e-9, 1.0 / 24.4e-9);

    // delta limit: a kHz-wide photon sees the point transmittance
    CHECK(photon_transmittance(nu1, 1e3, cell, lines) ==
          doctest::Approx(transmittance(nu1, cell, lines)).epsilon(1e-3));

    // 4.5 MHz photons differ from the point value by < 0.1% where the
    // Lorentzian spectral tails do not dominate (one Doppler width out);
    // on the deep line center the tails admit ~1% extra transmission
    const double dop =
        doppler_width(cell.temperature, c_light / 795e-9, isotope_mass_kg(87));
    CHECK(photon_transmittance(nu1 + dop, bw, cell, lines) ==
          doctest::Approx(transmittance(nu1 + dop, cell, lines)).epsilon(1e-3));
    CHECK(photon_transmittance(nu1, bw, cell, lines) ==
          doctest::Approx(transmittance(nu1, cell, lines)).epsilon(0.02));

    // symmetric detunings about an isolated line agree
    std::vector<HyperfineLine> lone = {{87, 1, 2, 0.0, 1.0, 5.75e6}};
    for (double d : {50e6, 300e6, 1.2e9}) {
        const double lo = photon_transmittance(-d, bw, cell, lone);
        const double hi = photon_transmittance(+d, bw, cell, lone);
        CHECK(lo == doctest::Approx(hi).epsilon(1e-10));
    }
}

TEST_CASE("magnetic field behavior")
{
    VaporCellSpec cell = default_cell();
    const auto& lines = rb_d1_lines();
    const double nu1 = target_line_high().detuning;
    const double bw = 4.5e6;

    // photon transmittance is exactly even in B
    for (double b_mt : {3.0, 11.0, 47.0}) {
        VaporCellSpec pos = cell, neg = cell;
        pos.b_field = b_mt * 1e-3;
        neg.b_field = -b_mt * 1e-3;
        CHECK(photon_transmittance(nu1, bw, pos, lines) ==
              photon_transmittance(nu1, bw, neg, lines));
    }

    // increasing |B| detunes the components and raises the transmission
    double prev = 0.0;
    for (double b = 0.0; b <= 50e-3; b += 10e-3) {
        VaporCellSpec c2 = cell;
        c2.b_field = b;
        const double tr = photon_transmittance(nu1, bw, c2, lines);
        CHECK(tr > prev);
        prev = tr;
    }

    // thin cell at +-50 mT recovers to within 2% of the window baseline
    VaporCellSpec thin = cell;
    thin.length = 10e-3;
    thin.b_field = 50e-3;
    CHECK(photon_transmittance(nu1, bw, thin, lines) > 0.98 * 0.85);

    // field non-uniformity averaging stays even and close to the point value
    VaporCellSpec avg = cell;
    avg.b_field = 20e-3;
    avg.average_nonuniformity = true;
    VaporCellSpec avg_neg = avg;
    avg_neg.b_field = -20e-3;
    CHECK(photon_transmittance(nu1, bw, avg, lines) ==
          photon_transmittance(nu1, bw, avg_neg, lines));
    VaporCellSpec point = avg;
    point.average_nonuniformity = false;
    CHECK(std::fabs(photon_transmittance(nu1, bw, avg, lines) -
                    photon_transmittance(nu1, bw, point, lines)) < 0.02);
}

TEST_CASE("crystal temperature scan shows the two target dips")
{
    CrystalSpec crystal = CrystalSpec::ktp_default();
    const double gamma_s = 1.0 / 20.7e-9, gamma_i = 1.0 / 24.4e-9;
    const double half_pump = 0.5 * crystal.pump_frequency();
    const double anchor = target_line_high().detuning;
    const ModeComb sc = build_comb(crystal, crystal.signal_axis, gamma_s, half_pump + anchor);
    const ModeComb ic = build_comb(crystal, crystal.idler_axis, gamma_i, half_pump - anchor);
    const VaporCellSpec cell = default_cell();
    const double t0 = crystal.reference_temperature;

    const auto scan = crystal_temperature_scan(crystal, sc, ic, cell, rb_d1_lines(),
                                               t0 - 0.090, t0 + 0.060, 1e-3, 4.5e6);
    REQUIRE(scan.size() == 151);

    std::vector<double> ys;
    for (const auto& [t, tr] : scan)
        ys.push_back(tr);
    const auto dips = detect_dips(ys, 0.80, 0.01);
    REQUIRE(dips.size() == 2);

    // dip centers one mode hop apart
    const double hop = mode_hop_spacing(sc.fsr - ic.fsr, crystal.alpha_t);
    const double sep = scan[dips[1]].first - scan[dips[0]].first;
    CHECK(std::fabs(sep / hop - 1.0) < 0.10);

    // off resonance the trace sits on the 85% window baseline
    for (const auto& [t, tr] : scan)
        if (tr > 0.80)
            CHECK(tr == doctest::Approx(0.85).epsilon(0.006));

    // empty line list -> flat trace at the window transmission
    const auto flat = crystal_temperature_scan(crystal, sc, ic, cell, {}, t0 - 0.01,
                                               t0 + 0.01, 1e-3, 4.5e6);
    for (const auto& [t, tr] : flat)
        CHECK(tr == 0.85);
}
