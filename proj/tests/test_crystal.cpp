#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "spdcsim/crystal.hpp"

#include <cmath>
#include <stdexcept>

using namespace spdcsim;

namespace {

// constant-index set: n^2 = n0^2, no dispersion
SellmeierSet constant_index(double n0)
{
    SellmeierSet s;
    s.a = n0 * n0;
    s.b1 = s.b2 = s.d = s.dn_dt = 0.0;
    return s;
}

CrystalSpec constant_crystal(double n_signal, double n_idler, double length)
{
    CrystalSpec c = CrystalSpec::ktp_default();
    c.length = length;
    c.sellmeier[(int)c.signal_axis] = constant_index(n_signal);
    c.sellmeier[(int)c.idler_axis] = constant_index(n_idler);
    return c;
}

} // namespace

TEST_CASE("refractive index of the default KTP set")
{
    const CrystalSpec c = CrystalSpec::ktp_default();
    // evaluated from the published coefficients by hand before the build
    CHECK(refractive_index(c, Axis::z, 795e-9, 298.0) == doctest::Approx(1.84437).epsilon(0.012));
    CHECK(refractive_index(c, Axis::y, 795e-9, 298.0) == doctest::Approx(1.75932).epsilon(0.012));

    // band edges evaluate without error
    const SellmeierSet& set = c.sellmeier[(int)Axis::z];
    CHECK(std::isfinite(refractive_index(c, Axis::z, set.band_lo, 298.0)));
    CHECK(std::isfinite(refractive_index(c, Axis::z, set.band_hi, 298.0)));
    CHECK_THROWS_AS(refractive_index(c, Axis::z, 0.3e-6, 298.0), std::domain_error);

    // constant-index degenerate set: n = 2 exactly at every wavelength
    const CrystalSpec cc = constant_crystal(2.0, 2.0, 0.01);
    for (double lam : {0.55e-6, 0.795e-6, 1.1e-6})
        CHECK(refractive_index(cc, cc.signal_axis, lam, 300.0) == 2.0);
}

TEST_CASE("group index")
{
    const CrystalSpec cc = constant_crystal(2.0, 2.0, 0.01);
    CHECK(group_index(cc, cc.signal_axis, 795e-9, 300.0) == doctest::Approx(2.0).epsilon(1e-12));

    const CrystalSpec c = CrystalSpec::ktp_default();
    const double dng = differential_group_index(c, 795e-9, 795e-9, 298.0);
    CHECK(std::fabs(dng) == doctest::Approx(0.1).epsilon(0.2)); // 0.08 .. 0.12

    // group index >= phase index in the normal-dispersion band
    for (double lam = 0.55e-6; lam <= 1.1e-6; lam += 0.05e-6)
        for (Axis ax : {Axis::y, Axis::z})
            CHECK(group_index(c, ax, lam, 298.0) >= refractive_index(c, ax, lam, 298.0));

    // halving the step changes n_g by < 1e-6
    CrystalSpec half = c;
    half.fd_step = c.fd_step / 2.0;
    CHECK(std::fabs(group_index(half, Axis::z, 795e-9, 298.0) -
                    group_index(c, Axis::z, 795e-9, 298.0)) < 1e-6);

    CHECK_THROWS_AS(group_index(c, Axis::z, c.sellmeier[2].band_hi, 298.0), std::domain_error);
}

TEST_CASE("fsr")
{
    // arithmetic oracle: c/(2 * 1.85 * 0.01)
    const CrystalSpec cc = constant_crystal(1.85, 1.85, 0.01);
    const double expect = oracles::c_light / (2.0 * 1.85 * 0.01);
    CHECK(fsr(cc, cc.signal_axis, 795e-9, 300.0) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(expect == doctest::Approx(8.102e9).epsilon(1e-3));

    // doubling the length exactly halves the FSR
    CrystalSpec cc2 = cc;
    cc2.length = 2.0 * cc.length;
    CHECK(fsr(cc2, cc.signal_axis, 795e-9, 300.0) ==
          doctest::Approx(0.5 * fsr(cc, cc.signal_axis, 795e-9, 300.0)).epsilon(1e-14));

    // the default FSR sits within 10% of the 87Rb line-spacing oracle
    const CrystalSpec c = CrystalSpec::ktp_default();
    const double line_spacing = 7.651339e9; // ground + excited splitting, summed by hand
    const double f = fsr(c, c.signal_axis, c.degenerate_wavelength(), c.reference_temperature);
    CHECK(std::fabs(f / line_spacing - 1.0) < 0.10);
}

TEST_CASE("differential fsr")
{
    const CrystalSpec c = CrystalSpec::ktp_default();
    const double dnu = differential_fsr(c, 795e-9, 795e-9, c.reference_temperature);
    CHECK(std::fabs(dnu) == doctest::Approx(440e6).epsilon(0.10));

    // identical axes -> zero; swapping flips the sign
    CrystalSpec same = c;
    same.idler_axis = same.signal_axis;
    CHECK(differential_fsr(same, 795e-9, 795e-9, 298.0) == 0.0);
    CrystalSpec swapped = c;
    std::swap(swapped.signal_axis, swapped.idler_axis);
    CHECK(differential_fsr(swapped, 795e-9, 795e-9, c.reference_temperature) ==
          doctest::Approx(-dnu).epsilon(1e-12));
}

TEST_CASE("gain linewidth")
{
    // arithmetic oracle 0.44 c / (0.1 * 0.01)
    const CrystalSpec cc = constant_crystal(2.1, 2.0, 0.01);
    const double fw = gain_linewidth(cc, 795e-9, 795e-9, 300.0);
    CHECK(fw == doctest::Approx(0.44 * oracles::c_light / (0.1 * 0.01)).epsilon(1e-9));
    CHECK(fw == doctest::Approx(132e9).epsilon(0.005));

    CrystalSpec single = cc;
    single.double_pass = false;
    CHECK(gain_linewidth(single, 795e-9, 795e-9, 300.0) == doctest::Approx(2.0 * fw).epsilon(1e-12));

    const CrystalSpec deg = constant_crystal(2.0, 2.0, 0.01);
    CHECK_THROWS_AS(gain_linewidth(deg, 795e-9, 795e-9, 300.0), std::domain_error);
}

TEST_CASE("gain envelope")
{
    const CrystalSpec c = CrystalSpec::ktp_default();
    const double t0 = c.reference_temperature;
    const double peak = 0.5 * c.pump_frequency();
    const double fwhm = gain_linewidth(c, c.degenerate_wavelength(), c.degenerate_wavelength(), t0);

    CHECK(gain_envelope(c, peak, t0) == 1.0);
    CHECK(gain_envelope(c, peak + 0.5 * fwhm, t0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(gain_envelope(c, peak - 0.5 * fwhm, t0) == doctest::Approx(0.5).epsilon(1e-6));

    // +1 K moves the peak by alpha_t
    CHECK(gain_envelope(c, peak + c.alpha_t, t0 + 1.0) == doctest::Approx(1.0).epsilon(1e-12));

    // even about the peak; monotone on [peak, peak + fwhm/2]
    oracles::PropRng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double d = rng.uniform(0.0, 2.0) * fwhm;
        CHECK(gain_envelope(c, peak + d, t0) ==
              doctest::Approx(gain_envelope(c, peak - d, t0)).epsilon(1e-12));
    }
    double prev = 1.1;
    for (double d = 0.0; d <= 0.5 * fwhm; d += fwhm / 64.0) {
        const double g = gain_envelope(c, peak + d, t0);
        CHECK(g < prev);
        prev = g;
    }

    // temperature translation: envelope(nu + a dT, T + dT) == envelope(nu, T)
    for (int i = 0; i < 100; ++i) {
        const double nu = peak + rng.uniform(-1.0, 1.0) * fwhm;
        const double dt = rng.uniform(-0.5, 0.5);
        CHECK(gain_envelope(c, nu + c.alpha_t * dt, t0 + dt) ==
              doctest::Approx(gain_envelope(c, nu, t0)).epsilon(1e-9));
    }
}

TEST_CASE("vernier identity on random specs")
{
    // FSR_s FSR_i / |dnu| == 0.5 c / (|dn_g| L) to 1e-12 relative
    oracles::PropRng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        CrystalSpec c = CrystalSpec::ktp_default();
        c.length = rng.uniform(3e-3, 30e-3);
        SellmeierSet a, b;
        a.a = rng.uniform(3.0, 3.6);
        a.b1 = rng.uniform(0.03, 0.06);
        a.c1 = rng.uniform(0.03, 0.06);
        a.d = rng.uniform(0.005, 0.02);
        b = a;
        b.a += rng.uniform(0.05, 0.4);
        b.b1 += rng.uniform(0.005, 0.02);
        c.sellmeier[(int)c.signal_axis] = a;
        c.sellmeier[(int)c.idler_axis] = b;
        const double lam = rng.uniform(0.7e-6, 0.9e-6);
        const double t = rng.uniform(290.0, 320.0);

        const double fs = fsr(c, c.signal_axis, lam, t);
        const double fi = fsr(c, c.idler_axis, lam, t);
        const double dng = differential_group_index(c, lam, lam, t);
        if (std::fabs(dng) < 1e-4)
            continue;
        const double lhs = fs * fi / std::fabs(fs - fi);
        const double rhs = 0.5 * oracles::c_light / (std::fabs(dng) * c.length);
        CHECK(std::fabs(lhs / rhs - 1.0) < 1e-12);
    }
}

TEST_CASE("fsr scaling law")
{
    oracles::PropRng rng(77);
    const CrystalSpec c = CrystalSpec::ktp_default();
    for (int i = 0; i < 50; ++i) {
        const double a = rng.uniform(0.2, 5.0);
        CrystalSpec scaled = c;
        scaled.length = c.length * a;
        CHECK(fsr(scaled, Axis::z, 795e-9, 298.0) ==
              doctest::Approx(fsr(c, Axis::z, 795e-9, 298.0) / a).epsilon(1e-12));
    }
}
