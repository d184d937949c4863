#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "spdcsim/kernels.hpp"

#include <cmath>
#include <vector>

using namespace spdcsim;

TEST_CASE("faddeeva anchors")
{
    // w(0) = 1, and on the imaginary axis Re w(iy) = exp(y^2) erfc(y)
    CHECK(kernels::faddeeva_re(0.0, 1e-300) == doctest::Approx(1.0).epsilon(1e-12));
    for (double y : {0.003, 0.01, 0.3, 1.0, 3.0, 9.0}) {
        const double exact = std::exp(y * y) * std::erfc(y);
        CHECK(kernels::faddeeva_re(0.0, y) == doctest::Approx(exact).epsilon(1e-10));
    }
    // Gaussian limit: y -> 0 gives exp(-x^2)
    for (double x : {0.0, 0.5, 1.0, 2.0})
        CHECK(kernels::faddeeva_re(x, 1e-8) == doctest::Approx(std::exp(-x * x)).epsilon(1e-6));
}

TEST_CASE("faddeeva vs direct convolution oracle")
{
    // physical Voigt parameter range plus margin, out to 10 Doppler widths;
    // the oracle itself is only good to ~1e-9 for y below ~0.2
    double worst = 0.0;
    for (double y : {0.004, 0.0066, 0.0095, 0.022, 0.06, 0.15}) {
        for (double x = 0.0; x <= 17.0; x += 0.0931) {
            const double ref = oracles::voigt_convolution(x, y);
            const double got = kernels::faddeeva_re(x, y);
            worst = std::max(worst, std::fabs(got - ref) / ref);
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("faddeeva continued-fraction / Weideman boundary is seamless")
{
    for (double y : {0.005, 0.1, 2.0}) {
        const double x = std::sqrt(64.0 - y * y);
        const double in = kernels::faddeeva_re(x * 0.999999, y);
        const double out = kernels::faddeeva_re(x * 1.000001, y);
        CHECK(in == doctest::Approx(out).epsilon(1e-7));
    }
}

TEST_CASE("grid kernels agree with scalar math")
{
    oracles::PropRng rng(42);
    std::vector<double> x(257), out(257);
    for (auto& v : x)
        v = rng.uniform(-30.0, 3.0);
    kernels::exp_grid(x.data(), out.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(out[i] == doctest::Approx(std::exp(x[i])).epsilon(1e-13));

    std::vector<double> tau(193), w(193);
    for (auto& v : tau)
        v = rng.uniform(-2e-7, 2e-7);
    const double gs = 1.0 / 20.7e-9, gi = 1.0 / 24.4e-9;
    kernels::double_exp_grid(tau.data(), w.data(), tau.size(), gs, gi, 2.5);
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double ref = 2.5 * std::exp(tau[i] < 0 ? gs * tau[i] : -gi * tau[i]);
        CHECK(w[i] == doctest::Approx(ref).epsilon(1e-13));
    }
}

TEST_CASE("backends are equivalent")
{
    if (!kernels::backend_supported(kernels::Backend::avx2)) {
        MESSAGE("avx2 unavailable on this host, dispatch check only");
        CHECK(kernels::active_backend() == kernels::Backend::scalar);
        return;
    }
    const auto previous = kernels::active_backend();
    oracles::PropRng rng(7);

    std::vector<double> x(1031), a(1031), b(1031);
    for (auto& v : x)
        v = rng.uniform(-700.0, 700.0);
    REQUIRE(kernels::set_backend(kernels::Backend::scalar));
    kernels::exp_grid(x.data(), a.data(), x.size());
    REQUIRE(kernels::set_backend(kernels::Backend::avx2));
    kernels::exp_grid(x.data(), b.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-13));

    for (auto& v : x)
        v = rng.uniform(-18.0, 18.0);
    for (double y : {0.0066, 0.5, 6.0, 11.0}) {
        kernels::set_backend(kernels::Backend::scalar);
        kernels::faddeeva_re_grid(x.data(), a.data(), x.size(), y);
        kernels::set_backend(kernels::Backend::avx2);
        kernels::faddeeva_re_grid(x.data(), b.data(), x.size(), y);
        for (std::size_t i = 0; i < x.size(); ++i)
            CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-12));
    }

    std::vector<double> tau(515), s1(515), s2(515);
    for (auto& v : tau)
        v = rng.uniform(-3e-7, 3e-7);
    kernels::set_backend(kernels::Backend::scalar);
    kernels::double_exp_grid(tau.data(), s1.data(), tau.size(), 4.8e7, 4.1e7, 1.7);
    kernels::set_backend(kernels::Backend::avx2);
    kernels::double_exp_grid(tau.data(), s2.data(), tau.size(), 4.8e7, 4.1e7, 1.7);
    for (std::size_t i = 0; i < tau.size(); ++i)
        CHECK(s2[i] == doctest::Approx(s1[i]).epsilon(1e-13));

    kernels::set_backend(previous);
}
