#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "spdcsim/modulation.hpp"

#include <cmath>
#include <stdexcept>

using namespace spdcsim;

namespace {

const double gamma_s = 1.0 / 20.7e-9;
const double gamma_i = 1.0 / 24.4e-9;

BiphotonParams source(double pump_uw = 30.0)
{
    return BiphotonParams::from_pump(pump_uw * 1e-6, 1.652034e9, gamma_s, gamma_i);
}

std::size_t support_runs(const Waveform& w)
{
    std::size_t runs = 0;
    bool in_run = false;
    for (double v : w.value) {
        if (v > 0.0 && !in_run) {
            ++runs;
            in_run = true;
        } else if (v == 0.0) {
            in_run = false;
        }
    }
    return runs;
}

} // namespace

TEST_CASE("intensity transmission")
{
    const auto id = ModulationProfile::identity_profile();
    for (double tau : {-1e-7, 0.0, 3e-8})
        CHECK(intensity_transmission(id, tau) == 1.0);

    const auto sq = ModulationProfile::square(10e-9, 0.5, 7, 0.0);
    CHECK(intensity_transmission(sq, 2e-9) == 1.0);
    CHECK(intensity_transmission(sq, 7e-9) == 0.0);
    CHECK(intensity_transmission(sq, -1e-9) == 0.0);
    CHECK(intensity_transmission(sq, 69e-9) == 0.0);
    CHECK(intensity_transmission(sq, 62e-9) == 1.0);

    const auto close = ModulationProfile::step_profile(0.0, false);
    CHECK(intensity_transmission(close, -1e-9) == 1.0);
    CHECK(intensity_transmission(close, 1e-9) == 0.0);
    const auto open = ModulationProfile::step_profile(0.0, true);
    CHECK(intensity_transmission(open, -1e-9) == 0.0);
    CHECK(intensity_transmission(open, 1e-9) == 1.0);

    // latency shifts the pattern
    const auto lag = ModulationProfile::step_profile(0.0, true, 5e-9);
    CHECK(intensity_transmission(lag, 3e-9) == 0.0);
    CHECK(intensity_transmission(lag, 6e-9) == 1.0);

    // sampled profiles interpolate the amplitude and square it
    const auto samp = ModulationProfile::sampled_profile({0.0, 10e-9}, {0.0, 1.0});
    CHECK(intensity_transmission(samp, 5e-9) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(ModulationProfile::sampled_profile({0.0, 1e-9}, {0.0, 1.5}),
                    std::invalid_argument);
}

TEST_CASE("apply to waveform")
{
    const Waveform w = conditional_density(source());

    // identity returns the input bitwise
    const Waveform same = apply_to_waveform(w, ModulationProfile::identity_profile());
    for (std::size_t i = 0; i < w.value.size(); ++i)
        CHECK(same.value[i] == w.value[i]);

    // seven square pulses -> exactly seven disjoint support intervals with
    // the unmodulated envelope on each
    const auto train = ModulationProfile::square((w.hi - w.lo) / 7.0, 0.5, 7, w.lo);
    const Waveform seven = apply_to_waveform(w, train);
    CHECK(support_runs(seven) == 7);
    for (std::size_t i = 0; i < w.value.size(); ++i) {
        CHECK(seven.value[i] <= w.value[i]); // pointwise dominance
        if (seven.value[i] > 0.0)
            CHECK(seven.value[i] == w.value[i]);
    }

    // close-after step keeps only the exponential-growth flank
    const Waveform growth =
        apply_to_waveform(w, ModulationProfile::step_profile(0.0, false));
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < growth.value.size(); ++i) {
        CHECK((growth.tau[i] < 0.0 || growth.value[i] == 0.0));
        if (growth.value[i] > 0.0 && growth.tau[i] < -2e-9) {
            lx.push_back(growth.tau[i]);
            ly.push_back(std::log(growth.value[i]));
        }
    }
    CHECK(oracles::lsq_slope(lx, ly) == doctest::Approx(gamma_s).epsilon(1e-9));

    // composition equals the pointwise product profile
    const auto a = ModulationProfile::square(40e-9, 0.6, 8, w.lo);
    const auto b = ModulationProfile::step_profile(20e-9, false);
    const Waveform ab = apply_to_waveform(apply_to_waveform(w, a), b);
    for (std::size_t i = 0; i < w.value.size(); ++i) {
        const double prod = intensity_transmission(a, w.tau[i]) *
                            intensity_transmission(b, w.tau[i]);
        CHECK(ab.value[i] == doctest::Approx(w.value[i] * prod).epsilon(1e-12));
    }

    // a sampled profile must cover the window
    const auto narrow = ModulationProfile::sampled_profile({-1e-9, 1e-9}, {1.0, 1.0});
    CHECK_THROWS_AS(apply_to_waveform(w, narrow), std::invalid_argument);
}

TEST_CASE("apply to stream")
{
    const BiphotonParams p = source(60.0);
    // lossless idler: every signal photon has its own detected herald, so
    // the retained fraction follows the masked density exactly
    DetectionConfig d;
    d.eta = 1.0;
    d.t_idler = 1.0;
    d.t_signal = 0.5;
    d.bs_ratio = 1.0;
    const EventStream s = simulate_stream(p, d, 20.0, 2024);

    // identity passes the stream through untouched
    const EventStream same = apply_to_stream(s, ModulationProfile::identity_profile(), 1);
    REQUIRE(same.events.size() == s.events.size());
    for (std::size_t i = 0; i < s.events.size(); ++i)
        CHECK(same.events[i].t_ps == s.events[i].t_ps);

    // close-after step: no correlated coincidences at positive delays
    const EventStream cut =
        apply_to_stream(s, ModulationProfile::step_profile(0.0, false), 1);
    const Waveform h = coincidence_histogram(cut, 1e-9, 100e-9);
    double pos = 0.0, neg = 0.0;
    for (std::size_t i = 0; i < h.value.size(); ++i)
        (h.tau[i] > 1.5e-9 ? pos : neg) += h.value[i];
    CHECK(neg > 1000.0);
    CHECK(pos < 0.01 * neg); // only multi-pair mispairings survive

    // retained fraction matches the integral of density x transmission
    const auto train = ModulationProfile::square(30e-9, 0.5, 6, -90e-9);
    const EventStream thinned = apply_to_stream(s, train, 7);
    auto heralded_signals = [](const EventStream& st) {
        double n = 0;
        for (const Event& e : st.events)
            n += e.channel == Channel::signal;
        return n;
    };
    const Waveform dens = conditional_density(p);
    const Waveform masked = apply_to_waveform(dens, train);
    double kept_expect = 0.0;
    for (std::size_t i = 0; i + 1 < masked.value.size(); ++i)
        kept_expect += 0.5 * (masked.value[i] + masked.value[i + 1]) * masked.step;
    const double n0 = heralded_signals(s);
    const double n1 = heralded_signals(thinned);
    const double sigma = std::sqrt(kept_expect * (1.0 - kept_expect) / n0);
    CHECK(std::fabs(n1 / n0 - kept_expect) < 4.0 * sigma + 1e-3);

    // reproducible from the seed
    const EventStream again = apply_to_stream(s, train, 7);
    REQUIRE(again.events.size() == thinned.events.size());
    for (std::size_t i = 0; i < again.events.size(); ++i)
        CHECK(again.events[i].t_ps == thinned.events[i].t_ps);

    EventStream no_heralds;
    no_heralds.duration = 1.0;
    no_heralds.events = {{100, Channel::signal, 0}};
    CHECK_THROWS_AS(apply_to_stream(no_heralds, train, 1), std::invalid_argument);
}

TEST_CASE("stream histogram matches the masked analytic waveform")
{
    BiphotonParams p;
    p.gamma_s = gamma_s;
    p.gamma_i = gamma_i;
    p.pair_rate = 2e4;
    p.kappa = kappa_from_rate(p.pair_rate, gamma_s, gamma_i);
    DetectionConfig d;
    d.eta = 1.0;
    d.t_signal = 1.0;
    d.t_idler = 1.0;
    d.resolution = 0.0;
    d.bs_ratio = 1.0;
    const double duration = 10.0;
    const EventStream s = simulate_stream(p, d, duration, 55);

    const auto train = ModulationProfile::square(25e-9, 0.5, 8, -100e-9);
    const EventStream mod = apply_to_stream(s, train, 9);
    const Waveform h = coincidence_histogram(mod, 0.35e-9, 150e-9);

    const Waveform dens_w = conditional_density(p);
    const Waveform masked = apply_to_waveform(dens_w, train);
    double kept = 0.0;
    for (std::size_t i = 0; i + 1 < masked.value.size(); ++i)
        kept += 0.5 * (masked.value[i] + masked.value[i + 1]) * masked.step;
    const double accidental = p.pair_rate * p.pair_rate * kept * h.step * duration;

    const double norm = gamma_s * gamma_i / (gamma_s + gamma_i);
    double chi2 = 0.0;
    int dof = 0;
    for (std::size_t i = 0; i < h.value.size(); ++i) {
        // skip bins straddling a pulse edge, where the all-or-nothing
        // bin-center model is wrong by construction
        const double m2 = intensity_transmission(train, h.tau[i]);
        if (intensity_transmission(train, h.tau[i] - 0.5 * h.step) != m2 ||
            intensity_transmission(train, h.tau[i] + 0.5 * h.step) != m2)
            continue;
        const double dens = norm * std::exp(h.tau[i] < 0 ? gamma_s * h.tau[i]
                                                         : -gamma_i * h.tau[i]);
        const double expect = p.pair_rate * duration * dens * m2 * h.step + accidental;
        if (expect < 10.0)
            continue;
        chi2 += (h.value[i] - expect) * (h.value[i] - expect) / expect;
        ++dof;
    }
    REQUIRE(dof > 50);
    CHECK(chi2 / dof > 0.8);
    CHECK(chi2 / dof < 1.2);
}
