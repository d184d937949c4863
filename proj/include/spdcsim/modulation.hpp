#pragma once

#include "spdcsim/biphoton.hpp"
#include "spdcsim/photon_stats.hpp"

#include <cstdint>
#include <vector>

namespace spdcsim {

/// Electro-optic amplitude modulation in herald-relative delay. Amplitude
/// transmission is in [0, 1]; observables use the squared (intensity)
/// transmission. The trigger latency shifts the whole pattern relative to
/// the herald detection.
struct ModulationProfile {
    enum class Kind { identity, square_train, step, sampled };
    Kind kind = Kind::identity;
    double latency = 0.0; // s

    // square_train: pulses ON over [start + k P, start + k P + duty P), k < count
    double period = 0.0;
    double duty = 0.5;
    int count = 0;
    double start = 0.0;

    // step: open_after passes tau >= edge, close_after passes tau < edge
    double edge = 0.0;
    bool open_after = true;

    // sampled amplitude on a strictly increasing grid, linear interpolation
    std::vector<double> grid;      // s
    std::vector<double> amplitude; // [0, 1]

    static ModulationProfile identity_profile();
    static ModulationProfile square(double period, double duty, int count, double start,
                                    double latency = 0.0);
    static ModulationProfile step_profile(double edge, bool open_after, double latency = 0.0);
    static ModulationProfile sampled_profile(std::vector<double> grid,
                                             std::vector<double> amplitude, double latency = 0.0);
};

/// Squared amplitude transmission at herald-relative delay tau.
double intensity_transmission(const ModulationProfile& profile, double tau);

/// Pointwise product of a waveform with the intensity transmission.
/// A sampled profile must cover the waveform window.
Waveform apply_to_waveform(const Waveform& w, const ModulationProfile& profile);

/// Thins signal events with probability equal to the intensity transmission
/// at their delay to the herald: the truth-paired idler detection when
/// present, the nearest idler detection otherwise. Idler and background
/// events pass through. Reproducible from the seed; an identity profile
/// returns the stream unchanged.
EventStream apply_to_stream(const EventStream& stream, const ModulationProfile& profile,
                            std::uint64_t seed);

} // namespace spdcsim
