#pragma once

#include "spdcsim/biphoton.hpp"

#include <cstdint>
#include <vector>

namespace spdcsim {

enum class Channel : std::uint8_t {
    signal = 0,       // D_s
    signal_prime = 1, // D_s' (second output of the signal beam splitter)
    idler = 2,        // D_i
};

/// One detector click. Timestamps are integer picoseconds so streams sort,
/// serialize and histogram exactly. pair_id < 0 marks background events.
struct Event {
    std::int64_t t_ps = 0;
    Channel channel = Channel::signal;
    std::int64_t pair_id = -1;
};

struct EventStream {
    std::vector<Event> events; // sorted by (t_ps, channel, pair_id)
    double duration = 0.0;     // s
    std::uint64_t seed = 0;
    bool has_truth = true;
};

struct DetectionConfig {
    double eta = 0.63;            // quantum efficiency per detector
    double t_signal = 0.27;       // channel transmittance
    double t_idler = 0.54;
    enum class Jitter { gaussian, uniform } jitter_model = Jitter::gaussian;
    double resolution = 350e-12;  // s, detector timing resolution (FWHM / full bin)
    double tau_c = 200e-9;        // s, coincidence window
    double bg_signal = 0.0;       // counts/s entering the signal channel (split at the BS)
    double bg_idler = 0.0;        // counts/s on the idler detector
    double bs_ratio = 0.5;        // fraction of the signal channel routed to D_s
    double dead_time = 0.0;       // s, non-paralyzable, per detector

    double jitter_sigma() const { return resolution / 2.3548200450309493; }
};

/// Monte Carlo time-tag generation: Poissonian pair creation at the
/// generated pair rate, signal delayed by the conditional density,
/// independent survival through channel transmittance x eta, beam-splitter
/// routing, timing jitter and Poissonian backgrounds. Deterministic for a
/// given (params, config, duration, seed); the duration is sharded into
/// 1 s substreams so the output is independent of worker layout.
EventStream simulate_stream(const BiphotonParams& p, const DetectionConfig& d, double duration,
                            std::uint64_t seed);

/// Delay histogram of (t_a - t_b) pairs within +-window, sorted two-pointer
/// sweep. Bin width must be >= 1 ps.
Waveform coincidence_histogram(const EventStream& stream, double bin_s, double window_s,
                               Channel a = Channel::signal, Channel b = Channel::idler);

/// Two-detector anticorrelation per delay bin, alpha = R /(tau_c R_s R_i)
/// with the bin width as tau_c.
std::vector<double> alpha_2d(const Waveform& histogram, double r_s, double r_i, double duration);

/// Three-detector anticorrelation conditional on idler heralds, counted in
/// a window tau_c centered on each herald: a_3d = N_ss'i N_i / (N_si N_s'i).
double alpha_3d(const EventStream& stream, double tau_c);

struct CountSummary {
    double r_s = 0, r_sp = 0, r_i = 0;       // singles rates, counts/s
    double r_si = 0, r_spi = 0, r_sspi = 0;  // herald-windowed coincidence rates
    double alpha3d = 0;
    std::vector<double> alpha2d;             // per histogram bin
    Waveform histogram;                      // D_s x D_i delays
};

CountSummary summarize(const EventStream& stream, const DetectionConfig& d, double bin_s,
                       double window_s);

struct DecayFit {
    double gamma_s = 0; // 1/s, from the tau < 0 flank
    double gamma_i = 0; // 1/s, from the tau > 0 flank
    double floor = 0;   // counts per bin
};

/// Weighted log-linear fits of the two exponential flanks of a coincidence
/// histogram. The accidental floor is estimated from the outer 10% of bins
/// unless given (pass floor >= 0 to pin it). Bins within `exclude_s` of
/// zero delay are skipped: timing jitter rounds the kink there.
DecayFit fit_decay_rates(const Waveform& histogram, double floor = -1.0,
                         double exclude_s = 1.05e-9);

} // namespace spdcsim
