#include "spdcsim/photon_stats.hpp"

#include "spdcsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spdcsim {

namespace {

constexpr double shard_length = 1.0; // s

std::int64_t to_ps(double t_s) { return (std::int64_t)std::llround(t_s * 1e12); }

double sample_delay(Rng& rng, const BiphotonParams& p)
{
    // mass on tau > 0 is Gs/(Gs+Gi)
    const double p_pos = p.gamma_s / (p.gamma_s + p.gamma_i);
    if (rng.uniform() < p_pos)
        return rng.exponential(p.gamma_i);
    return -rng.exponential(p.gamma_s);
}

double jitter(Rng& rng, const DetectionConfig& d)
{
    if (d.resolution <= 0.0)
        return 0.0;
    if (d.jitter_model == DetectionConfig::Jitter::uniform)
        return (rng.uniform() - 0.5) * d.resolution;
    return rng.gaussian() * d.jitter_sigma();
}

void apply_dead_time(std::vector<Event>& events, double dead_s)
{
    if (dead_s <= 0.0)
        return;
    const std::int64_t dead = to_ps(dead_s);
    std::int64_t last[3] = {-dead - 1, -dead - 1, -dead - 1};
    std::size_t keep = 0;
    for (const Event& e : events) {
        auto& prev = last[(int)e.channel];
        if (e.t_ps - prev < dead)
            continue;
        prev = e.t_ps;
        events[keep++] = e;
    }
    events.resize(keep);
}

} // namespace

EventStream simulate_stream(const BiphotonParams& p, const DetectionConfig& d, double duration,
                            std::uint64_t seed)
{
    if (!(duration > 0.0))
        throw std::invalid_argument("stream duration must be positive");
    EventStream stream;
    stream.duration = duration;
    stream.seed = seed;

    const std::int64_t end_ps = to_ps(duration);
    const auto n_shards = (std::uint64_t)std::ceil(duration / shard_length);
    const double p_idler = d.eta * d.t_idler;
    const double p_signal = d.eta * d.t_signal;

    for (std::uint64_t shard = 0; shard < n_shards; ++shard) {
        const double t0 = shard * shard_length;
        const double t1 = std::min(duration, t0 + shard_length);

        auto emit = [&](double t_s, Channel ch, std::int64_t id) {
            const std::int64_t t = to_ps(t_s);
            if (t >= 0 && t <= end_ps)
                stream.events.push_back({t, ch, id});
        };

        if (p.pair_rate > 0.0) {
            Rng rng = Rng::substream(seed, shard * 4 + 0);
            std::int64_t pair_id = (std::int64_t)(shard << 36);
            for (double t = t0 + rng.exponential(p.pair_rate); t < t1;
                 t += rng.exponential(p.pair_rate)) {
                const std::int64_t id = pair_id++;
                const double delay = sample_delay(rng, p);
                if (rng.uniform() < p_idler)
                    emit(t + jitter(rng, d), Channel::idler, id);
                if (rng.uniform() < p_signal) {
                    const Channel ch = rng.uniform() < d.bs_ratio ? Channel::signal
                                                                  : Channel::signal_prime;
                    emit(t + delay + jitter(rng, d), ch, id);
                }
            }
        }
        if (d.bg_signal > 0.0) {
            Rng rng = Rng::substream(seed, shard * 4 + 1);
            for (double t = t0 + rng.exponential(d.bg_signal); t < t1;
                 t += rng.exponential(d.bg_signal)) {
                const Channel ch = rng.uniform() < d.bs_ratio ? Channel::signal
                                                              : Channel::signal_prime;
                emit(t + jitter(rng, d), ch, -1);
            }
        }
        if (d.bg_idler > 0.0) {
            Rng rng = Rng::substream(seed, shard * 4 + 2);
            for (double t = t0 + rng.exponential(d.bg_idler); t < t1;
                 t += rng.exponential(d.bg_idler))
                emit(t + jitter(rng, d), Channel::idler, -1);
        }
    }

    std::sort(stream.events.begin(), stream.events.end(), [](const Event& a, const Event& b) {
        if (a.t_ps != b.t_ps)
            return a.t_ps < b.t_ps;
        if (a.channel != b.channel)
            return a.channel < b.channel;
        return a.pair_id < b.pair_id;
    });
    apply_dead_time(stream.events, d.dead_time);
    return stream;
}

namespace {

std::vector<std::int64_t> channel_times(const EventStream& s, Channel ch)
{
    std::vector<std::int64_t> t;
    for (const Event& e : s.events)
        if (e.channel == ch)
            t.push_back(e.t_ps);
    return t;
}

} // namespace

Waveform coincidence_histogram(const EventStream& stream, double bin_s, double window_s,
                               Channel a, Channel b)
{
    const std::int64_t bin_ps = to_ps(bin_s);
    if (bin_ps < 1)
        throw std::invalid_argument("histogram bin below the 1 ps timestamp resolution");
    const std::int64_t nbins = std::max<std::int64_t>(1, 2 * to_ps(window_s) / bin_ps);
    const std::int64_t half = nbins * bin_ps / 2;

    Waveform h;
    h.step = bin_ps * 1e-12;
    h.lo = -half * 1e-12;
    h.hi = half * 1e-12;
    h.tau.resize(nbins);
    h.value.assign(nbins, 0.0);
    for (std::int64_t k = 0; k < nbins; ++k)
        h.tau[k] = (-half + (k * bin_ps) + bin_ps / 2) * 1e-12;

    const auto ta = channel_times(stream, a);
    const auto tb = channel_times(stream, b);
    std::size_t lo = 0;
    for (const std::int64_t t : tb) {
        while (lo < ta.size() && ta[lo] < t - half)
            ++lo;
        for (std::size_t j = lo; j < ta.size() && ta[j] < t + half; ++j) {
            const std::int64_t idx = (ta[j] - t + half) / bin_ps;
            if (idx >= 0 && idx < nbins)
                h.value[(std::size_t)idx] += 1.0;
        }
    }
    return h;
}

std::vector<double> alpha_2d(const Waveform& histogram, double r_s, double r_i, double duration)
{
    if (!(r_s > 0.0) || !(r_i > 0.0))
        throw std::domain_error("alpha_2d is undefined for zero singles rates");
    if (!(duration > 0.0) || !(histogram.step > 0.0))
        throw std::invalid_argument("alpha_2d needs a positive duration and bin width");
    std::vector<double> out(histogram.value.size());
    const double denom = histogram.step * r_s * r_i * duration;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = histogram.value[i] / denom;
    return out;
}

namespace {

struct HeraldCounts {
    std::int64_t n_i = 0, n_si = 0, n_spi = 0, n_sspi = 0;
};

HeraldCounts herald_counts(const EventStream& stream, double tau_c)
{
    if (!(tau_c > 0.0))
        throw std::invalid_argument("coincidence window must be positive");
    const std::int64_t half = to_ps(tau_c) / 2;
    const auto ts = channel_times(stream, Channel::signal);
    const auto tsp = channel_times(stream, Channel::signal_prime);
    const auto ti = channel_times(stream, Channel::idler);

    HeraldCounts c;
    c.n_i = (std::int64_t)ti.size();
    std::size_t lo_s = 0, lo_sp = 0;
    auto hit = [half](const std::vector<std::int64_t>& v, std::size_t& lo, std::int64_t t) {
        while (lo < v.size() && v[lo] < t - half)
            ++lo;
        return lo < v.size() && v[lo] <= t + half;
    };
    for (const std::int64_t t : ti) {
        const bool s = hit(ts, lo_s, t);
        const bool sp = hit(tsp, lo_sp, t);
        c.n_si += s;
        c.n_spi += sp;
        c.n_sspi += s && sp;
    }
    return c;
}

} // namespace

double alpha_3d(const EventStream& stream, double tau_c)
{
    const HeraldCounts c = herald_counts(stream, tau_c);
    if (c.n_i == 0)
        throw std::domain_error("alpha_3d is undefined without idler heralds");
    if (c.n_si == 0 || c.n_spi == 0)
        throw std::domain_error("alpha_3d is undefined with zero two-fold coincidences");
    return (double)c.n_sspi * (double)c.n_i / ((double)c.n_si * (double)c.n_spi);
}

CountSummary summarize(const EventStream& stream, const DetectionConfig& d, double bin_s,
                       double window_s)
{
    CountSummary s;
    const double t = stream.duration;
    s.r_s = (double)channel_times(stream, Channel::signal).size() / t;
    s.r_sp = (double)channel_times(stream, Channel::signal_prime).size() / t;
    s.r_i = (double)channel_times(stream, Channel::idler).size() / t;
    s.histogram = coincidence_histogram(stream, bin_s, window_s);
    if (s.r_s > 0.0 && s.r_i > 0.0)
        s.alpha2d = alpha_2d(s.histogram, s.r_s, s.r_i, t);
    const HeraldCounts c = herald_counts(stream, d.tau_c);
    s.r_si = c.n_si / t;
    s.r_spi = c.n_spi / t;
    s.r_sspi = c.n_sspi / t;
    s.alpha3d = (c.n_si > 0 && c.n_spi > 0)
                    ? (double)c.n_sspi * (double)c.n_i / ((double)c.n_si * (double)c.n_spi)
                    : 0.0;
    return s;
}

DecayFit fit_decay_rates(const Waveform& histogram, double floor, double exclude_s)
{
    const auto n = histogram.value.size();
    if (n < 16)
        throw std::invalid_argument("histogram too short to fit decay rates");
    if (floor < 0.0) {
        // estimate the accidental floor from the outer 10% of bins
        const std::size_t edge = std::max<std::size_t>(1, n / 10);
        double sum = 0.0;
        for (std::size_t i = 0; i < edge; ++i)
            sum += histogram.value[i] + histogram.value[n - 1 - i];
        floor = sum / (2.0 * edge);
    }
    const double thresh = std::max(16.0, 6.0 * std::sqrt(std::max(floor, 1.0)));

    auto fit_side = [&](bool negative) {
        double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double tau = histogram.tau[i];
            if (std::fabs(tau) < exclude_s)
                continue;
            if (negative ? tau >= 0.0 : tau <= 0.0)
                continue;
            const double net = histogram.value[i] - floor;
            if (net < thresh)
                continue;
            const double w = net; // Var[ln C] ~ 1/C
            const double y = std::log(net);
            sw += w;
            swx += w * tau;
            swy += w * y;
            swxx += w * tau * tau;
            swxy += w * tau * y;
        }
        const double det = sw * swxx - swx * swx;
        if (sw <= 0.0 || det == 0.0)
            throw std::runtime_error("not enough correlated counts to fit a decay flank");
        return (sw * swxy - swx * swy) / det; // slope of ln(counts)
    };

    DecayFit f;
    f.floor = floor;
    f.gamma_s = fit_side(true);   // ln C = const + Gs tau on tau < 0
    f.gamma_i = -fit_side(false); // ln C = const - Gi tau on tau > 0
    return f;
}

} // namespace spdcsim
