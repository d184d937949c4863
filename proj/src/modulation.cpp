#include "spdcsim/modulation.hpp"

#include "spdcsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace spdcsim {

ModulationProfile ModulationProfile::identity_profile()
{
    return {};
}

ModulationProfile ModulationProfile::square(double period, double duty, int count, double start,
                                            double latency)
{
    if (!(period > 0.0) || duty < 0.0 || duty > 1.0 || count < 0)
        throw std::invalid_argument("square train needs period > 0, duty in [0,1], count >= 0");
    ModulationProfile p;
    p.kind = Kind::square_train;
    p.period = period;
    p.duty = duty;
    p.count = count;
    p.start = start;
    p.latency = latency;
    return p;
}

ModulationProfile ModulationProfile::step_profile(double edge, bool open_after, double latency)
{
    ModulationProfile p;
    p.kind = Kind::step;
    p.edge = edge;
    p.open_after = open_after;
    p.latency = latency;
    return p;
}

ModulationProfile ModulationProfile::sampled_profile(std::vector<double> grid,
                                                     std::vector<double> amplitude, double latency)
{
    if (grid.size() != amplitude.size() || grid.size() < 2)
        throw std::invalid_argument("sampled profile needs matching grid/amplitude arrays");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("sampled profile grid must be strictly increasing");
    for (double a : amplitude)
        if (a < 0.0 || a > 1.0)
            throw std::invalid_argument("amplitude transmission must be in [0, 1]");
    ModulationProfile p;
    p.kind = Kind::sampled;
    p.grid = std::move(grid);
    p.amplitude = std::move(amplitude);
    p.latency = latency;
    return p;
}

double intensity_transmission(const ModulationProfile& profile, double tau)
{
    const double t = tau - profile.latency;
    switch (profile.kind) {
    case ModulationProfile::Kind::identity:
        return 1.0;
    case ModulationProfile::Kind::square_train: {
        const double u = t - profile.start;
        if (u < 0.0 || u >= profile.count * profile.period)
            return 0.0;
        const double phase = u - std::floor(u / profile.period) * profile.period;
        return phase < profile.duty * profile.period ? 1.0 : 0.0;
    }
    case ModulationProfile::Kind::step:
        return (t >= profile.edge) == profile.open_after ? 1.0 : 0.0;
    case ModulationProfile::Kind::sampled: {
        // outside the declared grid the modulator is idle (fully open)
        if (t < profile.grid.front() || t > profile.grid.back())
            return 1.0;
        const auto it = std::upper_bound(profile.grid.begin(), profile.grid.end(), t);
        const std::size_t j = std::min(profile.grid.size() - 1,
                                       (std::size_t)std::max<std::ptrdiff_t>(
                                           1, it - profile.grid.begin()));
        const double f = (t - profile.grid[j - 1]) / (profile.grid[j] - profile.grid[j - 1]);
        const double a = profile.amplitude[j - 1] + f * (profile.amplitude[j] - profile.amplitude[j - 1]);
        return a * a;
    }
    }
    return 1.0;
}

Waveform apply_to_waveform(const Waveform& w, const ModulationProfile& profile)
{
    if (profile.kind == ModulationProfile::Kind::sampled &&
        (profile.grid.front() + profile.latency > w.lo ||
         profile.grid.back() + profile.latency < w.hi))
        throw std::invalid_argument("sampled modulation profile does not cover the waveform window");
    Waveform out = w;
    for (std::size_t i = 0; i < out.value.size(); ++i)
        out.value[i] *= intensity_transmission(profile, out.tau[i]);
    return out;
}

EventStream apply_to_stream(const EventStream& stream, const ModulationProfile& profile,
                            std::uint64_t seed)
{
    if (profile.kind == ModulationProfile::Kind::identity)
        return stream;

    std::vector<std::int64_t> heralds;
    std::unordered_map<std::int64_t, std::int64_t> herald_by_pair;
    for (const Event& e : stream.events) {
        if (e.channel != Channel::idler)
            continue;
        heralds.push_back(e.t_ps);
        if (stream.has_truth && e.pair_id >= 0)
            herald_by_pair.emplace(e.pair_id, e.t_ps);
    }
    if (heralds.empty())
        throw std::invalid_argument("stream has no idler heralds to trigger the modulator");

    auto nearest_herald = [&heralds](std::int64_t t) {
        const auto it = std::lower_bound(heralds.begin(), heralds.end(), t);
        if (it == heralds.begin())
            return *it;
        if (it == heralds.end())
            return heralds.back();
        return (*it - t < t - *(it - 1)) ? *it : *(it - 1);
    };

    EventStream out;
    out.duration = stream.duration;
    out.seed = stream.seed;
    out.has_truth = stream.has_truth;
    Rng rng = Rng::substream(seed, 0x6d6f64);
    for (const Event& e : stream.events) {
        if (e.channel == Channel::idler) {
            out.events.push_back(e);
            continue;
        }
        std::int64_t herald;
        if (stream.has_truth && e.pair_id >= 0) {
            const auto it = herald_by_pair.find(e.pair_id);
            herald = it != herald_by_pair.end() ? it->second : nearest_herald(e.t_ps);
        } else {
            herald = nearest_herald(e.t_ps);
        }
        const double m2 = intensity_transmission(profile, (e.t_ps - herald) * 1e-12);
        if (m2 >= 1.0 || rng.uniform() < m2)
            out.events.push_back(e);
    }
    return out;
}

} // namespace spdcsim
