// Micro-benchmark for the grid kernels: scalar reference versus the
// runtime-dispatched SIMD backend, plus the coincidence histogram sweep.

#include "spdcsim/kernels.hpp"
#include "spdcsim/photon_stats.hpp"
#include "spdcsim/rng.hpp"

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

using namespace spdcsim;

namespace {

double now()
{
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <class F>
double rate(F&& body, std::size_t work_per_call)
{
    // warm up, then time enough repetitions for ~0.2 s
    body();
    int reps = 1;
    double dt = 0.0;
    for (;;) {
        const double t0 = now();
        for (int r = 0; r < reps; ++r)
            body();
        dt = now() - t0;
        if (dt > 0.2)
            break;
        reps *= 4;
    }
    return reps * (double)work_per_call / dt;
}

void bench_kernels(kernels::Backend backend)
{
    if (!kernels::set_backend(backend)) {
        std::printf("%-8s unavailable on this host\n", kernels::backend_name(backend));
        return;
    }
    const std::size_t n = 1 << 16;
    std::vector<double> x(n), out(n);
    Rng rng(7);
    for (auto& v : x)
        v = -40.0 * rng.uniform();

    const double r_exp = rate([&] { kernels::exp_grid(x.data(), out.data(), n); }, n);

    for (auto& v : x)
        v = (rng.uniform() - 0.5) * 4e-7;
    const double r_dexp = rate(
        [&] { kernels::double_exp_grid(x.data(), out.data(), n, 4.83e7, 4.10e7, 1.0); }, n);

    for (auto& v : x)
        v = (rng.uniform() - 0.5) * 34.0;
    const double r_fad =
        rate([&] { kernels::faddeeva_re_grid(x.data(), out.data(), n, 0.0095); }, n);

    std::printf("%-8s exp %7.1f M/s   double_exp %7.1f M/s   faddeeva %7.1f M/s\n",
                kernels::backend_name(backend), r_exp * 1e-6, r_dexp * 1e-6, r_fad * 1e-6);
}

void bench_histogram()
{
    BiphotonParams p;
    p.pair_rate = 0.0;
    DetectionConfig d;
    d.bg_signal = 50e3;
    d.bg_idler = 50e3;
    d.bs_ratio = 1.0;
    d.resolution = 0.0;
    const EventStream s = simulate_stream(p, d, 100.0, 3);
    const double r = rate([&] { coincidence_histogram(s, 1e-9, 500e-9); }, s.events.size());
    std::printf("histogram sweep: %.0f M events/s (%zu events)\n", r * 1e-6, s.events.size());
}

} // namespace

int main()
{
    std::printf("spdcsim kernel benchmark (auto backend: %s)\n",
                kernels::backend_name(kernels::active_backend()));
    bench_kernels(kernels::Backend::scalar);
    bench_kernels(kernels::Backend::avx2);
    kernels::set_backend(kernels::Backend::scalar);
    bench_histogram();
    return 0;
}
