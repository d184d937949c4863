#include "spdcsim/kernels.hpp"

#include "kernels_detail.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace spdcsim::kernels {

namespace {

bool host_has_avx2()
{
#if defined(SPDCSIM_HAVE_AVX2_KERNELS)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend initial_backend()
{
    if (const char* env = std::getenv("SPDCSIM_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0)
            return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && host_has_avx2())
            return Backend::avx2;
    }
    return host_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend> g_backend{initial_backend()};

} // namespace

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

bool backend_supported(Backend b)
{
    return b == Backend::scalar || (b == Backend::avx2 && host_has_avx2());
}

bool set_backend(Backend b)
{
    if (!backend_supported(b))
        return false;
    g_backend.store(b, std::memory_order_relaxed);
    return true;
}

const char* backend_name(Backend b)
{
    return b == Backend::avx2 ? "avx2" : "scalar";
}

void exp_grid(const double* x, double* out, std::size_t n)
{
#if defined(SPDCSIM_HAVE_AVX2_KERNELS)
    if (active_backend() == Backend::avx2)
        return detail::exp_grid_avx2(x, out, n);
#endif
    detail::exp_grid_scalar(x, out, n);
}

void double_exp_grid(const double* tau, double* out, std::size_t n,
                     double rise, double fall, double scale)
{
#if defined(SPDCSIM_HAVE_AVX2_KERNELS)
    if (active_backend() == Backend::avx2)
        return detail::double_exp_grid_avx2(tau, out, n, rise, fall, scale);
#endif
    detail::double_exp_grid_scalar(tau, out, n, rise, fall, scale);
}

double faddeeva_re(double x, double y)
{
    return detail::faddeeva_re_scalar(x, y);
}

void faddeeva_re_grid(const double* x, double* out, std::size_t n, double y)
{
#if defined(SPDCSIM_HAVE_AVX2_KERNELS)
    if (active_backend() == Backend::avx2)
        return detail::faddeeva_re_grid_avx2(x, out, n, y);
#endif
    detail::faddeeva_re_grid_scalar(x, out, n, y);
}

} // namespace spdcsim::kernels
