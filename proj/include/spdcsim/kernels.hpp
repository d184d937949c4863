#pragma once

#include <cstddef>

namespace spdcsim::kernels {

/// Arithmetic backends for the grid kernels. `scalar` is the reference
/// implementation; `avx2` is selected automatically at startup when the
/// host CPU supports AVX2+FMA (override with set_backend or the
/// SPDCSIM_KERNELS environment variable, value "scalar" or "avx2").
enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_supported(Backend b);
/// Returns false (and leaves the backend unchanged) if unsupported.
bool set_backend(Backend b);
const char* backend_name(Backend b);

/// out[i] = exp(x[i]).  Arguments are clamped to [-708, 709].
void exp_grid(const double* x, double* out, std::size_t n);

/// Two-sided exponential: out[i] = scale * exp(rise * tau[i]) for tau < 0,
/// scale * exp(-fall * tau[i]) otherwise.  rise, fall >= 0.
void double_exp_grid(const double* tau, double* out, std::size_t n,
                     double rise, double fall, double scale);

/// Real part of the Faddeeva function w(x + iy), y > 0: the Voigt kernel
/// K(x,y) = (y/pi) * Int exp(-t^2) / ((x-t)^2 + y^2) dt.
/// Weideman rational approximation (N = 32) for x^2 + y^2 < 64, Laplace
/// continued fraction (depth 16) outside.
double faddeeva_re(double x, double y);
void faddeeva_re_grid(const double* x, double* out, std::size_t n, double y);

} // namespace spdcsim::kernels
