#pragma once

#include <cmath>
#include <cstddef>

// Shared constants for the Faddeeva kernel. Both backends use identical
// coefficients so their results agree to a few ulp.

namespace spdcsim::kernels::detail {

inline constexpr int weideman_n = 32;
inline constexpr double cf_boundary_r2 = 64.0; // switch to continued fraction
inline constexpr int cf_depth = 16;
inline constexpr double inv_sqrt_pi = 0.5641895835477562869;

struct WeidemanTable {
    double length; // Weideman's L = sqrt(N / sqrt(2))
    double a[weideman_n];
};

// Coefficients are the Fourier-cosine coefficients of
// f(theta) = exp(-t^2) (L^2 + t^2), t = L tan(theta/2), evaluated once by
// direct DFT. Defined in kernels_scalar.cpp so the construction never runs
// through AVX-compiled code.
const WeidemanTable& weideman_table();

// Scalar reference kernels (always available; also the fallback backend).
void exp_grid_scalar(const double* x, double* out, std::size_t n);
void double_exp_grid_scalar(const double* tau, double* out, std::size_t n,
                            double rise, double fall, double scale);
double faddeeva_re_scalar(double x, double y);
void faddeeva_re_grid_scalar(const double* x, double* out, std::size_t n, double y);

#if defined(__x86_64__) || defined(__i386__)
#define SPDCSIM_HAVE_AVX2_KERNELS 1
void exp_grid_avx2(const double* x, double* out, std::size_t n);
void double_exp_grid_avx2(const double* tau, double* out, std::size_t n,
                          double rise, double fall, double scale);
void faddeeva_re_grid_avx2(const double* x, double* out, std::size_t n, double y);
#endif

} // namespace spdcsim::kernels::detail
