#include "kernels_detail.hpp"

#include <algorithm>
#include <cmath>

namespace spdcsim::kernels::detail {

const WeidemanTable& weideman_table()
{
    static const WeidemanTable table = [] {
        WeidemanTable t{};
        const int n = weideman_n;
        const int m = 2 * n;
        const int m2 = 4 * n;
        t.length = std::sqrt(n / std::sqrt(2.0));
        double f[4 * weideman_n] = {};
        for (int k = -m + 1; k <= m - 1; ++k) {
            const double theta = k * M_PI / m;
            const double tk = t.length * std::tan(0.5 * theta);
            f[k + m] = std::exp(-tk * tk) * (t.length * t.length + tk * tk);
        }
        double g[4 * weideman_n];
        for (int i = 0; i < m2; ++i)
            g[i] = f[(i + m) % m2];
        for (int j = 1; j <= n; ++j) {
            double s = 0.0;
            for (int i = 0; i < m2; ++i)
                s += g[i] * std::cos(2.0 * M_PI * j * i / m2);
            t.a[j - 1] = s / m2;
        }
        return t;
    }();
    return table;
}

void exp_grid_scalar(const double* x, double* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(std::clamp(x[i], -708.0, 709.0));
}

void double_exp_grid_scalar(const double* tau, double* out, std::size_t n,
                            double rise, double fall, double scale)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double arg = tau[i] < 0.0 ? rise * tau[i] : -fall * tau[i];
        out[i] = scale * std::exp(std::clamp(arg, -708.0, 709.0));
    }
}

double faddeeva_re_scalar(double x, double y)
{
    const double r2 = x * x + y * y;
    if (r2 >= cf_boundary_r2) {
        // Laplace continued fraction w = (i/sqrt(pi)) / (z - (1/2)/(z - 1/(z - ...)))
        double fr = x, fi = y;
        for (int k = cf_depth; k >= 1; --k) {
            const double s = 0.5 * k / (fr * fr + fi * fi);
            fr = x - s * fr;
            fi = y + s * fi;
        }
        return inv_sqrt_pi * fi / (fr * fr + fi * fi);
    }
    // Weideman rational approximation
    const WeidemanTable& w = weideman_table();
    const double ll = w.length;
    // Z = (L + iz)/(L - iz); L - iz = (L + y) - ix
    const double dr = ll + y, di = -x;
    const double dm = dr * dr + di * di;
    const double nr = ll - y, ni = x;
    const double zr = (nr * dr + ni * di) / dm;
    const double zi = (ni * dr - nr * di) / dm;
    double pr = w.a[weideman_n - 1], pim = 0.0;
    for (int k = weideman_n - 2; k >= 0; --k) {
        const double t = pr * zr - pim * zi + w.a[k];
        pim = pr * zi + pim * zr;
        pr = t;
    }
    // w = 2p/(L - iz)^2 + (1/sqrt(pi))/(L - iz)
    const double d2r = dr * dr - di * di;
    const double d2i = 2.0 * dr * di;
    const double m2 = d2r * d2r + d2i * d2i;
    return 2.0 * (pr * d2r + pim * d2i) / m2 + inv_sqrt_pi * dr / dm;
}

void faddeeva_re_grid_scalar(const double* x, double* out, std::size_t n, double y)
{
    for (std::size_t i = 0; i < n; ++i)
        out[i] = faddeeva_re_scalar(x[i], y);
}

} // namespace spdcsim::kernels::detail
