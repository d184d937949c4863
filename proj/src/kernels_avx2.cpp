#include "kernels_detail.hpp"

#if defined(SPDCSIM_HAVE_AVX2_KERNELS)

#include <immintrin.h>

namespace spdcsim::kernels::detail {

namespace {



// exp via range reduction x = n ln2 + r and a degree-13 Taylor polynomial
// on |r| <= ln2/2, rebuilt with ldexp-style bit arithmetic.
inline __m256d exp_pd(__m256d x)
{
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
    x = _mm256_min_pd(_mm256_max_pd(x, _mm256_set1_pd(-708.0)), _mm256_set1_pd(709.0));
    const __m256d nd = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                       _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(nd, ln2_hi, x);
    r = _mm256_fnmadd_pd(nd, ln2_lo, r);

    const double inv_fact[] = {
        1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
        1.0 / 362880.0, 1.0 / 40320.0, 1.0 / 5040.0, 1.0 / 720.0,
        1.0 / 120.0, 1.0 / 24.0, 1.0 / 6.0, 0.5, 1.0, 1.0,
    };
    __m256d p = _mm256_set1_pd(inv_fact[0]);
    for (int k = 1; k < 14; ++k)
        p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[k]));

    // scale by 2^n: add n to the exponent bits
    const __m128i ni = _mm256_cvtpd_epi32(nd);
    const __m256i nl = _mm256_cvtepi32_epi64(ni);
    const __m256i bias = _mm256_set1_epi64x(1023);
    const __m256i expo = _mm256_slli_epi64(_mm256_add_epi64(nl, bias), 52);
    return _mm256_mul_pd(p, _mm256_castsi256_pd(expo));
}

} // namespace

void exp_grid_avx2(const double* x, double* out, std::size_t n)
{
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, exp_pd(_mm256_loadu_pd(x + i)));
    if (i < n) {
        double xin[4] = {0, 0, 0, 0}, xout[4];
        for (std::size_t j = i; j < n; ++j) xin[j - i] = x[j];
        _mm256_storeu_pd(xout, exp_pd(_mm256_loadu_pd(xin)));
        for (std::size_t j = i; j < n; ++j) out[j] = xout[j - i];
    }
}

void double_exp_grid_avx2(const double* tau, double* out, std::size_t n,
                                       double rise, double fall, double scale)
{
    const __m256d vr = _mm256_set1_pd(rise);
    const __m256d vf = _mm256_set1_pd(-fall);
    const __m256d vs = _mm256_set1_pd(scale);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    auto block = [&](__m256d t) {
        const __m256d neg = _mm256_cmp_pd(t, zero, _CMP_LT_OQ);
        const __m256d coeff = _mm256_blendv_pd(vf, vr, neg);
        return _mm256_mul_pd(vs, exp_pd(_mm256_mul_pd(coeff, t)));
    };
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, block(_mm256_loadu_pd(tau + i)));
    if (i < n) {
        double tin[4] = {0, 0, 0, 0}, tout[4];
        for (std::size_t j = i; j < n; ++j) tin[j - i] = tau[j];
        _mm256_storeu_pd(tout, block(_mm256_loadu_pd(tin)));
        for (std::size_t j = i; j < n; ++j) out[j] = tout[j - i];
    }
}

namespace {

inline __m256d faddeeva_cf_pd(__m256d x, __m256d y)
{
    const __m256d isp = _mm256_set1_pd(inv_sqrt_pi);
    __m256d fr = x, fi = y;
    for (int k = cf_depth; k >= 1; --k) {
        const __m256d ak = _mm256_set1_pd(0.5 * k);
        const __m256d m = _mm256_fmadd_pd(fr, fr, _mm256_mul_pd(fi, fi));
        const __m256d s = _mm256_div_pd(ak, m);
        fr = _mm256_fnmadd_pd(s, fr, x);
        fi = _mm256_fmadd_pd(s, fi, y);
    }
    const __m256d m = _mm256_fmadd_pd(fr, fr, _mm256_mul_pd(fi, fi));
    return _mm256_div_pd(_mm256_mul_pd(isp, fi), m);
}

inline __m256d faddeeva_weideman_pd(__m256d x, __m256d y)
{
    const WeidemanTable& w = weideman_table();
    const __m256d vl = _mm256_set1_pd(w.length);
    const __m256d isp = _mm256_set1_pd(inv_sqrt_pi);
    const __m256d dr = _mm256_add_pd(vl, y);
    const __m256d di = _mm256_sub_pd(_mm256_setzero_pd(), x);
    const __m256d dm = _mm256_fmadd_pd(dr, dr, _mm256_mul_pd(di, di));
    const __m256d nr = _mm256_sub_pd(vl, y);
    const __m256d ni = x;
    const __m256d zr = _mm256_div_pd(_mm256_fmadd_pd(nr, dr, _mm256_mul_pd(ni, di)), dm);
    const __m256d zi = _mm256_div_pd(_mm256_fmsub_pd(ni, dr, _mm256_mul_pd(nr, di)), dm);
    __m256d pr = _mm256_set1_pd(w.a[weideman_n - 1]);
    __m256d pim = _mm256_setzero_pd();
    for (int k = weideman_n - 2; k >= 0; --k) {
        const __m256d ak = _mm256_set1_pd(w.a[k]);
        const __m256d t = _mm256_add_pd(
            _mm256_fmsub_pd(pr, zr, _mm256_mul_pd(pim, zi)), ak);
        pim = _mm256_fmadd_pd(pr, zi, _mm256_mul_pd(pim, zr));
        pr = t;
    }
    const __m256d d2r = _mm256_fmsub_pd(dr, dr, _mm256_mul_pd(di, di));
    const __m256d d2i = _mm256_mul_pd(_mm256_add_pd(dr, dr), di);
    const __m256d m2 = _mm256_fmadd_pd(d2r, d2r, _mm256_mul_pd(d2i, d2i));
    const __m256d two = _mm256_set1_pd(2.0);
    __m256d wwe = _mm256_div_pd(
        _mm256_mul_pd(two, _mm256_fmadd_pd(pr, d2r, _mm256_mul_pd(pim, d2i))), m2);
    return _mm256_add_pd(wwe, _mm256_div_pd(_mm256_mul_pd(isp, dr), dm));
}

// Blocks whose lanes all fall in one region take only that path; mixed
// blocks evaluate both and blend on |z|^2 >= 64. The continued fraction
// may pass through inf in lanes it does not own; the blend discards them.
inline __m256d faddeeva_re_pd(__m256d x, __m256d y)
{
    const __m256d r2 = _mm256_fmadd_pd(x, x, _mm256_mul_pd(y, y));
    const __m256d far_mask = _mm256_cmp_pd(r2, _mm256_set1_pd(cf_boundary_r2), _CMP_GE_OQ);
    const int bits = _mm256_movemask_pd(far_mask);
    if (bits == 0)
        return faddeeva_weideman_pd(x, y);
    if (bits == 0xf)
        return faddeeva_cf_pd(x, y);
    return _mm256_blendv_pd(faddeeva_weideman_pd(x, y), faddeeva_cf_pd(x, y), far_mask);
}

} // namespace

void faddeeva_re_grid_avx2(const double* x, double* out, std::size_t n, double y)
{
    const __m256d vy = _mm256_set1_pd(y);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, faddeeva_re_pd(_mm256_loadu_pd(x + i), vy));
    for (; i < n; ++i)
        out[i] = faddeeva_re_scalar(x[i], y);
}



} // namespace spdcsim::kernels::detail

#endif // SPDCSIM_HAVE_AVX2_KERNELS
