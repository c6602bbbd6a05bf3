// Built with -mavx2 -mfma; only reached through the runtime dispatch.
#include "mwd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace mwd::kernels::avx2
{

namespace
{
inline double hsum(__m256d v)
{
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmin(__m256d v)
{
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_min_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_min_sd(lo, sh));
}
}  // namespace

void field_sums(AtomBlock const& a, double const p[3], bool gradient, FieldSums& out)
{
    __m256d const px = _mm256_set1_pd(p[0]);
    __m256d const py = _mm256_set1_pd(p[1]);
    __m256d const pz = _mm256_set1_pd(p[2]);
    __m256d const one = _mm256_set1_pd(1.0);
    __m256d const three = _mm256_set1_pd(3.0);
    __m256d const four = _mm256_set1_pd(4.0);
    __m256d const two = _mm256_set1_pd(2.0);
    __m256d const sixth = _mm256_set1_pd(1.0 / 6.0);

    __m256d u = _mm256_setzero_pd(), ch = _mm256_setzero_pd();
    __m256d gx = _mm256_setzero_pd(), gy = _mm256_setzero_pd(), gz = _mm256_setzero_pd();
    __m256d cx = _mm256_setzero_pd(), cy = _mm256_setzero_pd(), cz = _mm256_setzero_pd();
    __m256d mn = _mm256_set1_pd(INFINITY);

    for (std::size_t i = 0; i < a.padded(); i += 4)
    {
        __m256d const dx = _mm256_sub_pd(_mm256_loadu_pd(&a.x[i]), px);
        __m256d const dy = _mm256_sub_pd(_mm256_loadu_pd(&a.y[i]), py);
        __m256d const dz = _mm256_sub_pd(_mm256_loadu_pd(&a.z[i]), pz);
        __m256d s = _mm256_mul_pd(dx, dx);
        s = _mm256_fmadd_pd(dy, dy, s);
        s = _mm256_fmadd_pd(dz, dz, s);
        mn = _mm256_min_pd(mn, s);
        __m256d const is = _mm256_div_pd(one, s);
        __m256d const is2 = _mm256_mul_pd(is, is);
        __m256d const is3 = _mm256_mul_pd(is2, is);
        __m256d const is4 = _mm256_mul_pd(is2, is2);

        __m256d const xx = _mm256_loadu_pd(&a.dxx[i]);
        __m256d const yy = _mm256_loadu_pd(&a.dyy[i]);
        __m256d const zz = _mm256_loadu_pd(&a.dzz[i]);
        __m256d const xy = _mm256_loadu_pd(&a.dxy[i]);
        __m256d const xz = _mm256_loadu_pd(&a.dxz[i]);
        __m256d const yz = _mm256_loadu_pd(&a.dyz[i]);
        __m256d const tr = _mm256_add_pd(_mm256_add_pd(xx, yy), zz);
        __m256d const ddx = _mm256_fmadd_pd(xz, dz, _mm256_fmadd_pd(xy, dy, _mm256_mul_pd(xx, dx)));
        __m256d const ddy = _mm256_fmadd_pd(yz, dz, _mm256_fmadd_pd(yy, dy, _mm256_mul_pd(xy, dx)));
        __m256d const ddz = _mm256_fmadd_pd(zz, dz, _mm256_fmadd_pd(yz, dy, _mm256_mul_pd(xz, dx)));
        __m256d const qf
            = _mm256_fmadd_pd(dz, ddz, _mm256_fmadd_pd(dy, ddy, _mm256_mul_pd(dx, ddx)));
        __m256d const c6 = _mm256_loadu_pd(&a.c6[i]);

        __m256d const bracket = _mm256_fmadd_pd(_mm256_mul_pd(three, qf), is4, _mm256_mul_pd(tr, is3));
        u = _mm256_fnmadd_pd(_mm256_mul_pd(c6, sixth), bracket, u);
        __m256d const q = _mm256_loadu_pd(&a.q[i]);
        ch = _mm256_fmadd_pd(q, is, ch);

        if (gradient)
        {
            __m256d const radial
                = _mm256_fmadd_pd(_mm256_mul_pd(four, qf), _mm256_mul_pd(is4, is), _mm256_mul_pd(tr, is4));
            gx = _mm256_fnmadd_pd(c6, _mm256_fmsub_pd(radial, dx, _mm256_mul_pd(is4, ddx)), gx);
            gy = _mm256_fnmadd_pd(c6, _mm256_fmsub_pd(radial, dy, _mm256_mul_pd(is4, ddy)), gy);
            gz = _mm256_fnmadd_pd(c6, _mm256_fmsub_pd(radial, dz, _mm256_mul_pd(is4, ddz)), gz);
            __m256d const g = _mm256_mul_pd(_mm256_mul_pd(two, q), is2);
            cx = _mm256_fmadd_pd(g, dx, cx);
            cy = _mm256_fmadd_pd(g, dy, cy);
            cz = _mm256_fmadd_pd(g, dz, cz);
        }
    }

    out.u_vdw = hsum(u);
    out.charge = hsum(ch);
    out.grad_vdw[0] = hsum(gx);
    out.grad_vdw[1] = hsum(gy);
    out.grad_vdw[2] = hsum(gz);
    out.grad_charge[0] = hsum(cx);
    out.grad_charge[1] = hsum(cy);
    out.grad_charge[2] = hsum(cz);
    out.min_dist2 = hmin(mn);
}

double vdw_phase_sum(AtomBlock const& a, double x, double y, double zz_coeff)
{
    __m256d const px = _mm256_set1_pd(x);
    __m256d const py = _mm256_set1_pd(y);
    __m256d const one = _mm256_set1_pd(1.0);
    __m256d const two = _mm256_set1_pd(2.0);
    __m256d const five = _mm256_set1_pd(5.0);
    __m256d const czz = _mm256_set1_pd(zz_coeff);
    __m256d sum = _mm256_setzero_pd();
    for (std::size_t i = 0; i < a.padded(); i += 4)
    {
        __m256d const bx = _mm256_sub_pd(px, _mm256_loadu_pd(&a.x[i]));
        __m256d const by = _mm256_sub_pd(py, _mm256_loadu_pd(&a.y[i]));
        __m256d const s = _mm256_fmadd_pd(by, by, _mm256_mul_pd(bx, bx));
        __m256d const ib = _mm256_div_pd(one, _mm256_sqrt_pd(s));
        __m256d const ib2 = _mm256_mul_pd(ib, ib);
        __m256d const ib5 = _mm256_mul_pd(_mm256_mul_pd(ib2, ib2), ib);
        __m256d const xx = _mm256_loadu_pd(&a.dxx[i]);
        __m256d const yy = _mm256_loadu_pd(&a.dyy[i]);
        __m256d const zz = _mm256_loadu_pd(&a.dzz[i]);
        __m256d const xy = _mm256_loadu_pd(&a.dxy[i]);
        __m256d qf = _mm256_mul_pd(_mm256_mul_pd(xx, bx), bx);
        qf = _mm256_fmadd_pd(_mm256_mul_pd(two, xy), _mm256_mul_pd(bx, by), qf);
        qf = _mm256_fmadd_pd(_mm256_mul_pd(yy, by), by, qf);
        __m256d const tr = _mm256_add_pd(_mm256_add_pd(xx, yy), zz);
        __m256d const lead = _mm256_fmadd_pd(czz, zz, _mm256_mul_pd(two, tr));
        __m256d const term
            = _mm256_fmadd_pd(_mm256_mul_pd(five, qf), _mm256_mul_pd(ib5, ib2), _mm256_mul_pd(lead, ib5));
        sum = _mm256_fmadd_pd(_mm256_loadu_pd(&a.c6[i]), term, sum);
    }
    return hsum(sum);
}

double charge_pair_sum(AtomBlock const& a, double x, double y)
{
    std::size_t const n = a.padded();
    thread_local std::vector<double> b, w;
    b.resize(n);
    w.resize(n);
    __m256d const px = _mm256_set1_pd(x);
    __m256d const py = _mm256_set1_pd(y);
    for (std::size_t i = 0; i < n; i += 4)
    {
        __m256d const bx = _mm256_sub_pd(px, _mm256_loadu_pd(&a.x[i]));
        __m256d const by = _mm256_sub_pd(py, _mm256_loadu_pd(&a.y[i]));
        __m256d const bb = _mm256_sqrt_pd(_mm256_fmadd_pd(by, by, _mm256_mul_pd(bx, bx)));
        _mm256_storeu_pd(&b[i], bb);
        _mm256_storeu_pd(&w[i], _mm256_div_pd(_mm256_loadu_pd(&a.q[i]), bb));
    }
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (w[i] == 0.0)
            continue;
        __m256d const bi = _mm256_set1_pd(b[i]);
        __m256d row = _mm256_setzero_pd();
        for (std::size_t j = 0; j < n; j += 4)
        {
            __m256d const den = _mm256_add_pd(bi, _mm256_loadu_pd(&b[j]));
            row = _mm256_add_pd(row, _mm256_div_pd(_mm256_loadu_pd(&w[j]), den));
        }
        sum += w[i] * hsum(row);
    }
    return sum;
}

void complex_dot(double const* a_re,
                 double const* a_im,
                 double const* b_re,
                 double const* b_im,
                 std::size_t n,
                 double& out_re,
                 double& out_im)
{
    __m256d re = _mm256_setzero_pd(), im = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4)
    {
        __m256d const ar = _mm256_loadu_pd(a_re + k);
        __m256d const ai = _mm256_loadu_pd(a_im + k);
        __m256d const br = _mm256_loadu_pd(b_re + k);
        __m256d const bi = _mm256_loadu_pd(b_im + k);
        re = _mm256_fmadd_pd(ar, br, re);
        re = _mm256_fnmadd_pd(ai, bi, re);
        im = _mm256_fmadd_pd(ar, bi, im);
        im = _mm256_fmadd_pd(ai, br, im);
    }
    double r = hsum(re), i = hsum(im);
    for (; k < n; ++k)
    {
        r += a_re[k] * b_re[k] - a_im[k] * b_im[k];
        i += a_re[k] * b_im[k] + a_im[k] * b_re[k];
    }
    out_re = r;
    out_im = i;
}

}  // namespace mwd::kernels::avx2
