#include "mwd/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mwd::kernels
{

namespace
{
// Padding lanes: far enough that r^-5 underflows any real contribution.
constexpr double pad_coord = 1.0e6;

Isa initial_isa()
{
    if (char const* env = std::getenv("MWD_SIMD"))
    {
        std::string const v(env);
        if (v == "scalar")
            return Isa::scalar;
    }
    return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& isa_slot()
{
    static std::atomic<Isa> slot{initial_isa()};
    return slot;
}
}  // namespace

bool avx2_available()
{
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
    static bool const ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok;
#else
    return false;
#endif
}

Isa active_isa()
{
    return isa_slot().load(std::memory_order_relaxed);
}

void set_isa(Isa isa)
{
    if (isa == Isa::avx2 && !avx2_available())
        throw std::runtime_error("AVX2 kernels requested but the CPU lacks AVX2/FMA");
    isa_slot().store(isa, std::memory_order_relaxed);
}

std::string_view to_string(Isa isa)
{
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

//---------------------------------------------------------------------------//

void AtomBlock::push(double px, double py, double pz, double pc6, double const d[6], double pq)
{
    if (padded() != count_)
        throw std::logic_error("AtomBlock::push after finalize");
    x.push_back(px);
    y.push_back(py);
    z.push_back(pz);
    c6.push_back(pc6);
    dxx.push_back(d[0]);
    dyy.push_back(d[1]);
    dzz.push_back(d[2]);
    dxy.push_back(d[3]);
    dxz.push_back(d[4]);
    dyz.push_back(d[5]);
    q.push_back(pq);
    ++count_;
}

void AtomBlock::finalize()
{
    std::size_t const target = (count_ + lanes - 1) / lanes * lanes;
    for (std::size_t i = padded(); i < target; ++i)
    {
        x.push_back(pad_coord);
        y.push_back(pad_coord);
        z.push_back(pad_coord);
        for (auto* v : {&c6, &dxx, &dyy, &dzz, &dxy, &dxz, &dyz, &q})
            v->push_back(0.0);
    }
}

//---------------------------------------------------------------------------//

void field_sums(AtomBlock const& atoms, double const p[3], bool gradient, FieldSums& out)
{
    if (active_isa() == Isa::avx2)
        avx2::field_sums(atoms, p, gradient, out);
    else
        scalar::field_sums(atoms, p, gradient, out);
}

double vdw_phase_sum(AtomBlock const& atoms, double x, double y, double zz)
{
    return active_isa() == Isa::avx2 ? avx2::vdw_phase_sum(atoms, x, y, zz)
                                     : scalar::vdw_phase_sum(atoms, x, y, zz);
}

double charge_pair_sum(AtomBlock const& atoms, double x, double y)
{
    return active_isa() == Isa::avx2 ? avx2::charge_pair_sum(atoms, x, y)
                                     : scalar::charge_pair_sum(atoms, x, y);
}

void complex_dot(double const* a_re,
                 double const* a_im,
                 double const* b_re,
                 double const* b_im,
                 std::size_t n,
                 double& out_re,
                 double& out_im)
{
    if (active_isa() == Isa::avx2)
        avx2::complex_dot(a_re, a_im, b_re, b_im, n, out_re, out_im);
    else
        scalar::complex_dot(a_re, a_im, b_re, b_im, n, out_re, out_im);
}

//---------------------------------------------------------------------------//
// Scalar reference
//---------------------------------------------------------------------------//

namespace scalar
{

void field_sums(AtomBlock const& a, double const p[3], bool gradient, FieldSums& out)
{
    out = FieldSums{};
    double min_s = INFINITY;
    for (std::size_t i = 0; i < a.padded(); ++i)
    {
        double const dx = a.x[i] - p[0];
        double const dy = a.y[i] - p[1];
        double const dz = a.z[i] - p[2];
        double const s = dx * dx + dy * dy + dz * dz;
        min_s = std::fmin(min_s, s);
        double const is = 1.0 / s;
        double const is2 = is * is;
        double const is3 = is2 * is;
        double const is4 = is2 * is2;
        double const tr = a.dxx[i] + a.dyy[i] + a.dzz[i];
        double const ddx = a.dxx[i] * dx + a.dxy[i] * dy + a.dxz[i] * dz;
        double const ddy = a.dxy[i] * dx + a.dyy[i] * dy + a.dyz[i] * dz;
        double const ddz = a.dxz[i] * dx + a.dyz[i] * dy + a.dzz[i] * dz;
        double const qf = dx * ddx + dy * ddy + dz * ddz;
        double const c6 = a.c6[i];
        out.u_vdw -= c6 / 6.0 * (tr * is3 + 3.0 * qf * is4);
        out.charge += a.q[i] * is;
        if (gradient)
        {
            double const radial = tr * is4 + 4.0 * qf * is4 * is;
            out.grad_vdw[0] -= c6 * (radial * dx - is4 * ddx);
            out.grad_vdw[1] -= c6 * (radial * dy - is4 * ddy);
            out.grad_vdw[2] -= c6 * (radial * dz - is4 * ddz);
            double const g = 2.0 * a.q[i] * is2;
            out.grad_charge[0] += g * dx;
            out.grad_charge[1] += g * dy;
            out.grad_charge[2] += g * dz;
        }
    }
    out.min_dist2 = min_s;
}

double vdw_phase_sum(AtomBlock const& a, double x, double y, double zz)
{
    double sum = 0;
    for (std::size_t i = 0; i < a.padded(); ++i)
    {
        double const bx = x - a.x[i];
        double const by = y - a.y[i];
        double const s = bx * bx + by * by;
        double const ib = 1.0 / std::sqrt(s);
        double const ib2 = ib * ib;
        double const ib5 = ib2 * ib2 * ib;
        double const qf = a.dxx[i] * bx * bx + 2.0 * a.dxy[i] * bx * by + a.dyy[i] * by * by;
        double const tr = a.dxx[i] + a.dyy[i] + a.dzz[i];
        sum += a.c6[i] * ((2.0 * tr + zz * a.dzz[i]) * ib5 + 5.0 * qf * ib5 * ib2);
    }
    return sum;
}

double charge_pair_sum(AtomBlock const& a, double x, double y)
{
    std::size_t const n = a.padded();
    thread_local std::vector<double> b, w;
    b.resize(n);
    w.resize(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        double const bx = x - a.x[i];
        double const by = y - a.y[i];
        b[i] = std::sqrt(bx * bx + by * by);
        w[i] = a.q[i] / b[i];
    }
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        double row = 0;
        for (std::size_t j = 0; j < n; ++j)
            row += w[j] / (b[i] + b[j]);
        sum += w[i] * row;
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
    double re = 0, im = 0;
    for (std::size_t k = 0; k < n; ++k)
    {
        re += a_re[k] * b_re[k] - a_im[k] * b_im[k];
        im += a_re[k] * b_im[k] + a_im[k] * b_re[k];
    }
    out_re = re;
    out_im = im;
}

}  // namespace scalar

}  // namespace mwd::kernels
