#include "mwd/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace mwd::kernels;

namespace
{
AtomBlock random_block(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-20, 20), c6(1, 80), q(-0.4, 0.4), d(-0.1, 0.1);
    AtomBlock b;
    for (std::size_t i = 0; i < n; ++i)
    {
        double const dd[6] = {1 + d(rng), 1 + d(rng), 1 + d(rng), d(rng), d(rng), d(rng)};
        b.push(pos(rng), pos(rng), 0.0, c6(rng), dd, q(rng));
    }
    b.finalize();
    return b;
}

double rel(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}
}  // namespace

TEST_CASE("atom block padding")
{
    AtomBlock const b = random_block(7, 1);
    CHECK(b.count() == 7);
    CHECK(b.padded() % AtomBlock::lanes == 0);
    CHECK(b.padded() >= 7);
    // padding lanes do not contribute
    AtomBlock c = random_block(7, 1);
    double const p[3] = {0.3, -0.2, 3.0};
    FieldSums s1, s2;
    scalar::field_sums(b, p, true, s1);
    scalar::field_sums(c, p, true, s2);
    CHECK(s1.u_vdw == s2.u_vdw);
}

TEST_CASE("scalar field sum against a direct loop")
{
    AtomBlock const b = random_block(9, 2);
    double const p[3] = {1.0, 2.0, 5.5};
    FieldSums s;
    scalar::field_sums(b, p, false, s);
    double charge = 0;
    for (std::size_t i = 0; i < b.count(); ++i)
    {
        double const dx = p[0] - b.x[i], dy = p[1] - b.y[i], dz = p[2] - b.z[i];
        charge += b.q[i] / (dx * dx + dy * dy + dz * dz);
    }
    CHECK(s.charge == doctest::Approx(charge).epsilon(1e-13));
}

TEST_CASE("AVX2 kernels match the scalar kernels")
{
    if (!avx2_available())
    {
        MESSAGE("AVX2 not available; equivalence not tested");
        return;
    }
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-15, 15);
    for (std::size_t n : {1u, 3u, 4u, 5u, 17u, 300u})
    {
        CAPTURE(n);
        AtomBlock const b = random_block(n, 10 + n);
        for (int k = 0; k < 20; ++k)
        {
            double const p[3] = {u(rng), u(rng), 2.0 + std::abs(u(rng))};
            FieldSums s, v;
            scalar::field_sums(b, p, true, s);
            avx2::field_sums(b, p, true, v);
            CHECK(rel(v.u_vdw, s.u_vdw) < 1e-12);
            CHECK(rel(v.charge, s.charge) < 1e-12);
            CHECK(v.min_dist2 == doctest::Approx(s.min_dist2).epsilon(1e-14));
            for (int a = 0; a < 3; ++a)
            {
                CHECK(rel(v.grad_vdw[a], s.grad_vdw[a]) < 1e-12);
                CHECK(rel(v.grad_charge[a], s.grad_charge[a]) < 1e-12);
            }
            double const x = u(rng), y = u(rng);
            CHECK(rel(avx2::vdw_phase_sum(b, x, y, 3.0), scalar::vdw_phase_sum(b, x, y, 3.0)) < 1e-12);
            CHECK(rel(avx2::charge_pair_sum(b, x, y), scalar::charge_pair_sum(b, x, y)) < 1e-12);
        }
    }
    for (std::size_t n : {0u, 1u, 7u, 64u, 1001u})
    {
        std::vector<double> ar(n), ai(n), br(n), bi(n);
        for (std::size_t i = 0; i < n; ++i)
            ar[i] = u(rng), ai[i] = u(rng), br[i] = u(rng), bi[i] = u(rng);
        double sr, si, vr, vi;
        scalar::complex_dot(ar.data(), ai.data(), br.data(), bi.data(), n, sr, si);
        avx2::complex_dot(ar.data(), ai.data(), br.data(), bi.data(), n, vr, vi);
        double scale = 0;
        for (std::size_t i = 0; i < n; ++i)
            scale += std::hypot(ar[i], ai[i]) * std::hypot(br[i], bi[i]);
        CHECK(std::abs(vr - sr) <= 1e-12 * std::max(scale, 1.0));
        CHECK(std::abs(vi - si) <= 1e-12 * std::max(scale, 1.0));
    }
}

TEST_CASE("dispatch")
{
    Isa const before = active_isa();
    set_isa(Isa::scalar);
    CHECK(active_isa() == Isa::scalar);
    CHECK(to_string(Isa::scalar) == "scalar");
    if (avx2_available())
    {
        set_isa(Isa::avx2);
        CHECK(active_isa() == Isa::avx2);
    }
    else
        CHECK_THROWS(set_isa(Isa::avx2));
    set_isa(before);
}
