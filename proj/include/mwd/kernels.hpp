#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace mwd::kernels
{

enum class Isa
{
    scalar,
    avx2,
};

bool avx2_available();
//! Currently selected instruction set. Defaults to AVX2 when the CPU has
//! it, unless MWD_SIMD=scalar is set in the environment.
Isa active_isa();
//! Force a variant; selecting AVX2 on a CPU without it throws.
void set_isa(Isa isa);
std::string_view to_string(Isa isa);

/*!
 * Structure-of-arrays atom data, padded to a multiple of the vector width.
 *
 * Padding lanes sit far away with zero weights so they contribute nothing.
 */
class AtomBlock
{
  public:
    static constexpr std::size_t lanes = 4;

    //! d = {xx, yy, zz, xy, xz, yz}
    void push(double x, double y, double z, double c6, double const d[6], double q);
    void finalize();

    std::size_t count() const { return count_; }
    std::size_t padded() const { return x.size(); }

    std::vector<double> x, y, z, c6, dxx, dyy, dzz, dxy, dxz, dyz, q;

  private:
    std::size_t count_{0};
};

struct FieldSums
{
    double u_vdw{0};
    double charge{0};  //!< sum q_i / |r - r_i|^2
    double grad_vdw[3]{0, 0, 0};
    double grad_charge[3]{0, 0, 0};
    double min_dist2{0};
};

//! Anisotropic r^-6 sum and charge sum at p, with gradients when asked.
void field_sums(AtomBlock const& atoms, double const p[3], bool gradient, FieldSums& out);

//! sum_i C6_i [(2 Tr D_i + zz D_izz) / b^5 + 5 b.D_i.b / b^7] over in-plane b.
double vdw_phase_sum(AtomBlock const& atoms, double x, double y, double zz);

//! sum_ij q_i q_j / (b_i b_j (b_i + b_j)) over in-plane distances.
double charge_pair_sum(AtomBlock const& atoms, double x, double y);

//! Complex dot product sum_n a_n b_n of split re/im arrays.
void complex_dot(double const* a_re,
                 double const* a_im,
                 double const* b_re,
                 double const* b_im,
                 std::size_t n,
                 double& out_re,
                 double& out_im);

namespace scalar
{
void field_sums(AtomBlock const&, double const p[3], bool gradient, FieldSums& out);
double vdw_phase_sum(AtomBlock const&, double x, double y, double zz);
double charge_pair_sum(AtomBlock const&, double x, double y);
void complex_dot(double const*, double const*, double const*, double const*, std::size_t, double&, double&);
}  // namespace scalar

namespace avx2
{
void field_sums(AtomBlock const&, double const p[3], bool gradient, FieldSums& out);
double vdw_phase_sum(AtomBlock const&, double x, double y, double zz);
double charge_pair_sum(AtomBlock const&, double x, double y);
void complex_dot(double const*, double const*, double const*, double const*, std::size_t, double&, double&);
}  // namespace avx2

}  // namespace mwd::kernels
