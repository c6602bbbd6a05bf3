#pragma once

#include "mwd/dispersion.hpp"
#include "mwd/kernels.hpp"
#include "mwd/lattice.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <vector>

namespace mwd
{

//! Static polarisability of the free helium atom (bohr^3).
inline constexpr double helium_alpha0 = 1.38;

struct FieldAtom
{
    Eigen::Vector3d position{Eigen::Vector3d::Zero()};
    double c6{0};  //!< He pair coefficient, Ha bohr^6
    Eigen::Matrix3d anisotropy{Eigen::Matrix3d::Identity()};
    double charge{0};
    int ring_index{no_ring};
};

struct FieldOptions
{
    double he_alpha0{helium_alpha0};
    bool vdw{true};
    bool electrostatic{true};
};

struct FieldSample
{
    double vdw{0};
    double electrostatic{0};
    double total{0};
    Eigen::Vector3d gradient{Eigen::Vector3d::Zero()};
};

/*!
 * Helium interaction potential near a membrane.
 *
 * The atom data is copied at construction; evaluation is const and
 * reentrant.
 */
class PotentialField
{
  public:
    PotentialField(std::vector<FieldAtom> atoms, FieldOptions opts = {});
    PotentialField(MembraneModel const& model, DispersionTable const& table, FieldOptions opts = {});

    //! One atom at the origin.
    static PotentialField single_atom(double c6, double charge, FieldOptions opts = {});

    double u_vdw(Eigen::Vector3d const& p) const;
    double u_electrostatic(Eigen::Vector3d const& p) const;
    double u_total(Eigen::Vector3d const& p) const;
    Eigen::Vector3d grad_u(Eigen::Vector3d const& p) const;
    FieldSample sample(Eigen::Vector3d const& p, bool gradient = true) const;

    //! Field of the atoms with ring_index <= max_ring.
    PotentialField restricted(int max_ring) const;
    PotentialField with_options(FieldOptions opts) const;

    std::vector<FieldAtom> const& atoms() const { return atoms_; }
    FieldOptions const& options() const { return opts_; }
    kernels::AtomBlock const& block() const { return block_; }

  private:
    void evaluate(Eigen::Vector3d const& p, bool gradient, kernels::FieldSums& sums) const;

    std::vector<FieldAtom> atoms_;
    FieldOptions opts_;
    kernels::AtomBlock block_;
};

//! Field atoms from a model and its dispersion table (index-aligned).
std::vector<FieldAtom> field_atoms(MembraneModel const& model, DispersionTable const& table);

struct ScanPoint
{
    Eigen::Vector3d position;
    FieldSample value;
};

//! n >= 2 evenly spaced samples from a to b inclusive.
std::vector<ScanPoint> line_scan(PotentialField const& field,
                                 Eigen::Vector3d const& a,
                                 Eigen::Vector3d const& b,
                                 int n);

//! Rectangular plane scan spanned by u and v from origin, nu x nv samples.
std::vector<ScanPoint> plane_scan(PotentialField const& field,
                                  Eigen::Vector3d const& origin,
                                  Eigen::Vector3d const& u,
                                  Eigen::Vector3d const& v,
                                  int nu,
                                  int nv);

// CSV: "x,y,z,U_vdw,U_el,U_total" in bohr and hartree.
void write_scan_csv(std::ostream& os, std::vector<ScanPoint> const& scan);

}  // namespace mwd
