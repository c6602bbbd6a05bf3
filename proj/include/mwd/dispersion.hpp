#pragma once

#include "mwd/lattice.hpp"
#include "mwd/units.hpp"

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace mwd
{

//---------------------------------------------------------------------------//
// Free-atom reference data (atomic units)
//---------------------------------------------------------------------------//

struct FreeAtom
{
    double alpha;  //!< bohr^3
    double c6;     //!< Ha bohr^6
};

struct FreeAtomData
{
    FreeAtom boron{21.0, 99.5};
    FreeAtom nitrogen{7.4, 24.2};
    FreeAtom helium{1.38, 1.42};

    FreeAtom const& operator[](Species s) const { return s == Species::B ? boron : nitrogen; }

    //! Parse "symbol alpha c6" lines; '#' starts a comment.
    static FreeAtomData read(std::istream& is);
    static FreeAtomData read_file(std::string const& path);
};

//---------------------------------------------------------------------------//
// Pair quantities
//---------------------------------------------------------------------------//

//! xi = (4/3) C6 / alpha^2 (Ha).
double characteristic_frequency(double alpha_free, double c6_free);

//! Single-pole polarisability at imaginary frequency.
double dynamic_alpha(double alpha_static, double xi, double freq);

//! London formula (3/2) xi_i xi_j / (xi_i + xi_j) alpha_i alpha_j.
double c6_pair(double alpha_i, double xi_i, double alpha_j, double xi_j);

//! (3/pi) int_0^inf alpha_i(i w) alpha_j(i w) dw by adaptive quadrature.
double c6_quadrature(double alpha_i, double xi_i, double alpha_j, double xi_j);

//! Relative deviation of an N-term chain sum of (1 + j a/r)^-6 from the
//! converged infinite sum.
double truncation_error(double r, double a_chain, int n_terms);

//---------------------------------------------------------------------------//
// Self-consistent screening
//---------------------------------------------------------------------------//

class ConvergenceError : public std::runtime_error
{
  public:
    ConvergenceError(std::string const& what, double residual)
        : std::runtime_error(what), residual_(residual)
    {
    }
    double residual() const { return residual_; }

  private:
    double residual_;
};

enum class ScreeningSolver
{
    fixed_point,
    direct,
};

/*!
 * Short-range attenuation of the dipole tensor.
 *
 * Each atom is a Gaussian charge cloud of width radius_scale * R_vdW; a pair
 * interacts through the smeared dipole tensor with width
 * sqrt(sigma_i^2 + sigma_j^2).
 */
struct DampingParams
{
    double radius_scale{0.72};
    //! Range separation: the tensor is multiplied by 1 - f(r) with the Fermi
    //! function f = 1 / (1 + exp(-d (r / (beta (R_i + R_j)) - 1))). A beta of
    //! zero keeps the full long-range tensor.
    double range_beta{0.67};
    double range_d{12.0};
    double vdw_radius_b{units::angstrom_to_bohr(1.92)};  //!< bohr
    double vdw_radius_n{units::angstrom_to_bohr(1.55)};  //!< bohr
    ScreeningSolver solver{ScreeningSolver::fixed_point};
    double mixing{0.5};
    double tolerance{1e-10};  //!< max tensor element change, bohr^3
    int max_iterations{500};

    double vdw_radius(Species s) const { return s == Species::B ? vdw_radius_b : vdw_radius_n; }
    double sigma(Species s) const { return radius_scale * vdw_radius(s); }
    //! Attenuated field tensor between species a and b at separation r.
    Eigen::Matrix3d tensor(Eigen::Vector3d const& r, Species a, Species b) const;
};

//! Default screening cutoff (30 A).
double default_screening_cutoff();

//! Field at r from a unit Gaussian dipole at the origin: E = T p.
Eigen::Matrix3d smeared_dipole_tensor(Eigen::Vector3d const& r, double sigma);

//! Screened tensors of the infinite pristine sheet.
struct PristineBaseline
{
    Eigen::Matrix3d alpha_b;
    Eigen::Matrix3d alpha_n;
    double scalar(Species s) const
    {
        return (s == Species::B ? alpha_b : alpha_n).trace() / 3.0;
    }
    Eigen::Matrix3d const& tensor(Species s) const
    {
        return s == Species::B ? alpha_b : alpha_n;
    }
};

PristineBaseline pristine_baseline(double alpha_hirsh_b,
                                   double alpha_hirsh_n,
                                   double cutoff,
                                   DampingParams const& damping);

//! Unscreened inputs whose screened pristine scalars equal the targets.
std::array<double, 2> fit_pristine_hirshfeld(double target_b,
                                             double target_n,
                                             double cutoff,
                                             DampingParams const& damping);

struct DispersionEntry
{
    Species species{Species::B};
    Eigen::Matrix3d alpha_tensor{Eigen::Matrix3d::Zero()};
    double alpha_scalar{0};
    double xi{0};
    double c6_he{0};
    Eigen::Matrix3d anisotropy{Eigen::Matrix3d::Identity()};
    double ripple_percent{0};
};

struct DispersionTable
{
    std::vector<DispersionEntry> entries;
    int iterations{0};
    double residual{0};

    std::size_t size() const { return entries.size(); }
    DispersionEntry const& operator[](std::size_t i) const { return entries[i]; }
};

struct ScreeningOptions
{
    double cutoff{default_screening_cutoff()};
    DampingParams damping{};
    FreeAtomData free_atoms{};
    //! Pristine-sheet unscreened inputs used for the region-II environment
    //! and the ripple reference.
    double pristine_hirsh_b{lattice::default_hirshfeld_alpha(Species::B)};
    double pristine_hirsh_n{lattice::default_hirshfeld_alpha(Species::N)};
    //! Surround the model by pristine lattice sites frozen at the
    //! infinite-sheet values, so region I has no artificial outer edge.
    bool embed{true};
};

/*!
 * Solve alpha_i = alpha_i^hirsh (1 + sum_j T_ij alpha_j) for every model atom.
 *
 * T is the field tensor (E = T p), so the familiar minus sign of the
 * interaction-tensor convention is absorbed into it.
 */
DispersionTable screen_polarisabilities(MembraneModel const& model,
                                        ScreeningOptions const& opts = {});

//! Build a table from given scalar polarisabilities (isotropic D).
DispersionTable isotropic_table(MembraneModel const& model,
                                std::vector<double> const& alpha_scalar,
                                FreeAtomData const& free_atoms = {});

//! Table with the pristine Table-style values for every atom.
DispersionTable baseline_table(MembraneModel const& model, FreeAtomData const& free_atoms = {});

//! Pristine screened scalar polarisabilities (bohr^3).
inline constexpr double pristine_alpha_b = 18.09;
inline constexpr double pristine_alpha_n = 3.70;

//! He pair coefficient for a membrane atom with the given scalar alpha.
double c6_helium(Species s, double alpha_scalar, FreeAtomData const& free_atoms = {});

// CSV: "index species alpha_xx ... alpha_zz alpha_scalar xi c6_he ripple_percent"
void write_dispersion_csv(std::ostream& os, DispersionTable const& table);
DispersionTable read_dispersion_csv(std::istream& is);

}  // namespace mwd
