#pragma once

#include "mwd/fields.hpp"
#include "mwd/lattice.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace mwd
{

//! Edge charge magnitude used for the single-atom reductions.
inline constexpr double default_edge_charge = 0.39;

struct TrajectoryConfig
{
    double start_z;          //!< bohr
    double velocity_mps{2000};
    double rel_tol{1e-10};
    double abs_tol{1e-12};   //!< in bohr and in units of the initial speed
    double vdw_radius_b;     //!< bohr
    double vdw_radius_n;     //!< bohr
    double bisection_tol;    //!< bohr
    double bracket_max;      //!< bohr
    int max_steps{2'000'000};

    //! He pair coefficients; unset means the pristine-sheet values.
    std::optional<double> c6_b;
    std::optional<double> c6_n;
    double charge{default_edge_charge};
    FieldOptions field{};

    TrajectoryConfig();
    void validate() const;
    double vdw_radius(Species s) const { return s == Species::B ? vdw_radius_b : vdw_radius_n; }
    double c6(Species s) const;
};

struct TrajectoryResult
{
    bool collided{false};
    double min_distance{0};   //!< bohr, from the atom at the origin
    double energy_error{0};   //!< |dE| / E_kin at the last accepted step
    int steps{0};
    int rejected{0};
};

class IntegrationError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/*!
 * Fly a helium atom from (impact, 0, start_z) along -z at the configured
 * speed past a field centred on the origin.
 *
 * Integration stops at z = -start_z or as soon as the path enters the
 * collision radius.
 */
TrajectoryResult propagate_trajectory(PotentialField const& field,
                                      double impact,
                                      double collision_radius,
                                      TrajectoryConfig const& cfg);

//! Smallest impact parameter that clears the vdW radius of the species.
double delta_r_classical(Species s, double velocity_mps, TrajectoryConfig cfg = {});

struct ClassicalRow
{
    Species species;
    double velocity_mps;
    double delta_r;  //!< bohr
};

// CSV: "species,velocity_mps,delta_r_classical_angstrom"
void write_classical_csv(std::ostream& os, std::vector<ClassicalRow> const& rows);

}  // namespace mwd
