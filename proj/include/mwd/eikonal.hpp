#pragma once

#include "mwd/dispersion.hpp"
#include "mwd/fields.hpp"
#include "mwd/kernels.hpp"
#include "mwd/lattice.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mwd
{

//! Sample grid over the membrane plane; samples sit at cell centres.
struct Window
{
    double x_min{0}, x_max{0}, y_min{0}, y_max{0};  //!< bohr
    int nx{512}, ny{512};

    double dx() const { return (x_max - x_min) / nx; }
    double dy() const { return (y_max - y_min) / ny; }
    double x(int i) const { return x_min + (i + 0.5) * dx(); }
    double y(int j) const { return y_min + (j + 0.5) * dy(); }
    double pixel_area() const { return dx() * dy(); }
    void validate() const;
};

//! Bounding box of the atomistic rhombus.
Window default_window(MembraneModel const& model, int nx = 512, int ny = 512);

struct AreaReport
{
    double open_area{0};              //!< bohr^2
    double nominal_area_cells{0};     //!< removed atoms times the area per atom
    double nominal_area_hull{0};      //!< convex hull of the removed atoms
    double reduction_percent_cells{0};
    double reduction_percent_hull{0};
    std::size_t open_pixels{0};
};

struct TransmissionMask
{
    Window window;
    std::vector<std::uint8_t> open;  //!< row-major, y slow
    AreaReport report;

    bool at(int i, int j) const { return open[std::size_t(j) * window.nx + i] != 0; }
};

/*!
 * A sample is transmitted when it lies inside the atomistic region and its
 * in-plane distance to every atom exceeds that atom's reduction radius.
 */
TransmissionMask transmission_mask(MembraneModel const& model,
                                   double delta_r_b,
                                   double delta_r_n,
                                   Window const& window);

//! Whether a single point is transmitted under the same rule.
bool transmitted(MembraneModel const& model, double delta_r_b, double delta_r_n, Eigen::Vector2d const& p);

struct PhaseOptions
{
    //! Weight of D_zz in the closed-form van der Waals phase. The
    //! published closed form uses 3; integrating the anisotropic potential
    //! along z gives 1.
    double zz_coefficient{3.0};
    double he_alpha0{helium_alpha0};
    double rel_tol{1e-10};
};

//! Atom arrays for the closed-form sums (C6, D and charges from the table).
kernels::AtomBlock phase_atoms(MembraneModel const& model, DispersionTable const& table);

double phase_vdw_closedform(kernels::AtomBlock const& atoms,
                            double velocity_mps,
                            Eigen::Vector2d const& rho,
                            PhaseOptions const& opts = {});

double phase_electrostatic(kernels::AtomBlock const& atoms,
                           double velocity_mps,
                           Eigen::Vector2d const& rho,
                           PhaseOptions const& opts = {});

//! -(1/v) int U(rho, z) dz by adaptive Gauss-Kronrod on the whole line.
double phase_numeric(PotentialField const& field,
                     double velocity_mps,
                     Eigen::Vector2d const& rho,
                     PhaseOptions const& opts = {});

enum class PhaseMethod
{
    closedform,
    numeric,
};

std::string_view to_string(PhaseMethod m);
PhaseMethod parse_phase_method(std::string_view s);

struct PhaseMap
{
    TransmissionMask mask;
    std::vector<double> phase;  //!< rad; NaN where blocked
    double velocity_mps{0};
    double lambda_db_m{0};
    std::string hole_name;
    double delta_r_b{0};
    double delta_r_n{0};
    PhaseMethod method{PhaseMethod::numeric};

    Window const& window() const { return mask.window; }
    double at(int i, int j) const { return phase[std::size_t(j) * mask.window.nx + i]; }
};

PhaseMap build_phase_map(MembraneModel const& model,
                         DispersionTable const& table,
                         double velocity_mps,
                         double delta_r_b,
                         double delta_r_n,
                         Window const& window,
                         PhaseMethod method,
                         PhaseOptions const& opts = {});

// Grid CSV: first row "y\x" then x samples; one row per y with NaN where
// blocked. Values in rad, axes in bohr.
void write_phase_csv(std::ostream& os, PhaseMap const& map);
PhaseMap read_phase_csv(std::istream& is);
//! 16-bit PGM: blocked pixels 0, open pixels 1 + round(65534 * frac(phase / 2 pi)).
void write_phase_pgm(std::ostream& os, PhaseMap const& map);
void write_phase_json(std::ostream& os, PhaseMap const& map);

}  // namespace mwd
