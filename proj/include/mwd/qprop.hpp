#pragma once

#include "mwd/lattice.hpp"

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mwd
{

struct GridSpec
{
    int n_r{256};
    int n_z{512};
    double r_max;  //!< bohr
    double z_min;  //!< bohr
    double z_max;  //!< bohr

    GridSpec();
    double dr() const { return r_max / n_r; }
    double dz() const { return (z_max - z_min) / n_z; }
    void validate() const;
};

/*!
 * Axially symmetric wave function on a cell-centred (r, z) grid.
 *
 * Cell (i, j) sits at r = (j + 1/2) dr, z = z_min + (i + 1/2) dz and is
 * stored at psi[i * n_r + j].
 */
class WavePacketGrid
{
  public:
    using complex = std::complex<double>;

    explicit WavePacketGrid(GridSpec const& spec);

    GridSpec const& spec() const { return spec_; }
    int n_r() const { return spec_.n_r; }
    int n_z() const { return spec_.n_z; }
    double dr() const { return spec_.dr(); }
    double dz() const { return spec_.dz(); }
    double r(int j) const { return (j + 0.5) * dr(); }
    double z(int i) const { return spec_.z_min + (i + 0.5) * dz(); }

    complex& at(int i, int j) { return psi_[std::size_t(i) * n_r() + j]; }
    complex at(int i, int j) const { return psi_[std::size_t(i) * n_r() + j]; }
    std::vector<complex>& data() { return psi_; }
    std::vector<complex> const& data() const { return psi_; }

    //! sum |psi|^2 2 pi r dr dz
    double norm() const;
    //! <psi|phi> with the same volume weights.
    complex overlap(WavePacketGrid const& other) const;
    //! Variance of |psi|^2 along z about its mean.
    double variance_z() const;
    //! <r^2> / 2, the per-axis variance for an isotropic transverse density.
    double variance_r() const;
    //! Largest |psi| on the outer r row and the two z end rows, over the peak.
    double boundary_ratio() const;

  private:
    GridSpec spec_;
    std::vector<complex> psi_;
};

struct PropagationConfig
{
    double velocity_mps{2000};
    double sigma_r;           //!< bohr; std dev of |psi|^2
    double sigma_z;           //!< bohr
    double start_offset;      //!< atom starts at z = +start_offset (bohr)
    double end_offset;        //!< and stops at z = -end_offset (bohr)
    double timestep_divisor{32};  //!< dt = dr / (divisor * v)
    double tolerance{1e-13};  //!< inner solve; 1e-10 already drifts the norm by ~3e-11 per step
    int max_sweeps{200};
    bool potential{true};
    bool absorber{true};

    GridSpec grid{};
    //! He pair coefficients; unset means the pristine-sheet values.
    std::optional<double> c6_b;
    std::optional<double> c6_n;
    double charge;
    double he_alpha0;
    double vdw_radius_b;  //!< bohr
    double vdw_radius_n;  //!< bohr

    int history_every{0};   //!< record norm every k steps (0: never)
    int snapshot_every{0};  //!< call the snapshot hook every k steps

    PropagationConfig();
    void validate() const;
    double dt() const;
    double vdw_radius(Species s) const { return s == Species::B ? vdw_radius_b : vdw_radius_n; }
    double c6(Species s) const;
};

class SolverError : public std::runtime_error
{
  public:
    SolverError(std::string const& what, double residual)
        : std::runtime_error(what), residual_(residual)
    {
    }
    double residual() const { return residual_; }

  private:
    double residual_;
};

//! Gaussian with |psi|^2 standard deviations sigma_r, sigma_z, centred at
//! r = 0, z = 0, unit norm. Throws if the grid clips it.
WavePacketGrid initial_packet(PropagationConfig const& cfg, GridSpec const& grid);

/*!
 * One Crank-Nicolson step A+ psi' = A- psi.
 *
 * `potential` holds V at every cell in the grid layout (empty means zero).
 * Returns the number of Gauss-Seidel sweeps used.
 */
class CrankNicolson
{
  public:
    CrankNicolson(GridSpec const& grid, double dt, double tolerance = 1e-13, int max_sweeps = 200);

    int step(WavePacketGrid& state, std::vector<double> const& potential);

    double dt() const { return dt_; }
    double last_residual() const { return residual_; }

  private:
    GridSpec grid_;
    double dt_;
    double tol_;
    int max_sweeps_;
    double residual_{0};

    std::vector<double> kin_diag_;  // per r index, includes the z part
    std::vector<double> lo_, up_;   // r couplings of H
    double kz_;                     // z coupling of H

    std::vector<std::complex<double>> rhs_, inv_, cprime_, scratch_;
};

struct NormSample
{
    int step;
    double time;  //!< a.u.
    double norm;
};

struct CollisionResult
{
    double n_final{1};
    int steps{0};
    int max_sweeps_used{0};
    std::vector<NormSample> history;
};

using SnapshotHook = std::function<void(int step, double time, WavePacketGrid const&)>;

CollisionResult propagate_collision(Species s, PropagationConfig const& cfg, SnapshotHook hook = {});

//! Radius of the absorbing cylinder that leaves fraction n_final.
double delta_r_quantum(double n_final, double sigma_r);

//! Single-atom potential used in the propagation, clamped inside r_clamp.
double collision_potential(double d, double c6, double q2_alpha, double r_clamp);

// "MWGRID1" then n_r, n_z (u64), dr, dz, t (f64), then (re, im) pairs with
// r as the slow index. All little-endian.
void write_mwgrid(std::ostream& os, WavePacketGrid const& grid, double time);
WavePacketGrid read_mwgrid(std::istream& is, double* time = nullptr);

// CSV: "step,time,norm"
void write_norm_history_csv(std::ostream& os, std::vector<NormSample> const& history);

}  // namespace mwd
