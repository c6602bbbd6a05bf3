#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mwd
{

enum class Species : std::uint8_t
{
    B,
    N,
};

std::string_view to_string(Species s);
Species parse_species(std::string_view s);

//! Ring index of atoms in a model without a hole.
inline constexpr int no_ring = 1'000'000;

struct AtomSite
{
    Eigen::Vector3d position{0, 0, 0};  //!< bohr
    Species species{Species::B};
    double charge{0};                   //!< |e|
    double hirshfeld_alpha{0};          //!< bohr^3, before screening
    int ring_index{no_ring};
};

//---------------------------------------------------------------------------//
// Hole geometry
//---------------------------------------------------------------------------//

struct CircleShape
{
    double radius;  //!< bohr
};

struct EllipseShape
{
    double semi_a;       //!< bohr, along `orientation`
    double semi_b;       //!< bohr
    double orientation;  //!< rad, angle of the a axis from +x
};

/*!
 * Central disk plus six radial arms, each a chain of `arm_depth` disks spaced
 * `arm_spacing` apart along `arm_phase + k*pi/3`.
 *
 * With disks centred on hollow sites each disk removes one hexagon. Arms k
 * and k+3 are related by inversion about the hollow site, which swaps B and
 * N, so the arm tips alternate between boron and nitrogen termination.
 */
struct SnowflakeShape
{
    double core_radius;  //!< bohr
    double arm_spacing;  //!< bohr
    int arm_depth;
    double arm_radius;  //!< bohr
    double arm_phase;   //!< rad
};

using HoleShape = std::variant<CircleShape, EllipseShape, SnowflakeShape>;

struct HoleSpec
{
    HoleShape shape;
    Eigen::Vector2d center{0, 0};  //!< bohr
    std::string name;

    //! Negative inside the hole; the magnitude orders atoms by how close
    //! they sit to the boundary.
    double signed_distance(Eigen::Vector2d const& p) const;
    bool contains(Eigen::Vector2d const& p) const { return signed_distance(p) < 0; }
};

//! One of "circle6", "circle10", "ellipse", "snowflake".
HoleSpec builtin_hole(std::string_view name);
std::vector<std::string> builtin_hole_names();

//---------------------------------------------------------------------------//
// Charges
//---------------------------------------------------------------------------//

//! Per-ring charge magnitudes; B positive and N negative.
struct ChargeProfile
{
    double edge_b{0.39};
    double edge_n{0.39};
    double bulk_b{0.20};
    double bulk_n{0.20};

    double charge(Species s, int ring_index) const;
    void validate() const;
};

//---------------------------------------------------------------------------//
// Model
//---------------------------------------------------------------------------//

/*!
 * Atomistic h-BN region (rhombus of n x n unit cells, 60 degree wedge) with
 * an optional hole.
 *
 * The in-plane origin is the hollow site at the rhombus centre. Atoms are
 * immutable after construction.
 */
class MembraneModel
{
  public:
    MembraneModel() = default;
    MembraneModel(std::vector<AtomSite> atoms,
                  double side_length,
                  double wedge_angle,
                  double lattice_constant,
                  int cells,
                  std::optional<HoleSpec> hole = std::nullopt,
                  std::vector<AtomSite> removed = {});

    std::span<AtomSite const> atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    AtomSite const& operator[](std::size_t i) const { return atoms_[i]; }

    std::optional<HoleSpec> const& hole() const { return hole_; }
    std::span<AtomSite const> removed() const { return removed_; }

    double side_length() const { return side_; }
    double wedge_angle() const { return wedge_; }
    double lattice_constant() const { return lattice_constant_; }
    int cells() const { return cells_; }

    //! Whether an in-plane point lies inside the atomistic rhombus. Always
    //! true when the model has no region (side length <= 0).
    bool in_region(Eigen::Vector2d const& p) const;

    //! Bonded neighbour lists (B-N pairs at one bond length).
    std::vector<std::vector<std::size_t>> bonds() const;

    //! Copy of the model with charges and ring indices replaced.
    MembraneModel with_atoms(std::vector<AtomSite> atoms) const;

  private:
    std::vector<AtomSite> atoms_;
    double side_{0};
    double wedge_{0};
    double lattice_constant_{0};
    int cells_{0};
    std::optional<HoleSpec> hole_;
    std::vector<AtomSite> removed_;
};

namespace lattice
{
//! Nearest-neighbour B-N distance (bohr).
double bond_length();
//! Hexagonal lattice constant, sqrt(3) times the bond length (bohr).
double lattice_constant();
//! Primitive vectors a1 = a (1, 0), a2 = a (1/2, sqrt(3)/2).
Eigen::Vector2d a1();
Eigen::Vector2d a2();
//! Offset of the N sublattice from the B sublattice.
Eigen::Vector2d n_offset();

//! Default unscreened polarisabilities, chosen so that self-consistent
//! screening of the infinite sheet with default damping reproduces the
//! pristine scalar polarisabilities (18.09 and 3.70 bohr^3).
double default_hirshfeld_alpha(Species s);

//! Default region-I side length (16 unit cells).
double default_side_length();
}  // namespace lattice

struct PristineOptions
{
    std::optional<double> hirshfeld_alpha_b;
    std::optional<double> hirshfeld_alpha_n;
    ChargeProfile charges{};
};

//! Tile a 60-degree rhombus of floor(side/a) unit cells.
MembraneModel build_pristine(double side_length, PristineOptions const& opts = {});

//! Remove the atoms inside the hole (charge balanced), recompute ring indices
//! by bond traversal from the edge and apply the charge profile.
MembraneModel carve_hole(MembraneModel const& model,
                         HoleSpec const& spec,
                         ChargeProfile const& profile = {});

//! Ring indices from the removal set; exposed for tests.
std::vector<int> compute_ring_indices(MembraneModel const& kept,
                                      std::span<AtomSite const> removed);

//---------------------------------------------------------------------------//
// Geometry file: "count l theta lattice_constant" header, then one
// "species x y z charge alpha_hirsh ring_index" line per atom (bohr, |e|).
//---------------------------------------------------------------------------//
void write_geometry(std::ostream& os, MembraneModel const& model);
MembraneModel read_geometry(std::istream& is);
void write_geometry_file(std::string const& path, MembraneModel const& model);
MembraneModel read_geometry_file(std::string const& path);

}  // namespace mwd
