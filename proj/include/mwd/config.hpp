#pragma once

#include "mwd/dispersion.hpp"
#include "mwd/eikonal.hpp"
#include "mwd/farfield.hpp"
#include "mwd/lattice.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mwd
{

/*!
 * Flat key = value text with [section] headers.
 *
 *   file    := { line '\n' }
 *   line    := blank | comment | '[' name ']' | key '=' value
 *   comment := ('#' | ';') text         (whole lines only)
 *
 * Names and values are trimmed of surrounding blanks. Keys before the first
 * header belong to section "". Repeated keys within a section are an error.
 */
class IniFile
{
  public:
    static IniFile parse(std::istream& is, std::string const& source = "<input>");
    static IniFile read_file(std::string const& path);

    bool has(std::string const& section, std::string const& key) const;
    std::optional<std::string> get(std::string const& section, std::string const& key) const;
    void set(std::string const& section, std::string const& key, std::string value);

    std::map<std::string, std::map<std::string, std::string>> const& sections() const { return data_; }

  private:
    std::map<std::string, std::map<std::string, std::string>> data_;
};

class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum class DeltaRSource
{
    classical,
    quantum,
    fixed,
};

std::string_view to_string(DeltaRSource s);
DeltaRSource parse_delta_r_source(std::string_view s);

enum class Stage
{
    lattice,
    screen,
    potential,
    reduce,
    phase,
    diffract,
};

std::string_view to_string(Stage s);
Stage parse_stage(std::string_view s);
std::vector<Stage> all_stages();

//! Lengths are kept in the units of their keys so that a written config
//! parses back bit for bit.
struct RunConfig
{
    // [run]
    std::string hole{"circle10"};
    std::vector<double> velocities{2000, 20000};  //!< m/s
    std::string output_dir{"out"};
    std::vector<Stage> stages{all_stages()};
    int threads{1};

    // [lattice]
    int cells{16};  //!< unit cells along each rhombus side
    std::string geometry_file;  //!< read instead of building the builtin hole
    ChargeProfile charges{};

    // [screening]
    double cutoff_angstrom;
    double radius_scale, range_beta, range_d;
    double vdw_radius_b_angstrom{1.92}, vdw_radius_n_angstrom{1.55};
    ScreeningSolver solver{ScreeningSolver::fixed_point};
    double mixing, screening_tolerance;
    int max_iterations;
    bool embed{true};
    double hirshfeld_alpha_b, hirshfeld_alpha_n;  //!< bohr^3
    std::string free_atoms_file;
    std::string dispersion_table;  //!< cached table used when screening is skipped

    // [potential]
    double scan_height_angstrom{3.0};
    double scan_half_width_angstrom{15.0};
    int scan_samples{121};

    // [reduction]
    DeltaRSource delta_r_source{DeltaRSource::classical};
    std::vector<double> delta_r_b_angstrom, delta_r_n_angstrom;  //!< per velocity, fixed source
    std::string delta_r_table;  //!< cached CSV used when reduction is skipped
    double edge_charge{0.39};
    int q_n_r{256}, q_n_z{512};
    double q_r_max_angstrom{60}, q_z_half_angstrom{60}, q_sigma_angstrom{8};
    double q_timestep_divisor{32};

    // [phase]
    PhaseMethod phase_method{PhaseMethod::numeric};
    int resolution{512};
    double zz_coefficient{3.0};

    // [diffract]
    FarfieldMethod diffract_method{FarfieldMethod::fft};
    double screen_distance_m{1.0};
    int padding{4};
    double half_width_m{0};
    int max_samples{513};

    RunConfig();

    bool runs(Stage s) const;
    void validate() const;
    ScreeningOptions screening_options() const;
    ScreenSpec screen_spec() const;

    static RunConfig from_ini(IniFile const& ini);
    static RunConfig read_file(std::string const& path);
    //! Every key, numbers at 17 significant digits; parses back to an equal config.
    void write(std::ostream& os) const;
    std::string to_text() const;
};

std::vector<double> parse_number_list(std::string_view s);

}  // namespace mwd
