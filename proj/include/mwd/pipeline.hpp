#pragma once

#include "mwd/config.hpp"
#include "mwd/dispersion.hpp"
#include "mwd/lattice.hpp"
#include "mwd/qprop.hpp"
#include "mwd/reduction_classical.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace mwd
{

std::string_view version();

//! 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

//! Error raised by a stage; the message is prefixed with the stage name.
class StageError : public std::runtime_error
{
  public:
    StageError(Stage s, std::string const& what);
    Stage stage() const { return stage_; }

  private:
    Stage stage_;
};

struct DeltaRRow
{
    Species species;
    double velocity_mps;
    double delta_r;  //!< bohr
    DeltaRSource source;
    double n_final{1};  //!< quantum runs only
};

// CSV: "species,velocity_mps,delta_r_angstrom,source,n_final"
void write_delta_r_csv(std::ostream& os, std::vector<DeltaRRow> const& rows);
std::vector<DeltaRRow> read_delta_r_csv(std::istream& is);

//! Builtin hole or geometry file, per the config.
MembraneModel build_model(RunConfig const& cfg);

TrajectoryConfig trajectory_config(RunConfig const& cfg, double velocity_mps);
PropagationConfig propagation_config(RunConfig const& cfg, double velocity_mps);

//! One row per (velocity, species) in config order; quantum runs use up to
//! cfg.threads workers.
std::vector<DeltaRRow> compute_delta_r(RunConfig const& cfg);

//! Reduction radius for one entry of a table; throws if missing.
double lookup_delta_r(std::vector<DeltaRRow> const& rows, Species s, double velocity_mps);

//! Velocity tag used in file names, e.g. "v2000".
std::string velocity_tag(double velocity_mps);

struct StageRecord
{
    Stage stage;
    std::string status;  //!< "ok", "skipped", "failed" or "no transmission"
    double seconds{0};
    std::vector<std::string> outputs;
    std::string message;
};

struct OutputRecord
{
    std::string path;
    bool valid{true};
};

struct RunManifest
{
    std::string config_text;
    std::uint64_t inputs_hash{0};
    std::vector<StageRecord> stages;
    std::vector<OutputRecord> outputs;
    bool success{false};
    std::string error;

    void write_json(std::ostream& os) const;
};

//! Runs the requested stages and writes all artifacts plus manifest.json
//! into cfg.output_dir. Never throws for stage failures; see `success`.
RunManifest run_pipeline(RunConfig const& cfg, std::ostream* log = nullptr);

}  // namespace mwd
