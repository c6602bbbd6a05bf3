#include "mwd/pipeline.hpp"

#include "mwd/eikonal.hpp"
#include "mwd/farfield.hpp"
#include "mwd/fields.hpp"
#include "mwd/units.hpp"

#include <Eigen/Core>
#include <fftw3.h>
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <sstream>

namespace fs = std::filesystem;

namespace mwd
{

#ifndef MWD_VERSION
#define MWD_VERSION "0.0.0"
#endif

std::string_view version()
{
    return MWD_VERSION;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed)
{
    std::uint64_t h = seed;
    for (unsigned char c : bytes)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

StageError::StageError(Stage s, std::string const& what)
    : std::runtime_error("stage " + std::string(to_string(s)) + ": " + what), stage_(s)
{
}

//---------------------------------------------------------------------------//

void write_delta_r_csv(std::ostream& os, std::vector<DeltaRRow> const& rows)
{
    os << std::setprecision(17) << "species,velocity_mps,delta_r_angstrom,source,n_final\n";
    for (auto const& r : rows)
        os << to_string(r.species) << ',' << r.velocity_mps << ',' << units::bohr_to_angstrom(r.delta_r) << ','
           << to_string(r.source) << ',' << r.n_final << '\n';
}

std::vector<DeltaRRow> read_delta_r_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("species,velocity_mps,delta_r_angstrom", 0) != 0)
        throw std::runtime_error("delta_r CSV: bad header");
    std::vector<DeltaRRow> rows;
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string sp, v, dr, src, nf;
        std::getline(ss, sp, ',');
        std::getline(ss, v, ',');
        std::getline(ss, dr, ',');
        std::getline(ss, src, ',');
        std::getline(ss, nf, ',');
        DeltaRRow r;
        r.species = parse_species(sp);
        r.velocity_mps = std::stod(v);
        r.delta_r = units::angstrom_to_bohr(std::stod(dr));
        r.source = src.empty() ? DeltaRSource::fixed : parse_delta_r_source(src);
        r.n_final = nf.empty() ? 1.0 : std::stod(nf);
        rows.push_back(r);
    }
    return rows;
}

MembraneModel build_model(RunConfig const& cfg)
{
    if (!cfg.geometry_file.empty())
        return read_geometry_file(cfg.geometry_file);
    PristineOptions po;
    po.hirshfeld_alpha_b = cfg.hirshfeld_alpha_b;
    po.hirshfeld_alpha_n = cfg.hirshfeld_alpha_n;
    po.charges = cfg.charges;
    MembraneModel pristine = build_pristine(cfg.cells * lattice::lattice_constant(), po);
    if (cfg.hole == "none")
        return pristine;
    return carve_hole(pristine, builtin_hole(cfg.hole), cfg.charges);
}

TrajectoryConfig trajectory_config(RunConfig const& cfg, double velocity_mps)
{
    TrajectoryConfig t;
    t.velocity_mps = velocity_mps;
    t.vdw_radius_b = units::angstrom_to_bohr(cfg.vdw_radius_b_angstrom);
    t.vdw_radius_n = units::angstrom_to_bohr(cfg.vdw_radius_n_angstrom);
    t.charge = cfg.edge_charge;
    return t;
}

PropagationConfig propagation_config(RunConfig const& cfg, double velocity_mps)
{
    PropagationConfig p;
    p.velocity_mps = velocity_mps;
    p.grid.n_r = cfg.q_n_r;
    p.grid.n_z = cfg.q_n_z;
    p.grid.r_max = units::angstrom_to_bohr(cfg.q_r_max_angstrom);
    p.grid.z_max = units::angstrom_to_bohr(cfg.q_z_half_angstrom);
    p.grid.z_min = -p.grid.z_max;
    p.sigma_r = p.sigma_z = units::angstrom_to_bohr(cfg.q_sigma_angstrom);
    p.timestep_divisor = cfg.q_timestep_divisor;
    p.charge = cfg.edge_charge;
    p.vdw_radius_b = units::angstrom_to_bohr(cfg.vdw_radius_b_angstrom);
    p.vdw_radius_n = units::angstrom_to_bohr(cfg.vdw_radius_n_angstrom);
    return p;
}

std::vector<DeltaRRow> compute_delta_r(RunConfig const& cfg)
{
    std::vector<DeltaRRow> rows;
    for (std::size_t k = 0; k < cfg.velocities.size(); ++k)
        for (Species s : {Species::B, Species::N})
            rows.push_back({s, cfg.velocities[k], 0.0, cfg.delta_r_source, 1.0});

    switch (cfg.delta_r_source)
    {
    case DeltaRSource::fixed:
        for (std::size_t n = 0; n < rows.size(); ++n)
        {
            auto const& src = rows[n].species == Species::B ? cfg.delta_r_b_angstrom : cfg.delta_r_n_angstrom;
            rows[n].delta_r = units::angstrom_to_bohr(src.at(n / 2));
        }
        break;
    case DeltaRSource::classical:
        for (auto& r : rows)
            r.delta_r = delta_r_classical(r.species, r.velocity_mps, trajectory_config(cfg, r.velocity_mps));
        break;
    case DeltaRSource::quantum:
    {
        // Independent runs; a fixed worker-to-row assignment keeps results
        // identical for any thread count.
        auto run = [&](std::size_t n) {
            PropagationConfig const p = propagation_config(cfg, rows[n].velocity_mps);
            CollisionResult const res = propagate_collision(rows[n].species, p);
            rows[n].n_final = res.n_final;
            rows[n].delta_r = delta_r_quantum(res.n_final, p.sigma_r);
        };
        std::size_t const workers = std::min<std::size_t>(std::size_t(cfg.threads), rows.size());
        if (workers <= 1)
        {
            for (std::size_t n = 0; n < rows.size(); ++n)
                run(n);
        }
        else
        {
            std::vector<std::future<void>> jobs;
            for (std::size_t w = 0; w < workers; ++w)
                jobs.push_back(std::async(std::launch::async, [&, w] {
                    for (std::size_t n = w; n < rows.size(); n += workers)
                        run(n);
                }));
            for (auto& j : jobs)
                j.get();
        }
        break;
    }
    }
    return rows;
}

double lookup_delta_r(std::vector<DeltaRRow> const& rows, Species s, double velocity_mps)
{
    for (auto const& r : rows)
        if (r.species == s && r.velocity_mps == velocity_mps)
            return r.delta_r;
    throw std::runtime_error("no delta_r for " + std::string(to_string(s)) + " at "
                             + velocity_tag(velocity_mps).substr(1) + " m/s");
}

std::string velocity_tag(double v)
{
    std::ostringstream os;
    if (v == std::floor(v) && std::abs(v) < 1e15)
        os << 'v' << static_cast<long long>(v);
    else
        os << 'v' << std::setprecision(17) << v;
    return os.str();
}

//---------------------------------------------------------------------------//

void RunManifest::write_json(std::ostream& os) const
{
    nlohmann::ordered_json j;
    j["tool"] = "mwd";
    j["versions"] = {{"mwd", std::string(version())},
                     {"fftw", std::string(fftw_version)},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "."
                                   + std::to_string(EIGEN_MINOR_VERSION)}};
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << inputs_hash;
    j["inputs_hash"] = "fnv1a64:" + hash.str();
    j["success"] = success;
    if (!error.empty())
        j["error"] = error;
    auto stages_json = nlohmann::ordered_json::array();
    for (auto const& s : stages)
    {
        nlohmann::ordered_json e;
        e["stage"] = std::string(to_string(s.stage));
        e["status"] = s.status;
        e["seconds"] = s.seconds;
        e["outputs"] = s.outputs;
        if (!s.message.empty())
            e["message"] = s.message;
        stages_json.push_back(e);
    }
    j["stages"] = stages_json;
    auto out_json = nlohmann::ordered_json::array();
    for (auto const& o : outputs)
        out_json.push_back({{"path", o.path}, {"valid", o.valid}});
    j["outputs"] = out_json;
    j["config"] = config_text;
    os << j.dump(2) << '\n';
}

namespace
{

std::string slurp(std::string const& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

class Run
{
  public:
    Run(RunConfig const& cfg, RunManifest& m, std::ostream* log) : cfg_(cfg), m_(m), log_(log) {}

    //! Writes through a callback; the path is recorded as invalid until the
    //! stream closes cleanly.
    void emit(std::string const& name, std::function<void(std::ostream&)> const& body, bool binary = false)
    {
        fs::path const p = fs::path(cfg_.output_dir) / name;
        m_.outputs.push_back({p.string(), false});
        std::size_t const idx = m_.outputs.size() - 1;
        current_->outputs.push_back(p.string());
        std::ofstream f(p, binary ? std::ios::binary : std::ios::out);
        if (!f)
            throw std::runtime_error("cannot write " + p.string());
        body(f);
        f.close();
        if (!f)
            throw std::runtime_error("error writing " + p.string());
        m_.outputs[idx].valid = true;
    }

    void stage(Stage s, std::function<void()> const& body, std::function<void()> const& cached)
    {
        m_.stages.push_back({s, "ok", 0.0, {}, {}});
        current_ = &m_.stages.back();
        auto const t0 = std::chrono::steady_clock::now();
        try
        {
            if (cfg_.runs(s))
            {
                if (log_)
                    *log_ << "[" << to_string(s) << "] running\n";
                body();
            }
            else
            {
                current_->status = "skipped";
                if (cached)
                    cached();
            }
        }
        catch (std::exception const& e)
        {
            current_->status = "failed";
            current_->message = e.what();
            current_->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            throw StageError(s, e.what());
        }
        current_->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (log_)
            *log_ << "[" << to_string(s) << "] " << current_->status << " (" << std::fixed << std::setprecision(2)
                  << current_->seconds << " s)\n"
                  << std::defaultfloat;
    }

    StageRecord& current() { return *current_; }
    fs::path out(std::string const& name) const { return fs::path(cfg_.output_dir) / name; }

  private:
    RunConfig const& cfg_;
    RunManifest& m_;
    std::ostream* log_;
    StageRecord* current_{nullptr};
};

//! An artifact a skipped stage depends on: an explicit path or the file a
//! previous run left in the output directory.
std::string cached_input(std::string const& explicit_path, fs::path const& fallback, std::string const& what)
{
    std::string const p = explicit_path.empty() ? fallback.string() : explicit_path;
    if (!fs::exists(p))
        throw std::runtime_error("missing " + what + " (" + p + ")");
    return p;
}

}  // namespace

RunManifest run_pipeline(RunConfig const& cfg, std::ostream* log)
{
    RunManifest m;
    m.config_text = cfg.to_text();
    // Reserve so stage records stay put while Run holds a pointer.
    m.stages.reserve(all_stages().size());

    auto finish = [&] {
        std::ofstream f(fs::path(cfg.output_dir) / "manifest.json");
        m.write_json(f);
    };

    try
    {
        cfg.validate();
        fs::create_directories(cfg.output_dir);
    }
    catch (std::exception const& e)
    {
        m.error = e.what();
        return m;
    }

    // the output location is not an input
    RunConfig keyed = cfg;
    keyed.output_dir.clear();
    std::uint64_t hash = fnv1a(keyed.to_text());
    auto hash_file = [&](std::string const& p) {
        if (!p.empty() && fs::exists(p))
            hash = fnv1a(slurp(p), hash);
    };
    hash_file(cfg.geometry_file);
    hash_file(cfg.free_atoms_file);
    if (!cfg.runs(Stage::screen))
        hash_file(cfg.dispersion_table);
    if (!cfg.runs(Stage::reduce))
        hash_file(cfg.delta_r_table);
    m.inputs_hash = hash;

    Run run(cfg, m, log);
    MembraneModel model;
    DispersionTable table;
    std::vector<DeltaRRow> delta_r;
    std::vector<PhaseMap> maps;

    try
    {
        run.stage(
            Stage::lattice,
            [&] {
                model = build_model(cfg);
                run.emit("geometry.txt", [&](std::ostream& os) { write_geometry(os, model); });
            },
            [&] {
                if (!cfg.geometry_file.empty())
                    model = read_geometry_file(cfg.geometry_file);
                else if (fs::exists(run.out("geometry.txt")))
                    model = read_geometry_file(run.out("geometry.txt").string());
                else
                    model = build_model(cfg);
            });

        run.stage(
            Stage::screen,
            [&] {
                table = screen_polarisabilities(model, cfg.screening_options());
                run.emit("dispersion.csv", [&](std::ostream& os) { write_dispersion_csv(os, table); });
                run.current().message = "iterations " + std::to_string(table.iterations);
            },
            [&] {
                std::string const p = cached_input(cfg.dispersion_table, run.out("dispersion.csv"), "dispersion table");
                std::ifstream f(p);
                table = read_dispersion_csv(f);
                if (table.entries.size() != model.size())
                    throw std::runtime_error("dispersion table " + p + " does not match the geometry");
                run.current().message = "using " + p;
            });

        run.stage(
            Stage::potential,
            [&] {
                PotentialField const field(model, table);
                double const h = units::angstrom_to_bohr(cfg.scan_height_angstrom);
                double const w = units::angstrom_to_bohr(cfg.scan_half_width_angstrom);
                int const n = std::max(2, cfg.scan_samples);
                auto const plane = plane_scan(field, Eigen::Vector3d(-w, -w, h), Eigen::Vector3d(2 * w, 0, 0),
                                              Eigen::Vector3d(0, 2 * w, 0), n, n);
                run.emit("potential_plane.csv", [&](std::ostream& os) { write_scan_csv(os, plane); });
                auto const axis = line_scan(field, Eigen::Vector3d(0, 0, h), Eigen::Vector3d(0, 0, h + 2 * w), n);
                run.emit("potential_axis.csv", [&](std::ostream& os) { write_scan_csv(os, axis); });
            },
            {});

        run.stage(
            Stage::reduce,
            [&] {
                delta_r = compute_delta_r(cfg);
                run.emit("delta_r.csv", [&](std::ostream& os) { write_delta_r_csv(os, delta_r); });
            },
            [&] {
                if (cfg.delta_r_source == DeltaRSource::fixed)
                {
                    delta_r = compute_delta_r(cfg);
                    return;
                }
                std::string const p = cached_input(cfg.delta_r_table, run.out("delta_r.csv"), "delta_r table");
                std::ifstream f(p);
                delta_r = read_delta_r_csv(f);
                run.current().message = "using " + p;
            });

        run.stage(
            Stage::phase,
            [&] {
                PhaseOptions po;
                po.zz_coefficient = cfg.zz_coefficient;
                for (double v : cfg.velocities)
                {
                    Window const w = default_window(model, cfg.resolution, cfg.resolution);
                    PhaseMap map = build_phase_map(model, table, v, lookup_delta_r(delta_r, Species::B, v),
                                                   lookup_delta_r(delta_r, Species::N, v), w, cfg.phase_method, po);
                    map.hole_name = cfg.geometry_file.empty() ? cfg.hole : cfg.geometry_file;
                    std::string const tag = velocity_tag(v);
                    run.emit("phase_" + tag + ".csv", [&](std::ostream& os) { write_phase_csv(os, map); });
                    run.emit("phase_" + tag + ".pgm", [&](std::ostream& os) { write_phase_pgm(os, map); }, true);
                    run.emit("phase_" + tag + ".json", [&](std::ostream& os) { write_phase_json(os, map); });
                    maps.push_back(std::move(map));
                }
            },
            [&] {
                for (double v : cfg.velocities)
                {
                    fs::path const p = run.out("phase_" + velocity_tag(v) + ".csv");
                    if (!fs::exists(p))
                    {
                        if (cfg.runs(Stage::diffract))
                            throw std::runtime_error("missing phase map " + p.string());
                        continue;
                    }
                    std::ifstream f(p);
                    PhaseMap map = read_phase_csv(f);
                    map.velocity_mps = v;
                    map.lambda_db_m = units::de_broglie_wavelength(units::helium_mass_kg, v);
                    map.hole_name = cfg.geometry_file.empty() ? cfg.hole : cfg.geometry_file;
                    maps.push_back(std::move(map));
                }
            });

        run.stage(
            Stage::diffract,
            [&] {
                bool any_open = false;
                std::string notes;
                for (PhaseMap const& map : maps)
                {
                    DiffractionPattern const p
                        = fraunhofer(map, map.lambda_db_m, cfg.screen_spec(), cfg.diffract_method);
                    std::string const tag = velocity_tag(map.velocity_mps);
                    if (!p.no_transmission)
                    {
                        any_open = true;
                        run.emit("pattern_" + tag + ".csv", [&](std::ostream& os) { write_pattern_csv(os, p); });
                        run.emit("pattern_" + tag + ".pgm", [&](std::ostream& os) { write_pattern_pgm(os, p); },
                                 true);
                    }
                    else
                        notes += (notes.empty() ? "" : "; ") + tag.substr(1) + " m/s: no transmission";
                    for (auto const& w : p.warnings)
                        notes += (notes.empty() ? "" : "; ") + tag.substr(1) + " m/s: " + w;
                    run.emit("pattern_" + tag + ".json", [&](std::ostream& os) { write_pattern_json(os, p); });
                }
                if (!any_open)
                    run.current().status = "no transmission";
                run.current().message = notes;
            },
            {});
        m.success = true;
    }
    catch (std::exception const& e)
    {
        m.error = e.what();
        m.success = false;
    }
    finish();
    return m;
}

}  // namespace mwd
