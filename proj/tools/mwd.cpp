// mwd: helium diffraction through holes in h-BN, stage by stage.

#include "mwd/farfield.hpp"
#include "mwd/pipeline.hpp"
#include "mwd/units.hpp"
#include "mwd/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <cstdio>
#include <iostream>
#include <regex>

namespace fs = std::filesystem;
using namespace mwd;

namespace
{

struct Common
{
    std::string config;
    std::string out;
    std::vector<double> velocities;
    std::vector<std::string> species;
    std::string hole;
    int resolution{0};
    std::string method;
    int threads{0};
    // diffract
    std::vector<std::string> phase;
    // verify
    bool skip_slow{false};
    std::vector<int> only;
};

RunConfig load(Common const& c)
{
    RunConfig cfg = c.config.empty() ? RunConfig{} : RunConfig::read_file(c.config);
    if (!c.out.empty())
        cfg.output_dir = c.out;
    if (!c.velocities.empty())
        cfg.velocities = c.velocities;
    if (!c.hole.empty())
    {
        cfg.hole = c.hole;
        cfg.geometry_file.clear();
    }
    if (c.resolution > 0)
        cfg.resolution = c.resolution;
    if (c.threads > 0)
        cfg.threads = c.threads;
    return cfg;
}

std::vector<Species> species_list(Common const& c)
{
    if (c.species.empty())
        return {Species::B, Species::N};
    std::vector<Species> out;
    for (auto const& s : c.species)
        out.push_back(parse_species(s));
    return out;
}

int run_stages(RunConfig cfg, std::vector<Stage> stages)
{
    cfg.stages = std::move(stages);
    RunManifest const m = run_pipeline(cfg, &std::cerr);
    if (!m.success)
    {
        std::cerr << "mwd: " << m.error << '\n';
        return 1;
    }
    for (auto const& s : m.stages)
        if (s.status != "skipped")
            std::cout << to_string(s.stage) << ": " << s.status << (s.message.empty() ? "" : " (" + s.message + ")")
                      << '\n';
    std::cout << "manifest " << (fs::path(cfg.output_dir) / "manifest.json").string() << '\n';
    return 0;
}

int reduce(Common const& c, DeltaRSource source)
{
    RunConfig cfg = load(c);
    cfg.delta_r_source = source;
    cfg.validate();
    std::vector<Species> const sp = species_list(c);
    std::vector<DeltaRRow> rows;
    if (sp.size() == 2)
        rows = compute_delta_r(cfg);
    else
        for (double v : cfg.velocities)
        {
            DeltaRRow r{sp[0], v, 0, source};
            if (source == DeltaRSource::classical)
                r.delta_r = delta_r_classical(sp[0], v, trajectory_config(cfg, v));
            else
            {
                PropagationConfig const pc = propagation_config(cfg, v);
                r.n_final = propagate_collision(sp[0], pc).n_final;
                r.delta_r = delta_r_quantum(r.n_final, pc.sigma_r);
            }
            rows.push_back(r);
        }
    for (auto const& r : rows)
    {
        char line[128];
        std::snprintf(line, sizeof line, "%s %g m/s  dR = %.3f A (%s)", std::string(to_string(r.species)).c_str(),
                      r.velocity_mps, units::bohr_to_angstrom(r.delta_r), std::string(to_string(r.source)).c_str());
        std::cout << line << '\n';
    }
    fs::create_directories(cfg.output_dir);
    fs::path const p = fs::path(cfg.output_dir) / "delta_r.csv";
    std::ofstream f(p);
    write_delta_r_csv(f, rows);
    if (!f)
    {
        std::cerr << "mwd: cannot write " << p.string() << '\n';
        return 1;
    }
    return 0;
}

double phase_velocity(fs::path const& csv, std::vector<double> const& given, std::size_t index)
{
    if (index < given.size())
        return given[index];
    fs::path side = csv;
    side.replace_extension(".json");
    if (fs::exists(side))
    {
        std::ifstream f(side);
        auto const j = nlohmann::json::parse(f);
        if (j.contains("velocity_mps"))
            return j["velocity_mps"].get<double>();
    }
    std::smatch m;
    std::string const name = csv.filename().string();
    if (std::regex_search(name, m, std::regex("v([0-9.]+)")))
        return std::stod(m[1]);
    throw std::runtime_error("no velocity for phase map " + csv.string() + " (pass --velocity)");
}

int diffract(Common const& c)
{
    RunConfig cfg = load(c);
    if (!c.method.empty())
        cfg.diffract_method = parse_farfield_method(c.method);
    std::vector<fs::path> inputs;
    if (!c.phase.empty())
        inputs.assign(c.phase.begin(), c.phase.end());
    else
        for (double v : cfg.velocities)
            inputs.push_back(fs::path(cfg.output_dir) / ("phase_" + velocity_tag(v) + ".csv"));
    for (auto const& p : inputs)
        if (!fs::exists(p))
            throw std::runtime_error("missing phase map " + p.string() + " (run `mwd phase` or pass --phase)");

    fs::create_directories(cfg.output_dir);
    for (std::size_t n = 0; n < inputs.size(); ++n)
    {
        std::ifstream f(inputs[n]);
        PhaseMap map = read_phase_csv(f);
        map.velocity_mps = phase_velocity(inputs[n], c.phase.empty() ? std::vector<double>{} : c.velocities, n);
        map.lambda_db_m = units::de_broglie_wavelength(units::helium_mass_kg, map.velocity_mps);
        map.hole_name = cfg.hole;
        DiffractionPattern const pat = fraunhofer(map, map.lambda_db_m, cfg.screen_spec(), cfg.diffract_method);
        std::string const stem = (fs::path(cfg.output_dir) / ("pattern_" + velocity_tag(map.velocity_mps))).string();
        if (pat.no_transmission)
            std::cout << map.velocity_mps << " m/s: no transmission\n";
        else
        {
            std::ofstream csv(stem + ".csv");
            write_pattern_csv(csv, pat);
            std::ofstream pgm(stem + ".pgm", std::ios::binary);
            write_pattern_pgm(pgm, pat);
            auto const [sx, sy] = angular_spread(pat);
            std::cout << map.velocity_mps << " m/s: " << pat.nx() << " x " << pat.ny() << " samples, spread "
                      << sx << " x " << sy << " rad\n";
        }
        for (auto const& w : pat.warnings)
            std::cout << "  warning: " << w << '\n';
        std::ofstream js(stem + ".json");
        write_pattern_json(js, pat);
    }
    return 0;
}

int verify_cmd(Common const& c)
{
    verify::Options o;
    o.slow = !c.skip_slow;
    o.threads = c.threads > 0 ? c.threads : 1;
    o.log = &std::cerr;
    o.only = c.only;
    auto const results = verify::run_all(o);
    return verify::report(std::cout, results) == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mwd " + std::string(version()) + ": helium matter-wave diffraction through h-BN holes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version()));

    Common c;
    auto common = [&](CLI::App* s) {
        s->add_option("--config", c.config, "INI run configuration")->check(CLI::ExistingFile);
        s->add_option("--out", c.out, "output directory");
        s->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
        return s;
    };
    auto hole = [&](CLI::App* s) { s->add_option("--hole", c.hole, "builtin hole: circle6, circle10, ellipse, snowflake"); };
    auto vel = [&](CLI::App* s) { s->add_option("--velocity", c.velocities, "helium speed(s), m/s"); };

    auto* lattice = common(app.add_subcommand("lattice", "build the membrane and write geometry.txt"));
    hole(lattice);
    auto* screen = common(app.add_subcommand("screen", "screened polarisabilities, dispersion.csv"));
    hole(screen);
    auto* potential = common(app.add_subcommand("potential", "potential scans above the hole"));
    hole(potential);
    auto* rc = common(app.add_subcommand("reduce-classical", "classical reduction radius"));
    auto* rq = common(app.add_subcommand("reduce-quantum", "wave-packet reduction radius"));
    for (auto* s : {rc, rq})
    {
        vel(s);
        s->add_option("--species", c.species, "B and/or N")->check(CLI::IsMember({"B", "N"}));
    }
    auto* phase = common(app.add_subcommand("phase", "eikonal phase maps"));
    hole(phase);
    vel(phase);
    phase->add_option("--resolution", c.resolution, "pixels per side")->check(CLI::PositiveNumber);
    phase->add_option("--method", c.method, "numeric or closedform")->check(CLI::IsMember({"numeric", "closedform"}));
    auto* diff = common(app.add_subcommand("diffract", "far-field patterns from phase maps"));
    vel(diff);
    diff->add_option("--phase", c.phase, "phase map CSV(s)");
    diff->add_option("--method", c.method, "fft or direct")->check(CLI::IsMember({"fft", "direct"}));
    auto* pipe = common(app.add_subcommand("pipeline", "all stages per the config"));
    hole(pipe);
    vel(pipe);
    pipe->add_option("--resolution", c.resolution, "phase map pixels per side")->check(CLI::PositiveNumber);
    auto* ver = app.add_subcommand("verify", "acceptance checks");
    ver->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    ver->add_flag("--skip-slow", c.skip_slow, "skip the quantum propagations");
    ver->add_option("--only", c.only, "criterion ids");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::CallForAllHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::CallForVersion const& e)
    {
        return app.exit(e);
    }
    catch (CLI::ParseError const& e)
    {
        std::cerr << "mwd: " << e.what() << "\n\n";
        CLI::App const* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        std::cerr << sub->help();
        return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
    }

    try
    {
        if (*lattice)
            return run_stages(load(c), {Stage::lattice});
        if (*screen)
            return run_stages(load(c), {Stage::lattice, Stage::screen});
        if (*potential)
            return run_stages(load(c), {Stage::lattice, Stage::screen, Stage::potential});
        if (*rc)
            return reduce(c, DeltaRSource::classical);
        if (*rq)
            return reduce(c, DeltaRSource::quantum);
        if (*phase)
        {
            RunConfig cfg = load(c);
            if (!c.method.empty())
                cfg.phase_method = parse_phase_method(c.method);
            std::vector<Stage> st{Stage::lattice, Stage::phase};
            // Screen when no cached table exists; reduce likewise.
            fs::path const out(cfg.output_dir);
            if (cfg.dispersion_table.empty() && !fs::exists(out / "dispersion.csv"))
                st.push_back(Stage::screen);
            if (cfg.delta_r_table.empty() && !fs::exists(out / "delta_r.csv"))
                st.push_back(Stage::reduce);
            return run_stages(cfg, st);
        }
        if (*diff)
            return diffract(c);
        if (*pipe)
            return run_stages(load(c), load(c).stages);
        if (*ver)
            return verify_cmd(c);
    }
    catch (std::exception const& e)
    {
        std::cerr << "mwd: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
