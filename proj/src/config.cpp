#include "mwd/config.hpp"

#include "mwd/units.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace mwd
{

namespace
{

std::string trim(std::string_view s)
{
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto const e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    if (trim(s).empty())
        return out;
    std::size_t pos = 0;
    while (pos <= s.size())
    {
        auto const next = s.find(',', pos);
        std::string item = trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (item.empty())
            throw ConfigError("config: empty item in list '" + std::string(s) + "'");
        out.push_back(std::move(item));
        if (next == std::string_view::npos)
            break;
        pos = next + 1;
    }
    return out;
}

double parse_double(std::string const& key, std::string const& v)
{
    double x = 0;
    auto const [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("config: " + key + ": not a number: '" + v + "'");
    return x;
}

int parse_int(std::string const& key, std::string const& v)
{
    int x = 0;
    auto const [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("config: " + key + ": not an integer: '" + v + "'");
    return x;
}

bool parse_bool(std::string const& key, std::string const& v)
{
    if (v == "true" || v == "yes" || v == "1" || v == "on")
        return true;
    if (v == "false" || v == "no" || v == "0" || v == "off")
        return false;
    throw ConfigError("config: " + key + ": not a boolean: '" + v + "'");
}

std::string fmt(double x)
{
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

std::string fmt_list(std::vector<double> const& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

// Reads keys from one section and reports any it did not consume.
class Reader
{
  public:
    Reader(IniFile const& ini) : ini_(ini) {}

    template <class F>
    void take(std::string const& sec, std::string const& key, F&& apply)
    {
        used_.insert(sec + "." + key);
        if (auto v = ini_.get(sec, key))
        {
            try
            {
                apply(sec + "." + key, *v);
            }
            catch (ConfigError const&)
            {
                throw;
            }
            catch (std::exception const& e)
            {
                throw ConfigError("config: " + sec + "." + key + ": " + e.what());
            }
        }
    }

    void num(std::string const& sec, std::string const& key, double& out)
    {
        take(sec, key, [&](std::string const& k, std::string const& v) { out = parse_double(k, v); });
    }
    void integer(std::string const& sec, std::string const& key, int& out)
    {
        take(sec, key, [&](std::string const& k, std::string const& v) { out = parse_int(k, v); });
    }
    void str(std::string const& sec, std::string const& key, std::string& out)
    {
        take(sec, key, [&](std::string const&, std::string const& v) { out = v; });
    }
    void flag(std::string const& sec, std::string const& key, bool& out)
    {
        take(sec, key, [&](std::string const& k, std::string const& v) { out = parse_bool(k, v); });
    }
    void list(std::string const& sec, std::string const& key, std::vector<double>& out)
    {
        take(sec, key, [&](std::string const&, std::string const& v) { out = parse_number_list(v); });
    }

    void reject_unknown() const
    {
        for (auto const& [sec, kv] : ini_.sections())
            for (auto const& [key, value] : kv)
                if (!used_.count(sec + "." + key))
                    throw ConfigError("config: unknown key '" + key + "' in section [" + sec + "]");
    }

  private:
    IniFile const& ini_;
    std::set<std::string> used_;
};

}  // namespace

//---------------------------------------------------------------------------//

IniFile IniFile::parse(std::istream& is, std::string const& source)
{
    IniFile ini;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        std::string const t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';')
            continue;
        auto where = [&] { return source + ":" + std::to_string(lineno) + ": "; };
        if (t.front() == '[')
        {
            if (t.back() != ']')
                throw ConfigError(where() + "unterminated section header");
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError(where() + "empty section name");
            ini.data_[section];
            continue;
        }
        auto const eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where() + "expected key = value");
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty())
            throw ConfigError(where() + "empty key");
        auto& sec = ini.data_[section];
        if (sec.count(key))
            throw ConfigError(where() + "duplicate key '" + key + "'");
        sec.emplace(std::move(key), std::move(value));
    }
    return ini;
}

IniFile IniFile::read_file(std::string const& path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config file: " + path);
    return parse(f, path);
}

bool IniFile::has(std::string const& section, std::string const& key) const
{
    return get(section, key).has_value();
}

std::optional<std::string> IniFile::get(std::string const& section, std::string const& key) const
{
    auto s = data_.find(section);
    if (s == data_.end())
        return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end())
        return std::nullopt;
    return k->second;
}

void IniFile::set(std::string const& section, std::string const& key, std::string value)
{
    data_[section][key] = std::move(value);
}

//---------------------------------------------------------------------------//

std::string_view to_string(DeltaRSource s)
{
    switch (s)
    {
    case DeltaRSource::classical: return "classical";
    case DeltaRSource::quantum: return "quantum";
    case DeltaRSource::fixed: return "fixed";
    }
    return "?";
}

DeltaRSource parse_delta_r_source(std::string_view s)
{
    if (s == "classical")
        return DeltaRSource::classical;
    if (s == "quantum")
        return DeltaRSource::quantum;
    if (s == "fixed")
        return DeltaRSource::fixed;
    throw ConfigError("unknown delta_r source: " + std::string(s));
}

std::string_view to_string(Stage s)
{
    switch (s)
    {
    case Stage::lattice: return "lattice";
    case Stage::screen: return "screen";
    case Stage::potential: return "potential";
    case Stage::reduce: return "reduce";
    case Stage::phase: return "phase";
    case Stage::diffract: return "diffract";
    }
    return "?";
}

Stage parse_stage(std::string_view s)
{
    for (Stage st : all_stages())
        if (to_string(st) == s)
            return st;
    throw ConfigError("unknown stage: " + std::string(s));
}

std::vector<Stage> all_stages()
{
    return {Stage::lattice, Stage::screen, Stage::potential, Stage::reduce, Stage::phase, Stage::diffract};
}

std::vector<double> parse_number_list(std::string_view s)
{
    std::vector<double> out;
    for (auto const& item : split_list(s))
        out.push_back(parse_double("list", item));
    return out;
}

//---------------------------------------------------------------------------//

RunConfig::RunConfig()
{
    ScreeningOptions const so;
    cutoff_angstrom = 30.0;
    radius_scale = so.damping.radius_scale;
    range_beta = so.damping.range_beta;
    range_d = so.damping.range_d;
    mixing = so.damping.mixing;
    screening_tolerance = so.damping.tolerance;
    max_iterations = so.damping.max_iterations;
    hirshfeld_alpha_b = so.pristine_hirsh_b;
    hirshfeld_alpha_n = so.pristine_hirsh_n;
}

bool RunConfig::runs(Stage s) const
{
    return std::find(stages.begin(), stages.end(), s) != stages.end();
}

void RunConfig::validate() const
{
    if (geometry_file.empty())
    {
        auto const names = builtin_hole_names();
        if (hole != "none" && std::find(names.begin(), names.end(), hole) == names.end())
            throw ConfigError("config: run.hole: unknown hole '" + hole + "'");
    }
    if (velocities.empty())
        throw ConfigError("config: run.velocities_mps: at least one velocity is required");
    for (double v : velocities)
        if (!(v > 0))
            throw ConfigError("config: run.velocities_mps: velocities must be positive");
    if (threads < 1)
        throw ConfigError("config: run.threads must be at least 1");
    if (cells < 2)
        throw ConfigError("config: lattice.cells must be at least 2");
    charges.validate();
    if (!(cutoff_angstrom > 0) || !(radius_scale > 0) || !(range_beta >= 0) || !(range_d > 0))
        throw ConfigError("config: screening: cutoff, radius_scale and range_d must be positive");
    if (!(mixing > 0 && mixing <= 1))
        throw ConfigError("config: screening.mixing must lie in (0, 1]");
    if (delta_r_source == DeltaRSource::fixed
        && (delta_r_b_angstrom.size() != velocities.size() || delta_r_n_angstrom.size() != velocities.size()))
        throw ConfigError("config: reduction: the fixed source needs one delta_r per velocity for B and N");
    if (q_n_r < 16 || q_n_z < 16)
        throw ConfigError("config: reduction: quantum grid needs at least 16 cells per axis");
    if (resolution < 8)
        throw ConfigError("config: phase.resolution must be at least 8");
    if (padding < 4)
        throw ConfigError("config: diffract.padding must be at least 4");
    if (!(screen_distance_m > 0))
        throw ConfigError("config: diffract.screen_distance_m must be positive");
}

ScreeningOptions RunConfig::screening_options() const
{
    ScreeningOptions o;
    o.cutoff = units::angstrom_to_bohr(cutoff_angstrom);
    o.damping.radius_scale = radius_scale;
    o.damping.range_beta = range_beta;
    o.damping.range_d = range_d;
    o.damping.vdw_radius_b = units::angstrom_to_bohr(vdw_radius_b_angstrom);
    o.damping.vdw_radius_n = units::angstrom_to_bohr(vdw_radius_n_angstrom);
    o.damping.solver = solver;
    o.damping.mixing = mixing;
    o.damping.tolerance = screening_tolerance;
    o.damping.max_iterations = max_iterations;
    o.embed = embed;
    o.pristine_hirsh_b = hirshfeld_alpha_b;
    o.pristine_hirsh_n = hirshfeld_alpha_n;
    if (!free_atoms_file.empty())
        o.free_atoms = FreeAtomData::read_file(free_atoms_file);
    return o;
}

ScreenSpec RunConfig::screen_spec() const
{
    ScreenSpec s;
    s.distance_m = screen_distance_m;
    s.padding = padding;
    s.half_width_m = half_width_m;
    s.max_samples = max_samples;
    return s;
}

RunConfig RunConfig::from_ini(IniFile const& ini)
{
    RunConfig c;
    Reader r(ini);

    r.str("run", "hole", c.hole);
    r.list("run", "velocities_mps", c.velocities);
    r.str("run", "output_dir", c.output_dir);
    r.take("run", "stages", [&](std::string const&, std::string const& v) {
        c.stages.clear();
        for (auto const& s : split_list(v))
        {
            if (s == "all")
            {
                c.stages = all_stages();
                break;
            }
            c.stages.push_back(parse_stage(s));
        }
    });
    r.integer("run", "threads", c.threads);

    r.integer("lattice", "cells", c.cells);
    r.str("lattice", "geometry_file", c.geometry_file);
    r.num("lattice", "charge_edge_b", c.charges.edge_b);
    r.num("lattice", "charge_edge_n", c.charges.edge_n);
    r.num("lattice", "charge_bulk_b", c.charges.bulk_b);
    r.num("lattice", "charge_bulk_n", c.charges.bulk_n);

    r.num("screening", "cutoff_angstrom", c.cutoff_angstrom);
    r.num("screening", "radius_scale", c.radius_scale);
    r.num("screening", "range_beta", c.range_beta);
    r.num("screening", "range_d", c.range_d);
    r.num("screening", "vdw_radius_b_angstrom", c.vdw_radius_b_angstrom);
    r.num("screening", "vdw_radius_n_angstrom", c.vdw_radius_n_angstrom);
    r.take("screening", "solver", [&](std::string const& k, std::string const& v) {
        if (v == "fixed_point")
            c.solver = ScreeningSolver::fixed_point;
        else if (v == "direct")
            c.solver = ScreeningSolver::direct;
        else
            throw ConfigError("config: " + k + ": expected fixed_point or direct");
    });
    r.num("screening", "mixing", c.mixing);
    r.num("screening", "tolerance", c.screening_tolerance);
    r.integer("screening", "max_iterations", c.max_iterations);
    r.flag("screening", "embed", c.embed);
    r.num("screening", "hirshfeld_alpha_b", c.hirshfeld_alpha_b);
    r.num("screening", "hirshfeld_alpha_n", c.hirshfeld_alpha_n);
    r.str("screening", "free_atoms_file", c.free_atoms_file);
    r.str("screening", "table", c.dispersion_table);

    r.num("potential", "scan_height_angstrom", c.scan_height_angstrom);
    r.num("potential", "scan_half_width_angstrom", c.scan_half_width_angstrom);
    r.integer("potential", "scan_samples", c.scan_samples);

    r.take("reduction", "source", [&](std::string const&, std::string const& v) {
        c.delta_r_source = parse_delta_r_source(v);
    });
    r.list("reduction", "delta_r_b_angstrom", c.delta_r_b_angstrom);
    r.list("reduction", "delta_r_n_angstrom", c.delta_r_n_angstrom);
    r.str("reduction", "table", c.delta_r_table);
    r.num("reduction", "edge_charge", c.edge_charge);
    r.integer("reduction", "quantum_n_r", c.q_n_r);
    r.integer("reduction", "quantum_n_z", c.q_n_z);
    r.num("reduction", "quantum_r_max_angstrom", c.q_r_max_angstrom);
    r.num("reduction", "quantum_z_half_angstrom", c.q_z_half_angstrom);
    r.num("reduction", "quantum_sigma_angstrom", c.q_sigma_angstrom);
    r.num("reduction", "quantum_timestep_divisor", c.q_timestep_divisor);

    r.take("phase", "method", [&](std::string const&, std::string const& v) { c.phase_method = parse_phase_method(v); });
    r.integer("phase", "resolution", c.resolution);
    r.num("phase", "zz_coefficient", c.zz_coefficient);

    r.take("diffract", "method", [&](std::string const&, std::string const& v) {
        c.diffract_method = parse_farfield_method(v);
    });
    r.num("diffract", "screen_distance_m", c.screen_distance_m);
    r.integer("diffract", "padding", c.padding);
    r.num("diffract", "half_width_m", c.half_width_m);
    r.integer("diffract", "max_samples", c.max_samples);

    r.reject_unknown();
    c.validate();
    return c;
}

RunConfig RunConfig::read_file(std::string const& path)
{
    return from_ini(IniFile::read_file(path));
}

void RunConfig::write(std::ostream& os) const
{
    std::string st;
    for (std::size_t i = 0; i < stages.size(); ++i)
        st += (i ? ", " : "") + std::string(to_string(stages[i]));

    os << "[run]\n"
       << "hole = " << hole << '\n'
       << "velocities_mps = " << fmt_list(velocities) << '\n'
       << "output_dir = " << output_dir << '\n'
       << "stages = " << st << '\n'
       << "threads = " << threads << '\n'
       << "\n[lattice]\n"
       << "cells = " << cells << '\n'
       << "geometry_file = " << geometry_file << '\n'
       << "charge_edge_b = " << fmt(charges.edge_b) << '\n'
       << "charge_edge_n = " << fmt(charges.edge_n) << '\n'
       << "charge_bulk_b = " << fmt(charges.bulk_b) << '\n'
       << "charge_bulk_n = " << fmt(charges.bulk_n) << '\n'
       << "\n[screening]\n"
       << "cutoff_angstrom = " << fmt(cutoff_angstrom) << '\n'
       << "radius_scale = " << fmt(radius_scale) << '\n'
       << "range_beta = " << fmt(range_beta) << '\n'
       << "range_d = " << fmt(range_d) << '\n'
       << "vdw_radius_b_angstrom = " << fmt(vdw_radius_b_angstrom) << '\n'
       << "vdw_radius_n_angstrom = " << fmt(vdw_radius_n_angstrom) << '\n'
       << "solver = " << (solver == ScreeningSolver::direct ? "direct" : "fixed_point") << '\n'
       << "mixing = " << fmt(mixing) << '\n'
       << "tolerance = " << fmt(screening_tolerance) << '\n'
       << "max_iterations = " << max_iterations << '\n'
       << "embed = " << (embed ? "true" : "false") << '\n'
       << "hirshfeld_alpha_b = " << fmt(hirshfeld_alpha_b) << '\n'
       << "hirshfeld_alpha_n = " << fmt(hirshfeld_alpha_n) << '\n'
       << "free_atoms_file = " << free_atoms_file << '\n'
       << "table = " << dispersion_table << '\n'
       << "\n[potential]\n"
       << "scan_height_angstrom = " << fmt(scan_height_angstrom) << '\n'
       << "scan_half_width_angstrom = " << fmt(scan_half_width_angstrom) << '\n'
       << "scan_samples = " << scan_samples << '\n'
       << "\n[reduction]\n"
       << "source = " << to_string(delta_r_source) << '\n'
       << "delta_r_b_angstrom = " << fmt_list(delta_r_b_angstrom) << '\n'
       << "delta_r_n_angstrom = " << fmt_list(delta_r_n_angstrom) << '\n'
       << "table = " << delta_r_table << '\n'
       << "edge_charge = " << fmt(edge_charge) << '\n'
       << "quantum_n_r = " << q_n_r << '\n'
       << "quantum_n_z = " << q_n_z << '\n'
       << "quantum_r_max_angstrom = " << fmt(q_r_max_angstrom) << '\n'
       << "quantum_z_half_angstrom = " << fmt(q_z_half_angstrom) << '\n'
       << "quantum_sigma_angstrom = " << fmt(q_sigma_angstrom) << '\n'
       << "quantum_timestep_divisor = " << fmt(q_timestep_divisor) << '\n'
       << "\n[phase]\n"
       << "method = " << to_string(phase_method) << '\n'
       << "resolution = " << resolution << '\n'
       << "zz_coefficient = " << fmt(zz_coefficient) << '\n'
       << "\n[diffract]\n"
       << "method = " << to_string(diffract_method) << '\n'
       << "screen_distance_m = " << fmt(screen_distance_m) << '\n'
       << "padding = " << padding << '\n'
       << "half_width_m = " << fmt(half_width_m) << '\n'
       << "max_samples = " << max_samples << '\n';
}

std::string RunConfig::to_text() const
{
    std::ostringstream os;
    write(os);
    return os.str();
}

}  // namespace mwd
