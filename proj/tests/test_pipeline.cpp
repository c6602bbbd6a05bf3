#include "mwd/pipeline.hpp"
#include "mwd/units.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace mwd;

namespace
{
fs::path scratch(std::string const& name)
{
    fs::path const p = fs::temp_directory_path() / ("mwd_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(fs::path const& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

RunConfig small(std::string const& hole, fs::path const& out)
{
    RunConfig c;
    c.hole = hole;
    c.velocities = {2000, 20000};
    c.delta_r_source = DeltaRSource::fixed;
    c.delta_r_b_angstrom = {3.6, 2.3};
    c.delta_r_n_angstrom = {3.2, 1.9};
    c.resolution = 64;
    c.max_samples = 65;
    c.scan_samples = 9;
    c.phase_method = PhaseMethod::closedform;
    c.output_dir = out.string();
    return c;
}

nlohmann::json manifest(fs::path const& dir)
{
    std::ifstream f(dir / "manifest.json");
    return nlohmann::json::parse(f);
}
}  // namespace

TEST_CASE("delta_r CSV round trip")
{
    std::vector<DeltaRRow> const rows{{Species::B, 2000, 5.1, DeltaRSource::quantum, 0.97},
                                      {Species::N, 2000, 4.4, DeltaRSource::quantum, 0.98}};
    std::stringstream ss;
    write_delta_r_csv(ss, rows);
    auto const back = read_delta_r_csv(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[1].delta_r == doctest::Approx(4.4).epsilon(1e-15));
    CHECK(back[0].n_final == 0.97);
    CHECK(lookup_delta_r(back, Species::N, 2000) == doctest::Approx(4.4).epsilon(1e-15));
    CHECK_THROWS(lookup_delta_r(back, Species::N, 20000));
}

TEST_CASE("helpers")
{
    CHECK(velocity_tag(2000) == "v2000");
    CHECK(velocity_tag(1500.5) == "v1500.5");
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK_FALSE(version().empty());
}

TEST_CASE("narrow hole: no transmission at the slow speed")
{
    fs::path const out = scratch("circle6");
    RunConfig c = small("circle6", out);
    c.velocities = {2000};
    c.delta_r_b_angstrom = {3.6};
    c.delta_r_n_angstrom = {3.2};
    RunManifest const m = run_pipeline(c);
    CHECK(m.success);
    auto const j = manifest(out);
    CHECK(j["success"] == true);
    bool found = false;
    for (auto const& s : j["stages"])
        if (s["stage"] == "diffract")
        {
            found = true;
            CHECK(s["status"] == "no transmission");
        }
    CHECK(found);
    CHECK(fs::exists(out / "pattern_v2000.json"));
    CHECK_FALSE(fs::exists(out / "pattern_v2000.csv"));
}

TEST_CASE("reruns are byte identical and cached stages are reused")
{
    fs::path const a = scratch("det_a"), b = scratch("det_b");
    RunManifest const ma = run_pipeline(small("circle10", a));
    RunManifest const mb = run_pipeline(small("circle10", b));
    REQUIRE(ma.success);
    REQUIRE(mb.success);
    CHECK(ma.inputs_hash == mb.inputs_hash);
    for (std::string f : {"geometry.txt", "dispersion.csv", "potential_plane.csv", "delta_r.csv", "phase_v20000.csv",
                          "pattern_v20000.csv", "pattern_v20000.pgm", "phase_v2000.pgm"})
    {
        CAPTURE(f);
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    auto const j = manifest(a);
    CHECK(j.contains("versions"));
    CHECK(j["inputs_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
    for (auto const& o : j["outputs"])
        CHECK(o["valid"] == true);

    // phase and diffraction only, from the cached tables
    std::string const pattern = slurp(a / "pattern_v20000.csv");
    fs::remove(a / "pattern_v20000.csv");
    RunConfig c = small("circle10", a);
    c.stages = {Stage::phase, Stage::diffract};
    RunManifest const m = run_pipeline(c);
    REQUIRE(m.success);
    CHECK(slurp(a / "pattern_v20000.csv") == pattern);
    for (auto const& s : m.stages)
        if (s.stage == Stage::screen || s.stage == Stage::lattice)
            CHECK(s.status == "skipped");
}

TEST_CASE("missing inputs are named")
{
    fs::path const out = scratch("missing");
    RunConfig c = small("circle10", out);
    c.stages = {Stage::diffract};
    RunManifest const m = run_pipeline(c);
    CHECK_FALSE(m.success);
    CHECK(m.error.find("dispersion") != std::string::npos);

    c.dispersion_table = (out / "nope.csv").string();
    CHECK(run_pipeline(c).error.find("nope.csv") != std::string::npos);
    auto const j = manifest(out);
    CHECK(j["success"] == false);
    CHECK_FALSE(j["error"].get<std::string>().empty());
}

TEST_CASE("invalid config fails before any stage")
{
    RunConfig c = small("circle10", scratch("invalid"));
    c.resolution = 0;
    RunManifest const m = run_pipeline(c);
    CHECK_FALSE(m.success);
    CHECK(m.stages.empty());
}
