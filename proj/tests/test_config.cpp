#include "mwd/config.hpp"

#include <doctest.h>

#include <sstream>

using namespace mwd;

namespace
{
RunConfig parse(std::string const& text)
{
    std::istringstream is(text);
    return RunConfig::from_ini(IniFile::parse(is));
}
}  // namespace

TEST_CASE("ini grammar")
{
    std::istringstream is("top = 1\n# comment\n; also\n[a]\n  key =  some value  \n\n[b]\nx=2\n");
    IniFile const ini = IniFile::parse(is);
    CHECK(ini.get("", "top") == "1");
    CHECK(ini.get("a", "key") == "some value");
    CHECK(ini.get("b", "x") == "2");
    CHECK_FALSE(ini.has("b", "key"));

    std::istringstream dup("[a]\nk=1\nk=2\n");
    CHECK_THROWS_AS(IniFile::parse(dup), ConfigError);
    std::istringstream junk("[a]\nnot a pair\n");
    CHECK_THROWS_AS(IniFile::parse(junk), ConfigError);
    std::istringstream open("[a\nk=1\n");
    CHECK_THROWS_AS(IniFile::parse(open), ConfigError);
}

TEST_CASE("defaults round trip")
{
    RunConfig const a;
    RunConfig const b = parse(a.to_text());
    CHECK(b.to_text() == a.to_text());
}

TEST_CASE("edited config round trips exactly")
{
    RunConfig a;
    a.hole = "snowflake";
    a.velocities = {1234.5678901234567, 20000};
    a.stages = {Stage::phase, Stage::diffract};
    a.cells = 12;
    a.charges.edge_n = 0.1 / 3.0;
    a.range_d = 7.25;
    a.embed = false;
    a.delta_r_source = DeltaRSource::fixed;
    a.delta_r_b_angstrom = {3.6, 2.3};
    a.delta_r_n_angstrom = {3.2, 1.9};
    a.q_sigma_angstrom = 1.0 / 7.0;
    a.phase_method = PhaseMethod::closedform;
    a.diffract_method = FarfieldMethod::direct;
    a.half_width_m = 0.0123;
    RunConfig const b = parse(a.to_text());
    CHECK(b.to_text() == a.to_text());
    CHECK(b.velocities == a.velocities);
    CHECK(b.charges.edge_n == a.charges.edge_n);
    CHECK(b.q_sigma_angstrom == a.q_sigma_angstrom);
    CHECK(b.runs(Stage::phase));
    CHECK_FALSE(b.runs(Stage::screen));
}

TEST_CASE("partial config keeps defaults")
{
    RunConfig const c = parse("[run]\nhole = ellipse\nvelocities_mps = 2000, 20000\n");
    CHECK(c.hole == "ellipse");
    CHECK(c.velocities == std::vector<double>{2000, 20000});
    CHECK(c.cells == 16);
    CHECK(c.screen_spec().padding == 4);
}

TEST_CASE("bad configs")
{
    CHECK_THROWS_AS(parse("[run]\nhole = hexagon\n").validate(), std::exception);
    CHECK_THROWS_AS(parse("[run]\nspeed = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse("[nowhere]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[lattice]\ncells = many\n"), ConfigError);
    CHECK_THROWS_AS(parse("[reduction]\nsource = guess\n"), ConfigError);
    CHECK_THROWS(parse("[reduction]\nsource = fixed\n").validate());
    CHECK_THROWS(parse("[run]\nvelocities_mps = -5\n").validate());
    CHECK_THROWS(parse("[diffract]\npadding = 2\n").validate());
}

TEST_CASE("number lists")
{
    CHECK(parse_number_list("1, 2.5 ,3e3") == std::vector<double>{1, 2.5, 3000});
    CHECK_THROWS(parse_number_list("1,,2"));
    CHECK_THROWS(parse_number_list("x"));
}

TEST_CASE("stage and source names")
{
    for (Stage s : all_stages())
        CHECK(parse_stage(to_string(s)) == s);
    CHECK(parse_delta_r_source("quantum") == DeltaRSource::quantum);
    CHECK_THROWS(parse_stage("render"));
}
