#include "mwd/farfield.hpp"
#include "mwd/units.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace mwd;

namespace
{
Window square(double half, int n)
{
    Window w;
    w.x_min = w.y_min = -half;
    w.x_max = w.y_max = half;
    w.nx = w.ny = n;
    return w;
}

double const lambda20 = units::de_broglie_wavelength(units::helium_mass_kg, 20000);
}  // namespace

TEST_CASE("empty aperture")
{
    PhaseMap const m = make_phase_map(square(10, 32), [](double, double) { return false; });
    DiffractionPattern const p = fraunhofer(m, lambda20);
    CHECK(p.no_transmission);
    KirchhoffResult const k = kirchhoff(m, lambda20, 1.0, {{0, 0, 1}});
    CHECK(k.no_transmission);
}

TEST_CASE("padding below four is rejected")
{
    PhaseMap const m = make_phase_map(square(10, 32), [](double x, double y) { return x * x + y * y < 25; });
    ScreenSpec s;
    s.padding = 2;
    CHECK_THROWS(fraunhofer(m, lambda20, s));
}

TEST_CASE("slit zeros")
{
    // rectangle a x b: intensity zero at sin(theta) = lambda / a
    double const a = 8.0, b = 3.0;
    PhaseMap const m = make_phase_map(square(16, 128), [&](double x, double y) {
        return std::abs(x) < a / 2 && std::abs(y) < b / 2;
    });
    double const k = 2 * std::numbers::pi / lambda20;
    double const a_m = a * units::bohr_m;
    double const i0 = std::norm(fraunhofer_amplitude(m, 0, 0));
    CHECK(std::norm(fraunhofer_amplitude(m, k * lambda20 / a_m, 0)) < 1e-20 * i0);
    CHECK(std::norm(fraunhofer_amplitude(m, k * 0.5 * lambda20 / a_m, 0)) > 0.3 * i0);
    // on axis |A|^2 = area^2
    double const area = a * b * units::bohr_m * units::bohr_m;
    CHECK(std::sqrt(i0) == doctest::Approx(area).epsilon(1e-12));
}

TEST_CASE("fft and direct paths agree")
{
    PhaseMap const m = make_phase_map(
        square(6, 48), [](double x, double y) { return x * x + y * y < 20 && x > -3; },
        [](double x, double y) { return 0.2 * x + 0.05 * y * y; });
    ScreenSpec s;
    s.max_samples = 65;
    s.half_width_m = 0.1;
    DiffractionPattern const f = fraunhofer(m, lambda20, s, FarfieldMethod::fft);
    DiffractionPattern const d = fraunhofer(m, lambda20, s, FarfieldMethod::direct);
    REQUIRE(f.intensity.size() == d.intensity.size());
    CHECK(f.x_m == d.x_m);
    for (std::size_t n = 0; n < f.intensity.size(); ++n)
        CHECK(std::abs(f.intensity[n] - d.intensity[n]) < 1e-9);
    CHECK(f.peak == doctest::Approx(d.peak).epsilon(1e-9));
}

TEST_CASE("a phase ramp steers the beam toward increasing phase")
{
    double const g = 0.6;  // rad per bohr
    PhaseMap const m = make_phase_map(
        square(12, 96), [](double x, double y) { return x * x + y * y < 64; }, [&](double x, double) { return g * x; });
    ScreenSpec s;
    s.half_width_m = 0.2;
    s.max_samples = 401;
    DiffractionPattern const p = fraunhofer(m, lambda20, s);
    auto const it = std::max_element(p.intensity.begin(), p.intensity.end());
    std::size_t const n = std::size_t(it - p.intensity.begin());
    double const x = p.x_m[n % p.x_m.size()];
    // k x / L = g / bohr
    double const expect = g / units::bohr_m / (2 * std::numbers::pi / lambda20) * s.distance_m;
    CHECK(x == doctest::Approx(expect).epsilon(0.02));
    CHECK(std::abs(p.y_m[n / p.x_m.size()]) < 2 * (p.y_m[1] - p.y_m[0]));
}

TEST_CASE("obliquity")
{
    double const inf = std::numeric_limits<double>::infinity();
    CHECK(obliquity(inf, 0, 0, {0, 0, 1}) == doctest::Approx(2.0));
    CHECK(obliquity(1.0, 0, 0, {0, 0, 1}) == doctest::Approx(2.0));
    CHECK(obliquity(inf, 0, 0, {1, 0, 1}) == doctest::Approx(1 + 1 / std::sqrt(2.0)));
}

TEST_CASE("slices and writers")
{
    PhaseMap const m = make_phase_map(square(10, 64), [](double x, double y) { return x * x + 4 * y * y < 36; });
    ScreenSpec s;
    s.max_samples = 129;
    DiffractionPattern const p = fraunhofer(m, lambda20, s);
    REQUIRE_FALSE(p.no_transmission);
    double const h = p.x_m.back();
    auto const sl = pattern_slice(p, {-0.5 * h, 0, 0.5 * h, 0, 65});
    REQUIRE(sl.size() == 65);
    CHECK(slice_centroid(sl) == doctest::Approx(0.5 * h).epsilon(1e-6));
    CHECK(sl[32].intensity == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS(pattern_slice(p, {0, 0, 0, 0, 10}));
    CHECK_THROWS(pattern_slice(p, {10, 10, 11, 11, 10}));
    auto const [sx, sy] = angular_spread(p);
    CHECK(sy > sx);  // narrow along y spreads more

    std::ostringstream csv, pgm, js;
    write_pattern_csv(csv, p);
    CHECK(csv.str().rfind("y\\x,", 0) == 0);
    write_pattern_pgm(pgm, p);
    std::string const head = "P5\n" + std::to_string(p.nx()) + " " + std::to_string(p.ny()) + "\n65535\n";
    CHECK(pgm.str().rfind(head, 0) == 0);
    CHECK(pgm.str().size() == head.size() + 2 * p.intensity.size());
    write_pattern_json(js, p);
    CHECK(js.str().find("\"k_perp_mapping\"") != std::string::npos);
}

TEST_CASE("method names")
{
    CHECK(parse_farfield_method("direct") == FarfieldMethod::direct);
    CHECK(to_string(FarfieldMethod::fft) == "fft");
    CHECK_THROWS(parse_farfield_method("fresnel"));
}
