#include "mwd/reduction_classical.hpp"

#include "mwd/dispersion.hpp"
#include "mwd/units.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace mwd
{

TrajectoryConfig::TrajectoryConfig()
    : start_z(units::angstrom_to_bohr(100.0))
    , vdw_radius_b(units::angstrom_to_bohr(1.92))
    , vdw_radius_n(units::angstrom_to_bohr(1.55))
    , bisection_tol(units::angstrom_to_bohr(0.05))
    , bracket_max(units::angstrom_to_bohr(50.0))
{
}

void TrajectoryConfig::validate() const
{
    if (!(start_z > 0))
        throw std::invalid_argument("TrajectoryConfig: start_z must be positive");
    if (!(rel_tol > 0) || !(abs_tol > 0) || !(bisection_tol > 0))
        throw std::invalid_argument("TrajectoryConfig: tolerances must be positive");
    if (!(velocity_mps > 0))
        throw std::invalid_argument("TrajectoryConfig: velocity must be positive");
    if (!(vdw_radius_b > 0) || !(vdw_radius_n > 0))
        throw std::invalid_argument("TrajectoryConfig: vdW radii must be positive");
}

double TrajectoryConfig::c6(Species s) const
{
    auto const& given = s == Species::B ? c6_b : c6_n;
    if (given)
        return *given;
    return c6_helium(s, s == Species::B ? pristine_alpha_b : pristine_alpha_n);
}

//---------------------------------------------------------------------------//

namespace
{
// State in scaled time tau = v0 t: {x, z, ux, uz} with u = velocity / v0.
using State = std::array<double, 4>;

struct Rhs
{
    PotentialField const& field;
    double inv_mv2;

    State operator()(State const& s) const
    {
        Eigen::Vector3d const g = field.grad_u({s[0], 0.0, s[1]});
        return {s[2], s[3], -g.x() * inv_mv2, -g.z() * inv_mv2};
    }
};

// Dormand-Prince 5(4)
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

State axpy(State const& y, double h, std::initializer_list<std::pair<double, State const*>> terms)
{
    State out = y;
    for (auto const& [c, k] : terms)
        for (int i = 0; i < 4; ++i)
            out[i] += h * c * (*k)[i];
    return out;
}

// Closest approach to the origin on the cubic Hermite interpolant of a step.
double step_min_distance(State const& y0, State const& y1, double h)
{
    auto pos = [&](double t) {
        double const t2 = t * t, t3 = t2 * t;
        double const h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        double const h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        double const x = h00 * y0[0] + h10 * h * y0[2] + h01 * y1[0] + h11 * h * y1[2];
        double const z = h00 * y0[1] + h10 * h * y0[3] + h01 * y1[1] + h11 * h * y1[3];
        return std::hypot(x, z);
    };
    double best = std::min(std::hypot(y0[0], y0[1]), std::hypot(y1[0], y1[1]));
    double const rdot0 = y0[0] * y0[2] + y0[1] * y0[3];
    double const rdot1 = y1[0] * y1[2] + y1[1] * y1[3];
    if (!(rdot0 < 0 && rdot1 > 0))
        return best;
    double lo = 0, hi = 1;
    double const g = (std::sqrt(5.0) - 1) / 2;
    double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    double f1 = pos(m1), f2 = pos(m2);
    for (int it = 0; it < 80; ++it)
    {
        if (f1 < f2)
        {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - g * (hi - lo);
            f1 = pos(m1);
        }
        else
        {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + g * (hi - lo);
            f2 = pos(m2);
        }
    }
    return std::min(best, std::min(f1, f2));
}
}  // namespace

TrajectoryResult propagate_trajectory(PotentialField const& field,
                                      double impact,
                                      double collision_radius,
                                      TrajectoryConfig const& cfg)
{
    cfg.validate();
    if (!(impact >= 0))
        throw std::invalid_argument("propagate_trajectory: impact must be non-negative");

    TrajectoryResult res;
    double const v0 = units::mps_to_au(cfg.velocity_mps);
    double const mass = units::helium_mass_me;
    Rhs const f{field, 1.0 / (mass * v0 * v0)};
    auto energy = [&](State const& s) {
        return 0.5 * (s[2] * s[2] + s[3] * s[3]) + field.u_total({s[0], 0.0, s[1]}) * f.inv_mv2;
    };

    State y{impact, cfg.start_z, 0.0, -1.0};
    res.min_distance = std::hypot(y[0], y[1]);
    if (res.min_distance < collision_radius)
    {
        res.collided = true;
        return res;
    }

    double const e0 = energy(y);
    double h = std::min(1.0, cfg.start_z / 100);
    State k1 = f(y);
    while (y[1] > -cfg.start_z)
    {
        if (res.steps + res.rejected > cfg.max_steps)
            throw IntegrationError("propagate_trajectory: step budget exhausted");
        if (h < 1e-14 * cfg.start_z)
            throw IntegrationError("propagate_trajectory: step size underflow");

        State const k2 = f(axpy(y, h, {{a21, &k1}}));
        State const k3 = f(axpy(y, h, {{a31, &k1}, {a32, &k2}}));
        State const k4 = f(axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        State const k5 = f(axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        State const k6 = f(axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        State const yn = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        State const k7 = f(yn);

        double err = 0;
        for (int i = 0; i < 4; ++i)
        {
            double const e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double const sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(yn[i]));
            err = std::max(err, std::abs(e) / sc);
        }
        if (!std::isfinite(err))
        {
            h *= 0.1;
            ++res.rejected;
            continue;
        }
        if (err > 1.0)
        {
            h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
            ++res.rejected;
            continue;
        }

        double const dmin = step_min_distance(y, yn, h);
        res.min_distance = std::min(res.min_distance, dmin);
        y = yn;
        k1 = k7;
        ++res.steps;
        if (res.min_distance < collision_radius)
        {
            res.collided = true;
            break;
        }
        double const grow = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
        // Do not overshoot the end plane by much.
        h = std::min(h, std::max(1e-3, y[1] + cfg.start_z + 1.0));
    }
    res.energy_error = std::abs(energy(y) - e0) / 0.5;
    return res;
}

double delta_r_classical(Species s, double velocity_mps, TrajectoryConfig cfg)
{
    if (!(velocity_mps > 0))
        throw std::invalid_argument("delta_r_classical: velocity must be positive");
    cfg.velocity_mps = velocity_mps;
    cfg.validate();
    double const sign = s == Species::B ? 1.0 : -1.0;
    PotentialField const field = PotentialField::single_atom(cfg.c6(s), sign * cfg.charge, cfg.field);
    double const radius = cfg.vdw_radius(s);
    auto clear = [&](double b) { return !propagate_trajectory(field, b, radius, cfg).collided; };

    double lo = 0;
    double hi = radius;
    while (!clear(hi))
    {
        lo = hi;
        hi *= 1.5;
        if (hi > cfg.bracket_max)
            throw std::runtime_error("delta_r_classical: no clear trajectory below the bracket limit");
    }
    while (hi - lo > cfg.bisection_tol)
    {
        double const mid = 0.5 * (lo + hi);
        (clear(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

void write_classical_csv(std::ostream& os, std::vector<ClassicalRow> const& rows)
{
    auto const prec = os.precision();
    os << "species,velocity_mps,delta_r_classical_angstrom\n" << std::setprecision(17);
    for (auto const& r : rows)
        os << to_string(r.species) << ',' << r.velocity_mps << ',' << units::bohr_to_angstrom(r.delta_r)
           << '\n';
    os.precision(prec);
}

}  // namespace mwd
