#include "mwd/eikonal.hpp"

#include "mwd/units.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace mwd
{

void Window::validate() const
{
    if (!(x_max > x_min) || !(y_max > y_min))
        throw std::invalid_argument("Window: empty extent");
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("Window: no samples");
}

Window default_window(MembraneModel const& model, int nx, int ny)
{
    Window w;
    w.nx = nx;
    w.ny = ny;
    if (model.side_length() > 0)
    {
        // Rhombus corners from the fractional bounds used by in_region.
        int const n = model.cells();
        double const a = model.lattice_constant();
        double const c = (n / 2 - 1) + 2.0 / 3.0;
        double const lo = (-c - 1.0 / 3.0) * a;
        double const hi = ((n - 1) - c + 2.0 / 3.0) * a;
        Eigen::Vector2d const e1{1, 0};
        Eigen::Vector2d const e2{std::cos(model.wedge_angle()), std::sin(model.wedge_angle())};
        w.x_min = w.y_min = INFINITY;
        w.x_max = w.y_max = -INFINITY;
        for (double s : {lo, hi})
            for (double t : {lo, hi})
            {
                Eigen::Vector2d const p = s * e1 + t * e2;
                w.x_min = std::min(w.x_min, p.x());
                w.x_max = std::max(w.x_max, p.x());
                w.y_min = std::min(w.y_min, p.y());
                w.y_max = std::max(w.y_max, p.y());
            }
        return w;
    }
    w.x_min = w.y_min = INFINITY;
    w.x_max = w.y_max = -INFINITY;
    for (auto const& at : model.atoms())
    {
        w.x_min = std::min(w.x_min, at.position.x());
        w.x_max = std::max(w.x_max, at.position.x());
        w.y_min = std::min(w.y_min, at.position.y());
        w.y_max = std::max(w.y_max, at.position.y());
    }
    if (model.atoms().empty())
        throw std::invalid_argument("default_window: empty model");
    return w;
}

//---------------------------------------------------------------------------//

namespace
{
double hull_area(std::vector<Eigen::Vector2d> pts)
{
    if (pts.size() < 3)
        return 0.0;
    std::sort(pts.begin(), pts.end(), [](auto const& a, auto const& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    auto cross = [](Eigen::Vector2d const& o, Eigen::Vector2d const& a, Eigen::Vector2d const& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Eigen::Vector2d> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0)
            --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i)
    {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i - 1]) <= 0)
            --k;
        h[k++] = pts[i - 1];
    }
    h.resize(k - 1);
    double area = 0;
    for (std::size_t i = 0; i < h.size(); ++i)
    {
        auto const& p = h[i];
        auto const& q = h[(i + 1) % h.size()];
        area += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * std::abs(area);
}

double reduction(double nominal, double open)
{
    if (!(nominal > 0))
        return 0.0;
    return std::clamp(100.0 * (1.0 - open / nominal), 0.0, 100.0);
}
}  // namespace

bool transmitted(MembraneModel const& model, double delta_r_b, double delta_r_n, Eigen::Vector2d const& p)
{
    if (!model.in_region(p))
        return false;
    for (auto const& at : model.atoms())
    {
        double const r = at.species == Species::B ? delta_r_b : delta_r_n;
        if ((at.position.head<2>() - p).squaredNorm() <= r * r)
            return false;
    }
    return true;
}

TransmissionMask transmission_mask(MembraneModel const& model,
                                   double delta_r_b,
                                   double delta_r_n,
                                   Window const& window)
{
    window.validate();
    if (!(delta_r_b >= 0) || !(delta_r_n >= 0))
        throw std::invalid_argument("transmission_mask: reduction radii must be non-negative");
    for (auto const& at : model.removed())
    {
        double const x = at.position.x(), y = at.position.y();
        if (x < window.x_min || x > window.x_max || y < window.y_min || y > window.y_max)
            throw std::invalid_argument("transmission_mask: window does not cover the hole");
    }

    TransmissionMask m;
    m.window = window;
    m.open.assign(std::size_t(window.nx) * window.ny, 0);

    std::vector<double> ax, ay, ar2;
    for (auto const& at : model.atoms())
    {
        double const r = at.species == Species::B ? delta_r_b : delta_r_n;
        ax.push_back(at.position.x());
        ay.push_back(at.position.y());
        ar2.push_back(r * r);
    }
    for (int j = 0; j < window.ny; ++j)
    {
        double const y = window.y(j);
        for (int i = 0; i < window.nx; ++i)
        {
            double const x = window.x(i);
            if (!model.in_region({x, y}))
                continue;
            bool open = true;
            for (std::size_t k = 0; k < ax.size() && open; ++k)
            {
                double const dx = ax[k] - x, dy = ay[k] - y;
                open = dx * dx + dy * dy > ar2[k];
            }
            if (open)
            {
                m.open[std::size_t(j) * window.nx + i] = 1;
                ++m.report.open_pixels;
            }
        }
    }

    double const a = lattice::lattice_constant();
    double const per_atom = 0.5 * (std::sqrt(3.0) / 2.0) * a * a;
    std::vector<Eigen::Vector2d> pts;
    for (auto const& at : model.removed())
        pts.push_back(at.position.head<2>());
    AreaReport& r = m.report;
    r.open_area = double(r.open_pixels) * window.pixel_area();
    r.nominal_area_cells = per_atom * double(pts.size());
    r.nominal_area_hull = hull_area(pts);
    r.reduction_percent_cells = reduction(r.nominal_area_cells, r.open_area);
    r.reduction_percent_hull = reduction(r.nominal_area_hull, r.open_area);
    return m;
}

//---------------------------------------------------------------------------//

kernels::AtomBlock phase_atoms(MembraneModel const& model, DispersionTable const& table)
{
    if (model.size() != table.size())
        throw std::invalid_argument("phase_atoms: model and table sizes differ");
    kernels::AtomBlock block;
    for (std::size_t i = 0; i < model.size(); ++i)
    {
        Eigen::Matrix3d const& d = table[i].anisotropy;
        double const packed[6] = {d(0, 0), d(1, 1), d(2, 2), d(0, 1), d(0, 2), d(1, 2)};
        auto const& p = model[i].position;
        block.push(p.x(), p.y(), p.z(), table[i].c6_he, packed, model[i].charge);
    }
    block.finalize();
    return block;
}

namespace
{
void check_clear(kernels::AtomBlock const& atoms, Eigen::Vector2d const& rho)
{
    for (std::size_t i = 0; i < atoms.count(); ++i)
    {
        double const dx = atoms.x[i] - rho.x(), dy = atoms.y[i] - rho.y();
        if (dx * dx + dy * dy < 1e-12)
            throw std::domain_error("phase: point coincides with an atom");
    }
}
}  // namespace

double phase_vdw_closedform(kernels::AtomBlock const& atoms,
                            double velocity_mps,
                            Eigen::Vector2d const& rho,
                            PhaseOptions const& opts)
{
    check_clear(atoms, rho);
    double const v = units::mps_to_au(velocity_mps);
    // m lambda / (64 hbar^2) = pi / (32 v) in atomic units
    return std::numbers::pi / (32.0 * v) * kernels::vdw_phase_sum(atoms, rho.x(), rho.y(), opts.zz_coefficient);
}

double phase_electrostatic(kernels::AtomBlock const& atoms,
                           double velocity_mps,
                           Eigen::Vector2d const& rho,
                           PhaseOptions const& opts)
{
    check_clear(atoms, rho);
    double const v = units::mps_to_au(velocity_mps);
    // int dz / ((b_i^2 + z^2)(b_j^2 + z^2)) = pi / (b_i b_j (b_i + b_j))
    return std::numbers::pi * opts.he_alpha0 / (2.0 * v) * kernels::charge_pair_sum(atoms, rho.x(), rho.y());
}

double phase_numeric(PotentialField const& field,
                     double velocity_mps,
                     Eigen::Vector2d const& rho,
                     PhaseOptions const& opts)
{
    using boost::math::quadrature::gauss_kronrod;
    double const v = units::mps_to_au(velocity_mps);
    auto f = [&](double z) { return field.u_total({rho.x(), rho.y(), z}); };
    double const inf = std::numeric_limits<double>::infinity();
    double err = 0, err_neg = 0;
    // The membrane sits at z = 0; split there so the peak is at a node edge.
    double const pos = gauss_kronrod<double, 31>::integrate(f, 0.0, inf, 15, opts.rel_tol, &err);
    double const neg = gauss_kronrod<double, 31>::integrate(f, -inf, 0.0, 15, opts.rel_tol, &err_neg);
    double const total = pos + neg;
    if (!std::isfinite(total))
        throw std::runtime_error("phase_numeric: non-finite integral");
    if (err + err_neg > 1e-6 * std::abs(total) && std::abs(total) > 0)
        throw std::runtime_error("phase_numeric: quadrature did not reach 1e-6 relative accuracy");
    return -total / v;
}

std::string_view to_string(PhaseMethod m)
{
    return m == PhaseMethod::closedform ? "closedform" : "numeric";
}

PhaseMethod parse_phase_method(std::string_view s)
{
    if (s == "closedform")
        return PhaseMethod::closedform;
    if (s == "numeric")
        return PhaseMethod::numeric;
    throw std::invalid_argument("unknown phase method '" + std::string(s) + "'");
}

PhaseMap build_phase_map(MembraneModel const& model,
                         DispersionTable const& table,
                         double velocity_mps,
                         double delta_r_b,
                         double delta_r_n,
                         Window const& window,
                         PhaseMethod method,
                         PhaseOptions const& opts)
{
    PhaseMap map;
    map.mask = transmission_mask(model, delta_r_b, delta_r_n, window);
    map.velocity_mps = velocity_mps;
    map.lambda_db_m = units::de_broglie_wavelength(units::helium_mass_kg, velocity_mps);
    map.hole_name = model.hole() ? model.hole()->name : "pristine";
    map.delta_r_b = delta_r_b;
    map.delta_r_n = delta_r_n;
    map.method = method;
    map.phase.assign(map.mask.open.size(), std::numeric_limits<double>::quiet_NaN());

    kernels::AtomBlock const atoms = phase_atoms(model, table);
    FieldOptions fo;
    fo.he_alpha0 = opts.he_alpha0;
    PotentialField const field(model, table, fo);
    for (int j = 0; j < window.ny; ++j)
        for (int i = 0; i < window.nx; ++i)
        {
            if (!map.mask.at(i, j))
                continue;
            Eigen::Vector2d const rho{window.x(i), window.y(j)};
            double phi = 0;
            if (atoms.count() > 0)
            {
                if (method == PhaseMethod::closedform)
                    phi = phase_vdw_closedform(atoms, velocity_mps, rho, opts)
                          + phase_electrostatic(atoms, velocity_mps, rho, opts);
                else
                    phi = phase_numeric(field, velocity_mps, rho, opts);
            }
            map.phase[std::size_t(j) * window.nx + i] = phi;
        }
    return map;
}

//---------------------------------------------------------------------------//

void write_phase_csv(std::ostream& os, PhaseMap const& map)
{
    Window const& w = map.window();
    auto const prec = os.precision();
    os << std::setprecision(17) << "y\\x";
    for (int i = 0; i < w.nx; ++i)
        os << ',' << w.x(i);
    os << '\n';
    for (int j = 0; j < w.ny; ++j)
    {
        os << w.y(j);
        for (int i = 0; i < w.nx; ++i)
        {
            double const v = map.at(i, j);
            os << ',';
            if (std::isnan(v))
                os << "NaN";
            else
                os << v;
        }
        os << '\n';
    }
    os.precision(prec);
}

PhaseMap read_phase_csv(std::istream& is)
{
    auto split = [](std::string const& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            out.push_back(cell);
        return out;
    };
    auto number = [](std::string const& s) {
        if (s == "NaN" || s == "nan")
            return std::numeric_limits<double>::quiet_NaN();
        std::size_t used = 0;
        double const v = std::stod(s, &used);
        if (used != s.size())
            throw std::runtime_error("phase CSV: bad number '" + s + "'");
        return v;
    };
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("phase CSV: empty input");
    auto head = split(line);
    if (head.size() < 2 || head[0] != "y\\x")
        throw std::runtime_error("phase CSV: bad header");
    std::vector<double> xs;
    for (std::size_t k = 1; k < head.size(); ++k)
        xs.push_back(number(head[k]));
    std::vector<double> ys, values;
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        auto row = split(line);
        if (row.size() != head.size())
            throw std::runtime_error("phase CSV: ragged row");
        ys.push_back(number(row[0]));
        for (std::size_t k = 1; k < row.size(); ++k)
            values.push_back(number(row[k]));
    }
    if (ys.empty())
        throw std::runtime_error("phase CSV: no rows");

    PhaseMap map;
    Window& w = map.mask.window;
    w.nx = int(xs.size());
    w.ny = int(ys.size());
    double const dx = xs.size() > 1 ? (xs.back() - xs.front()) / (xs.size() - 1) : 1.0;
    double const dy = ys.size() > 1 ? (ys.back() - ys.front()) / (ys.size() - 1) : 1.0;
    w.x_min = xs.front() - 0.5 * dx;
    w.x_max = xs.back() + 0.5 * dx;
    w.y_min = ys.front() - 0.5 * dy;
    w.y_max = ys.back() + 0.5 * dy;
    map.phase = values;
    map.mask.open.resize(values.size());
    for (std::size_t k = 0; k < values.size(); ++k)
    {
        map.mask.open[k] = std::isnan(values[k]) ? 0 : 1;
        map.mask.report.open_pixels += map.mask.open[k];
    }
    map.mask.report.open_area = double(map.mask.report.open_pixels) * w.pixel_area();
    return map;
}

void write_phase_pgm(std::ostream& os, PhaseMap const& map)
{
    Window const& w = map.window();
    os << "P5\n" << w.nx << ' ' << w.ny << "\n65535\n";
    // Top row of the image is the largest y.
    for (int j = w.ny - 1; j >= 0; --j)
        for (int i = 0; i < w.nx; ++i)
        {
            double const v = map.at(i, j);
            unsigned value = 0;
            if (!std::isnan(v))
            {
                double frac = v / (2 * std::numbers::pi);
                frac -= std::floor(frac);
                value = 1 + unsigned(std::lround(65534.0 * frac));
                value = std::min(value, 65535u);
            }
            os.put(char((value >> 8) & 0xff));
            os.put(char(value & 0xff));
        }
}

void write_phase_json(std::ostream& os, PhaseMap const& map)
{
    Window const& w = map.window();
    AreaReport const& r = map.mask.report;
    nlohmann::ordered_json j;
    j["hole"] = map.hole_name;
    j["velocity_mps"] = map.velocity_mps;
    j["lambda_db_m"] = map.lambda_db_m;
    j["method"] = std::string(to_string(map.method));
    j["delta_r_b_bohr"] = map.delta_r_b;
    j["delta_r_n_bohr"] = map.delta_r_n;
    j["window_bohr"] = {{"x_min", w.x_min}, {"x_max", w.x_max}, {"y_min", w.y_min}, {"y_max", w.y_max},
                        {"nx", w.nx}, {"ny", w.ny}};
    j["area"] = {{"open_bohr2", r.open_area},
                 {"nominal_cells_bohr2", r.nominal_area_cells},
                 {"nominal_hull_bohr2", r.nominal_area_hull},
                 {"reduction_percent_cells", r.reduction_percent_cells},
                 {"reduction_percent_hull", r.reduction_percent_hull},
                 {"open_pixels", r.open_pixels}};
    j["pgm_mapping"] = "0 blocked; 1 + round(65534 * frac(phase / 2pi)) open";
    os << j.dump(2) << '\n';
}

}  // namespace mwd
