#include "mwd/dispersion.hpp"

#include "mwd/units.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace mwd
{

FreeAtomData FreeAtomData::read(std::istream& is)
{
    FreeAtomData data;
    std::string line;
    while (std::getline(is, line))
    {
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream row(line);
        std::string sym;
        FreeAtom atom{};
        if (!(row >> sym))
            continue;
        if (!(row >> atom.alpha >> atom.c6) || atom.alpha <= 0 || atom.c6 <= 0)
            throw std::runtime_error("free-atom data: malformed line for '" + sym + "'");
        if (sym == "B")
            data.boron = atom;
        else if (sym == "N")
            data.nitrogen = atom;
        else if (sym == "He")
            data.helium = atom;
        else
            throw std::runtime_error("free-atom data: unknown element '" + sym + "'");
    }
    return data;
}

FreeAtomData FreeAtomData::read_file(std::string const& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot read " + path);
    return read(is);
}

//---------------------------------------------------------------------------//

double characteristic_frequency(double alpha_free, double c6_free)
{
    if (!(alpha_free > 0) || !(c6_free > 0))
        throw std::domain_error("characteristic_frequency: inputs must be positive");
    return 4.0 / 3.0 * c6_free / (alpha_free * alpha_free);
}

double dynamic_alpha(double alpha_static, double xi, double freq)
{
    if (!(xi > 0))
        throw std::domain_error("dynamic_alpha: xi must be positive");
    double const x = freq / xi;
    return alpha_static / (1.0 + x * x);
}

double c6_pair(double alpha_i, double xi_i, double alpha_j, double xi_j)
{
    if (!(alpha_i > 0 && xi_i > 0 && alpha_j > 0 && xi_j > 0))
        throw std::domain_error("c6_pair: inputs must be positive");
    return 1.5 * xi_i * xi_j / (xi_i + xi_j) * alpha_i * alpha_j;
}

double c6_quadrature(double alpha_i, double xi_i, double alpha_j, double xi_j)
{
    if (!(alpha_i > 0 && xi_i > 0 && alpha_j > 0 && xi_j > 0))
        throw std::domain_error("c6_quadrature: inputs must be positive");
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double w) {
        return dynamic_alpha(alpha_i, xi_i, w) * dynamic_alpha(alpha_j, xi_j, w);
    };
    double error = 0;
    // Split at the larger pole so both scales are resolved.
    double const split = std::max(xi_i, xi_j);
    double const head = gauss_kronrod<double, 31>::integrate(f, 0.0, split, 15, 1e-13, &error);
    double tail_error = 0;
    double const tail = gauss_kronrod<double, 31>::integrate(
        f, split, std::numeric_limits<double>::infinity(), 15, 1e-13, &tail_error);
    double const total = head + tail;
    if (!std::isfinite(total) || error + tail_error > 1e-9 * std::abs(total))
        throw std::runtime_error("c6_quadrature: quadrature did not converge");
    return 3.0 / std::numbers::pi * total;
}

double truncation_error(double r, double a_chain, int n_terms)
{
    if (!(r > 0) || !(a_chain > 0) || n_terms < 0)
        throw std::domain_error("truncation_error: need r > 0, a > 0, N >= 0");
    double const x = a_chain / r;
    auto term = [x](double j) { return std::pow(1.0 + j * x, -6.0); };
    double partial = 0;
    for (int j = 0; j <= n_terms; ++j)
        partial += term(j);
    // Converged sum: add terms until the remaining integral tail
    // int_J^inf (1 + j x)^-6 dj = (1 + J x)^-5 / (5 x) is below 1e-12.
    double total = partial;
    long j = n_terms + 1;
    for (;; ++j)
    {
        total += term(static_cast<double>(j));
        double const tail = std::pow(1.0 + (j + 0.5) * x, -5.0) / (5.0 * x);
        if (tail < 1e-12 * total)
            break;
    }
    total += std::pow(1.0 + (j + 0.5) * x, -5.0) / (5.0 * x);
    return (total - partial) / total;
}

//---------------------------------------------------------------------------//
// Screening
//---------------------------------------------------------------------------//

double default_screening_cutoff()
{
    return units::angstrom_to_bohr(30.0);
}

Eigen::Matrix3d smeared_dipole_tensor(Eigen::Vector3d const& r, double sigma)
{
    double const d = r.norm();
    double const x = d / sigma;
    if (x < 0.05)
    {
        // series through x^7; erf - g cancels badly near 0
        double const c = 2.0 / (std::sqrt(std::numbers::pi) * sigma * sigma * sigma);
        double const x2 = x * x;
        return c * ((0.8 - 4.0 / 7.0 * x2) / (sigma * sigma) * (r * r.transpose())
                    - (2.0 / 3.0 - 0.4 * x2 + x2 * x2 / 7.0) * Eigen::Matrix3d::Identity());
    }
    Eigen::Vector3d const rh = r / d;
    double const e = std::erf(x);
    double const g = 2.0 / std::sqrt(std::numbers::pi) * x * std::exp(-x * x);
    double const d3 = d * d * d;
    return ((3 * e - 3 * g - 2 * x * x * g) * (rh * rh.transpose())
            - (e - g) * Eigen::Matrix3d::Identity())
           / d3;
}

Eigen::Matrix3d DampingParams::tensor(Eigen::Vector3d const& r, Species a, Species b) const
{
    Eigen::Matrix3d t = smeared_dipole_tensor(r, std::hypot(sigma(a), sigma(b)));
    if (range_beta > 0)
    {
        double const r0 = range_beta * (vdw_radius(a) + vdw_radius(b));
        double const f = 1.0 / (1.0 + std::exp(-range_d * (r.norm() / r0 - 1.0)));
        t *= 1.0 - f;
    }
    return t;
}

namespace
{

Eigen::Vector3d site_position(long i, long j, Species s)
{
    Eigen::Vector2d p = static_cast<double>(i) * lattice::a1()
                        + static_cast<double>(j) * lattice::a2();
    if (s == Species::N)
        p += lattice::n_offset();
    return {p.x(), p.y(), 0.0};
}

// Sum over the infinite sheet of T(r_j - r_s) for targets of species t,
// within the cutoff and excluding the site itself.
Eigen::Matrix3d lattice_sum(Species s, Species t, double cutoff, DampingParams const& dp)
{
    double const a = lattice::lattice_constant();
    long const m = static_cast<long>(std::ceil(cutoff / a * 2.0 / std::sqrt(3.0))) + 2;
    Eigen::Vector3d const origin = site_position(0, 0, s);
    Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
    for (long j = -m; j <= m; ++j)
    {
        for (long i = -m; i <= m; ++i)
        {
            Eigen::Vector3d const r = site_position(i, j, t) - origin;
            double const d = r.norm();
            if (d < 1e-8 || d > cutoff)
                continue;
            sum += dp.tensor(r, s, t);
        }
    }
    return sum;
}
}  // namespace

PristineBaseline pristine_baseline(double alpha_hirsh_b,
                                   double alpha_hirsh_n,
                                   double cutoff,
                                   DampingParams const& dp)
{
    Eigen::Matrix3d const sbb = lattice_sum(Species::B, Species::B, cutoff, dp);
    Eigen::Matrix3d const sbn = lattice_sum(Species::B, Species::N, cutoff, dp);
    Eigen::Matrix3d const snb = lattice_sum(Species::N, Species::B, cutoff, dp);
    Eigen::Matrix3d const snn = lattice_sum(Species::N, Species::N, cutoff, dp);
    Eigen::Matrix3d const I = Eigen::Matrix3d::Identity();

    // Two coupled 3x3 tensor equations; solve directly as a 18-unknown system.
    // alpha_b = ab0 (I + sbb alpha_b + sbn alpha_n), same for n.
    Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Identity();
    m.block<3, 3>(0, 0) -= alpha_hirsh_b * sbb;
    m.block<3, 3>(0, 3) -= alpha_hirsh_b * sbn;
    m.block<3, 3>(3, 0) -= alpha_hirsh_n * snb;
    m.block<3, 3>(3, 3) -= alpha_hirsh_n * snn;
    Eigen::Matrix<double, 6, 3> rhs;
    rhs.block<3, 3>(0, 0) = alpha_hirsh_b * I;
    rhs.block<3, 3>(3, 0) = alpha_hirsh_n * I;
    Eigen::Matrix<double, 6, 3> const x = m.partialPivLu().solve(rhs);
    PristineBaseline out;
    out.alpha_b = x.block<3, 3>(0, 0);
    out.alpha_n = x.block<3, 3>(3, 0);
    out.alpha_b = 0.5 * (out.alpha_b + out.alpha_b.transpose()).eval();
    out.alpha_n = 0.5 * (out.alpha_n + out.alpha_n.transpose()).eval();
    return out;
}

std::array<double, 2> fit_pristine_hirshfeld(double target_b,
                                             double target_n,
                                             double cutoff,
                                             DampingParams const& dp)
{
    double ab = target_b, an = target_n;
    for (int it = 0; it < 200; ++it)
    {
        auto const base = pristine_baseline(ab, an, cutoff, dp);
        double const sb = base.scalar(Species::B);
        double const sn = base.scalar(Species::N);
        if (std::abs(sb - target_b) < 1e-12 * target_b && std::abs(sn - target_n) < 1e-12 * target_n)
            return {ab, an};
        ab *= target_b / sb;
        an *= target_n / sn;
    }
    throw ConvergenceError("fit_pristine_hirshfeld: no convergence", 0.0);
}

double c6_helium(Species s, double alpha_scalar, FreeAtomData const& fa)
{
    double const xi = characteristic_frequency(fa[s].alpha, fa[s].c6);
    double const xi_he = characteristic_frequency(fa.helium.alpha, fa.helium.c6);
    return c6_pair(alpha_scalar, xi, fa.helium.alpha, xi_he);
}

namespace
{
DispersionEntry make_entry(Species s,
                           Eigen::Matrix3d const& tensor,
                           double reference_scalar,
                           FreeAtomData const& fa)
{
    DispersionEntry e;
    e.species = s;
    e.alpha_tensor = tensor;
    e.alpha_scalar = tensor.trace() / 3.0;
    e.xi = characteristic_frequency(fa[s].alpha, fa[s].c6);
    e.c6_he = c6_helium(s, e.alpha_scalar, fa);
    e.anisotropy = 3.0 * tensor / tensor.trace();
    e.ripple_percent = 100.0 * (e.alpha_scalar / reference_scalar - 1.0);
    return e;
}
}  // namespace

DispersionTable screen_polarisabilities(MembraneModel const& model, ScreeningOptions const& opts)
{
    if (model.size() == 0)
        throw std::invalid_argument("screen_polarisabilities: empty model");
    if (!(opts.cutoff > 0))
        throw std::invalid_argument("screen_polarisabilities: cutoff must be positive");
    auto const& dp = opts.damping;
    auto const atoms = model.atoms();
    std::size_t const n = atoms.size();
    double const cut2 = opts.cutoff * opts.cutoff;

    PristineBaseline const base
        = pristine_baseline(opts.pristine_hirsh_b, opts.pristine_hirsh_n, opts.cutoff, dp);

    // Neighbour lists of model pairs within the cutoff.
    struct Neighbour
    {
        std::size_t j;
        Eigen::Matrix3d t;
    };
    std::vector<std::vector<Neighbour>> nbr(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = 0; j < n; ++j)
        {
            if (i == j)
                continue;
            Eigen::Vector3d const r = atoms[j].position - atoms[i].position;
            double const d2 = r.squaredNorm();
            if (d2 > cut2 || d2 < 1e-16)
                continue;
            nbr[i].push_back(
                {j, dp.tensor(r, atoms[i].species, atoms[j].species)});
        }
    }

    // Frozen environment: lattice sites outside region I.
    std::vector<Eigen::Matrix3d> env(n, Eigen::Matrix3d::Zero());
    if (opts.embed && model.side_length() > 0)
    {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (auto const& a : atoms)
        {
            xmin = std::min(xmin, a.position.x());
            xmax = std::max(xmax, a.position.x());
            ymin = std::min(ymin, a.position.y());
            ymax = std::max(ymax, a.position.y());
        }
        double const a = lattice::lattice_constant();
        double const reach = std::max({std::abs(xmin), std::abs(xmax), std::abs(ymin),
                                       std::abs(ymax)})
                             + opts.cutoff;
        long const m = static_cast<long>(std::ceil(reach / a * 2.0 / std::sqrt(3.0))) + 2;
        // Model origin is a hollow site: (c + 2/3)(a1 + a2) removed.
        Eigen::Vector2d const shift = (2.0 / 3.0) * (lattice::a1() + lattice::a2());
        for (long jj = -m; jj <= m; ++jj)
        {
            for (long ii = -m; ii <= m; ++ii)
            {
                for (Species s : {Species::B, Species::N})
                {
                    Eigen::Vector3d p = site_position(ii, jj, s);
                    p.x() -= shift.x();
                    p.y() -= shift.y();
                    if (model.in_region(p.head<2>()))
                        continue;
                    if (p.x() < xmin - opts.cutoff || p.x() > xmax + opts.cutoff
                        || p.y() < ymin - opts.cutoff || p.y() > ymax + opts.cutoff)
                        continue;
                    Eigen::Matrix3d const& alpha_env = base.tensor(s);
                    for (std::size_t i = 0; i < n; ++i)
                    {
                        Eigen::Vector3d const r = p - atoms[i].position;
                        double const d2 = r.squaredNorm();
                        if (d2 > cut2)
                            continue;
                        env[i] += dp.tensor(r, atoms[i].species, s) * alpha_env;
                    }
                }
            }
        }
    }

    Eigen::Matrix3d const I = Eigen::Matrix3d::Identity();
    std::vector<Eigen::Matrix3d> alpha(n);
    for (std::size_t i = 0; i < n; ++i)
        alpha[i] = atoms[i].hirshfeld_alpha * I;

    DispersionTable table;
    if (dp.solver == ScreeningSolver::fixed_point)
    {
        std::vector<Eigen::Matrix3d> next(n);
        double change = std::numeric_limits<double>::infinity();
        int it = 0;
        for (; it < dp.max_iterations; ++it)
        {
            change = 0;
            for (std::size_t i = 0; i < n; ++i)
            {
                Eigen::Matrix3d acc = I + env[i];
                for (auto const& nb : nbr[i])
                    acc.noalias() += nb.t * alpha[nb.j];
                Eigen::Matrix3d const target = atoms[i].hirshfeld_alpha * acc;
                change = std::max(change, (target - alpha[i]).cwiseAbs().maxCoeff());
                next[i] = (1.0 - dp.mixing) * alpha[i] + dp.mixing * target;
            }
            std::swap(alpha, next);
            if (change < dp.tolerance)
                break;
        }
        if (!(change < dp.tolerance))
            throw ConvergenceError("screen_polarisabilities: fixed point did not converge", change);
        table.iterations = it + 1;
        table.residual = change;
    }
    else
    {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3 * n, 3 * n);
        Eigen::MatrixXd rhs(3 * n, 3);
        for (std::size_t i = 0; i < n; ++i)
        {
            double const a0 = atoms[i].hirshfeld_alpha;
            for (auto const& nb : nbr[i])
                m.block<3, 3>(3 * i, 3 * nb.j) -= a0 * nb.t;
            rhs.block<3, 3>(3 * i, 0) = a0 * (I + env[i]);
        }
        Eigen::MatrixXd const x = m.partialPivLu().solve(rhs);
        for (std::size_t i = 0; i < n; ++i)
            alpha[i] = x.block<3, 3>(3 * i, 0);
        table.iterations = 1;
        table.residual = (m * x - rhs).cwiseAbs().maxCoeff();
    }

    table.entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        Eigen::Matrix3d const sym = 0.5 * (alpha[i] + alpha[i].transpose());
        table.entries.push_back(
            make_entry(atoms[i].species, sym, base.scalar(atoms[i].species), opts.free_atoms));
    }
    return table;
}

DispersionTable isotropic_table(MembraneModel const& model,
                                std::vector<double> const& alpha_scalar,
                                FreeAtomData const& fa)
{
    if (alpha_scalar.size() != model.size())
        throw std::invalid_argument("isotropic_table: size mismatch");
    DispersionTable t;
    for (std::size_t i = 0; i < model.size(); ++i)
    {
        Species const s = model[i].species;
        double const ref = s == Species::B ? pristine_alpha_b : pristine_alpha_n;
        t.entries.push_back(
            make_entry(s, alpha_scalar[i] * Eigen::Matrix3d::Identity(), ref, fa));
    }
    return t;
}

DispersionTable baseline_table(MembraneModel const& model, FreeAtomData const& fa)
{
    std::vector<double> a(model.size());
    for (std::size_t i = 0; i < model.size(); ++i)
        a[i] = model[i].species == Species::B ? pristine_alpha_b : pristine_alpha_n;
    return isotropic_table(model, a, fa);
}

//---------------------------------------------------------------------------//
// CSV
//---------------------------------------------------------------------------//

void write_dispersion_csv(std::ostream& os, DispersionTable const& table)
{
    auto const flags = os.flags();
    os << std::setprecision(17);
    os << "index,species";
    for (char r : {'x', 'y', 'z'})
        for (char c : {'x', 'y', 'z'})
            os << ",alpha_" << r << c;
    os << ",alpha_scalar,xi,c6_he,ripple_percent\n";
    for (std::size_t i = 0; i < table.size(); ++i)
    {
        auto const& e = table[i];
        os << i << ',' << to_string(e.species);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                os << ',' << e.alpha_tensor(r, c);
        os << ',' << e.alpha_scalar << ',' << e.xi << ',' << e.c6_he << ',' << e.ripple_percent
           << '\n';
    }
    os.flags(flags);
}

DispersionTable read_dispersion_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("index,species", 0) != 0)
        throw std::runtime_error("dispersion csv: missing header");
    DispersionTable t;
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        std::size_t idx;
        std::string sp;
        DispersionEntry e;
        if (!(row >> idx >> sp))
            throw std::runtime_error("dispersion csv: malformed row");
        e.species = parse_species(sp);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                row >> e.alpha_tensor(r, c);
        if (!(row >> e.alpha_scalar >> e.xi >> e.c6_he >> e.ripple_percent))
            throw std::runtime_error("dispersion csv: malformed row");
        if (idx != t.entries.size())
            throw std::runtime_error("dispersion csv: indices must be consecutive");
        e.anisotropy = 3.0 * e.alpha_tensor / e.alpha_tensor.trace();
        t.entries.push_back(e);
    }
    return t;
}

}  // namespace mwd
