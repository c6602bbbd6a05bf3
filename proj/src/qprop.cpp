#include "mwd/qprop.hpp"

#include "mwd/dispersion.hpp"
#include "mwd/fields.hpp"
#include "mwd/reduction_classical.hpp"
#include "mwd/units.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>

namespace mwd
{

using complex = std::complex<double>;

namespace
{
inline complex cmul(complex a, complex b)
{
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline complex cinv(complex a)
{
    double const d = a.real() * a.real() + a.imag() * a.imag();
    return {a.real() / d, -a.imag() / d};
}

// i * s * v for real s
inline complex imul(double s, complex v)
{
    return {-s * v.imag(), s * v.real()};
}
}  // namespace

//---------------------------------------------------------------------------//

GridSpec::GridSpec()
    : r_max(units::angstrom_to_bohr(60.0))
    , z_min(units::angstrom_to_bohr(-60.0))
    , z_max(units::angstrom_to_bohr(60.0))
{
}

void GridSpec::validate() const
{
    if (n_r < 16 || n_z < 16)
        throw std::invalid_argument("GridSpec: need at least 16 cells per axis");
    if (!(r_max > 0) || !(z_max > z_min))
        throw std::invalid_argument("GridSpec: empty extent");
}

WavePacketGrid::WavePacketGrid(GridSpec const& spec) : spec_(spec)
{
    spec_.validate();
    psi_.assign(std::size_t(spec_.n_r) * spec_.n_z, complex{});
}

double WavePacketGrid::norm() const
{
    double sum = 0;
    for (int i = 0; i < n_z(); ++i)
        for (int j = 0; j < n_r(); ++j)
            sum += std::norm(at(i, j)) * r(j);
    return sum * 2 * std::numbers::pi * dr() * dz();
}

complex WavePacketGrid::overlap(WavePacketGrid const& other) const
{
    complex sum{};
    for (int i = 0; i < n_z(); ++i)
        for (int j = 0; j < n_r(); ++j)
            sum += std::conj(at(i, j)) * other.at(i, j) * r(j);
    return sum * (2 * std::numbers::pi * dr() * dz());
}

double WavePacketGrid::variance_z() const
{
    double w = 0, m1 = 0, m2 = 0;
    for (int i = 0; i < n_z(); ++i)
        for (int j = 0; j < n_r(); ++j)
        {
            double const p = std::norm(at(i, j)) * r(j);
            w += p;
            m1 += p * z(i);
            m2 += p * z(i) * z(i);
        }
    double const mean = m1 / w;
    return m2 / w - mean * mean;
}

double WavePacketGrid::variance_r() const
{
    double w = 0, m2 = 0;
    for (int i = 0; i < n_z(); ++i)
        for (int j = 0; j < n_r(); ++j)
        {
            double const p = std::norm(at(i, j)) * r(j);
            w += p;
            m2 += p * r(j) * r(j);
        }
    return 0.5 * m2 / w;
}

double WavePacketGrid::boundary_ratio() const
{
    double peak = 0, edge = 0;
    for (int i = 0; i < n_z(); ++i)
        for (int j = 0; j < n_r(); ++j)
        {
            double const a = std::abs(at(i, j));
            peak = std::max(peak, a);
            if (j == n_r() - 1 || i == 0 || i == n_z() - 1)
                edge = std::max(edge, a);
        }
    return peak > 0 ? edge / peak : 0.0;
}

//---------------------------------------------------------------------------//

PropagationConfig::PropagationConfig()
    : sigma_r(units::angstrom_to_bohr(8.0))
    , sigma_z(units::angstrom_to_bohr(8.0))
    , start_offset(units::angstrom_to_bohr(60.0))
    , end_offset(units::angstrom_to_bohr(40.0))
    , charge(default_edge_charge)
    , he_alpha0(helium_alpha0)
    , vdw_radius_b(units::angstrom_to_bohr(1.92))
    , vdw_radius_n(units::angstrom_to_bohr(1.55))
{
}

void PropagationConfig::validate() const
{
    grid.validate();
    if (!(velocity_mps > 0))
        throw std::invalid_argument("PropagationConfig: velocity must be positive");
    if (!(sigma_r > 0) || !(sigma_z > 0))
        throw std::invalid_argument("PropagationConfig: packet widths must be positive");
    if (!(start_offset + end_offset > 0))
        throw std::invalid_argument("PropagationConfig: atom path has no length");
    if (!(timestep_divisor > 0) || !(tolerance > 0) || max_sweeps < 1)
        throw std::invalid_argument("PropagationConfig: bad solver settings");
}

double PropagationConfig::dt() const
{
    return grid.dr() / (timestep_divisor * units::mps_to_au(velocity_mps));
}

double PropagationConfig::c6(Species s) const
{
    auto const& given = s == Species::B ? c6_b : c6_n;
    if (given)
        return *given;
    return c6_helium(s, s == Species::B ? pristine_alpha_b : pristine_alpha_n);
}

WavePacketGrid initial_packet(PropagationConfig const& cfg, GridSpec const& grid)
{
    WavePacketGrid psi(grid);
    for (int i = 0; i < psi.n_z(); ++i)
        for (int j = 0; j < psi.n_r(); ++j)
        {
            double const r = psi.r(j), z = psi.z(i);
            psi.at(i, j) = std::exp(-r * r / (4 * cfg.sigma_r * cfg.sigma_r)
                                    - z * z / (4 * cfg.sigma_z * cfg.sigma_z));
        }
    if (psi.boundary_ratio() >= 1e-6)
        throw std::invalid_argument("initial_packet: the grid clips the packet (boundary/peak >= 1e-6)");
    double const scale = 1.0 / std::sqrt(psi.norm());
    for (auto& v : psi.data())
        v *= scale;
    return psi;
}

//---------------------------------------------------------------------------//

CrankNicolson::CrankNicolson(GridSpec const& grid, double dt, double tolerance, int max_sweeps)
    : grid_(grid), dt_(dt), tol_(tolerance), max_sweeps_(max_sweeps)
{
    grid_.validate();
    if (!(dt > 0))
        throw std::invalid_argument("CrankNicolson: dt must be positive");
    double const m = units::helium_mass_me;
    double const dr2 = grid_.dr() * grid_.dr();
    double const dz2 = grid_.dz() * grid_.dz();
    int const nr = grid_.n_r;
    kin_diag_.resize(nr);
    lo_.resize(nr);
    up_.resize(nr);
    for (int j = 0; j < nr; ++j)
    {
        double const rc = j + 0.5;
        kin_diag_[j] = (1.0 / (2 * m)) * (2.0 / dr2 + 2.0 / dz2);
        lo_[j] = -(1.0 / (2 * m)) * j / (rc * dr2);
        up_[j] = j + 1 < nr ? -(1.0 / (2 * m)) * (j + 1) / (rc * dr2) : 0.0;
    }
    kz_ = -(1.0 / (2 * m)) / dz2;
    std::size_t const n = std::size_t(nr) * grid_.n_z;
    rhs_.resize(n);
    inv_.resize(n);
    cprime_.resize(n);
    scratch_.resize(nr);
}

int CrankNicolson::step(WavePacketGrid& state, std::vector<double> const& potential)
{
    int const nr = grid_.n_r, nz = grid_.n_z;
    std::size_t const n = std::size_t(nr) * nz;
    if (state.n_r() != nr || state.n_z() != nz)
        throw std::invalid_argument("CrankNicolson::step: grid mismatch");
    if (!potential.empty() && potential.size() != n)
        throw std::invalid_argument("CrankNicolson::step: potential size mismatch");
    auto V = [&](std::size_t k) { return potential.empty() ? 0.0 : potential[k]; };

    double const h = 0.5 * dt_;  // A(+-) = 1 +- i h H
    auto& psi = state.data();

    // b = A- psi, and the factorisation of each diagonal block of A+.
    double bnorm2 = 0;
    for (int i = 0; i < nz; ++i)
    {
        std::size_t const row = std::size_t(i) * nr;
        for (int j = 0; j < nr; ++j)
        {
            std::size_t const k = row + j;
            double const diag = kin_diag_[j] + V(k);
            complex hpsi = diag * psi[k];
            if (j > 0)
                hpsi += lo_[j] * psi[k - 1];
            if (j + 1 < nr)
                hpsi += up_[j] * psi[k + 1];
            if (i > 0)
                hpsi += kz_ * psi[k - nr];
            if (i + 1 < nz)
                hpsi += kz_ * psi[k + nr];
            rhs_[k] = psi[k] - imul(h, hpsi);
            bnorm2 += std::norm(rhs_[k]);

            complex d{1.0, h * diag};
            if (j > 0)
                d -= cmul(complex{0.0, h * lo_[j]}, cprime_[k - 1]);
            inv_[k] = cinv(d);
            cprime_[k] = cmul(complex{0.0, h * up_[j]}, inv_[k]);
        }
    }
    double const bnorm = std::sqrt(bnorm2);
    complex const off{0.0, h * kz_};

    int sweep = 0;
    for (; sweep < max_sweeps_; ++sweep)
    {
        double delta2 = 0;
        for (int i = 0; i < nz; ++i)
        {
            std::size_t const row = std::size_t(i) * nr;
            // forward substitution on b_i - L x_{i-1} - U x_{i+1}
            complex prev{};
            for (int j = 0; j < nr; ++j)
            {
                std::size_t const k = row + j;
                complex nb{};
                if (i > 0)
                    nb += psi[k - nr];
                if (i + 1 < nz)
                    nb += psi[k + nr];
                complex v = rhs_[k] - cmul(off, nb);
                if (j > 0)
                    v -= cmul(complex{0.0, h * lo_[j]}, prev);
                prev = cmul(v, inv_[k]);
                scratch_[j] = prev;
            }
            for (int j = nr - 2; j >= 0; --j)
                scratch_[j] -= cmul(cprime_[row + j], scratch_[j + 1]);
            if (i > 0)
                for (int j = 0; j < nr; ++j)
                    delta2 += std::norm(scratch_[j] - psi[row + j]);
            std::copy(scratch_.begin(), scratch_.end(), psi.begin() + row);
        }
        residual_ = std::abs(off) * std::sqrt(delta2) / (bnorm > 0 ? bnorm : 1.0);
        if (residual_ < tol_)
            return sweep + 1;
    }
    throw SolverError("CrankNicolson::step: Gauss-Seidel did not converge", residual_);
}

//---------------------------------------------------------------------------//

double collision_potential(double d, double c6, double q2_alpha, double r_clamp)
{
    double const dd = std::max(d, r_clamp);
    double const s = dd * dd;
    double const is2 = 1.0 / (s * s);
    return -c6 * is2 / s - 0.5 * q2_alpha * is2;
}

CollisionResult propagate_collision(Species s, PropagationConfig const& cfg, SnapshotHook hook)
{
    cfg.validate();
    GridSpec const& g = cfg.grid;
    WavePacketGrid psi = initial_packet(cfg, g);
    double const dt = cfg.dt();
    double const v = units::mps_to_au(cfg.velocity_mps);
    double const path = cfg.start_offset + cfg.end_offset;
    int const steps = std::max(1, int(std::lround(path / (v * dt))));
    double const rad = cfg.vdw_radius(s);
    double const c6 = cfg.c6(s);
    double const q2a = cfg.charge * cfg.charge * cfg.he_alpha0;

    CrankNicolson cn(g, dt, cfg.tolerance, cfg.max_sweeps);
    std::vector<double> pot;
    if (cfg.potential)
        pot.resize(std::size_t(g.n_r) * g.n_z);

    CollisionResult res;
    auto record = [&](int step) {
        res.history.push_back({step, step * dt, psi.norm()});
    };
    if (cfg.history_every > 0)
        record(0);
    if (hook && cfg.snapshot_every > 0)
        hook(0, 0.0, psi);

    for (int n = 0; n < steps; ++n)
    {
        if (cfg.potential)
        {
            double const za = cfg.start_offset - v * (n + 0.5) * dt;
            for (int i = 0; i < g.n_z; ++i)
            {
                double const dzv = psi.z(i) - za;
                for (int j = 0; j < g.n_r; ++j)
                {
                    double const r = psi.r(j);
                    pot[std::size_t(i) * g.n_r + j] = collision_potential(std::sqrt(r * r + dzv * dzv), c6, q2a, rad);
                }
            }
        }
        res.max_sweeps_used = std::max(res.max_sweeps_used, cn.step(psi, pot));

        if (cfg.absorber)
        {
            double const za = cfg.start_offset - v * (n + 1) * dt;
            int const i0 = std::max(0, int(std::floor((za - rad - g.z_min) / g.dz())) - 1);
            int const i1 = std::min(g.n_z - 1, int(std::ceil((za + rad - g.z_min) / g.dz())) + 1);
            for (int i = i0; i <= i1; ++i)
            {
                double const dzv = psi.z(i) - za;
                for (int j = 0; j < g.n_r; ++j)
                {
                    double const r = psi.r(j);
                    if (r * r + dzv * dzv >= rad * rad)
                        break;
                    psi.at(i, j) = 0.0;
                }
            }
        }
        if (cfg.history_every > 0 && ((n + 1) % cfg.history_every == 0 || n + 1 == steps))
            record(n + 1);
        if (hook && cfg.snapshot_every > 0 && (n + 1) % cfg.snapshot_every == 0)
            hook(n + 1, (n + 1) * dt, psi);
    }
    res.steps = steps;
    res.n_final = psi.norm();
    return res;
}

double delta_r_quantum(double n_final, double sigma_r)
{
    if (!(n_final > 0))
        throw std::domain_error("delta_r_quantum: final norm must be positive");
    if (n_final >= 1)
        return 0.0;
    return std::sqrt(-std::log(n_final) * 2 * sigma_r * sigma_r);
}

//---------------------------------------------------------------------------//

namespace
{
constexpr char grid_magic[7] = {'M', 'W', 'G', 'R', 'I', 'D', '1'};

template <class T>
void put_le(std::ostream& os, T v)
{
    static_assert(std::endian::native == std::endian::little, "little-endian host assumed");
    os.write(reinterpret_cast<char const*>(&v), sizeof(T));
}

template <class T>
T get_le(std::istream& is)
{
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
        throw std::runtime_error("MWGRID1: truncated file");
    return v;
}
}  // namespace

void write_mwgrid(std::ostream& os, WavePacketGrid const& grid, double time)
{
    os.write(grid_magic, sizeof grid_magic);
    put_le<std::uint64_t>(os, grid.n_r());
    put_le<std::uint64_t>(os, grid.n_z());
    put_le<double>(os, grid.dr());
    put_le<double>(os, grid.dz());
    put_le<double>(os, time);
    for (int j = 0; j < grid.n_r(); ++j)
        for (int i = 0; i < grid.n_z(); ++i)
        {
            put_le<double>(os, grid.at(i, j).real());
            put_le<double>(os, grid.at(i, j).imag());
        }
}

WavePacketGrid read_mwgrid(std::istream& is, double* time)
{
    char magic[sizeof grid_magic];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, grid_magic, sizeof magic) != 0)
        throw std::runtime_error("MWGRID1: bad magic");
    GridSpec spec;
    spec.n_r = int(get_le<std::uint64_t>(is));
    spec.n_z = int(get_le<std::uint64_t>(is));
    double const dr = get_le<double>(is);
    double const dz = get_le<double>(is);
    double const t = get_le<double>(is);
    spec.r_max = dr * spec.n_r;
    spec.z_min = -0.5 * dz * spec.n_z;
    spec.z_max = 0.5 * dz * spec.n_z;
    WavePacketGrid grid(spec);
    for (int j = 0; j < spec.n_r; ++j)
        for (int i = 0; i < spec.n_z; ++i)
        {
            double const re = get_le<double>(is);
            double const im = get_le<double>(is);
            grid.at(i, j) = {re, im};
        }
    if (time)
        *time = t;
    return grid;
}

void write_norm_history_csv(std::ostream& os, std::vector<NormSample> const& history)
{
    auto const prec = os.precision();
    os << "step,time,norm\n" << std::setprecision(17);
    for (auto const& h : history)
        os << h.step << ',' << h.time << ',' << h.norm << '\n';
    os.precision(prec);
}

}  // namespace mwd
