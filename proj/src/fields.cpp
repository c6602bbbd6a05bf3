#include "mwd/fields.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace mwd
{

namespace
{
constexpr double coincident_dist2 = 1e-12;
}

std::vector<FieldAtom> field_atoms(MembraneModel const& model, DispersionTable const& table)
{
    if (model.size() != table.size())
        throw std::invalid_argument("field_atoms: model and table sizes differ");
    std::vector<FieldAtom> out;
    out.reserve(model.size());
    for (std::size_t i = 0; i < model.size(); ++i)
    {
        FieldAtom a;
        a.position = model[i].position;
        a.c6 = table[i].c6_he;
        a.anisotropy = table[i].anisotropy;
        a.charge = model[i].charge;
        a.ring_index = model[i].ring_index;
        out.push_back(a);
    }
    return out;
}

PotentialField::PotentialField(std::vector<FieldAtom> atoms, FieldOptions opts)
    : atoms_(std::move(atoms)), opts_(opts)
{
    if (!(opts_.he_alpha0 >= 0))
        throw std::invalid_argument("PotentialField: negative helium polarisability");
    for (auto const& a : atoms_)
    {
        Eigen::Matrix3d const& d = a.anisotropy;
        double const packed[6] = {d(0, 0), d(1, 1), d(2, 2), d(0, 1), d(0, 2), d(1, 2)};
        block_.push(a.position.x(), a.position.y(), a.position.z(), a.c6, packed, a.charge);
    }
    block_.finalize();
}

PotentialField::PotentialField(MembraneModel const& model,
                               DispersionTable const& table,
                               FieldOptions opts)
    : PotentialField(field_atoms(model, table), opts)
{
}

PotentialField PotentialField::single_atom(double c6, double charge, FieldOptions opts)
{
    FieldAtom a;
    a.c6 = c6;
    a.charge = charge;
    a.ring_index = 0;
    return PotentialField({a}, opts);
}

PotentialField PotentialField::restricted(int max_ring) const
{
    std::vector<FieldAtom> kept;
    for (auto const& a : atoms_)
        if (a.ring_index <= max_ring)
            kept.push_back(a);
    return PotentialField(std::move(kept), opts_);
}

PotentialField PotentialField::with_options(FieldOptions opts) const
{
    return PotentialField(atoms_, opts);
}

void PotentialField::evaluate(Eigen::Vector3d const& p, bool gradient, kernels::FieldSums& sums) const
{
    double const pt[3] = {p.x(), p.y(), p.z()};
    kernels::field_sums(block_, pt, gradient, sums);
    if (block_.count() > 0 && sums.min_dist2 < coincident_dist2)
        throw std::domain_error("PotentialField: evaluation point coincides with an atom");
}

FieldSample PotentialField::sample(Eigen::Vector3d const& p, bool gradient) const
{
    kernels::FieldSums s;
    evaluate(p, gradient, s);
    FieldSample out;
    if (opts_.vdw)
    {
        out.vdw = s.u_vdw;
        if (gradient)
            out.gradient += Eigen::Vector3d(s.grad_vdw[0], s.grad_vdw[1], s.grad_vdw[2]);
    }
    if (opts_.electrostatic)
    {
        out.electrostatic = -0.5 * opts_.he_alpha0 * s.charge * s.charge;
        if (gradient)
            out.gradient -= opts_.he_alpha0 * s.charge
                            * Eigen::Vector3d(s.grad_charge[0], s.grad_charge[1], s.grad_charge[2]);
    }
    out.total = out.vdw + out.electrostatic;
    return out;
}

double PotentialField::u_vdw(Eigen::Vector3d const& p) const
{
    kernels::FieldSums s;
    evaluate(p, false, s);
    return s.u_vdw;
}

double PotentialField::u_electrostatic(Eigen::Vector3d const& p) const
{
    kernels::FieldSums s;
    evaluate(p, false, s);
    return -0.5 * opts_.he_alpha0 * s.charge * s.charge;
}

double PotentialField::u_total(Eigen::Vector3d const& p) const
{
    return sample(p, false).total;
}

Eigen::Vector3d PotentialField::grad_u(Eigen::Vector3d const& p) const
{
    return sample(p, true).gradient;
}

//---------------------------------------------------------------------------//

std::vector<ScanPoint> line_scan(PotentialField const& field,
                                 Eigen::Vector3d const& a,
                                 Eigen::Vector3d const& b,
                                 int n)
{
    if (n < 2)
        throw std::invalid_argument("line_scan: need at least two samples");
    std::vector<ScanPoint> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i)
    {
        Eigen::Vector3d const p = a + (b - a) * (double(i) / (n - 1));
        out.push_back({p, field.sample(p, false)});
    }
    return out;
}

std::vector<ScanPoint> plane_scan(PotentialField const& field,
                                  Eigen::Vector3d const& origin,
                                  Eigen::Vector3d const& u,
                                  Eigen::Vector3d const& v,
                                  int nu,
                                  int nv)
{
    if (nu < 2 || nv < 2)
        throw std::invalid_argument("plane_scan: need at least 2x2 samples");
    std::vector<ScanPoint> out;
    out.reserve(std::size_t(nu) * nv);
    for (int j = 0; j < nv; ++j)
        for (int i = 0; i < nu; ++i)
        {
            Eigen::Vector3d const p = origin + u * (double(i) / (nu - 1)) + v * (double(j) / (nv - 1));
            out.push_back({p, field.sample(p, false)});
        }
    return out;
}

void write_scan_csv(std::ostream& os, std::vector<ScanPoint> const& scan)
{
    auto const flags = os.flags();
    auto const prec = os.precision();
    os << "x,y,z,U_vdw,U_el,U_total\n" << std::setprecision(17);
    for (auto const& s : scan)
        os << s.position.x() << ',' << s.position.y() << ',' << s.position.z() << ','
           << s.value.vdw << ',' << s.value.electrostatic << ',' << s.value.total << '\n';
    os.flags(flags);
    os.precision(prec);
}

}  // namespace mwd
