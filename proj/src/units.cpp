#include "mwd/units.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace mwd::units
{

Dimension dimension_of(Unit u)
{
    switch (u)
    {
    case Unit::bohr:
    case Unit::angstrom:
    case Unit::nanometre:
    case Unit::picometre:
    case Unit::metre: return Dimension::length;
    case Unit::hartree:
    case Unit::joule:
    case Unit::electron_volt: return Dimension::energy;
    case Unit::hartree_bohr6:
    case Unit::joule_metre6: return Dimension::c6;
    case Unit::bohr3:
    case Unit::angstrom3:
    case Unit::metre3: return Dimension::polarisability;
    case Unit::au_velocity:
    case Unit::metre_per_second: return Dimension::velocity;
    case Unit::elementary_charge:
    case Unit::coulomb: return Dimension::charge;
    case Unit::au_time:
    case Unit::second: return Dimension::time;
    }
    throw std::invalid_argument("unknown unit");
}

double atomic_units_per(Unit u)
{
    constexpr double b3 = bohr_m * bohr_m * bohr_m;
    constexpr double b6 = b3 * b3;
    switch (u)
    {
    case Unit::bohr: return 1.0;
    case Unit::angstrom: return angstrom_m / bohr_m;
    case Unit::nanometre: return 1e-9 / bohr_m;
    case Unit::picometre: return 1e-12 / bohr_m;
    case Unit::metre: return 1.0 / bohr_m;
    case Unit::hartree: return 1.0;
    case Unit::joule: return 1.0 / hartree_j;
    case Unit::electron_volt: return electron_volt_j / hartree_j;
    case Unit::hartree_bohr6: return 1.0;
    case Unit::joule_metre6: return 1.0 / (hartree_j * b6);
    case Unit::bohr3: return 1.0;
    case Unit::angstrom3: return 1e-30 / b3;
    case Unit::metre3: return 1.0 / b3;
    case Unit::au_velocity: return 1.0;
    case Unit::metre_per_second: return 1.0 / au_velocity_mps;
    case Unit::elementary_charge: return 1.0;
    case Unit::coulomb: return 1.0 / elementary_charge_c;
    case Unit::au_time: return 1.0;
    case Unit::second: return 1.0 / au_time_s;
    }
    throw std::invalid_argument("unknown unit");
}

double convert(double value, Unit from, Unit to)
{
    if (dimension_of(from) != dimension_of(to))
        throw std::invalid_argument("convert: incompatible unit dimensions");
    if (from == to)
        return value;
    return value * (atomic_units_per(from) / atomic_units_per(to));
}

Unit parse_unit(std::string_view s)
{
    static constexpr std::pair<std::string_view, Unit> table[] = {
        {"bohr", Unit::bohr},
        {"a0", Unit::bohr},
        {"A", Unit::angstrom},
        {"angstrom", Unit::angstrom},
        {"nm", Unit::nanometre},
        {"pm", Unit::picometre},
        {"m", Unit::metre},
        {"Ha", Unit::hartree},
        {"hartree", Unit::hartree},
        {"J", Unit::joule},
        {"eV", Unit::electron_volt},
        {"Ha*bohr^6", Unit::hartree_bohr6},
        {"J*m^6", Unit::joule_metre6},
        {"bohr^3", Unit::bohr3},
        {"A^3", Unit::angstrom3},
        {"m^3", Unit::metre3},
        {"au_velocity", Unit::au_velocity},
        {"m/s", Unit::metre_per_second},
        {"e", Unit::elementary_charge},
        {"C", Unit::coulomb},
        {"au_time", Unit::au_time},
        {"s", Unit::second},
    };
    for (auto const& [name, unit] : table)
        if (name == s)
            return unit;
    throw std::invalid_argument("unknown unit '" + std::string(s) + "'");
}

double de_broglie_wavelength(double mass_kg, double velocity_mps)
{
    if (!(mass_kg > 0.0) || !(velocity_mps > 0.0))
        throw std::domain_error("de_broglie_wavelength: mass and velocity must be positive");
    return planck_js / (mass_kg * velocity_mps);
}

}  // namespace mwd::units
