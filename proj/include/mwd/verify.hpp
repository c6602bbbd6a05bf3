#pragma once

#include "mwd/pipeline.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mwd::verify
{

struct Criterion
{
    int id;
    std::string name;
    bool pass{false};
    bool skipped{false};
    std::string detail;
};

struct Options
{
    //! Run the quantum reductions (minutes per run).
    bool slow{true};
    int threads{1};
    //! Progress messages.
    std::ostream* log{nullptr};
    //! Restrict to these criterion ids (empty: all).
    std::vector<int> only;
};

// Reference values.
inline constexpr double table1_xi_he = 0.99;
inline constexpr double table1_c6_he = 1.42;
inline constexpr double table1_alpha_b = 18.09;
inline constexpr double table1_xi_b = 0.30;
inline constexpr double table1_c6_b = 75.23;
inline constexpr double table1_alpha_n = 3.70;
inline constexpr double table1_xi_n = 0.59;
inline constexpr double table1_c6_n = 14.62;

struct ReductionReference
{
    Species species;
    double velocity_mps;
    double classical_angstrom;
    double quantum_angstrom;
};

std::vector<ReductionReference> table2();

//! Shared state so that later criteria reuse earlier results.
struct Context
{
    Options opts;
    std::vector<DeltaRRow> classical;
    std::vector<DeltaRRow> quantum;
    std::map<std::string, MembraneModel> models;
    std::map<std::string, DispersionTable> tables;

    MembraneModel const& model(std::string const& hole);
    DispersionTable const& table(std::string const& hole);
    std::vector<DeltaRRow> const& classical_rows();
};

Criterion table1_consistency(Context& ctx);
Criterion quadrature_vs_london(Context& ctx);
Criterion classical_reduction(Context& ctx);
Criterion quantum_reduction(Context& ctx);
Criterion solver_physics(Context& ctx);
Criterion region_truncation(Context& ctx);
Criterion polarisability_ripple(Context& ctx);
Criterion eikonal_oracle(Context& ctx);
Criterion diffraction_oracles(Context& ctx);
Criterion qualitative_findings(Context& ctx);

std::vector<Criterion> run_all(Options const& opts);

//! "PASS [n] name: detail" lines; returns the number of failures.
int report(std::ostream& os, std::vector<Criterion> const& results);

}  // namespace mwd::verify
