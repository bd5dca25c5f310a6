#pragma once

#include <cstddef>
#include <vector>

namespace quntherm {

// Cost model for choosing an insulation thickness: yearly conduction energy
// is converted to electricity behind a system efficiency and priced per kWh;
// insulation is priced per installed volume (per m^2 of facade).
struct EconomicParams {
    double insulation_price_per_m3 = 100.0;    // $/m^3
    double electricity_price_per_kwh = 0.218;  // $/kWh
    double system_efficiency = 0.8;            // delivered heat per unit electricity

    void validate() const;  // throws std::invalid_argument
};

// $/m^2 a year: (E[MJ] / 3.6 MJ-per-kWh) * price / efficiency.
double energy_cost(double annual_MJ_per_m2, const EconomicParams& econ);

// $/m^2: volume price * thickness.
double insulation_cost(double thickness_m, const EconomicParams& econ);

struct CostBreakdown {
    double thickness_m = 0.0;
    double annual_energy_MJ = 0.0;
    double energy_cost = 0.0;
    double insulation_cost = 0.0;
    double total_cost = 0.0;
};

struct ThicknessEnergy {
    double thickness_m = 0.0;
    double annual_energy_MJ = 0.0;  // heating + cooling transmission load
};

struct OptimumResult {
    std::vector<CostBreakdown> table;  // in the input's thickness order
    std::size_t optimum_index = 0;     // exhaustive argmin; ties -> smaller thickness
};

OptimumResult optimum_thickness(const std::vector<ThicknessEnergy>& candidates,
                                const EconomicParams& econ);

}  // namespace quntherm
