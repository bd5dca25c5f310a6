#include "quntherm/econ.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace quntherm {
namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void EconomicParams::validate() const {
    require(std::isfinite(insulation_price_per_m3) && insulation_price_per_m3 >= 0.0,
            "econ: insulation price must be >= 0");
    require(std::isfinite(electricity_price_per_kwh) && electricity_price_per_kwh >= 0.0,
            "econ: electricity price must be >= 0");
    require(std::isfinite(system_efficiency) && system_efficiency > 0.0,
            "econ: system efficiency must be > 0");
}

double energy_cost(double annual_MJ_per_m2, const EconomicParams& econ) {
    econ.validate();
    require(std::isfinite(annual_MJ_per_m2) && annual_MJ_per_m2 >= 0.0,
            "econ: annual energy must be >= 0");
    const double kwh = annual_MJ_per_m2 / 3.6;
    return kwh * econ.electricity_price_per_kwh / econ.system_efficiency;
}

double insulation_cost(double thickness_m, const EconomicParams& econ) {
    econ.validate();
    require(std::isfinite(thickness_m) && thickness_m >= 0.0, "econ: thickness must be >= 0");
    return econ.insulation_price_per_m3 * thickness_m;
}

OptimumResult optimum_thickness(const std::vector<ThicknessEnergy>& candidates,
                                const EconomicParams& econ) {
    econ.validate();
    require(!candidates.empty(), "econ: no thickness candidates");
    {
        std::vector<double> th;
        th.reserve(candidates.size());
        for (const auto& c : candidates) th.push_back(c.thickness_m);
        std::sort(th.begin(), th.end());
        require(std::adjacent_find(th.begin(), th.end()) == th.end(),
                "econ: duplicate thickness candidates");
    }

    OptimumResult result;
    result.table.reserve(candidates.size());
    for (const auto& c : candidates) {
        CostBreakdown row;
        row.thickness_m = c.thickness_m;
        row.annual_energy_MJ = c.annual_energy_MJ;
        row.energy_cost = energy_cost(c.annual_energy_MJ, econ);
        row.insulation_cost = insulation_cost(c.thickness_m, econ);
        row.total_cost = row.energy_cost + row.insulation_cost;
        result.table.push_back(row);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.table.size(); ++i) {
        const auto& cand = result.table[i];
        const auto& incumbent = result.table[best];
        if (cand.total_cost < incumbent.total_cost ||
            (cand.total_cost == incumbent.total_cost &&
             cand.thickness_m < incumbent.thickness_m))
            best = i;
    }
    result.optimum_index = best;
    return result;
}

}  // namespace quntherm
