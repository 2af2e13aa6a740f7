#include "etaxi/emissions.hpp"

#include "etaxi/error.hpp"

#include <stdexcept>

namespace etaxi::emissions {

void ElectricityMix::validate() const
{
    const double shares[] = {thermal, hydro, wind, solar, pumped_storage, nuclear};
    double sum = 0.0;
    for (double s : shares) {
        if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("electricity mix shares must lie in [0,1]");
        sum += s;
    }
    if (sum > 1.0 + 1e-3) throw ConfigError("electricity mix shares sum past 1");
}

std::vector<VehicleSpec> default_combustion_specs()
{
    return {{"Toyota Yaris L", 6.72}, {"Chevrolet Sonic", 7.59}, {"Ford Escape", 9.95}};
}

std::vector<VehicleSpec> default_electric_specs()
{
    return {{"Geely Emgrand EV", 15.8}, {"BYD Qin Pro DM", 17.5}};
}

double mean_consumption(std::span<const VehicleSpec> specs)
{
    if (specs.empty()) throw std::invalid_argument("at least one vehicle spec is required");
    double sum = 0.0;
    for (const auto& s : specs) {
        if (!(s.consumption_per_100km > 0.0)) {
            throw std::invalid_argument("vehicle '" + s.label + "' needs a positive consumption");
        }
        sum += s.consumption_per_100km;
    }
    return sum / static_cast<double>(specs.size());
}

double tv_co2_per_100km(std::span<const VehicleSpec> specs, const EmissionFactors& factors)
{
    return mean_consumption(specs) * factors.co2_per_litre_oil;
}

double ev_coal_per_100km(std::span<const VehicleSpec> specs, const ElectricityMix& mix, const EmissionFactors& factors)
{
    mix.validate();
    return mean_consumption(specs) * mix.thermal / factors.kwh_per_kg_coal;
}

double ev_co2_per_100km(std::span<const VehicleSpec> specs, const ElectricityMix& mix, const EmissionFactors& factors)
{
    return ev_coal_per_100km(specs, mix, factors) * factors.co2_per_kg_coal;
}

FleetComparison fleet_comparison(double total_fleet_km, double tv_rate, double ev_rate)
{
    if (!(total_fleet_km >= 0.0)) throw std::invalid_argument("fleet km must be >= 0");
    if (!(tv_rate > 0.0)) throw std::invalid_argument("combustion emission rate must be positive");
    FleetComparison c;
    c.fleet_km = total_fleet_km;
    c.tv_kg = total_fleet_km * tv_rate / 100.0;
    c.ev_kg = total_fleet_km * ev_rate / 100.0;
    c.reduction_fraction = 1.0 - ev_rate / tv_rate;
    return c;
}

FleetComparison default_fleet_comparison(double total_fleet_km)
{
    const auto tv = default_combustion_specs();
    const auto ev = default_electric_specs();
    return fleet_comparison(total_fleet_km, tv_co2_per_100km(tv), ev_co2_per_100km(ev));
}

} // namespace etaxi::emissions
