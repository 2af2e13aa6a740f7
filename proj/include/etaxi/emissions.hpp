#pragma once

#include <span>
#include <string>
#include <vector>

namespace etaxi::emissions {

/// Shares of electricity generation by source (2016 China defaults).
struct ElectricityMix {
    double thermal = 0.721;
    double hydro = 0.1886;
    double wind = 0.0395;
    double solar = 0.0108;
    double pumped_storage = 0.005;
    double nuclear = 0.0349;

    /// Throws ConfigError if a share is outside [0,1] or the shares sum past 1.
    void validate() const;
};

struct EmissionFactors {
    double co2_per_litre_oil = 2.3;  // kg CO2 / L
    double co2_per_kg_coal = 2.38;   // kg CO2 / kg
    double kwh_per_kg_coal = 3.21;   // kWh / kg
};

/// Fuel use in L/100km for combustion cars, kWh/100km for electric ones.
struct VehicleSpec {
    std::string label;
    double consumption_per_100km = 0.0;
};

std::vector<VehicleSpec> default_combustion_specs();
std::vector<VehicleSpec> default_electric_specs();

double mean_consumption(std::span<const VehicleSpec> specs);

/// kg CO2 per 100 km, averaged over the combustion fleet.
double tv_co2_per_100km(std::span<const VehicleSpec> specs, const EmissionFactors& factors = {});

/// kg coal per 100 km for the electric fleet, all thermal generation taken as coal.
double ev_coal_per_100km(std::span<const VehicleSpec> specs, const ElectricityMix& mix = {},
                         const EmissionFactors& factors = {});

/// kg CO2 per 100 km for the electric fleet; renewables count as zero.
double ev_co2_per_100km(std::span<const VehicleSpec> specs, const ElectricityMix& mix = {},
                        const EmissionFactors& factors = {});

struct FleetComparison {
    double fleet_km = 0.0;
    double tv_kg = 0.0;
    double ev_kg = 0.0;
    double reduction_fraction = 0.0;
};

/// With zero km the reduction still comes from the two rates.
FleetComparison fleet_comparison(double total_fleet_km, double tv_rate_per_100km, double ev_rate_per_100km);

/// Comparison under the default vehicles, mix and factors.
FleetComparison default_fleet_comparison(double total_fleet_km);

} // namespace etaxi::emissions
