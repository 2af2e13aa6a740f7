#pragma once

#include "etaxi/geo.hpp"
#include "etaxi/ingest.hpp"
#include "etaxi/simkernel.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace etaxi::scenario {

struct KeyInfo {
    std::string_view key;
    std::string_view default_value;
    std::string_view description;
};

/// Every accepted scenario key with its default.
std::span<const KeyInfo> known_keys();

/// Raw `key = value` pairs over the defaults. Paths are resolved relative to
/// `base_dir`.
class ScenarioFile {
public:
    ScenarioFile();

    /// Parses `key = value` lines (`#` starts a comment). Unknown keys and
    /// malformed lines are collected and thrown together as one ConfigError.
    static ScenarioFile parse(std::istream& in, std::filesystem::path base_dir = {});
    static ScenarioFile load(const std::filesystem::path& path);

    /// Applies `key=value` overrides; throws ConfigError naming every bad one.
    void apply_overrides(const std::vector<std::string>& assignments);
    /// Throws ConfigError for an unknown key.
    void set(std::string_view key, std::string value);
    const std::string& get(std::string_view key) const;
    bool explicitly_set(std::string_view key) const;

    const std::filesystem::path& base_dir() const { return base_dir_; }

private:
    std::map<std::string, std::string, std::less<>> values_;
    std::map<std::string, bool, std::less<>> explicit_;
    std::filesystem::path base_dir_;
};

enum class DemandSource { synthetic, trips };

/// Typed view of a ScenarioFile.
struct Settings {
    DemandSource source = DemandSource::synthetic;
    std::filesystem::path trips_path;
    std::filesystem::path layout_path;
    std::uint64_t seed = 1;
    Timestamp horizon_start = 0;
    std::size_t horizon_hours = 24;
    geo::LonLat reference;
    std::size_t stations = 20;
    int chargers_per_station = 10;
    int kmeans_max_iter = 100;
    double kmeans_tol = 1e-4;
    sim::FleetSpec fleet;
    sim::FareModel fare;
    dispatch::DispatchConfig dispatch;
    sim::QueueingSettings queueing;
    double waitlist_tick_s = 60.0;
    bool check_invariants = false;
    ingest::SyntheticSpec synthetic;
    std::size_t synthetic_trips = 0;
    std::vector<double> synthetic_profile;
};

/// Converts and validates every key; all problems are reported in one
/// ConfigError. `source = trips` requires the `trips` key.
Settings resolve(const ScenarioFile& file);

/// Per-hour trip expectations for the synthetic generator: the profile
/// weights scaled to `total` trips over the horizon. In exact mode the hours
/// are apportioned integers summing to `total`.
std::vector<double> hourly_intensity(std::span<const double> profile, std::size_t hours, std::size_t total,
                                     bool exact);

ingest::SyntheticSpec synthetic_spec(const Settings& settings);

struct Built {
    sim::Scenario scenario;
    std::vector<ingest::Trip> trips;
    std::size_t trips_outside_horizon = 0;
};

/// Loads or generates trips, projects them, sites stations (unless a layout
/// file is given) and assembles the simulation scenario.
Built build(const Settings& settings);

} // namespace etaxi::scenario
