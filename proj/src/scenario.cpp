#include "etaxi/scenario.hpp"

#include "etaxi/csv.hpp"
#include "etaxi/error.hpp"

#include <algorithm>
#include <iterator>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

namespace etaxi::scenario {

namespace {

constexpr KeyInfo key_table[] = {
    {"source", "synthetic", "demand source: synthetic | trips"},
    {"trips", "", "trips CSV (required when source = trips)"},
    {"layout", "", "station layout CSV; empty means k-means over trip origins"},
    {"seed", "1", "seed for the synthetic generator and k-means seeding"},
    {"horizon_start", "20160502000000", "first instant of the simulated horizon (YYYYMMDDHHMMSS)"},
    {"horizon_hours", "24", "horizon length in hours"},
    {"ref_lon", "116.397", "projection origin longitude"},
    {"ref_lat", "39.909", "projection origin latitude"},
    {"stations", "20", "number of charging stations k"},
    {"chargers_per_station", "10", "chargers s at every station"},
    {"kmeans_max_iter", "100", "k-means iteration cap"},
    {"kmeans_tol", "0.0001", "k-means centroid shift tolerance, km"},
    {"fleet_size", "9000", "electric taxis"},
    {"battery_kwh", "38", "battery capacity, kWh"},
    {"range_km", "250", "driving range on a full battery, km"},
    {"speed_kmh", "30", "constant travel speed, km/h"},
    {"charge_power_kw", "60", "charger power, kW"},
    {"initial_soc", "1", "state of charge at the horizon start"},
    {"fare_flag", "13", "fare flag fall"},
    {"fare_per_km", "2.3", "fare per loaded km"},
    {"dispatch.x", "0.01", "scale x in f(demand) = x sqrt(demand)"},
    {"dispatch.w1", "-1", "weight of the normalized pickup distance"},
    {"dispatch.w2", "-0.5", "weight of the normalized driver income"},
    {"dispatch.w3", "1", "weight of the charging match degree"},
    {"dispatch.w4", "0", "weight of the normalized empty time"},
    {"dispatch.soc_charge_threshold", "0.2", "post-trip SOC below which a taxi goes to charge"},
    {"dispatch.escalation_min", "5", "waitlist minutes before adjacent sub-regions are searched"},
    {"dispatch.cancel_min", "30", "waitlist minutes before a request is cancelled"},
    {"dispatch.reachability_buffer", "0.1", "energy safety margin as a fraction"},
    {"dispatch.adjacency", "3", "adjacent sub-regions searched on escalation"},
    {"queue.xi_convention", "cv", "cv | reciprocal"},
    {"queue.c2", "-1", "match degree coefficient C2"},
    {"queue.c3", "1", "match degree coefficient C3"},
    {"queue.sample_window", "100", "charging-time samples kept per station"},
    {"waitlist_tick_s", "60", "waitlist scan cadence, seconds"},
    {"check_invariants", "false", "verify simulation invariants after every event"},
    {"synthetic.taxis", "20000", "taxis recording trajectories in the synthetic dataset"},
    {"synthetic.trips", "150000", "expected trips over the horizon"},
    {"synthetic.poisson", "true", "Poisson hourly counts (false: exact apportioned counts)"},
    {"synthetic.profile",
     "2,1.2,0.8,0.6,0.6,1,2.5,4.5,5.5,5,4.5,4.5,4.5,4.5,4.5,4.5,5,5.5,5.5,5,4.5,4,3.5,2.5",
     "relative hourly demand weights, cycled over the horizon"},
    {"synthetic.hotspots", "8", "number of Gaussian demand hotspots"},
    {"synthetic.hotspot_sigma_km", "3", "hotspot standard deviation, km"},
    {"synthetic.extent_km", "15", "half-width of the square service area, km"},
    {"synthetic.speed_kmh", "25", "speed used to time synthetic trips"},
    {"synthetic.missing_coordinate_rate", "0", "fraction of rows written without coordinates"},
    {"synthetic.sample_interval_s", "30", "GPS sampling interval, seconds"},
};

bool is_known(std::string_view key)
{
    return std::any_of(std::begin(key_table), std::end(key_table), [&](const KeyInfo& k) { return k.key == key; });
}

std::string join(const std::vector<std::string>& items)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < items.size(); ++i) os << (i ? "; " : "") << items[i];
    return os.str();
}

} // namespace

std::span<const KeyInfo> known_keys() { return key_table; }

ScenarioFile::ScenarioFile()
{
    for (const auto& k : key_table) values_.emplace(std::string(k.key), std::string(k.default_value));
}

void ScenarioFile::set(std::string_view key, std::string value)
{
    if (!is_known(key)) throw ConfigError("unknown key '" + std::string(key) + "'");
    values_.find(key)->second = std::move(value);
    explicit_[std::string(key)] = true;
}

const std::string& ScenarioFile::get(std::string_view key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown key '" + std::string(key) + "'");
    return it->second;
}

bool ScenarioFile::explicitly_set(std::string_view key) const { return explicit_.count(key) > 0; }

ScenarioFile ScenarioFile::parse(std::istream& in, std::filesystem::path base_dir)
{
    ScenarioFile file;
    file.base_dir_ = std::move(base_dir);
    std::vector<std::string> problems;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view text = line;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = csv::trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            problems.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        const auto key = csv::trim(text.substr(0, eq));
        const auto value = csv::trim(text.substr(eq + 1));
        if (!is_known(key)) {
            problems.push_back("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
            continue;
        }
        file.set(key, std::string(value));
    }
    if (!problems.empty()) throw ConfigError(join(problems));
    return file;
}

ScenarioFile ScenarioFile::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
    return parse(in, path.parent_path());
}

void ScenarioFile::apply_overrides(const std::vector<std::string>& assignments)
{
    std::vector<std::string> problems;
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) {
            problems.push_back("override '" + a + "' is not key=value");
            continue;
        }
        const auto key = csv::trim(std::string_view(a).substr(0, eq));
        if (!is_known(key)) {
            problems.push_back("unknown key '" + std::string(key) + "'");
            continue;
        }
        set(key, std::string(csv::trim(std::string_view(a).substr(eq + 1))));
    }
    if (!problems.empty()) throw ConfigError(join(problems));
}

namespace {

/// Typed reads that record failures instead of throwing at the first one.
class Reader {
public:
    explicit Reader(const ScenarioFile& f) : file_(f) {}

    double real(std::string_view key)
    {
        const auto v = csv::parse_number<double>(file_.get(key));
        if (!v || !std::isfinite(*v)) return fail<double>(key, "a finite number");
        return *v;
    }

    std::int64_t integer(std::string_view key)
    {
        const auto v = csv::parse_number<std::int64_t>(file_.get(key));
        if (!v) return fail<std::int64_t>(key, "an integer");
        return *v;
    }

    std::size_t count(std::string_view key, std::size_t min = 0)
    {
        const auto v = csv::parse_number<std::int64_t>(file_.get(key));
        if (!v || *v < static_cast<std::int64_t>(min)) {
            return fail<std::size_t>(key, "an integer >= " + std::to_string(min));
        }
        return static_cast<std::size_t>(*v);
    }

    bool boolean(std::string_view key)
    {
        const auto& v = file_.get(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        return fail<bool>(key, "true or false");
    }

    std::vector<double> list(std::string_view key)
    {
        std::vector<double> out;
        for (auto part : csv::split(file_.get(key))) {
            const auto v = csv::parse_number<double>(part);
            if (!v || !std::isfinite(*v)) return fail<std::vector<double>>(key, "a comma-separated list of numbers");
            out.push_back(*v);
        }
        return out;
    }

    std::filesystem::path path(std::string_view key)
    {
        const auto& v = file_.get(key);
        if (v.empty()) return {};
        std::filesystem::path p(v);
        if (p.is_relative() && !file_.base_dir().empty()) p = file_.base_dir() / p;
        return p;
    }

    void check(bool ok, std::string problem)
    {
        if (!ok) problems.push_back(std::move(problem));
    }

    std::vector<std::string> problems;

private:
    template <typename T>
    T fail(std::string_view key, const std::string& expected)
    {
        problems.push_back("key '" + std::string(key) + "' must be " + expected + " (got '" + file_.get(key) + "')");
        return T{};
    }

    const ScenarioFile& file_;
};

} // namespace

Settings resolve(const ScenarioFile& file)
{
    Reader r(file);
    Settings s;

    const auto& source = file.get("source");
    if (source == "synthetic") {
        s.source = DemandSource::synthetic;
    } else if (source == "trips") {
        s.source = DemandSource::trips;
    } else {
        r.check(false, "key 'source' must be synthetic or trips (got '" + source + "')");
    }
    s.trips_path = r.path("trips");
    if (s.source == DemandSource::trips && s.trips_path.empty()) r.check(false, "missing required key 'trips'");
    s.layout_path = r.path("layout");

    s.seed = static_cast<std::uint64_t>(r.integer("seed"));
    const auto start = parse_timestamp(file.get("horizon_start"));
    r.check(start.has_value(), "key 'horizon_start' must be YYYYMMDDHHMMSS (got '" + file.get("horizon_start") + "')");
    s.horizon_start = start.value_or(0);
    s.horizon_hours = r.count("horizon_hours", 1);
    s.reference = {r.real("ref_lon"), r.real("ref_lat")};
    r.check(std::abs(s.reference.lon) <= 180.0 && std::abs(s.reference.lat) < 90.0, "reference lon/lat out of range");

    s.stations = r.count("stations", 1);
    s.chargers_per_station = static_cast<int>(r.count("chargers_per_station", 1));
    s.kmeans_max_iter = static_cast<int>(r.count("kmeans_max_iter", 1));
    s.kmeans_tol = r.real("kmeans_tol");

    s.fleet.taxis = r.count("fleet_size", 1);
    s.fleet.battery_kwh = r.real("battery_kwh");
    s.fleet.range_km = r.real("range_km");
    s.fleet.speed_kmh = r.real("speed_kmh");
    s.fleet.charge_power_kw = r.real("charge_power_kw");
    s.fleet.initial_soc = r.real("initial_soc");
    s.fare.flag_fall = r.real("fare_flag");
    s.fare.per_km = r.real("fare_per_km");

    s.dispatch.x = r.real("dispatch.x");
    s.dispatch.w1 = r.real("dispatch.w1");
    s.dispatch.w2 = r.real("dispatch.w2");
    s.dispatch.w3 = r.real("dispatch.w3");
    s.dispatch.w4 = r.real("dispatch.w4");
    s.dispatch.soc_charge_threshold = r.real("dispatch.soc_charge_threshold");
    s.dispatch.escalation_min = r.real("dispatch.escalation_min");
    s.dispatch.cancel_min = r.real("dispatch.cancel_min");
    s.dispatch.reachability_buffer = r.real("dispatch.reachability_buffer");
    s.dispatch.adjacency = r.count("dispatch.adjacency");
    s.dispatch.c2 = r.real("queue.c2");
    s.dispatch.c3 = r.real("queue.c3");

    const auto& conv = file.get("queue.xi_convention");
    if (conv == "cv") {
        s.queueing.convention = queueing::XiConvention::cv;
    } else if (conv == "reciprocal") {
        s.queueing.convention = queueing::XiConvention::reciprocal;
    } else {
        r.check(false, "key 'queue.xi_convention' must be cv or reciprocal (got '" + conv + "')");
    }
    s.queueing.sample_window = r.count("queue.sample_window", 1);
    s.waitlist_tick_s = r.real("waitlist_tick_s");
    s.check_invariants = r.boolean("check_invariants");

    s.synthetic_trips = r.count("synthetic.trips");
    s.synthetic_profile = r.list("synthetic.profile");
    r.check(!s.synthetic_profile.empty() &&
                std::all_of(s.synthetic_profile.begin(), s.synthetic_profile.end(), [](double w) { return w >= 0.0; }) &&
                std::accumulate(s.synthetic_profile.begin(), s.synthetic_profile.end(), 0.0) > 0.0,
            "key 'synthetic.profile' needs non-negative weights with a positive sum");
    s.synthetic.taxis = r.count("synthetic.taxis", 1);
    s.synthetic.poisson_counts = r.boolean("synthetic.poisson");
    s.synthetic.hotspot_count = r.count("synthetic.hotspots", 1);
    s.synthetic.hotspot_sigma_km = r.real("synthetic.hotspot_sigma_km");
    s.synthetic.extent_km = r.real("synthetic.extent_km");
    s.synthetic.speed_kmh = r.real("synthetic.speed_kmh");
    s.synthetic.missing_coordinate_rate = r.real("synthetic.missing_coordinate_rate");
    s.synthetic.sample_interval_s = r.integer("synthetic.sample_interval_s");

    r.check(s.fleet.battery_kwh > 0.0, "key 'battery_kwh' must be positive");
    r.check(s.fleet.range_km > 0.0, "key 'range_km' must be positive");
    r.check(s.fleet.speed_kmh > 0.0, "key 'speed_kmh' must be positive");
    r.check(s.fleet.charge_power_kw > 0.0, "key 'charge_power_kw' must be positive");
    r.check(s.fleet.initial_soc > 0.0 && s.fleet.initial_soc <= 1.0, "key 'initial_soc' must lie in (0,1]");
    r.check(s.waitlist_tick_s > 0.0, "key 'waitlist_tick_s' must be positive");
    r.check(s.kmeans_tol >= 0.0, "key 'kmeans_tol' must be >= 0");
    r.check(s.dispatch.adjacency < s.stations || !s.layout_path.empty(),
            "key 'dispatch.adjacency' must be smaller than 'stations'");
    try {
        s.dispatch.validate();
    } catch (const ConfigError& e) {
        r.problems.emplace_back(e.what());
    }

    s.synthetic.horizon_start = s.horizon_start;
    s.synthetic.horizon_hours = s.horizon_hours;
    s.synthetic.reference = s.reference;
    if (!s.synthetic_profile.empty()) {
        s.synthetic.hourly_trips =
            hourly_intensity(s.synthetic_profile, s.horizon_hours, s.synthetic_trips, !s.synthetic.poisson_counts);
    }

    if (!r.problems.empty()) throw ConfigError(join(r.problems));
    return s;
}

std::vector<double> hourly_intensity(std::span<const double> profile, std::size_t hours, std::size_t total, bool exact)
{
    std::vector<double> w(hours);
    for (std::size_t h = 0; h < hours; ++h) w[h] = profile[h % profile.size()];
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(sum > 0.0)) throw ConfigError("demand profile has no positive weight over the horizon");

    std::vector<double> out(hours);
    for (std::size_t h = 0; h < hours; ++h) out[h] = static_cast<double>(total) * w[h] / sum;
    if (!exact) return out;

    // Largest-remainder apportionment so the hourly counts sum to `total`.
    std::vector<std::size_t> order(hours);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t assigned = 0;
    std::vector<double> remainder(hours);
    for (std::size_t h = 0; h < hours; ++h) {
        const double fl = std::floor(out[h]);
        remainder[h] = out[h] - fl;
        out[h] = fl;
        assigned += static_cast<std::size_t>(fl);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; assigned < total; ++i, ++assigned) out[order[i % hours]] += 1.0;
    return out;
}

ingest::SyntheticSpec synthetic_spec(const Settings& s) { return s.synthetic; }

Built build(const Settings& s)
{
    Built b;
    if (s.source == DemandSource::synthetic) {
        const auto generated = ingest::generate_synthetic(synthetic_spec(s), s.seed);
        b.trips = ingest::extract_trips(generated.records).trips;
    } else {
        b.trips = ingest::read_trips_file(s.trips_path.string());
    }

    const Timestamp end = s.horizon_start + static_cast<Timestamp>(s.horizon_hours) * 3600;
    std::vector<geo::GeoPoint> origins;
    for (const auto& t : b.trips) {
        if (t.start_time < s.horizon_start || t.start_time >= end) {
            ++b.trips_outside_horizon;
            continue;
        }
        sim::Demand d;
        d.origin = geo::project(t.origin, s.reference);
        d.destination = geo::project(t.destination, s.reference);
        d.time_s = static_cast<double>(t.start_time - s.horizon_start);
        origins.push_back(d.origin);
        b.scenario.demands.push_back(d);
    }

    if (!s.layout_path.empty()) {
        b.scenario.layout = geo::read_layout_file(s.layout_path.string());
    } else {
        geo::KMeansOptions km;
        km.k = s.stations;
        km.seed = s.seed;
        km.max_iter = s.kmeans_max_iter;
        km.tol = s.kmeans_tol;
        b.scenario.layout = geo::site_stations(origins, km, s.chargers_per_station);
    }

    b.scenario.fleet = s.fleet;
    b.scenario.dispatch = s.dispatch;
    b.scenario.queueing = s.queueing;
    b.scenario.fare = s.fare;
    b.scenario.waitlist_tick_s = s.waitlist_tick_s;
    b.scenario.check_invariants = s.check_invariants;
    b.scenario.validate();
    return b;
}

} // namespace etaxi::scenario
