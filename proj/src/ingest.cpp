#include "etaxi/ingest.hpp"

#include "etaxi/csv.hpp"
#include "etaxi/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <limits>
#include <random>
#include <utility>

namespace etaxi::ingest {

namespace {

bool is_header(std::string_view line)
{
    const auto first = csv::trim(csv::split(line).front());
    return !first.empty() && !(first.front() >= '0' && first.front() <= '9') && first.front() != '-' &&
           first.front() != '+';
}

template <typename Fn>
void for_each_data_line(std::istream& in, Fn&& fn)
{
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        if (first) {
            first = false;
            if (is_header(line)) continue;
        }
        fn(std::string_view(line), line_no);
    }
}

std::ifstream open_or_throw(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return in;
}

Timestamp timestamp_field(std::string_view text, std::size_t line_no, const char* name)
{
    const auto t = parse_timestamp(csv::trim(text));
    if (!t) throw ParseError(line_no, std::string("unparseable ") + name + " '" + std::string(text) + "'");
    return *t;
}

geo::LonLat lonlat_fields(std::string_view lon_text, std::string_view lat_text, std::size_t line_no)
{
    const auto lon = csv::parse_number<double>(lon_text);
    const auto lat = csv::parse_number<double>(lat_text);
    if (!lon || !lat) throw ParseError(line_no, "unparseable coordinates");
    if (!(*lon >= -180.0 && *lon <= 180.0)) throw ParseError(line_no, "longitude out of range");
    if (!(*lat >= -90.0 && *lat <= 90.0)) throw ParseError(line_no, "latitude out of range");
    return {*lon, *lat};
}

} // namespace

TaxiRecord parse_record(std::string_view line, std::size_t line_no)
{
    const auto fields = csv::split(csv::trim(line));
    if (fields.size() != 5) {
        throw ParseError(line_no, "expected 5 fields, got " + std::to_string(fields.size()));
    }

    TaxiRecord r;
    const auto id = csv::parse_number<TaxiId>(fields[0]);
    if (!id) throw ParseError(line_no, "unparseable taxi id '" + std::string(fields[0]) + "'");
    r.taxi_id = *id;
    r.timestamp = timestamp_field(fields[1], line_no, "timestamp");

    const bool lon_blank = csv::trim(fields[2]).empty();
    const bool lat_blank = csv::trim(fields[3]).empty();
    if (lon_blank != lat_blank) throw ParseError(line_no, "only one coordinate present");
    if (!lon_blank) r.position = lonlat_fields(fields[2], fields[3], line_no);

    const auto load = csv::trim(fields[4]);
    if (load == "0") {
        r.load = 0;
    } else if (load == "1") {
        r.load = 1;
    } else {
        throw ParseError(line_no, "invalid load '" + std::string(load) + "' (expected 0 or 1)");
    }
    return r;
}

std::string serialize_record(const TaxiRecord& r)
{
    std::string out = std::to_string(r.taxi_id);
    out += ',';
    out += format_timestamp(r.timestamp);
    out += ',';
    if (r.position) {
        out += csv::format_double(r.position->lon);
        out += ',';
        out += csv::format_double(r.position->lat);
    } else {
        out += ',';
    }
    out += ',';
    out += r.load == 1 ? '1' : '0';
    return out;
}

std::vector<TaxiRecord> read_records(std::istream& in)
{
    std::vector<TaxiRecord> out;
    for_each_data_line(in, [&](std::string_view line, std::size_t no) { out.push_back(parse_record(line, no)); });
    return out;
}

std::vector<TaxiRecord> read_records_file(const std::string& path)
{
    auto in = open_or_throw(path);
    return read_records(in);
}

void write_records(std::ostream& out, std::span<const TaxiRecord> records)
{
    out << records_header << '\n';
    for (const auto& r : records) out << serialize_record(r) << '\n';
}

ExtractionResult extract_trips(std::span<const TaxiRecord> records)
{
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (records[a].taxi_id != records[b].taxi_id) return records[a].taxi_id < records[b].taxi_id;
        return records[a].timestamp < records[b].timestamp;
    });

    ExtractionResult result;
    std::vector<const TaxiRecord*> rows;

    // Nearest row with coordinates within the fill window; earlier row wins ties.
    const auto resolve = [&](std::size_t idx) -> std::optional<geo::LonLat> {
        if (rows[idx]->position) return rows[idx]->position;
        const Timestamp t = rows[idx]->timestamp;
        std::size_t lo = idx;
        std::size_t hi = idx + 1;
        while (true) {
            const bool lo_ok = lo > 0 && t - rows[lo - 1]->timestamp <= coordinate_fill_window_s;
            const bool hi_ok = hi < rows.size() && rows[hi]->timestamp - t <= coordinate_fill_window_s;
            if (!lo_ok && !hi_ok) return std::nullopt;
            const bool take_lo = lo_ok && (!hi_ok || t - rows[lo - 1]->timestamp <= rows[hi]->timestamp - t);
            if (take_lo) {
                --lo;
                if (rows[lo]->position) return rows[lo]->position;
            } else {
                if (rows[hi]->position) return rows[hi]->position;
                ++hi;
            }
        }
    };

    std::size_t g = 0;
    while (g < order.size()) {
        const TaxiId taxi = records[order[g]].taxi_id;
        rows.clear();
        for (; g < order.size() && records[order[g]].taxi_id == taxi; ++g) {
            const TaxiRecord& r = records[order[g]];
            if (!rows.empty() && rows.back()->timestamp == r.timestamp) {
                ++result.duplicates_dropped;
                continue;
            }
            rows.push_back(&r);
        }

        std::optional<std::size_t> open;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const int prev = rows[i - 1]->load;
            const int cur = rows[i]->load;
            if (prev == 0 && cur == 1) {
                ++result.pickups;
                open = i;
            } else if (prev == 1 && cur == 0) {
                if (!open) {
                    ++result.truncated_dropoffs;
                    continue;
                }
                const std::size_t start = *std::exchange(open, std::nullopt);
                if (rows[i]->timestamp - rows[start]->timestamp < min_trip_duration_s) {
                    ++result.excluded;
                    ++result.too_short;
                    continue;
                }
                const auto origin = resolve(start);
                const auto destination = resolve(i);
                if (!origin || !destination) {
                    ++result.excluded;
                    ++result.missing_position;
                    continue;
                }
                result.trips.push_back(
                    {taxi, *origin, *destination, rows[start]->timestamp, rows[i]->timestamp});
            }
        }
        if (open) {
            ++result.excluded;
            ++result.unterminated;
        }
    }
    return result;
}

std::int64_t DemandCurve::total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }

std::int64_t DemandCurve::at(Timestamp t) const
{
    if (t < horizon_start) return 0;
    const auto bin = static_cast<std::size_t>((t - horizon_start) / 3600);
    return bin < counts.size() ? counts[bin] : 0;
}

DemandCurve build_demand_curve(std::span<const Trip> trips, Timestamp horizon_start, std::optional<std::size_t> hours)
{
    DemandCurve curve;
    curve.horizon_start = horizon_start;
    if (hours) curve.counts.assign(*hours, 0);
    for (const Trip& trip : trips) {
        if (trip.start_time < horizon_start) {
            throw DataError("trip starting " + format_timestamp(trip.start_time) + " precedes the horizon start " +
                            format_timestamp(horizon_start));
        }
        const auto bin = static_cast<std::size_t>((trip.start_time - horizon_start) / 3600);
        if (bin >= curve.counts.size()) {
            if (hours) {
                throw DataError("trip starting " + format_timestamp(trip.start_time) + " is past the horizon end");
            }
            curve.counts.resize(bin + 1, 0);
        }
        ++curve.counts[bin];
    }
    return curve;
}

void write_trips(std::ostream& out, std::span<const Trip> trips)
{
    out << trips_header << '\n';
    for (const Trip& t : trips) {
        out << t.taxi_id << ',' << format_timestamp(t.start_time) << ',' << format_timestamp(t.end_time) << ','
            << csv::format_double(t.origin.lon) << ',' << csv::format_double(t.origin.lat) << ','
            << csv::format_double(t.destination.lon) << ',' << csv::format_double(t.destination.lat) << '\n';
    }
}

std::vector<Trip> read_trips(std::istream& in)
{
    std::vector<Trip> out;
    for_each_data_line(in, [&](std::string_view line, std::size_t no) {
        const auto f = csv::split(csv::trim(line));
        if (f.size() != 7) throw ParseError(no, "expected 7 fields, got " + std::to_string(f.size()));
        Trip t;
        const auto id = csv::parse_number<TaxiId>(f[0]);
        if (!id) throw ParseError(no, "unparseable taxi id");
        t.taxi_id = *id;
        t.start_time = timestamp_field(f[1], no, "start_time");
        t.end_time = timestamp_field(f[2], no, "end_time");
        if (t.end_time < t.start_time) throw ParseError(no, "trip ends before it starts");
        t.origin = lonlat_fields(f[3], f[4], no);
        t.destination = lonlat_fields(f[5], f[6], no);
        out.push_back(t);
    });
    return out;
}

std::vector<Trip> read_trips_file(const std::string& path)
{
    auto in = open_or_throw(path);
    return read_trips(in);
}

void write_demand_curve(std::ostream& out, const DemandCurve& curve)
{
    out << demand_header << '\n';
    for (std::size_t i = 0; i < curve.counts.size(); ++i) out << i << ',' << curve.counts[i] << '\n';
}

namespace {

struct PlannedTrip {
    Timestamp start = 0;
    Timestamp end = 0;
    geo::GeoPoint origin;
    geo::GeoPoint destination;
};

geo::LonLat round_micro_degrees(geo::LonLat p)
{
    return {std::round(p.lon * 1e6) / 1e6, std::round(p.lat * 1e6) / 1e6};
}

} // namespace

SyntheticOutput generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed)
{
    if (spec.taxis == 0) throw ConfigError("synthetic spec needs at least one taxi");
    if (spec.horizon_hours == 0) throw ConfigError("synthetic spec needs a positive horizon");
    if (spec.hourly_trips.empty()) throw ConfigError("synthetic spec needs an hourly intensity profile");
    for (double rate : spec.hourly_trips) {
        if (!(rate >= 0.0) || !std::isfinite(rate)) throw ConfigError("hourly intensities must be finite and >= 0");
    }
    if (!(spec.extent_km > 0.0)) throw ConfigError("synthetic extent must be positive");
    if (!(spec.speed_kmh > 0.0)) throw ConfigError("synthetic speed must be positive");
    if (spec.sample_interval_s <= 0 || 3600 % spec.sample_interval_s != 0) {
        throw ConfigError("sample interval must divide one hour");
    }
    if (!(spec.missing_coordinate_rate >= 0.0 && spec.missing_coordinate_rate <= 1.0)) {
        throw ConfigError("missing coordinate rate must lie in [0,1]");
    }

    std::mt19937_64 rng(seed);
    const double extent = spec.extent_km;

    std::vector<Hotspot> hotspots = spec.hotspots;
    if (hotspots.empty()) {
        if (spec.hotspot_count == 0) throw ConfigError("synthetic spec needs at least one hotspot");
        std::uniform_real_distribution<double> pos(-0.6 * extent, 0.6 * extent);
        std::uniform_real_distribution<double> weight(0.5, 1.5);
        for (std::size_t i = 0; i < spec.hotspot_count; ++i) {
            const double x = pos(rng);
            const double y = pos(rng);
            hotspots.push_back({{x, y}, spec.hotspot_sigma_km, weight(rng)});
        }
    }
    std::vector<double> weights;
    for (const auto& h : hotspots) weights.push_back(h.weight);
    std::discrete_distribution<std::size_t> pick_hotspot(weights.begin(), weights.end());

    const auto sample_point = [&]() {
        const Hotspot& h = hotspots[pick_hotspot(rng)];
        std::normal_distribution<double> nx(h.center.x, h.sigma_km);
        std::normal_distribution<double> ny(h.center.y, h.sigma_km);
        return geo::GeoPoint{std::clamp(nx(rng), -extent, extent), std::clamp(ny(rng), -extent, extent)};
    };

    const std::int64_t step = spec.sample_interval_s;
    const std::int64_t slots_per_hour = 3600 / step;
    std::uniform_int_distribution<std::int64_t> slot(0, slots_per_hour - 1);

    std::vector<PlannedTrip> planned;
    for (std::size_t h = 0; h < spec.horizon_hours; ++h) {
        const double rate = spec.hourly_trips[h % spec.hourly_trips.size()];
        std::int64_t n = 0;
        if (spec.poisson_counts) {
            if (rate > 0.0) n = std::poisson_distribution<std::int64_t>(rate)(rng);
        } else {
            n = std::llround(rate);
        }
        for (std::int64_t i = 0; i < n; ++i) {
            PlannedTrip trip;
            trip.start = spec.horizon_start + static_cast<Timestamp>(h) * 3600 + slot(rng) * step;
            trip.origin = sample_point();
            trip.destination = sample_point();
            const double seconds = geo::manhattan(trip.origin, trip.destination) / spec.speed_kmh * 3600.0;
            const auto steps = static_cast<std::int64_t>(std::ceil(seconds / static_cast<double>(step)));
            trip.end = trip.start + std::max<std::int64_t>(steps * step, 180);
            planned.push_back(trip);
        }
    }
    std::stable_sort(planned.begin(), planned.end(),
                     [](const PlannedTrip& a, const PlannedTrip& b) { return a.start < b.start; });

    SyntheticOutput out;
    out.trips_planned = planned.size();

    // Round-robin assignment to the next taxi that is free; a taxi needs one
    // idle sample between its drop-off row and the next pre-pickup row.
    std::vector<std::vector<const PlannedTrip*>> per_taxi(spec.taxis);
    std::vector<Timestamp> free_at(spec.taxis, std::numeric_limits<Timestamp>::min());
    std::size_t cursor = 0;
    for (const PlannedTrip& trip : planned) {
        bool placed = false;
        for (std::size_t j = 0; j < spec.taxis; ++j) {
            const std::size_t taxi = (cursor + j) % spec.taxis;
            if (free_at[taxi] <= trip.start) {
                per_taxi[taxi].push_back(&trip);
                free_at[taxi] = trip.end + 2 * step;
                cursor = taxi + 1;
                placed = true;
                break;
            }
        }
        if (!placed) ++out.trips_dropped;
    }

    std::bernoulli_distribution drop_fix(spec.missing_coordinate_rate);
    const auto emit = [&](TaxiId id, Timestamp t, geo::GeoPoint p, int load) {
        TaxiRecord r{id, t, round_micro_degrees(geo::unproject(p, spec.reference)), load};
        if (spec.missing_coordinate_rate > 0.0 && drop_fix(rng)) r.position.reset();
        out.records.push_back(r);
    };

    for (std::size_t taxi = 0; taxi < spec.taxis; ++taxi) {
        const auto id = static_cast<TaxiId>(taxi + 1);
        for (const PlannedTrip* trip : per_taxi[taxi]) {
            emit(id, trip->start - step, trip->origin, 0);
            const double span = static_cast<double>(trip->end - trip->start);
            for (Timestamp t = trip->start; t < trip->end; t += step) {
                const double f = static_cast<double>(t - trip->start) / span;
                emit(id, t,
                     {trip->origin.x + f * (trip->destination.x - trip->origin.x),
                      trip->origin.y + f * (trip->destination.y - trip->origin.y)},
                     1);
            }
            emit(id, trip->end, trip->destination, 0);
        }
    }
    return out;
}

} // namespace etaxi::ingest
