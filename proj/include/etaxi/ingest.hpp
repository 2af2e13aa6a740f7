#pragma once

#include "etaxi/geo.hpp"
#include "etaxi/timestamp.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace etaxi::ingest {

using TaxiId = std::int64_t;

/// One GPS status row: `taxi_id,YYYYMMDDHHMMSS,longitude,latitude,load`.
/// Longitude and latitude may both be blank when the device had no fix.
struct TaxiRecord {
    TaxiId taxi_id = 0;
    Timestamp timestamp = 0;
    std::optional<geo::LonLat> position;
    int load = 0;
};

/// Decodes one CSV row. `line_no` is only used for error messages.
/// Throws ParseError on a wrong field count, a bad timestamp, a load outside
/// {0,1} or coordinates outside the valid degree ranges.
TaxiRecord parse_record(std::string_view line, std::size_t line_no = 1);

/// Canonical text form; coordinates use the shortest round-trip decimal.
std::string serialize_record(const TaxiRecord& r);

inline constexpr std::string_view records_header = "taxi_id,timestamp,longitude,latitude,load";

/// Reads a records file. Blank lines and a leading header row are skipped.
std::vector<TaxiRecord> read_records(std::istream& in);
std::vector<TaxiRecord> read_records_file(const std::string& path);
void write_records(std::ostream& out, std::span<const TaxiRecord> records);

struct Trip {
    TaxiId taxi_id = 0;
    geo::LonLat origin;
    geo::LonLat destination;
    Timestamp start_time = 0;
    Timestamp end_time = 0;

    std::int64_t duration_s() const { return end_time - start_time; }
};

inline constexpr std::int64_t min_trip_duration_s = 120;
inline constexpr std::int64_t coordinate_fill_window_s = 180;

struct ExtractionResult {
    std::vector<Trip> trips;          // taxi-id order, then start time
    std::size_t pickups = 0;          // load 0 -> 1 transitions seen
    std::size_t excluded = 0;         // pickups that produced no trip
    std::size_t too_short = 0;        // subset of excluded
    std::size_t missing_position = 0; // subset of excluded
    std::size_t unterminated = 0;     // subset of excluded: no drop-off before data ends
    std::size_t truncated_dropoffs = 0; // 1 -> 0 without a preceding pickup (discarded)
    std::size_t duplicates_dropped = 0;
};

/// Extracts origin-destination trips. Records may interleave taxis; each
/// taxi's rows are ordered by timestamp (stable, so the first of several rows
/// with the same timestamp is kept and later ones dropped).
///
/// A trip opens on the first load-1 row after a load-0 row and closes on the
/// next load-0 row. A boundary row without coordinates borrows them from the
/// nearest-in-time row of the same taxi within three minutes (earlier row on
/// a tie); otherwise, or if the trip lasts under two minutes, it is excluded.
ExtractionResult extract_trips(std::span<const TaxiRecord> records);

/// Hourly request counts: bin i covers [start + i h, start + (i+1) h).
struct DemandCurve {
    Timestamp horizon_start = 0;
    std::vector<std::int64_t> counts;

    std::int64_t total() const;
    /// Count for the bin containing `t`; zero outside the curve.
    std::int64_t at(Timestamp t) const;
};

/// Throws DataError if a trip starts before `horizon_start`. With `hours`
/// unset the curve ends at the last non-empty bin; otherwise trips at or past
/// the end of the horizon are a DataError too.
DemandCurve build_demand_curve(std::span<const Trip> trips, Timestamp horizon_start,
                               std::optional<std::size_t> hours = std::nullopt);

inline constexpr std::string_view trips_header = "taxi_id,start_time,end_time,o_lon,o_lat,d_lon,d_lat";
inline constexpr std::string_view demand_header = "hour_index,count";

void write_trips(std::ostream& out, std::span<const Trip> trips);
std::vector<Trip> read_trips(std::istream& in);
std::vector<Trip> read_trips_file(const std::string& path);
void write_demand_curve(std::ostream& out, const DemandCurve& curve);

struct Hotspot {
    geo::GeoPoint center;
    double sigma_km = 1.0;
    double weight = 1.0;
};

/// Parameters of the synthetic trajectory generator.
struct SyntheticSpec {
    std::size_t taxis = 100;
    Timestamp horizon_start = 0;
    std::size_t horizon_hours = 24;
    /// Expected trips per hour; cycled when shorter than the horizon.
    std::vector<double> hourly_trips = {100.0};
    /// Poisson counts per hour when true, otherwise exactly round(rate).
    bool poisson_counts = true;
    geo::LonLat reference{116.397, 39.909};
    double extent_km = 15.0;  // points are clamped to [-extent, extent]^2
    /// Hotspot mixture; empty means `hotspot_count` random hotspots.
    std::vector<Hotspot> hotspots;
    std::size_t hotspot_count = 6;
    double hotspot_sigma_km = 2.0;
    double speed_kmh = 25.0;
    std::int64_t sample_interval_s = 30;
    /// Probability that a non-boundary load-1 row is written without coordinates.
    double missing_coordinate_rate = 0.0;
};

struct SyntheticOutput {
    std::vector<TaxiRecord> records;
    std::size_t trips_planned = 0;
    std::size_t trips_dropped = 0;  // no taxi was free at the planned start
};

/// Deterministic in (spec, seed). Rows are ordered by taxi id then time; each
/// planned trip yields one pickup row preceded by a load-0 row and ends on a
/// load-0 row, so every trip is at least three minutes long and extracts
/// cleanly. Throws ConfigError for zero taxis, zero horizon or an empty or
/// negative intensity profile.
SyntheticOutput generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

} // namespace etaxi::ingest
