#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <span>
#include <vector>

namespace etaxi::geo {

/// Kilometres per degree used by the local equirectangular projection.
inline constexpr double km_per_deg_lon_at_equator = 111.32;
inline constexpr double km_per_deg_lat = 110.57;

struct LonLat {
    double lon = 0.0;
    double lat = 0.0;
};

/// Planar position in km east (x) and north (y) of the scenario origin.
struct GeoPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

using StationId = std::int32_t;

struct Station {
    StationId id = 0;
    GeoPoint centroid;
    int chargers = 1;
};

/// Charging stations with ids dense in 0..k-1 (station i lives at index i).
class StationLayout {
public:
    StationLayout() = default;
    /// Throws ConfigError unless ids are 0..k-1 in order, k >= 1 and every
    /// charger count is positive.
    explicit StationLayout(std::vector<Station> stations);

    std::size_t size() const noexcept { return stations_.size(); }
    bool empty() const noexcept { return stations_.empty(); }
    const Station& operator[](StationId id) const { return stations_.at(static_cast<std::size_t>(id)); }
    std::span<const Station> stations() const noexcept { return stations_; }

private:
    std::vector<Station> stations_;
};

GeoPoint project(LonLat p, LonLat ref);
LonLat unproject(GeoPoint p, LonLat ref);

double manhattan(GeoPoint a, GeoPoint b);
double squared_euclidean(GeoPoint a, GeoPoint b);

struct KMeansOptions {
    std::size_t k = 1;
    std::uint64_t seed = 0;
    int max_iter = 100;
    double tol = 1e-6;  // km; stop once no centroid moves farther than this
};

struct Clustering {
    std::vector<GeoPoint> centroids;
    std::vector<std::size_t> assignment;  // point index -> cluster index
    /// Within-cluster squared Euclidean sum after each assignment step.
    std::vector<double> objective_history;
    int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding. An empty cluster is reseeded to
/// the point farthest from its current centroid. Throws ConfigError when
/// k == 0 or there are fewer points than clusters.
Clustering kmeans(std::span<const GeoPoint> points, const KMeansOptions& options);

/// Clusters `points` and places one station of `chargers` chargers at each
/// centroid.
StationLayout site_stations(std::span<const GeoPoint> points, const KMeansOptions& options,
                            int chargers);

/// Station whose centroid is nearest in Manhattan distance; ties go to the
/// smaller id.
StationId assign_subregion(GeoPoint p, const StationLayout& layout);

/// The `m` stations nearest to `id` by centroid-to-centroid Manhattan
/// distance, ascending with ties by id. Throws ConfigError unless m < k.
std::vector<StationId> adjacent_subregions(StationId id, const StationLayout& layout, std::size_t m);

/// 95th percentile of the Manhattan distance from each point to the
/// centroid of its sub-region. Returns 0 for an empty point set.
double subregion_radius_p95(std::span<const GeoPoint> points, const StationLayout& layout);

inline constexpr std::string_view layout_header = "station_id,x_km,y_km,chargers";

void write_layout(std::ostream& out, const StationLayout& layout);
/// Throws ParseError for malformed rows and ConfigError for an invalid layout.
StationLayout read_layout(std::istream& in);
StationLayout read_layout_file(const std::string& path);

} // namespace etaxi::geo
