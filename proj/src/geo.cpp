#include "etaxi/geo.hpp"

#include "etaxi/csv.hpp"
#include "etaxi/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

namespace etaxi::geo {

namespace {

double cos_deg(double deg) { return std::cos(deg * std::numbers::pi / 180.0); }

double objective(std::span<const GeoPoint> points, std::span<const GeoPoint> centroids,
                 std::span<const std::size_t> assignment)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        sum += squared_euclidean(points[i], centroids[assignment[i]]);
    }
    return sum;
}

std::size_t nearest_centroid(GeoPoint p, std::span<const GeoPoint> centroids)
{
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_euclidean(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

std::vector<GeoPoint> seed_plus_plus(std::span<const GeoPoint> points, std::size_t k, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<GeoPoint> centroids;
    centroids.reserve(k);
    std::uniform_int_distribution<std::size_t> first(0, points.size() - 1);
    centroids.push_back(points[first(rng)]);

    std::vector<double> d2(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) d2[i] = squared_euclidean(points[i], centroids[0]);

    while (centroids.size() < k) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t pick = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            pick = points.size() - 1;
            for (std::size_t i = 0; i < points.size(); ++i) {
                target -= d2[i];
                if (target < 0.0 && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            // All points coincide with chosen centroids; duplicates are unavoidable.
            pick = centroids.size() % points.size();
        }
        centroids.push_back(points[pick]);
        for (std::size_t i = 0; i < points.size(); ++i) {
            d2[i] = std::min(d2[i], squared_euclidean(points[i], centroids.back()));
        }
    }
    return centroids;
}

} // namespace

StationLayout::StationLayout(std::vector<Station> stations) : stations_(std::move(stations))
{
    if (stations_.empty()) throw ConfigError("station layout must contain at least one station");
    for (std::size_t i = 0; i < stations_.size(); ++i) {
        if (stations_[i].id != static_cast<StationId>(i)) {
            throw ConfigError("station ids must be dense 0..k-1 in order; found id " +
                              std::to_string(stations_[i].id) + " at position " + std::to_string(i));
        }
        if (stations_[i].chargers < 1) {
            throw ConfigError("station " + std::to_string(i) + " has no chargers");
        }
        if (!std::isfinite(stations_[i].centroid.x) || !std::isfinite(stations_[i].centroid.y)) {
            throw ConfigError("station " + std::to_string(i) + " has a non-finite centroid");
        }
    }
}

GeoPoint project(LonLat p, LonLat ref)
{
    return {(p.lon - ref.lon) * cos_deg(ref.lat) * km_per_deg_lon_at_equator,
            (p.lat - ref.lat) * km_per_deg_lat};
}

LonLat unproject(GeoPoint p, LonLat ref)
{
    return {ref.lon + p.x / (cos_deg(ref.lat) * km_per_deg_lon_at_equator),
            ref.lat + p.y / km_per_deg_lat};
}

double manhattan(GeoPoint a, GeoPoint b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

double squared_euclidean(GeoPoint a, GeoPoint b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

Clustering kmeans(std::span<const GeoPoint> points, const KMeansOptions& options)
{
    const std::size_t k = options.k;
    if (k == 0) throw ConfigError("k-means needs k >= 1");
    if (points.size() < k) {
        throw ConfigError("k-means needs at least k points (k=" + std::to_string(k) +
                          ", points=" + std::to_string(points.size()) + ")");
    }

    Clustering result;
    result.centroids = seed_plus_plus(points, k, options.seed);
    result.assignment.assign(points.size(), 0);

    for (int iter = 0; iter < std::max(options.max_iter, 1); ++iter) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            result.assignment[i] = nearest_centroid(points[i], result.centroids);
        }
        result.objective_history.push_back(objective(points, result.centroids, result.assignment));
        result.iterations = iter + 1;

        std::vector<GeoPoint> sums(k);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            sums[result.assignment[i]].x += points[i].x;
            sums[result.assignment[i]].y += points[i].y;
            ++counts[result.assignment[i]];
        }

        std::vector<GeoPoint> updated(k);
        std::vector<bool> taken(points.size(), false);
        double max_shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                updated[c] = {sums[c].x / static_cast<double>(counts[c]),
                              sums[c].y / static_cast<double>(counts[c])};
                continue;
            }
            // Empty cluster: move it onto the point worst served by its centroid.
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                const double d = squared_euclidean(points[i], result.centroids[result.assignment[i]]);
                if (!taken[i] && d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            taken[far] = true;
            updated[c] = points[far];
            max_shift = std::numeric_limits<double>::infinity();
        }
        for (std::size_t c = 0; c < k; ++c) {
            max_shift = std::max(max_shift, std::sqrt(squared_euclidean(updated[c], result.centroids[c])));
        }
        result.centroids = std::move(updated);
        if (max_shift <= options.tol) break;
    }

    // Final assignment against the final centroids.
    for (std::size_t i = 0; i < points.size(); ++i) {
        result.assignment[i] = nearest_centroid(points[i], result.centroids);
    }
    const double final_obj = objective(points, result.centroids, result.assignment);
    if (final_obj < result.objective_history.back()) result.objective_history.push_back(final_obj);
    return result;
}

StationLayout site_stations(std::span<const GeoPoint> points, const KMeansOptions& options, int chargers)
{
    const Clustering c = kmeans(points, options);
    std::vector<Station> stations;
    stations.reserve(c.centroids.size());
    for (std::size_t i = 0; i < c.centroids.size(); ++i) {
        stations.push_back({static_cast<StationId>(i), c.centroids[i], chargers});
    }
    return StationLayout(std::move(stations));
}

StationId assign_subregion(GeoPoint p, const StationLayout& layout)
{
    StationId best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (const Station& s : layout.stations()) {
        const double d = manhattan(p, s.centroid);
        if (d < best_d) {
            best_d = d;
            best = s.id;
        }
    }
    return best;
}

std::vector<StationId> adjacent_subregions(StationId id, const StationLayout& layout, std::size_t m)
{
    if (m >= layout.size()) {
        throw ConfigError("adjacency m=" + std::to_string(m) + " must be smaller than the station count " +
                          std::to_string(layout.size()));
    }
    const GeoPoint from = layout[id].centroid;
    std::vector<std::pair<double, StationId>> others;
    others.reserve(layout.size() - 1);
    for (const Station& s : layout.stations()) {
        if (s.id != id) others.emplace_back(manhattan(from, s.centroid), s.id);
    }
    std::sort(others.begin(), others.end());
    std::vector<StationId> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) out.push_back(others[i].second);
    return out;
}

double subregion_radius_p95(std::span<const GeoPoint> points, const StationLayout& layout)
{
    if (points.empty()) return 0.0;
    std::vector<double> d;
    d.reserve(points.size());
    for (GeoPoint p : points) d.push_back(manhattan(p, layout[assign_subregion(p, layout)].centroid));
    std::sort(d.begin(), d.end());
    // Nearest-rank percentile.
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(d.size())));
    return d[std::max<std::size_t>(rank, 1) - 1];
}

void write_layout(std::ostream& out, const StationLayout& layout)
{
    out << layout_header << '\n';
    for (const Station& s : layout.stations()) {
        out << s.id << ',' << csv::format_double(s.centroid.x) << ',' << csv::format_double(s.centroid.y) << ','
            << s.chargers << '\n';
    }
}

StationLayout read_layout(std::istream& in)
{
    std::vector<Station> stations;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto trimmed = csv::trim(line);
        if (trimmed.empty() || trimmed == layout_header) continue;
        const auto f = csv::split(trimmed);
        if (f.size() != 4) throw ParseError(line_no, "expected 4 fields, got " + std::to_string(f.size()));
        const auto id = csv::parse_number<StationId>(f[0]);
        const auto x = csv::parse_number<double>(f[1]);
        const auto y = csv::parse_number<double>(f[2]);
        const auto chargers = csv::parse_number<int>(f[3]);
        if (!id || !x || !y || !chargers) throw ParseError(line_no, "unparseable layout row");
        stations.push_back({*id, {*x, *y}, *chargers});
    }
    return StationLayout(std::move(stations));
}

StationLayout read_layout_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_layout(in);
}

} // namespace etaxi::geo
