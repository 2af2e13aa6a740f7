#pragma once

#include "etaxi/geo.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace etaxi::dispatch {

using TaxiId = std::int32_t;
using RequestId = std::int64_t;
using geo::GeoPoint;
using geo::StationId;

enum class TaxiState { available, serving, heading_to_station, charging, queued_at_station };

const char* to_string(TaxiState s);

struct ElectricTaxi {
    TaxiId id = 0;
    GeoPoint position;
    double energy_kwh = 0.0;
    double battery_kwh = 38.0;
    double consumption_kwh_per_km = 0.152;
    TaxiState state = TaxiState::available;
    double cumulative_income = 0.0;
    int order_count = 0;
    double empty_since_s = 0.0;

    double soc() const { return energy_kwh / battery_kwh; }
};

enum class RequestState { pending, waitlisted, assigned, completed, cancelled };

const char* to_string(RequestState s);

struct RideRequest {
    RequestId id = 0;
    GeoPoint origin;
    GeoPoint destination;
    double request_time_s = 0.0;
    double trip_distance_km = 0.0;
    StationId origin_region = 0;
    StationId destination_region = 0;
    /// Manhattan distance from the destination to its sub-region's station.
    double destination_to_station_km = 0.0;
    RequestState state = RequestState::pending;
};

/// Fills in the derived distance and sub-region fields.
RideRequest make_request(RequestId id, GeoPoint origin, GeoPoint destination, double request_time_s,
                         const geo::StationLayout& layout);

struct DispatchConfig {
    double x = 0.01;  // demand-weight scale
    double w1 = -1.0; // pickup distance
    double w2 = -0.5; // driver income
    double w3 = 1.0;  // charging match degree
    double w4 = 0.0;  // empty time
    double soc_charge_threshold = 0.2;
    double escalation_min = 5.0;
    double cancel_min = 30.0;
    double reachability_buffer = 0.1;
    std::size_t adjacency = 3;
    double c2 = -1.0;
    double c3 = 1.0;

    /// Throws ConfigError listing every violated constraint.
    void validate() const;
};

struct ScoreBreakdown {
    double d_km = 0.0;
    double d_norm = 0.0;
    double income_norm = 0.0;
    double match_degree = 0.0;
    double empty_time_norm = 0.0;
    double f_demand = 0.0;
    double total = 0.0;
};

/// Per-decision inputs that change as the simulation runs.
struct ScoreContext {
    double now_s = 0.0;
    double demand = 0.0;      // requests in the current hour
    double d_ref_km = 1.0;    // pickup-distance normalizer
    double mean_income = 0.0; // fleet mean cumulative income
    std::span<const double> station_utilization;  // u_n per station id
};

inline constexpr double income_epsilon = 1e-6;

/// x * sqrt(demand).
double f_demand(double demand, double x);

/// Energy needed to pick up, carry the passenger and reach the station of
/// the destination sub-region, including the safety buffer.
double required_energy_kwh(const ElectricTaxi& taxi, const RideRequest& request, double buffer);

bool reachability_test(const ElectricTaxi& taxi, const RideRequest& request, double buffer);

ScoreBreakdown score(const ElectricTaxi& taxi, const RideRequest& request, const DispatchConfig& config,
                     const ScoreContext& context);

struct ScoredCandidate {
    TaxiId id = 0;
    double score = 0.0;
};

/// Highest score; ties go to the smaller taxi id.
std::optional<TaxiId> select_best(std::span<const ScoredCandidate> scored);

std::optional<TaxiId> select_candidate(std::span<const ElectricTaxi* const> candidates, const RideRequest& request,
                                       const DispatchConfig& config, const ScoreContext& context);

/// Taxis plus an index of available taxis per sub-region.
class Fleet {
public:
    Fleet(std::vector<ElectricTaxi> taxis, const geo::StationLayout& layout);

    std::size_t size() const { return taxis_.size(); }
    ElectricTaxi& operator[](TaxiId id) { return taxis_.at(static_cast<std::size_t>(id)); }
    const ElectricTaxi& operator[](TaxiId id) const { return taxis_.at(static_cast<std::size_t>(id)); }
    std::span<const ElectricTaxi> taxis() const { return taxis_; }

    /// Marks the taxi available at its current position.
    void make_available(TaxiId id, double now_s);
    /// Moves the taxi out of the available pool into `state`.
    void make_busy(TaxiId id, TaxiState state);

    const std::set<TaxiId>& available_in(StationId region) const;
    StationId region_of(TaxiId id) const;

    void add_income(TaxiId id, double amount);
    double mean_income() const;

private:
    const geo::StationLayout* layout_;
    std::vector<ElectricTaxi> taxis_;
    std::vector<StationId> region_;
    std::vector<std::set<TaxiId>> available_;
    double total_income_ = 0.0;
};

struct Assignment {
    RequestId request = 0;
    TaxiId taxi = 0;
    ScoreBreakdown breakdown;
    bool escalated = false;
};

struct WaitlistOutcome {
    std::vector<Assignment> assignments;
    std::vector<RequestId> cancellations;
};

enum class PostTripAction { stay_available, to_station };

struct PostTripDecision {
    PostTripAction action = PostTripAction::stay_available;
    StationId station = 0;
};

/// The centralized platform: sub-region candidate search, reachability,
/// scoring and the FIFO waitlist with escalation and cancellation.
class Dispatcher {
public:
    /// Throws ConfigError for an invalid config or adjacency >= station count.
    Dispatcher(const geo::StationLayout& layout, DispatchConfig config);

    const DispatchConfig& config() const { return config_; }
    const std::deque<RequestId>& waitlist() const { return waitlist_; }

    /// Assigns the best reachable available taxi of the request's sub-region
    /// (marking it serving) or appends the request to the waitlist.
    std::optional<Assignment> handle_request(RideRequest& request, Fleet& fleet, const ScoreContext& context);

    /// Scans the waitlist in FIFO order at `context.now_s`. Requests waiting
    /// longer than the cancel threshold are cancelled; the rest search their
    /// own sub-region and, once past the escalation threshold, the adjacent
    /// ones too. `requests` is indexed by request id.
    WaitlistOutcome process_waitlist(std::span<RideRequest> requests, Fleet& fleet, const ScoreContext& context);

    /// Below the SOC threshold the taxi heads to the station of the sub-region
    /// it is in; otherwise it stays where it is.
    PostTripDecision post_trip_decision(const ElectricTaxi& taxi) const;

    std::span<const StationId> adjacent(StationId region) const { return adjacency_.at(region); }

private:
    std::optional<Assignment> try_assign(RideRequest& request, Fleet& fleet, const ScoreContext& context,
                                         bool escalated);

    const geo::StationLayout* layout_;
    DispatchConfig config_;
    std::vector<std::vector<StationId>> adjacency_;
    std::deque<RequestId> waitlist_;
    std::vector<const ElectricTaxi*> scratch_;
};

} // namespace etaxi::dispatch
