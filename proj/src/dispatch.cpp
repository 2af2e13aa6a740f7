#include "etaxi/dispatch.hpp"

#include "etaxi/error.hpp"
#include "etaxi/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace etaxi::dispatch {

const char* to_string(TaxiState s)
{
    switch (s) {
    case TaxiState::available: return "available";
    case TaxiState::serving: return "serving";
    case TaxiState::heading_to_station: return "heading_to_station";
    case TaxiState::charging: return "charging";
    case TaxiState::queued_at_station: return "queued_at_station";
    }
    return "?";
}

const char* to_string(RequestState s)
{
    switch (s) {
    case RequestState::pending: return "pending";
    case RequestState::waitlisted: return "waitlisted";
    case RequestState::assigned: return "assigned";
    case RequestState::completed: return "completed";
    case RequestState::cancelled: return "cancelled";
    }
    return "?";
}

RideRequest make_request(RequestId id, GeoPoint origin, GeoPoint destination, double request_time_s,
                         const geo::StationLayout& layout)
{
    RideRequest r;
    r.id = id;
    r.origin = origin;
    r.destination = destination;
    r.request_time_s = request_time_s;
    r.trip_distance_km = geo::manhattan(origin, destination);
    r.origin_region = geo::assign_subregion(origin, layout);
    r.destination_region = geo::assign_subregion(destination, layout);
    r.destination_to_station_km = geo::manhattan(destination, layout[r.destination_region].centroid);
    return r;
}

void DispatchConfig::validate() const
{
    std::vector<std::string> problems;
    const auto need = [&](bool ok, const char* what) {
        if (!ok) problems.emplace_back(what);
    };
    need(std::isfinite(x) && x >= 0.0, "dispatch.x must be finite and >= 0");
    need(std::isfinite(w1) && std::isfinite(w2) && std::isfinite(w3) && std::isfinite(w4),
         "dispatch weights must be finite");
    need(soc_charge_threshold > 0.0 && soc_charge_threshold <= 1.0, "dispatch.soc_charge_threshold must lie in (0,1]");
    need(escalation_min > 0.0, "dispatch.escalation_min must be positive");
    need(cancel_min > 0.0, "dispatch.cancel_min must be positive");
    need(cancel_min > escalation_min, "dispatch.cancel_min must exceed dispatch.escalation_min");
    need(reachability_buffer >= 0.0, "dispatch.reachability_buffer must be >= 0");
    need(std::isfinite(c2) && std::isfinite(c3), "queue.c2 and queue.c3 must be finite");
    if (!problems.empty()) {
        std::ostringstream os;
        for (std::size_t i = 0; i < problems.size(); ++i) os << (i ? "; " : "") << problems[i];
        throw ConfigError(os.str());
    }
}

double f_demand(double demand, double x)
{
    if (!(demand >= 0.0)) throw std::invalid_argument("demand must be >= 0");
    return x * std::sqrt(demand);
}

double required_energy_kwh(const ElectricTaxi& taxi, const RideRequest& request, double buffer)
{
    const double km = geo::manhattan(taxi.position, request.origin) + request.trip_distance_km +
                      request.destination_to_station_km;
    return km * taxi.consumption_kwh_per_km * (1.0 + buffer);
}

bool reachability_test(const ElectricTaxi& taxi, const RideRequest& request, double buffer)
{
    return taxi.energy_kwh >= required_energy_kwh(taxi, request, buffer);
}

ScoreBreakdown score(const ElectricTaxi& taxi, const RideRequest& request, const DispatchConfig& config,
                     const ScoreContext& context)
{
    ScoreBreakdown b;
    b.d_km = geo::manhattan(taxi.position, request.origin);
    b.d_norm = b.d_km / context.d_ref_km;
    b.income_norm = taxi.cumulative_income / (context.mean_income + income_epsilon);

    const double used = (b.d_km + request.trip_distance_km) * taxi.consumption_kwh_per_km;
    const double soc_after = std::clamp((taxi.energy_kwh - used) / taxi.battery_kwh, 0.0, 1.0);
    const auto region = static_cast<std::size_t>(request.destination_region);
    const double u = region < context.station_utilization.size() ? context.station_utilization[region] : 0.0;
    b.match_degree = queueing::matching_degree(u, soc_after, config.c2, config.c3);

    const double empty_min = std::max(0.0, context.now_s - taxi.empty_since_s) / 60.0;
    b.empty_time_norm = std::min(empty_min / 60.0, 1.0);
    b.f_demand = f_demand(context.demand, config.x);

    b.total = b.f_demand * config.w1 * b.d_norm + config.w2 * b.income_norm + config.w3 * b.match_degree +
              config.w4 * b.empty_time_norm;
    return b;
}

std::optional<TaxiId> select_best(std::span<const ScoredCandidate> scored)
{
    std::optional<ScoredCandidate> best;
    for (const auto& c : scored) {
        if (!best || c.score > best->score || (c.score == best->score && c.id < best->id)) best = c;
    }
    if (!best) return std::nullopt;
    return best->id;
}

std::optional<TaxiId> select_candidate(std::span<const ElectricTaxi* const> candidates, const RideRequest& request,
                                       const DispatchConfig& config, const ScoreContext& context)
{
    std::vector<ScoredCandidate> scored;
    scored.reserve(candidates.size());
    for (const ElectricTaxi* t : candidates) scored.push_back({t->id, score(*t, request, config, context).total});
    return select_best(scored);
}

Fleet::Fleet(std::vector<ElectricTaxi> taxis, const geo::StationLayout& layout)
    : layout_(&layout), taxis_(std::move(taxis)), region_(taxis_.size(), 0), available_(layout.size())
{
    for (std::size_t i = 0; i < taxis_.size(); ++i) {
        if (taxis_[i].id != static_cast<TaxiId>(i)) throw ConfigError("taxi ids must be dense 0..n-1 in order");
        if (!(taxis_[i].consumption_kwh_per_km > 0.0)) throw ConfigError("taxi consumption must be positive");
        if (!(taxis_[i].battery_kwh > 0.0)) throw ConfigError("taxi battery capacity must be positive");
        total_income_ += taxis_[i].cumulative_income;
        region_[i] = geo::assign_subregion(taxis_[i].position, layout);
        if (taxis_[i].state == TaxiState::available) available_[region_[i]].insert(taxis_[i].id);
    }
}

void Fleet::make_available(TaxiId id, double now_s)
{
    ElectricTaxi& t = (*this)[id];
    if (t.state == TaxiState::available) available_[region_[id]].erase(id);
    t.state = TaxiState::available;
    t.empty_since_s = now_s;
    region_[id] = geo::assign_subregion(t.position, *layout_);
    available_[region_[id]].insert(id);
}

void Fleet::make_busy(TaxiId id, TaxiState state)
{
    ElectricTaxi& t = (*this)[id];
    if (t.state == TaxiState::available) available_[region_[id]].erase(id);
    t.state = state;
}

const std::set<TaxiId>& Fleet::available_in(StationId region) const { return available_.at(region); }

StationId Fleet::region_of(TaxiId id) const { return region_.at(static_cast<std::size_t>(id)); }

void Fleet::add_income(TaxiId id, double amount)
{
    (*this)[id].cumulative_income += amount;
    total_income_ += amount;
}

double Fleet::mean_income() const
{
    return taxis_.empty() ? 0.0 : total_income_ / static_cast<double>(taxis_.size());
}

Dispatcher::Dispatcher(const geo::StationLayout& layout, DispatchConfig config)
    : layout_(&layout), config_(config)
{
    config_.validate();
    adjacency_.reserve(layout.size());
    for (const auto& s : layout.stations()) {
        adjacency_.push_back(geo::adjacent_subregions(s.id, layout, config_.adjacency));
    }
}

std::optional<Assignment> Dispatcher::try_assign(RideRequest& request, Fleet& fleet, const ScoreContext& context,
                                                 bool escalated)
{
    scratch_.clear();
    const auto collect = [&](StationId region) {
        for (TaxiId id : fleet.available_in(region)) {
            const ElectricTaxi& t = fleet[id];
            if (reachability_test(t, request, config_.reachability_buffer)) scratch_.push_back(&t);
        }
    };
    collect(request.origin_region);
    if (escalated) {
        for (StationId r : adjacency_[request.origin_region]) collect(r);
    }
    if (scratch_.empty()) return std::nullopt;

    const auto chosen = select_candidate(scratch_, request, config_, context);
    Assignment a;
    a.request = request.id;
    a.taxi = *chosen;
    a.breakdown = score(fleet[*chosen], request, config_, context);
    a.escalated = escalated;
    fleet.make_busy(*chosen, TaxiState::serving);
    request.state = RequestState::assigned;
    return a;
}

std::optional<Assignment> Dispatcher::handle_request(RideRequest& request, Fleet& fleet, const ScoreContext& context)
{
    if (auto a = try_assign(request, fleet, context, false)) return a;
    request.state = RequestState::waitlisted;
    waitlist_.push_back(request.id);
    return std::nullopt;
}

WaitlistOutcome Dispatcher::process_waitlist(std::span<RideRequest> requests, Fleet& fleet,
                                             const ScoreContext& context)
{
    WaitlistOutcome out;
    const double escalate_s = config_.escalation_min * 60.0;
    const double cancel_s = config_.cancel_min * 60.0;

    std::deque<RequestId> remaining;
    for (RequestId id : waitlist_) {
        RideRequest& r = requests[static_cast<std::size_t>(id)];
        const double waited = context.now_s - r.request_time_s;
        if (waited > cancel_s) {
            r.state = RequestState::cancelled;
            out.cancellations.push_back(id);
            continue;
        }
        if (auto a = try_assign(r, fleet, context, waited > escalate_s)) {
            out.assignments.push_back(*a);
            continue;
        }
        remaining.push_back(id);
    }
    waitlist_ = std::move(remaining);
    return out;
}

PostTripDecision Dispatcher::post_trip_decision(const ElectricTaxi& taxi) const
{
    if (taxi.soc() < config_.soc_charge_threshold) {
        return {PostTripAction::to_station, geo::assign_subregion(taxi.position, *layout_)};
    }
    return {PostTripAction::stay_available, 0};
}

} // namespace etaxi::dispatch
