#include "etaxi/simkernel.hpp"

#include "etaxi/csv.hpp"
#include "etaxi/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace etaxi::sim {

using dispatch::RequestState;
using dispatch::TaxiState;

double travel_time_s(double dist_km, double speed_kmh)
{
    if (!(speed_kmh > 0.0)) throw std::invalid_argument("speed must be positive");
    if (!(dist_km >= 0.0)) throw std::invalid_argument("distance must be >= 0");
    return dist_km / speed_kmh * 3600.0;
}

double charge_duration_s(double soc, double battery_kwh, double power_kw)
{
    if (!(power_kw > 0.0)) throw std::invalid_argument("charging power must be positive");
    return std::max(0.0, 1.0 - soc) * battery_kwh / power_kw * 3600.0;
}

double gini(std::span<const double> values)
{
    if (values.empty()) throw std::invalid_argument("gini of an empty set");
    std::vector<double> v(values.begin(), values.end());
    if (std::any_of(v.begin(), v.end(), [](double x) { return !(x >= 0.0); })) {
        throw std::invalid_argument("gini needs non-negative values");
    }
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    if (!(sum > 0.0)) throw std::invalid_argument("gini needs at least one positive value");
    // sum_i sum_j |x_i - x_j| = 2 sum_i (2i - n - 1) x_(i) over sorted, 1-based i.
    double weighted = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * v[i];
    return weighted / (n * sum);
}

const char* to_string(EventKind k)
{
    switch (k) {
    case EventKind::request_arrival: return "request_arrival";
    case EventKind::trip_pickup_complete: return "trip_pickup_complete";
    case EventKind::trip_dropoff_complete: return "trip_dropoff_complete";
    case EventKind::charge_start: return "charge_start";
    case EventKind::charge_complete: return "charge_complete";
    case EventKind::waitlist_tick: return "waitlist_tick";
    }
    return "?";
}

const char* to_string(LogKind k)
{
    switch (k) {
    case LogKind::request_arrival: return "request_arrival";
    case LogKind::assigned: return "assigned";
    case LogKind::cancelled: return "cancelled";
    case LogKind::pickup: return "pickup";
    case LogKind::dropoff: return "dropoff";
    case LogKind::station_arrival: return "station_arrival";
    case LogKind::charge_start: return "charge_start";
    case LogKind::charge_complete: return "charge_complete";
    }
    return "?";
}

void Scenario::validate() const
{
    std::vector<std::string> problems;
    const auto need = [&](bool ok, std::string what) {
        if (!ok) problems.push_back(std::move(what));
    };
    need(!layout.empty(), "station layout is empty");
    need(fleet.taxis > 0, "fleet_size must be positive");
    need(fleet.battery_kwh > 0.0, "battery_kwh must be positive");
    need(fleet.range_km > 0.0, "range_km must be positive");
    need(fleet.speed_kmh > 0.0, "speed_kmh must be positive");
    need(fleet.charge_power_kw > 0.0, "charge_power_kw must be positive");
    need(fleet.initial_soc > 0.0 && fleet.initial_soc <= 1.0, "initial_soc must lie in (0,1]");
    need(waitlist_tick_s > 0.0, "waitlist_tick_s must be positive");
    need(queueing.sample_window > 0, "queue.sample_window must be positive");
    need(fare.flag_fall >= 0.0 && fare.per_km >= 0.0, "fares must be >= 0");
    need(!layout.empty() && dispatch.adjacency < layout.size(),
         "dispatch.adjacency must be smaller than the station count");
    for (const Demand& d : demands) {
        if (!(std::isfinite(d.time_s) && d.time_s >= 0.0 && std::isfinite(d.origin.x) && std::isfinite(d.origin.y) &&
              std::isfinite(d.destination.x) && std::isfinite(d.destination.y))) {
            problems.emplace_back("demand entries need finite coordinates and a time >= 0");
            break;
        }
    }
    try {
        dispatch.validate();
    } catch (const ConfigError& e) {
        problems.emplace_back(e.what());
    }
    if (!problems.empty()) {
        std::ostringstream os;
        for (std::size_t i = 0; i < problems.size(); ++i) os << (i ? "; " : "") << problems[i];
        throw ConfigError(os.str());
    }
}

namespace {

Scenario validated(Scenario s)
{
    s.validate();
    return s;
}

std::vector<dispatch::ElectricTaxi> initial_fleet(const Scenario& s)
{
    std::vector<dispatch::ElectricTaxi> taxis;
    taxis.reserve(s.fleet.taxis);
    for (std::size_t i = 0; i < s.fleet.taxis; ++i) {
        dispatch::ElectricTaxi t;
        t.id = static_cast<TaxiId>(i);
        t.position = s.layout[static_cast<StationId>(i % s.layout.size())].centroid;
        t.battery_kwh = s.fleet.battery_kwh;
        t.consumption_kwh_per_km = s.fleet.consumption_kwh_per_km();
        t.energy_kwh = s.fleet.initial_soc * s.fleet.battery_kwh;
        t.state = TaxiState::available;
        taxis.push_back(t);
    }
    return taxis;
}

} // namespace

Simulation::Simulation(Scenario scenario)
    : scenario_(validated(std::move(scenario))),
      fleet_(initial_fleet(scenario_), scenario_.layout),
      dispatcher_(scenario_.layout, scenario_.dispatch)
{
    std::vector<Demand> demands = scenario_.demands;
    std::stable_sort(demands.begin(), demands.end(),
                     [](const Demand& a, const Demand& b) { return a.time_s < b.time_s; });
    requests_.reserve(demands.size());
    std::vector<GeoPoint> origins;
    origins.reserve(demands.size());
    for (std::size_t i = 0; i < demands.size(); ++i) {
        requests_.push_back(dispatch::make_request(static_cast<RequestId>(i), demands[i].origin,
                                                   demands[i].destination, demands[i].time_s, scenario_.layout));
        origins.push_back(demands[i].origin);
        const auto hour = static_cast<std::size_t>(demands[i].time_s / 3600.0);
        if (hour >= hourly_demand_.size()) hourly_demand_.resize(hour + 1, 0);
        ++hourly_demand_[hour];
    }
    pickup_time_s_.assign(requests_.size(), std::numeric_limits<double>::quiet_NaN());
    serving_request_.assign(fleet_.size(), -1);
    km_by_taxi_.assign(fleet_.size(), 0.0);
    d_ref_km_ = std::max(geo::subregion_radius_p95(origins, scenario_.layout), 0.1);

    for (const auto& s : scenario_.layout.stations()) {
        ChargingStation st{s.id, s.chargers, 0, {}, queueing::StationStats(scenario_.queueing.sample_window), 0.0};
        stations_.push_back(std::move(st));
    }
    utilization_.assign(stations_.size(), 0.0);
    service_defaults_ = {scenario_.fleet.battery_kwh / scenario_.fleet.charge_power_kw, 0.0};
    for (const auto& t : fleet_.taxis()) initial_energy_ += t.energy_kwh;

    for (const auto& r : requests_) schedule(r.request_time_s, EventKind::request_arrival, -1, r.id);
}

void Simulation::schedule(double time, EventKind kind, TaxiId taxi, RequestId request, StationId station)
{
    events_.push(Event{time, next_seq_++, kind, taxi, request, station});
}

void Simulation::log(double t, LogKind kind, TaxiId taxi, RequestId request, StationId station, double km,
                     double value)
{
    if (scenario_.record_event_log) log_.push_back({t, kind, taxi, request, station, km, value});
}

dispatch::ScoreContext Simulation::context(double now)
{
    dispatch::ScoreContext c;
    c.now_s = now;
    const auto hour = static_cast<std::size_t>(std::max(now, 0.0) / 3600.0);
    c.demand = hour < hourly_demand_.size() ? static_cast<double>(hourly_demand_[hour]) : 0.0;
    c.d_ref_km = d_ref_km_;
    c.mean_income = fleet_.mean_income();
    c.station_utilization = utilization_;
    return c;
}

SimReport Simulation::run()
{
    if (ran_) throw std::logic_error("Simulation::run called twice");
    ran_ = true;

    if (scenario_.check_invariants) check_invariants(0.0);
    while (!events_.empty()) {
        const Event e = events_.top();
        events_.pop();
        ++events_processed_;
        dispatch_event(e);
        if (scenario_.check_invariants) check_invariants(e.time);
    }

    SimReport r;
    r.fleet_size = fleet_.size();
    r.requests = static_cast<std::int64_t>(requests_.size());
    std::vector<double> wait_sum(hourly_demand_.size(), 0.0);
    r.hourly.resize(hourly_demand_.size());
    for (std::size_t h = 0; h < r.hourly.size(); ++h) r.hourly[h].hour = h;

    double wait_total = 0.0;
    for (const auto& req : requests_) {
        const auto hour = static_cast<std::size_t>(req.request_time_s / 3600.0);
        HourlyRow& row = r.hourly[hour];
        ++row.requests;
        if (req.state == RequestState::completed) {
            const double wait_min = (pickup_time_s_[static_cast<std::size_t>(req.id)] - req.request_time_s) / 60.0;
            ++r.completed;
            ++row.fulfilled;
            wait_total += wait_min;
            wait_sum[hour] += wait_min;
            r.max_wait_min = std::max(r.max_wait_min, wait_min);
        } else if (req.state == RequestState::cancelled) {
            ++r.cancelled;
            ++row.cancelled;
        } else {
            throw InvariantViolation("request " + std::to_string(req.id) + " ended in state " +
                                     dispatch::to_string(req.state));
        }
    }
    for (std::size_t h = 0; h < r.hourly.size(); ++h) {
        if (r.hourly[h].fulfilled > 0) r.hourly[h].mean_wait_min = wait_sum[h] / static_cast<double>(r.hourly[h].fulfilled);
    }
    const std::int64_t resolved = r.completed + r.cancelled;
    r.fulfill_rate = resolved > 0 ? static_cast<double>(r.completed) / static_cast<double>(resolved) : 1.0;
    r.mean_wait_min = r.completed > 0 ? wait_total / static_cast<double>(r.completed) : 0.0;

    std::vector<double> incomes;
    incomes.reserve(fleet_.size());
    for (const auto& t : fleet_.taxis()) incomes.push_back(t.cumulative_income);
    const bool any_income = std::any_of(incomes.begin(), incomes.end(), [](double x) { return x > 0.0; });
    r.gini = any_income ? gini(incomes) : 0.0;

    r.total_fleet_km = total_km_;
    r.loaded_km = loaded_km_;
    r.mean_distance_km = total_km_ / static_cast<double>(fleet_.size());
    r.energy_consumed_kwh = total_km_ * scenario_.fleet.consumption_kwh_per_km();
    r.energy_charged_kwh = energy_charged_;
    r.charging_sessions = charging_sessions_;
    r.escalated_assignments = escalated_;
    r.emissions = emissions::default_fleet_comparison(total_km_);
    return r;
}

void Simulation::dispatch_event(const Event& e)
{
    switch (e.kind) {
    case EventKind::request_arrival: on_request(e); break;
    case EventKind::trip_pickup_complete: on_pickup(e); break;
    case EventKind::trip_dropoff_complete: on_dropoff(e); break;
    case EventKind::charge_start: on_station_arrival(e); break;
    case EventKind::charge_complete: on_charge_complete(e); break;
    case EventKind::waitlist_tick: on_tick(e); break;
    }
}

void Simulation::on_request(const Event& e)
{
    log(e.time, LogKind::request_arrival, -1, e.request, -1);
    // Waitlisted requests outrank a request arriving at the same instant.
    scan_waitlist(e.time);
    auto& req = requests_[static_cast<std::size_t>(e.request)];
    if (auto a = dispatcher_.handle_request(req, fleet_, context(e.time))) {
        apply_assignment(*a, e.time);
    } else {
        ensure_tick(e.time);
    }
}

void Simulation::apply_assignment(const dispatch::Assignment& a, double now)
{
    const auto& req = requests_[static_cast<std::size_t>(a.request)];
    const auto& taxi = fleet_[a.taxi];
    if (scenario_.check_invariants) {
        if (!dispatch::reachability_test(taxi, req, scenario_.dispatch.reachability_buffer)) {
            throw InvariantViolation("taxi " + std::to_string(a.taxi) + " assigned without passing reachability");
        }
        if (serving_request_[static_cast<std::size_t>(a.taxi)] != -1) {
            throw InvariantViolation("taxi " + std::to_string(a.taxi) + " assigned twice");
        }
    }
    serving_request_[static_cast<std::size_t>(a.taxi)] = a.request;
    if (a.escalated) ++escalated_;
    log(now, LogKind::assigned, a.taxi, a.request, -1, 0.0, a.breakdown.total);
    const double pickup_km = geo::manhattan(taxi.position, req.origin);
    schedule(now + travel_time_s(pickup_km, scenario_.fleet.speed_kmh), EventKind::trip_pickup_complete, a.taxi,
             a.request);
}

void Simulation::drive(TaxiId id, double km)
{
    auto& t = fleet_[id];
    t.energy_kwh -= km * t.consumption_kwh_per_km;
    total_km_ += km;
    km_by_taxi_[static_cast<std::size_t>(id)] += km;
}

void Simulation::on_pickup(const Event& e)
{
    auto& taxi = fleet_[e.taxi];
    const auto& req = requests_[static_cast<std::size_t>(e.request)];
    const double km = geo::manhattan(taxi.position, req.origin);
    drive(e.taxi, km);
    taxi.position = req.origin;
    pickup_time_s_[static_cast<std::size_t>(e.request)] = e.time;
    log(e.time, LogKind::pickup, e.taxi, e.request, -1, km);
    schedule(e.time + travel_time_s(req.trip_distance_km, scenario_.fleet.speed_kmh),
             EventKind::trip_dropoff_complete, e.taxi, e.request);
}

void Simulation::on_dropoff(const Event& e)
{
    auto& taxi = fleet_[e.taxi];
    auto& req = requests_[static_cast<std::size_t>(e.request)];
    drive(e.taxi, req.trip_distance_km);
    loaded_km_ += req.trip_distance_km;
    taxi.position = req.destination;
    const double fare = scenario_.fare.fare(req.trip_distance_km);
    fleet_.add_income(e.taxi, fare);
    ++taxi.order_count;
    req.state = RequestState::completed;
    serving_request_[static_cast<std::size_t>(e.taxi)] = -1;
    log(e.time, LogKind::dropoff, e.taxi, e.request, -1, req.trip_distance_km, fare);

    const auto decision = dispatcher_.post_trip_decision(taxi);
    if (decision.action == dispatch::PostTripAction::to_station) {
        fleet_.make_busy(e.taxi, TaxiState::heading_to_station);
        const double km = geo::manhattan(taxi.position, scenario_.layout[decision.station].centroid);
        schedule(e.time + travel_time_s(km, scenario_.fleet.speed_kmh), EventKind::charge_start, e.taxi, -1,
                 decision.station);
    } else {
        fleet_.make_available(e.taxi, e.time);
        scan_waitlist(e.time);
    }
}

void Simulation::on_station_arrival(const Event& e)
{
    auto& taxi = fleet_[e.taxi];
    auto& st = stations_[static_cast<std::size_t>(e.station)];
    const GeoPoint centroid = scenario_.layout[e.station].centroid;
    const double km = geo::manhattan(taxi.position, centroid);
    drive(e.taxi, km);
    taxi.position = centroid;
    st.stats.record_arrival(e.time / 3600.0);
    log(e.time, LogKind::station_arrival, e.taxi, -1, e.station, km);

    if (st.occupied < st.chargers) {
        start_charging(st, e.taxi, e.time);
    } else {
        st.queue.push_back(e.taxi);
        fleet_.make_busy(e.taxi, TaxiState::queued_at_station);
    }
    update_wait_estimate(st, e.time);
    record_chart(st, e.time);
}

void Simulation::start_charging(ChargingStation& st, TaxiId id, double now)
{
    auto& taxi = fleet_[id];
    ++st.occupied;
    fleet_.make_busy(id, TaxiState::charging);
    const double duration = charge_duration_s(taxi.soc(), taxi.battery_kwh, scenario_.fleet.charge_power_kw);
    st.stats.record_charging_time(duration / 3600.0);
    ++charging_sessions_;
    log(now, LogKind::charge_start, id, -1, st.id, 0.0, duration);
    schedule(now + duration, EventKind::charge_complete, id, -1, st.id);
}

void Simulation::on_charge_complete(const Event& e)
{
    auto& taxi = fleet_[e.taxi];
    auto& st = stations_[static_cast<std::size_t>(e.station)];
    const double added = taxi.battery_kwh - taxi.energy_kwh;
    taxi.energy_kwh = taxi.battery_kwh;
    energy_charged_ += added;
    --st.occupied;
    log(e.time, LogKind::charge_complete, e.taxi, -1, e.station, 0.0, added);
    fleet_.make_available(e.taxi, e.time);
    if (!st.queue.empty()) {
        const TaxiId next = st.queue.front();
        st.queue.pop_front();
        start_charging(st, next, e.time);
    }
    record_chart(st, e.time);
    scan_waitlist(e.time);
}

void Simulation::on_tick(const Event& e)
{
    tick_pending_ = false;
    scan_waitlist(e.time);
}

void Simulation::scan_waitlist(double now)
{
    if (dispatcher_.waitlist().empty()) return;
    const auto outcome = dispatcher_.process_waitlist(requests_, fleet_, context(now));
    for (RequestId id : outcome.cancellations) log(now, LogKind::cancelled, -1, id, -1);
    for (const auto& a : outcome.assignments) apply_assignment(a, now);
    ensure_tick(now);
}

void Simulation::ensure_tick(double now)
{
    if (dispatcher_.waitlist().empty() || tick_pending_) return;
    const double tick = scenario_.waitlist_tick_s;
    schedule((std::floor(now / tick) + 1.0) * tick, EventKind::waitlist_tick);
    tick_pending_ = true;
}

void Simulation::update_wait_estimate(ChargingStation& st, double now)
{
    const auto params = queueing::estimate_params(st.stats, now / 3600.0, st.chargers, service_defaults_);
    try {
        st.wait_estimate_h = queueing::w_mgs(params, scenario_.queueing.convention);
    } catch (const UnstableQueueError&) {
        st.wait_estimate_h = std::numeric_limits<double>::infinity();
    } catch (const SingularityError&) {
        // The singular limit diverges, so it saturates like an unstable queue.
        st.wait_estimate_h = std::numeric_limits<double>::infinity();
    }

    double sum = 0.0;
    std::size_t finite = 0;
    for (const auto& s : stations_) {
        if (std::isfinite(s.wait_estimate_h)) {
            sum += s.wait_estimate_h;
            ++finite;
        }
    }
    const double c1 = finite > 0 ? sum / static_cast<double>(finite) : queueing::c1_floor;
    for (std::size_t i = 0; i < stations_.size(); ++i) {
        utilization_[i] = queueing::utilization(stations_[i].wait_estimate_h, c1);
    }
}

void Simulation::record_chart(const ChargingStation& st, double now)
{
    chart_.push_back({now, st.id, st.occupied, st.queue.size()});
}

void Simulation::check_invariants(double now) const
{
    const auto fail = [now](const std::string& what) {
        throw InvariantViolation("t=" + std::to_string(now) + "s: " + what);
    };

    std::size_t charging = 0;
    std::size_t queued = 0;
    double energy_now = 0.0;
    std::set<RequestId> served;
    for (const auto& t : fleet_.taxis()) {
        const double soc = t.soc();
        if (!(soc >= -1e-12 && soc <= 1.0 + 1e-12)) fail("taxi " + std::to_string(t.id) + " soc out of [0,1]");
        energy_now += t.energy_kwh;

        const bool indexed = fleet_.available_in(fleet_.region_of(t.id)).count(t.id) == 1;
        if ((t.state == TaxiState::available) != indexed) {
            fail("taxi " + std::to_string(t.id) + " availability index disagrees with state");
        }
        if (t.state == TaxiState::available && fleet_.region_of(t.id) != geo::assign_subregion(t.position, scenario_.layout)) {
            fail("taxi " + std::to_string(t.id) + " indexed in the wrong sub-region");
        }
        const RequestId req = serving_request_[static_cast<std::size_t>(t.id)];
        if ((t.state == TaxiState::serving) != (req >= 0)) {
            fail("taxi " + std::to_string(t.id) + " serving state disagrees with its request");
        }
        if (req >= 0) {
            if (!served.insert(req).second) fail("request " + std::to_string(req) + " has two taxis");
            if (requests_[static_cast<std::size_t>(req)].state != RequestState::assigned) {
                fail("request " + std::to_string(req) + " is being served but not assigned");
            }
        }
        if (t.state == TaxiState::charging) ++charging;
        if (t.state == TaxiState::queued_at_station) ++queued;
    }
    for (const auto& r : requests_) {
        if (r.state == RequestState::assigned && served.count(r.id) == 0) {
            fail("request " + std::to_string(r.id) + " assigned without a taxi");
        }
    }

    std::size_t occupied = 0;
    std::size_t in_queues = 0;
    for (const auto& st : stations_) {
        if (st.occupied < 0 || st.occupied > st.chargers) fail("station " + std::to_string(st.id) + " over capacity");
        if (!st.queue.empty() && st.occupied != st.chargers) {
            fail("station " + std::to_string(st.id) + " queues taxis while a charger is free");
        }
        for (TaxiId id : st.queue) {
            if (fleet_[id].state != TaxiState::queued_at_station) fail("queued taxi in wrong state");
        }
        occupied += static_cast<std::size_t>(st.occupied);
        in_queues += st.queue.size();
    }
    if (occupied != charging || in_queues != queued) fail("station occupancy disagrees with taxi states");

    const double consumed = initial_energy_ + energy_charged_ - energy_now;
    const double expected = total_km_ * scenario_.fleet.consumption_kwh_per_km();
    if (std::abs(consumed - expected) > 1e-9 * std::max(expected, 1.0)) {
        fail("energy accounting drift: consumed " + std::to_string(consumed) + " kWh vs driven " +
             std::to_string(expected) + " kWh");
    }

    const auto& wl = dispatcher_.waitlist();
    for (std::size_t i = 0; i < wl.size(); ++i) {
        const auto& r = requests_[static_cast<std::size_t>(wl[i])];
        if (r.state != RequestState::waitlisted) fail("waitlist holds a request that is not waitlisted");
        if (i > 0) {
            const auto& prev = requests_[static_cast<std::size_t>(wl[i - 1])];
            if (std::pair(prev.request_time_s, prev.id) > std::pair(r.request_time_s, r.id)) {
                fail("waitlist is out of arrival order");
            }
        }
    }
}

SimReport run(const Scenario& scenario)
{
    Simulation sim(scenario);
    return sim.run();
}

void write_report(std::ostream& out, const SimReport& r)
{
    nlohmann::ordered_json j;
    j["fleet_size"] = r.fleet_size;
    j["requests"] = r.requests;
    j["completed"] = r.completed;
    j["cancelled"] = r.cancelled;
    j["fulfill_rate"] = r.fulfill_rate;
    j["mean_wait_min"] = r.mean_wait_min;
    j["max_wait_min"] = r.max_wait_min;
    j["gini"] = r.gini;
    j["mean_distance_km"] = r.mean_distance_km;
    j["total_fleet_km"] = r.total_fleet_km;
    j["loaded_km"] = r.loaded_km;
    j["energy_consumed_kwh"] = r.energy_consumed_kwh;
    j["energy_charged_kwh"] = r.energy_charged_kwh;
    j["charging_sessions"] = r.charging_sessions;
    j["escalated_assignments"] = r.escalated_assignments;
    j["emissions"] = {{"fleet_km", r.emissions.fleet_km},
                      {"tv_kg", r.emissions.tv_kg},
                      {"ev_kg", r.emissions.ev_kg},
                      {"reduction_fraction", r.emissions.reduction_fraction}};
    out << j.dump(2) << '\n';
}

void write_hourly(std::ostream& out, const SimReport& r)
{
    out << "hour,requests,fulfilled,cancelled,mean_wait\n";
    for (const auto& h : r.hourly) {
        out << h.hour << ',' << h.requests << ',' << h.fulfilled << ',' << h.cancelled << ','
            << csv::format_double(h.mean_wait_min) << '\n';
    }
}

void write_operation_chart(std::ostream& out, std::span<const ChartRow> chart)
{
    out << "time,station_id,occupied,queue_len\n";
    for (const auto& c : chart) {
        out << csv::format_double(c.time_s) << ',' << c.station << ',' << c.occupied << ',' << c.queue_len << '\n';
    }
}

} // namespace etaxi::sim
