#pragma once

#include "etaxi/dispatch.hpp"
#include "etaxi/emissions.hpp"
#include "etaxi/geo.hpp"
#include "etaxi/queueing.hpp"

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <queue>
#include <span>
#include <vector>

namespace etaxi::sim {

using dispatch::RequestId;
using dispatch::TaxiId;
using geo::GeoPoint;
using geo::StationId;

/// Seconds to cover `dist_km` at `speed_kmh`.
double travel_time_s(double dist_km, double speed_kmh);

/// Seconds to charge linearly from `soc` to full.
double charge_duration_s(double soc, double battery_kwh, double power_kw);

/// Gini coefficient: mean absolute difference over twice the mean. Throws
/// std::invalid_argument when the values are empty, negative or all zero.
double gini(std::span<const double> values);

struct Demand {
    GeoPoint origin;
    GeoPoint destination;
    double time_s = 0.0;  // since horizon start
};

struct FleetSpec {
    std::size_t taxis = 9000;
    double battery_kwh = 38.0;
    double range_km = 250.0;
    double speed_kmh = 30.0;
    double charge_power_kw = 60.0;
    double initial_soc = 1.0;

    double consumption_kwh_per_km() const { return battery_kwh / range_km; }
};

struct FareModel {
    double flag_fall = 13.0;
    double per_km = 2.3;

    double fare(double km) const { return flag_fall + per_km * km; }
};

struct QueueingSettings {
    queueing::XiConvention convention = queueing::XiConvention::cv;
    std::size_t sample_window = 100;
};

struct Scenario {
    std::vector<Demand> demands;
    geo::StationLayout layout;
    FleetSpec fleet;
    dispatch::DispatchConfig dispatch;
    QueueingSettings queueing;
    FareModel fare;
    double waitlist_tick_s = 60.0;
    /// Checks every invariant after each event and throws InvariantViolation.
    bool check_invariants = false;
    bool record_event_log = false;

    /// Throws ConfigError listing every problem found.
    void validate() const;
};

enum class EventKind {
    request_arrival,
    trip_pickup_complete,
    trip_dropoff_complete,
    charge_start,  // taxi reaches the station; charges or joins the queue
    charge_complete,
    waitlist_tick,
};

const char* to_string(EventKind k);

enum class LogKind {
    request_arrival,
    assigned,
    cancelled,
    pickup,
    dropoff,
    station_arrival,
    charge_start,
    charge_complete,
};

const char* to_string(LogKind k);

/// One entry of the event log. `km` is the distance driven on the leg that
/// just ended (pickup, dropoff, station_arrival); `value` is the fare for
/// dropoffs, the planned charging seconds for charge_start, the energy added
/// for charge_complete and the score for assigned.
struct LogEntry {
    double time_s = 0.0;
    LogKind kind = LogKind::request_arrival;
    TaxiId taxi = -1;
    RequestId request = -1;
    StationId station = -1;
    double km = 0.0;
    double value = 0.0;

    friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

struct ChartRow {
    double time_s = 0.0;
    StationId station = 0;
    int occupied = 0;
    std::size_t queue_len = 0;
};

struct ChargingStation {
    StationId id = 0;
    int chargers = 1;
    int occupied = 0;
    std::deque<TaxiId> queue;
    queueing::StationStats stats;
    double wait_estimate_h = 0.0;
};

struct HourlyRow {
    std::size_t hour = 0;
    std::int64_t requests = 0;
    std::int64_t fulfilled = 0;
    std::int64_t cancelled = 0;
    double mean_wait_min = 0.0;
};

struct SimReport {
    std::size_t fleet_size = 0;
    std::int64_t requests = 0;
    std::int64_t completed = 0;
    std::int64_t cancelled = 0;
    double fulfill_rate = 1.0;
    double mean_wait_min = 0.0;
    double max_wait_min = 0.0;
    double gini = 0.0;
    double mean_distance_km = 0.0;
    double total_fleet_km = 0.0;
    double loaded_km = 0.0;
    double energy_consumed_kwh = 0.0;
    double energy_charged_kwh = 0.0;
    std::int64_t charging_sessions = 0;
    std::int64_t escalated_assignments = 0;
    std::vector<HourlyRow> hourly;
    emissions::FleetComparison emissions;
};

/// Event-driven fleet simulation. Single-threaded and deterministic: events
/// run in (time, insertion sequence) order.
class Simulation {
public:
    explicit Simulation(Scenario scenario);
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    SimReport run();

    const std::vector<LogEntry>& event_log() const { return log_; }
    const std::vector<ChartRow>& operation_chart() const { return chart_; }
    const std::vector<dispatch::RideRequest>& requests() const { return requests_; }
    const dispatch::Fleet& fleet() const { return fleet_; }
    const std::vector<ChargingStation>& stations() const { return stations_; }
    /// Pickup-distance normalizer in use (95th percentile sub-region radius).
    double d_ref_km() const { return d_ref_km_; }
    std::int64_t events_processed() const { return events_processed_; }

private:
    struct Event {
        double time = 0.0;
        std::uint64_t seq = 0;
        EventKind kind = EventKind::request_arrival;
        TaxiId taxi = -1;
        RequestId request = -1;
        StationId station = -1;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    void schedule(double time, EventKind kind, TaxiId taxi = -1, RequestId request = -1, StationId station = -1);
    void dispatch_event(const Event& e);

    void on_request(const Event& e);
    void on_pickup(const Event& e);
    void on_dropoff(const Event& e);
    void on_station_arrival(const Event& e);
    void on_charge_complete(const Event& e);
    void on_tick(const Event& e);

    dispatch::ScoreContext context(double now);
    void apply_assignment(const dispatch::Assignment& a, double now);
    void scan_waitlist(double now);
    void ensure_tick(double now);
    void drive(TaxiId id, double km);
    void start_charging(ChargingStation& st, TaxiId id, double now);
    void update_wait_estimate(ChargingStation& st, double now);
    void record_chart(const ChargingStation& st, double now);
    void log(double t, LogKind kind, TaxiId taxi, RequestId request, StationId station, double km = 0.0,
             double value = 0.0);
    void check_invariants(double now) const;

    Scenario scenario_;
    dispatch::Fleet fleet_;
    dispatch::Dispatcher dispatcher_;
    std::vector<dispatch::RideRequest> requests_;
    std::vector<double> pickup_time_s_;
    std::vector<RequestId> serving_request_;  // per taxi, -1 when idle
    std::vector<ChargingStation> stations_;
    std::vector<double> utilization_;
    std::vector<std::int64_t> hourly_demand_;
    queueing::ServiceDefaults service_defaults_;
    double d_ref_km_ = 1.0;

    std::priority_queue<Event, std::vector<Event>, Later> events_;
    std::uint64_t next_seq_ = 0;
    bool tick_pending_ = false;
    bool ran_ = false;
    std::int64_t events_processed_ = 0;

    double total_km_ = 0.0;
    double loaded_km_ = 0.0;
    double energy_charged_ = 0.0;
    double initial_energy_ = 0.0;
    std::int64_t charging_sessions_ = 0;
    std::int64_t escalated_ = 0;
    std::vector<double> km_by_taxi_;

    std::vector<LogEntry> log_;
    std::vector<ChartRow> chart_;
};

/// Convenience wrapper: builds a Simulation and runs it.
SimReport run(const Scenario& scenario);

/// Machine-readable report (JSON).
void write_report(std::ostream& out, const SimReport& report);
/// `hour,requests,fulfilled,cancelled,mean_wait`
void write_hourly(std::ostream& out, const SimReport& report);
/// `time,station_id,occupied,queue_len`
void write_operation_chart(std::ostream& out, std::span<const ChartRow> chart);

} // namespace etaxi::sim
