#include "etaxi/error.hpp"
#include "etaxi/simkernel.hpp"

#include "doctest.h"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

using namespace etaxi;
using namespace etaxi::sim;

namespace {

geo::StationLayout line_layout(int n, int chargers = 2)
{
    std::vector<geo::Station> st;
    for (int i = 0; i < n; ++i) st.push_back({i, {10.0 * i, 0.0}, chargers});
    return geo::StationLayout(st);
}

Scenario base_scenario(geo::StationLayout layout, std::size_t taxis)
{
    Scenario s{{}, std::move(layout), {}, {}, {}, {}};
    s.fleet.taxis = taxis;
    s.dispatch.adjacency = std::min<std::size_t>(3, s.layout.size() - 1);
    s.check_invariants = true;
    s.record_event_log = true;
    return s;
}

Scenario random_scenario(std::uint64_t seed, std::size_t taxis, std::size_t demands, double hours, int chargers = 2)
{
    std::vector<geo::Station> st;
    for (int i = 0; i < 9; ++i) st.push_back({i, {6.0 * (i % 3) - 6.0, 6.0 * (i / 3) - 6.0}, chargers});
    Scenario s = base_scenario(geo::StationLayout(st), taxis);
    s.fleet.initial_soc = 0.5;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> xy(-9, 9), t(0, hours * 3600);
    for (std::size_t i = 0; i < demands; ++i) s.demands.push_back({{xy(rng), xy(rng)}, {xy(rng), xy(rng)}, t(rng)});
    return s;
}

// Mean absolute difference over twice the mean, evaluated pairwise.
double gini_pairwise(const std::vector<double>& v)
{
    double diff = 0, sum = 0;
    for (double a : v) {
        sum += a;
        for (double b : v) diff += std::abs(a - b);
    }
    const double n = static_cast<double>(v.size());
    return diff / (n * n) / (2.0 * sum / n);
}

} // namespace

TEST_CASE("travel and charging durations")
{
    CHECK(travel_time_s(15, 30) == doctest::Approx(1800).epsilon(1e-15));
    CHECK(travel_time_s(0, 30) == 0.0);
    CHECK(travel_time_s(3, 30) + travel_time_s(4.5, 30) == doctest::Approx(travel_time_s(7.5, 30)).epsilon(1e-15));
    CHECK_THROWS(travel_time_s(1, 0));

    CHECK(charge_duration_s(0.2, 38, 60) / 60.0 == doctest::Approx(30.4).epsilon(1e-14));
    CHECK(charge_duration_s(1.0, 38, 60) == 0.0);
    CHECK_THROWS(charge_duration_s(0.5, 38, 0));
}

TEST_CASE("gini")
{
    const std::vector<double> pair{0, 1};
    CHECK(gini(pair) == doctest::Approx(0.5).epsilon(1e-15));
    const std::vector<double> equal(7, 3.5);
    CHECK(gini(equal) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS(gini(std::vector<double>{}));
    CHECK_THROWS(gini(std::vector<double>{0, 0}));
    CHECK_THROWS(gini(std::vector<double>{1, -1}));

    std::mt19937_64 rng(41);
    std::exponential_distribution<double> e(0.1);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(1 + trial);
        for (auto& x : v) x = e(rng);
        const double g = gini(v);
        CHECK(g == doctest::Approx(gini_pairwise(v)).epsilon(1e-10));
        CHECK(g >= 0.0);
        CHECK(g <= 1.0);
        auto scaled = v;
        for (auto& x : scaled) x *= 17.25;
        CHECK(gini(scaled) == doctest::Approx(g).epsilon(1e-12));
    }
}

TEST_CASE("scenario validation happens before any event")
{
    auto s = base_scenario(line_layout(3), 0);
    CHECK_THROWS_AS(Simulation{s}, ConfigError);
    s = base_scenario(line_layout(3), 2);
    s.dispatch.adjacency = 3;
    CHECK_THROWS_AS(Simulation{s}, ConfigError);
    s = base_scenario(line_layout(3), 2);
    s.fleet.speed_kmh = 0;
    CHECK_THROWS_AS(Simulation{s}, ConfigError);
    s = base_scenario(line_layout(3), 2);
    s.demands.push_back({{0, 0}, {1, 1}, -5});
    CHECK_THROWS_AS(Simulation{s}, ConfigError);
}

TEST_CASE("zero requests")
{
    const auto r = run(base_scenario(line_layout(3), 5));
    CHECK(r.requests == 0);
    CHECK(r.fulfill_rate == 1.0);
    CHECK(r.mean_distance_km == 0.0);
    CHECK(r.gini == 0.0);
}

TEST_CASE("single request trace")
{
    auto s = base_scenario(line_layout(3), 1);
    s.demands.push_back({{3, 0}, {3, 4}, 100});
    Simulation sim(s);
    const auto r = sim.run();
    CHECK(r.completed == 1);
    CHECK(r.fulfill_rate == 1.0);
    // 3 km at 30 km/h.
    CHECK(r.mean_wait_min == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(r.total_fleet_km == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(r.loaded_km == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(r.energy_consumed_kwh == doctest::Approx(7.0 * 0.152).epsilon(1e-14));

    const auto& log = sim.event_log();
    REQUIRE(log.size() == 4);
    CHECK(log[0].kind == LogKind::request_arrival);
    CHECK(log[1].kind == LogKind::assigned);
    CHECK(log[2].kind == LogKind::pickup);
    CHECK(log[2].time_s == doctest::Approx(100 + 360).epsilon(1e-15));
    CHECK(log[3].kind == LogKind::dropoff);
    CHECK(log[3].value == doctest::Approx(13 + 2.3 * 4).epsilon(1e-15));
    CHECK(sim.fleet()[0].state == dispatch::TaxiState::available);
}

TEST_CASE("unserved request is cancelled")
{
    auto s = base_scenario(line_layout(3), 1);
    s.fleet.initial_soc = 0.01;
    s.demands.push_back({{0, 0}, {25, 0}, 0});
    Simulation sim(s);
    const auto r = sim.run();
    CHECK(r.cancelled == 1);
    CHECK(r.completed == 0);
    CHECK(r.fulfill_rate == 0.0);
    CHECK(r.mean_wait_min == 0.0);
    const auto& last = sim.event_log().back();
    CHECK(last.kind == LogKind::cancelled);
    CHECK(last.time_s > 30 * 60);
    CHECK(last.time_s <= 30 * 60 + s.waitlist_tick_s);
}

TEST_CASE("charger queue is served first come first served")
{
    auto s = base_scenario(geo::StationLayout({{0, {0, 0}, 1}}), 2);
    s.dispatch.adjacency = 0;
    s.fleet.initial_soc = 0.21;
    s.demands = {{{0, 0}, {5, 0}, 0}, {{0, 0}, {5, 0}, 10}};
    Simulation sim(s);
    const auto r = sim.run();
    CHECK(r.completed == 2);
    CHECK(r.charging_sessions == 2);

    std::vector<LogEntry> starts, completes;
    for (const auto& e : sim.event_log()) {
        if (e.kind == LogKind::charge_start) starts.push_back(e);
        if (e.kind == LogKind::charge_complete) completes.push_back(e);
    }
    REQUIRE(starts.size() == 2);
    REQUIRE(completes.size() == 2);
    CHECK(starts[0].taxi == 0);
    CHECK(starts[1].taxi == 1);
    CHECK(starts[1].time_s == completes[0].time_s);
    CHECK(starts[0].time_s == doctest::Approx(1200).epsilon(1e-15));

    bool saw_queue = false;
    for (const auto& c : sim.operation_chart()) saw_queue |= c.queue_len == 1 && c.occupied == 1;
    CHECK(saw_queue);
    for (const auto& t : sim.fleet().taxis()) CHECK(t.soc() == 1.0);
    CHECK(r.energy_charged_kwh == doctest::Approx(r.energy_consumed_kwh + 2 * 0.79 * 38).epsilon(1e-12));
}

TEST_CASE("single-charger stations under the reciprocal convention")
{
    auto s = random_scenario(81, 20, 400, 3, 1);
    s.fleet.initial_soc = 0.3;
    s.queueing.convention = queueing::XiConvention::reciprocal;
    Simulation sim(s);
    SimReport r;
    CHECK_NOTHROW(r = sim.run());
    CHECK(r.charging_sessions > 0);
    bool saturated = false;
    for (const auto& st : sim.stations()) saturated |= std::isinf(st.wait_estimate_h);
    CHECK(saturated);
}

TEST_CASE("identical scenarios give identical reports")
{
    const auto s = random_scenario(51, 30, 600, 4);
    auto bytes = [&] {
        Simulation sim(s);
        const auto r = sim.run();
        std::ostringstream os;
        write_report(os, r);
        write_hourly(os, r);
        write_operation_chart(os, sim.operation_chart());
        return std::pair(os.str(), sim.event_log());
    };
    const auto a = bytes(), b = bytes();
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
}

TEST_CASE("report totals match a replay of the event log")
{
    for (std::uint64_t seed : {61, 62, 63}) {
        const auto s = random_scenario(seed, 25, 800, 6);
        Simulation sim(s);
        const auto r = sim.run();
        const auto& log = sim.event_log();

        std::map<RequestId, double> requested, picked;
        std::vector<double> income(s.fleet.taxis, 0.0);
        double km = 0, loaded = 0, charged = 0, wait_sum = 0;
        std::int64_t completed = 0, cancelled = 0, sessions = 0;
        for (const auto& e : log) {
            switch (e.kind) {
            case LogKind::request_arrival: requested[e.request] = e.time_s; break;
            case LogKind::pickup:
                picked[e.request] = e.time_s;
                km += e.km;
                break;
            case LogKind::dropoff:
                ++completed;
                km += e.km;
                loaded += e.km;
                income[static_cast<std::size_t>(e.taxi)] += e.value;
                wait_sum += (picked.at(e.request) - requested.at(e.request)) / 60.0;
                break;
            case LogKind::station_arrival: km += e.km; break;
            case LogKind::charge_start: ++sessions; break;
            case LogKind::charge_complete: charged += e.value; break;
            case LogKind::cancelled: ++cancelled; break;
            case LogKind::assigned: break;
            }
        }
        CHECK(r.completed == completed);
        CHECK(r.cancelled == cancelled);
        CHECK(r.completed + r.cancelled == r.requests);
        CHECK(r.fulfill_rate == doctest::Approx(double(completed) / double(completed + cancelled)).epsilon(1e-15));
        CHECK(r.mean_wait_min == doctest::Approx(wait_sum / double(completed)).epsilon(1e-12));
        CHECK(r.total_fleet_km == doctest::Approx(km).epsilon(1e-12));
        CHECK(r.loaded_km == doctest::Approx(loaded).epsilon(1e-12));
        CHECK(r.mean_distance_km == doctest::Approx(km / double(s.fleet.taxis)).epsilon(1e-12));
        CHECK(r.energy_charged_kwh == doctest::Approx(charged).epsilon(1e-12));
        CHECK(r.charging_sessions == sessions);
        CHECK(r.gini == doctest::Approx(gini_pairwise(income)).epsilon(1e-10));
        CHECK(r.charging_sessions > 0);

        std::int64_t hourly_total = 0;
        for (const auto& h : r.hourly) hourly_total += h.fulfilled + h.cancelled;
        CHECK(hourly_total == r.requests);
    }
}

TEST_CASE("invariant checks hold under pressure")
{
    // Few taxis, many requests, low charge: exercises waitlist, escalation,
    // cancellation and charger queues together.
    auto s = random_scenario(71, 12, 1500, 5, 1);
    s.fleet.initial_soc = 0.3;
    Simulation sim(s);
    SimReport r;
    CHECK_NOTHROW(r = sim.run());
    CHECK(r.cancelled > 0);
    CHECK(r.escalated_assignments > 0);
    CHECK(r.completed > 0);
    for (const auto& t : sim.fleet().taxis()) {
        CHECK(t.soc() >= 0.0);
        CHECK(t.soc() <= 1.0);
    }
    std::size_t max_queue = 0;
    for (const auto& c : sim.operation_chart()) max_queue = std::max(max_queue, c.queue_len);
    CHECK(max_queue > 0);
}
