#include "etaxi/dispatch.hpp"
#include "etaxi/error.hpp"
#include "etaxi/queueing.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

using namespace etaxi;
using namespace etaxi::dispatch;

namespace {

// Stations along the x axis, 10 km apart.
geo::StationLayout line_layout(int n = 5)
{
    std::vector<geo::Station> st;
    for (int i = 0; i < n; ++i) st.push_back({i, {10.0 * i, 0.0}, 2});
    return geo::StationLayout(st);
}

ElectricTaxi taxi_at(TaxiId id, GeoPoint p, double soc = 1.0)
{
    ElectricTaxi t;
    t.id = id;
    t.position = p;
    t.energy_kwh = soc * t.battery_kwh;
    return t;
}

std::vector<double> zero_util(std::size_t n = 5) { return std::vector<double>(n, 0.0); }

} // namespace

TEST_CASE("f_demand")
{
    CHECK(f_demand(100, 0.1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f_demand(0, 0.01) == 0.0);
    CHECK(f_demand(400, 0.001) == doctest::Approx(0.02).epsilon(1e-15));
    CHECK_THROWS(f_demand(-1, 0.1));
}

TEST_CASE("reachability")
{
    const geo::StationLayout layout({{0, {0, 0}, 1}});
    ElectricTaxi t = taxi_at(0, {0, 0});
    t.consumption_kwh_per_km = 0.25;
    const auto req = make_request(0, {1, 0}, {3, 0}, 0, layout);
    CHECK(req.trip_distance_km == 2.0);
    CHECK(req.destination_to_station_km == 3.0);

    // Need (1 + 2 + 3) km * 0.25 = 1.5 kWh, all exactly representable.
    t.energy_kwh = 1.5;
    CHECK(required_energy_kwh(t, req, 0.0) == 1.5);
    CHECK(reachability_test(t, req, 0.0));
    t.energy_kwh = std::nextafter(1.5, 0.0);
    CHECK_FALSE(reachability_test(t, req, 0.0));
    t.energy_kwh = 1.5;
    CHECK_FALSE(reachability_test(t, req, 0.5));
    t.energy_kwh = 2.25;
    CHECK(reachability_test(t, req, 0.5));

    t.energy_kwh = 0.0;
    CHECK_FALSE(reachability_test(t, req, 0.0));
    t.energy_kwh = t.battery_kwh;
    CHECK(reachability_test(t, req, 0.1));
}

TEST_CASE("score signs")
{
    const auto layout = line_layout();
    const auto util = zero_util();
    const DispatchConfig cfg;
    ScoreContext ctx{0.0, 100.0, 2.0, 50.0, util};
    const auto req = make_request(0, {10, 0}, {20, 0}, 0, layout);

    SUBCASE("nearer taxi scores higher")
    {
        const auto near = taxi_at(0, {11, 0}), far = taxi_at(1, {13, 0});
        CHECK(score(near, req, cfg, ctx).total > score(far, req, cfg, ctx).total);
    }
    SUBCASE("lower income scores higher")
    {
        auto poor = taxi_at(0, {11, 0}), rich = taxi_at(1, {11, 0});
        poor.cumulative_income = 10;
        rich.cumulative_income = 90;
        CHECK(score(poor, req, cfg, ctx).total > score(rich, req, cfg, ctx).total);
    }
    SUBCASE("empty time ignored with w4 = 0")
    {
        auto idle = taxi_at(0, {11, 0}), fresh = taxi_at(1, {11, 0});
        idle.empty_since_s = -7200;
        ctx.now_s = 0;
        const auto a = score(idle, req, cfg, ctx), b = score(fresh, req, cfg, ctx);
        CHECK(a.empty_time_norm == 1.0);
        CHECK(b.empty_time_norm == 0.0);
        CHECK(a.total == b.total);

        auto with_w4 = cfg;
        with_w4.w4 = 1.0;
        CHECK(score(idle, req, with_w4, ctx).total > score(fresh, req, with_w4, ctx).total);
    }
}

TEST_CASE("score breakdown reproduces the total")
{
    const auto layout = line_layout();
    std::vector<double> util{0.1, 0.5, 0.9, 1.0, 0.0};
    DispatchConfig cfg;
    cfg.w4 = 0.3;
    const ScoreContext ctx{1800.0, 144.0, 3.0, 20.0, util};
    auto t = taxi_at(0, {8, 1}, 0.7);
    t.cumulative_income = 31;
    t.empty_since_s = 600;
    const auto req = make_request(0, {9, 2}, {21, -3}, 0, layout);
    const auto b = score(t, req, cfg, ctx);

    CHECK(b.d_km == 2.0);
    CHECK(b.d_norm == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(b.income_norm == doctest::Approx(31.0 / (20.0 + 1e-6)).epsilon(1e-15));
    CHECK(b.f_demand == doctest::Approx(0.12).epsilon(1e-15));
    CHECK(b.empty_time_norm == doctest::Approx(20.0 / 60.0).epsilon(1e-15));
    const double soc_after = (0.7 * 38.0 - (2.0 + 17.0) * 0.152) / 38.0;
    const double o = -(0.9 - soc_after) * (0.9 - soc_after) + 1.0;
    CHECK(b.match_degree == doctest::Approx(o).epsilon(1e-14));
    const double total = 0.12 * -1.0 * (2.0 / 3.0) - 0.5 * b.income_norm + o + 0.3 * b.empty_time_norm;
    CHECK(b.total == doctest::Approx(total).epsilon(1e-14));
}

TEST_CASE("select_best")
{
    CHECK_FALSE(select_best({}).has_value());
    const std::vector<ScoredCandidate> one{{7, -3.0}};
    CHECK(select_best(one) == 7);
    const std::vector<ScoredCandidate> tie{{9, 1.0}, {4, 1.0}, {6, 0.5}};
    CHECK(select_best(tie) == 4);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-5, 5);
    std::uniform_int_distribution<int> exponent(-20, 20);
    std::uniform_int_distribution<int> coarse(-3, 3);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<ScoredCandidate> v;
        const int n = 1 + trial % 12;
        for (int i = 0; i < n; ++i) {
            const double s = trial % 2 ? u(rng) : static_cast<double>(coarse(rng));
            v.push_back({static_cast<TaxiId>((i * 7 + trial) % 50), s});
        }
        // Brute-force argmax with smaller id on ties.
        auto best = v.front();
        for (const auto& c : v) {
            if (c.score > best.score || (c.score == best.score && c.id < best.id)) best = c;
        }
        CHECK(select_best(v) == best.id);

        // Power-of-two factors rescale without rounding.
        const double c = std::ldexp(1.0, exponent(rng));
        auto scaled = v;
        for (auto& s : scaled) s.score *= c;
        CHECK(select_best(scaled) == best.id);
    }
}

TEST_CASE("config validation")
{
    DispatchConfig c;
    CHECK_NOTHROW(c.validate());
    c.cancel_min = 4;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.reachability_buffer = -0.1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.escalation_min = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);

    const auto layout = line_layout(3);
    DispatchConfig adj;
    adj.adjacency = 3;
    CHECK_THROWS_AS(Dispatcher(layout, adj), ConfigError);
    adj.adjacency = 2;
    CHECK_NOTHROW(Dispatcher(layout, adj));
}

TEST_CASE("handle_request")
{
    const auto layout = line_layout();
    const auto util = zero_util();
    const ScoreContext ctx{0.0, 10.0, 2.0, 0.0, util};
    Dispatcher d(layout, {});

    SUBCASE("no taxi in the sub-region is waitlisted")
    {
        Fleet fleet({taxi_at(0, {30, 0})}, layout);
        auto req = make_request(0, {0, 1}, {10, 0}, 0, layout);
        CHECK_FALSE(d.handle_request(req, fleet, ctx).has_value());
        CHECK(req.state == RequestState::waitlisted);
        CHECK(d.waitlist().size() == 1);
    }
    SUBCASE("one reachable taxi is assigned")
    {
        Fleet fleet({taxi_at(0, {1, 0})}, layout);
        auto req = make_request(0, {0, 1}, {10, 0}, 0, layout);
        const auto a = d.handle_request(req, fleet, ctx);
        REQUIRE(a.has_value());
        CHECK(a->taxi == 0);
        CHECK_FALSE(a->escalated);
        CHECK(fleet[0].state == TaxiState::serving);
        CHECK(fleet.available_in(0).empty());
        CHECK(req.state == RequestState::assigned);
    }
    SUBCASE("unreachable taxi is skipped")
    {
        Fleet fleet({taxi_at(0, {1, 0}, 0.01), taxi_at(1, {3, 0})}, layout);
        auto req = make_request(0, {0, 1}, {10, 0}, 0, layout);
        const auto a = d.handle_request(req, fleet, ctx);
        REQUIRE(a.has_value());
        CHECK(a->taxi == 1);
    }
    SUBCASE("waitlist keeps arrival order")
    {
        Fleet fleet({taxi_at(0, {40, 0})}, layout);
        std::vector<RideRequest> reqs;
        for (int i = 0; i < 4; ++i) reqs.push_back(make_request(i, {0, 0}, {1, 1}, i, layout));
        for (auto& r : reqs) d.handle_request(r, fleet, ctx);
        CHECK(std::vector<RequestId>(d.waitlist().begin(), d.waitlist().end()) ==
              std::vector<RequestId>{0, 1, 2, 3});
    }
}

TEST_CASE("waitlist escalation and cancellation")
{
    const auto layout = line_layout();
    const auto util = zero_util();
    DispatchConfig cfg;
    cfg.adjacency = 1;
    Dispatcher d(layout, cfg);
    // Taxi in sub-region 1, request in sub-region 0 (adjacent).
    Fleet fleet({taxi_at(0, {10, 0})}, layout);
    std::vector<RideRequest> reqs{make_request(0, {0, 0}, {2, 0}, 0, layout)};
    ScoreContext ctx{0.0, 10.0, 2.0, 0.0, util};
    REQUIRE_FALSE(d.handle_request(reqs[0], fleet, ctx).has_value());

    ctx.now_s = 5 * 60;
    auto out = d.process_waitlist(reqs, fleet, ctx);
    CHECK(out.assignments.empty());
    CHECK(d.waitlist().size() == 1);

    ctx.now_s = 6 * 60;
    out = d.process_waitlist(reqs, fleet, ctx);
    REQUIRE(out.assignments.size() == 1);
    CHECK(out.assignments[0].taxi == 0);
    CHECK(out.assignments[0].escalated);
    CHECK(d.waitlist().empty());
    CHECK(reqs[0].state == RequestState::assigned);
}

TEST_CASE("waitlist cancellation without taxis")
{
    const auto layout = line_layout();
    const auto util = zero_util();
    Dispatcher d(layout, {});
    Fleet fleet({taxi_at(0, {40, 0}, 0.0)}, layout);
    std::vector<RideRequest> reqs{make_request(0, {0, 0}, {2, 0}, 0, layout),
                                  make_request(1, {0, 0}, {2, 0}, 600, layout)};
    ScoreContext ctx{0.0, 10.0, 2.0, 0.0, util};
    for (auto& r : reqs) d.handle_request(r, fleet, ctx);

    ctx.now_s = 30 * 60;
    CHECK(d.process_waitlist(reqs, fleet, ctx).cancellations.empty());
    ctx.now_s = 30 * 60 + 1;
    const auto out = d.process_waitlist(reqs, fleet, ctx);
    CHECK(out.cancellations == std::vector<RequestId>{0});
    CHECK(reqs[0].state == RequestState::cancelled);
    CHECK(reqs[1].state == RequestState::waitlisted);
    CHECK(d.waitlist().size() == 1);
}

TEST_CASE("earlier waitlisted request wins a freed taxi")
{
    const auto layout = line_layout();
    const auto util = zero_util();
    Dispatcher d(layout, {});
    Fleet fleet({taxi_at(0, {1, 0})}, layout);
    fleet.make_busy(0, TaxiState::serving);
    std::vector<RideRequest> reqs{make_request(0, {0, 3}, {2, 0}, 0, layout),
                                  make_request(1, {0, 0}, {2, 0}, 60, layout)};
    ScoreContext ctx{0.0, 10.0, 2.0, 0.0, util};
    for (auto& r : reqs) d.handle_request(r, fleet, ctx);

    ctx.now_s = 120;
    fleet.make_available(0, ctx.now_s);
    const auto out = d.process_waitlist(reqs, fleet, ctx);
    REQUIRE(out.assignments.size() == 1);
    CHECK(out.assignments[0].request == 0);
    CHECK(reqs[1].state == RequestState::waitlisted);
}

TEST_CASE("post-trip decision")
{
    const auto layout = line_layout();
    Dispatcher d(layout, {});
    auto t = taxi_at(0, {19, 2}, 1.0);
    CHECK(d.post_trip_decision(t).action == PostTripAction::stay_available);
    t.energy_kwh = std::nextafter(0.2 * t.battery_kwh, 0.0);
    const auto dec = d.post_trip_decision(t);
    CHECK(dec.action == PostTripAction::to_station);
    CHECK(dec.station == 2);
}

TEST_CASE("fleet availability index")
{
    const auto layout = line_layout();
    Fleet fleet({taxi_at(0, {0, 0}), taxi_at(1, {10, 0}), taxi_at(2, {11, 0})}, layout);
    CHECK(fleet.available_in(1).size() == 2);
    fleet.make_busy(1, TaxiState::serving);
    CHECK(fleet.available_in(1) == std::set<TaxiId>{2});
    fleet[1].position = {39, 0};
    fleet.make_available(1, 100.0);
    CHECK(fleet.region_of(1) == 4);
    CHECK(fleet.available_in(4) == std::set<TaxiId>{1});
    CHECK(fleet[1].empty_since_s == 100.0);

    fleet.add_income(0, 30);
    fleet.add_income(2, 15);
    CHECK(fleet.mean_income() == 15.0);
}
