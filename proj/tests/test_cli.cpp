#include "etaxi/cli.hpp"
#include "etaxi/csv.hpp"
#include "etaxi/error.hpp"
#include "etaxi/scenario.hpp"

#include "doctest.h"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace etaxi;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::path(ETAXI_BINARY_DIR) / "cli_scratch" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

const std::string smoke = std::string(ETAXI_SOURCE_DIR) + "/scenarios/smoke.cfg";

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("usage errors exit with the config code")
{
    auto r = call({});
    CHECK(r.code == cli::config_error);
    r = call({"simulate"});
    CHECK(r.code == cli::config_error);
    CHECK(r.err.rfind("error: config:", 0) == 0);
    r = call({"frobnicate"});
    CHECK(r.code == cli::config_error);
}

TEST_CASE("scenario key problems are reported together")
{
    const auto dir = scratch("keys");
    spit(dir / "bad.cfg", "fleet_size = 10\nflet_size = 3\nwarp = 9\n");
    auto r = call({"simulate", "--scenario", (dir / "bad.cfg").string()});
    CHECK(r.code == cli::config_error);
    CHECK(r.err.find("flet_size") != std::string::npos);
    CHECK(r.err.find("warp") != std::string::npos);
    CHECK(lines_of(r.err).size() == 1);

    spit(dir / "trips.cfg", "source = trips\n");
    r = call({"simulate", "--scenario", (dir / "trips.cfg").string()});
    CHECK(r.code == cli::config_error);
    CHECK(r.err.find("'trips'") != std::string::npos);

    spit(dir / "values.cfg", "fleet_size = -4\ndispatch.cancel_min = 1\nspeed_kmh = fast\n");
    r = call({"simulate", "--scenario", (dir / "values.cfg").string()});
    CHECK(r.code == cli::config_error);
    CHECK(r.err.find("fleet_size") != std::string::npos);
    CHECK(r.err.find("speed_kmh") != std::string::npos);
    CHECK(r.err.find("cancel_min") != std::string::npos);

    r = call({"simulate", "--scenario", (dir / "missing.cfg").string()});
    CHECK(r.code != cli::ok);
}

TEST_CASE("every default key is documented")
{
    for (const auto& k : scenario::known_keys()) {
        CHECK_FALSE(k.description.empty());
    }
    scenario::ScenarioFile f;
    CHECK_NOTHROW(scenario::resolve(f));
}

TEST_CASE("a single status row yields no trips")
{
    const auto dir = scratch("table");
    spit(dir / "rows.csv", "2851,20160502111411,116.326775,39.896811,1\n");
    const auto r = call({"ingest", "--records", (dir / "rows.csv").string(), "--out-dir", (dir / "out").string()});
    CHECK(r.code == cli::data_error);
    CHECK(r.err.rfind("error: data:", 0) == 0);
    CHECK(slurp(dir / "out" / "summary.txt").find("trips=0") != std::string::npos);

    spit(dir / "broken.csv", "2851,20160502111411,116.3,39.9,2\n");
    const auto b = call({"ingest", "--records", (dir / "broken.csv").string(), "--out-dir", (dir / "out2").string()});
    CHECK(b.code == cli::data_error);
    CHECK(b.err.find("line 1") != std::string::npos);

    const auto m = call({"ingest", "--records", (dir / "nope.csv").string(), "--out-dir", (dir / "out3").string()});
    CHECK(m.code == cli::data_error);
}

TEST_CASE("synth, ingest and stations pipeline")
{
    const auto dir = scratch("pipeline");
    spit(dir / "synth.cfg",
         "horizon_start = 20160502000000\nhorizon_hours = 4\nsynthetic.taxis = 300\nsynthetic.trips = 1000\n"
         "synthetic.poisson = false\nsynthetic.profile = 1\n");
    auto r = call({"synth", "--scenario", (dir / "synth.cfg").string(), "--seed", "5", "--out",
                   (dir / "records.csv").string()});
    REQUIRE(r.code == cli::ok);

    const auto ingest = [&](const std::string& out) {
        return call({"ingest", "--records", (dir / "records.csv").string(), "--out-dir", (dir / out).string(),
                     "--horizon-start", "20160502000000", "--hours", "4"});
    };
    r = ingest("a");
    REQUIRE(r.code == cli::ok);
    CHECK(r.out == "trips=1000 excluded=0\n");
    CHECK(slurp(dir / "a" / "demand.csv") == "hour_index,count\n0,250\n1,250\n2,250\n3,250\n");
    CHECK(lines_of(slurp(dir / "a" / "trips.csv")).size() == 1001);

    REQUIRE(ingest("b").code == cli::ok);
    for (const char* f : {"summary.txt", "trips.csv", "demand.csv"}) CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));

    r = call({"stations", "--trips", (dir / "a" / "trips.csv").string(), "--out", (dir / "layout.csv").string(), "--k",
              "5", "--chargers", "3"});
    REQUIRE(r.code == cli::ok);
    const auto layout = lines_of(slurp(dir / "layout.csv"));
    REQUIRE(layout.size() == 6);
    CHECK(layout[0] == "station_id,x_km,y_km,chargers");

    // Simulate from the extracted trips and the sited layout.
    spit(dir / "run.cfg",
         "source = trips\ntrips = a/trips.csv\nlayout = layout.csv\nhorizon_start = 20160502000000\n"
         "horizon_hours = 4\nfleet_size = 80\n");
    r = call({"simulate", "--scenario", (dir / "run.cfg").string()});
    REQUIRE(r.code == cli::ok);
    const auto report = nlohmann::json::parse(r.out);
    CHECK(report["requests"] == 1000);
    CHECK(report["fleet_size"] == 80);
}

TEST_CASE("simulate writes its outputs and honours the seed")
{
    const auto dir = scratch("simulate");
    const auto a = call({"simulate", "--scenario", smoke, "--out-dir", (dir / "a").string()});
    REQUIRE(a.code == cli::ok);
    CHECK(slurp(dir / "a" / "report.json") == a.out);
    CHECK(lines_of(slurp(dir / "a" / "hourly.csv"))[0] == "hour,requests,fulfilled,cancelled,mean_wait");
    CHECK(lines_of(slurp(dir / "a" / "station_chart.csv"))[0] == "time,station_id,occupied,queue_len");

    const auto again = call({"simulate", "--scenario", smoke});
    CHECK(again.out == a.out);

    const auto other = call({"simulate", "--scenario", smoke, "--seed", "99"});
    REQUIRE(other.code == cli::ok);
    CHECK(other.out != a.out);
    const auto ra = nlohmann::json::parse(a.out), ro = nlohmann::json::parse(other.out);
    CHECK(ra["requests"] == ro["requests"]);
    CHECK(ra["fleet_size"] == ro["fleet_size"]);
}

TEST_CASE("sweep rows")
{
    auto r = call({"sweep", "--scenario", smoke, "--jobs", "3"});
    REQUIRE(r.code == cli::ok);
    const auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == cli::sweep_header);
    CHECK(rows[1].rfind("0.001,", 0) == 0);
    CHECK(rows[2].rfind("0.01,", 0) == 0);
    CHECK(rows[3].rfind("0.1,", 0) == 0);

    const auto serial = call({"sweep", "--scenario", smoke, "--jobs", "1"});
    CHECK(serial.out == r.out);
    const auto reversed = call({"sweep", "--scenario", smoke, "--x", "0.1,0.01,0.001"});
    const auto rev_rows = lines_of(reversed.out);
    CHECK(rev_rows[1] == rows[3]);
    CHECK(rev_rows[3] == rows[1]);

    // One x gives the same metrics as simulate.
    const auto one = call({"sweep", "--scenario", smoke, "--x", "0.01"});
    const auto sim = nlohmann::json::parse(call({"simulate", "--scenario", smoke}).out);
    const std::string row = lines_of(one.out)[1];
    const auto fields = csv::split(row, ',');
    CHECK(csv::parse_number<double>(fields[1]) == sim["mean_wait_min"].get<double>());
    CHECK(csv::parse_number<double>(fields[2]) == sim["gini"].get<double>());
    CHECK(csv::parse_number<double>(fields[3]) == sim["fulfill_rate"].get<double>());
    CHECK(csv::parse_number<double>(fields[4]) == sim["mean_distance_km"].get<double>());
}

TEST_CASE("emissions subcommand")
{
    auto r = call({"emissions", "--km", "1000"});
    REQUIRE(r.code == cli::ok);
    const auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "scope,tv_kg,ev_kg,reduction_pct");
    CHECK(rows[1].rfind("per_100km,", 0) == 0);
    CHECK(rows[2].rfind("fleet,", 0) == 0);
    const auto f = csv::split(rows[2], ',');
    CHECK(csv::parse_number<double>(f[1]) == doctest::Approx(186.0).epsilon(0.002));

    CHECK(call({"emissions"}).code == cli::config_error);
    CHECK(call({"emissions", "--km", "-3"}).code == cli::config_error);

    const auto dir = scratch("emissions");
    spit(dir / "report.json", "{\"total_fleet_km\": 1000}");
    CHECK(call({"emissions", "--report", (dir / "report.json").string()}).out == r.out);
    spit(dir / "bad.json", "{\"nothing\": 1}");
    CHECK(call({"emissions", "--report", (dir / "bad.json").string()}).code == cli::data_error);
}

TEST_CASE("oracle subcommand emits the grid")
{
    const auto r = call({"oracle", "--arrivals", "20000", "--seed", "3"});
    REQUIRE(r.code == cli::ok);
    const auto rows = lines_of(r.out);
    CHECK(rows.size() == 1 + 3 * 2 * 3);
    CHECK(rows[0] == "s,lambda,mu,law,analytic,simulated,rel_err");
}
