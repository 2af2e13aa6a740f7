#include "etaxi/cli.hpp"

#include "etaxi/csv.hpp"
#include "etaxi/emissions.hpp"
#include "etaxi/error.hpp"
#include "etaxi/ingest.hpp"
#include "etaxi/queueing.hpp"
#include "etaxi/scenario.hpp"
#include "etaxi/simkernel.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>

namespace etaxi::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

scenario::ScenarioFile load_scenario(const std::string& path, const std::vector<std::string>& overrides,
                                     std::optional<std::uint64_t> seed)
{
    auto file = path.empty() ? scenario::ScenarioFile{} : scenario::ScenarioFile::load(path);
    file.apply_overrides(overrides);
    if (seed) file.set("seed", std::to_string(*seed));
    return file;
}

std::vector<SweepRow> sweep(const sim::Scenario& base, const std::vector<double>& xs, std::size_t jobs)
{
    std::vector<SweepRow> rows(xs.size());
    const auto run_one = [&](std::size_t i) {
        sim::Scenario s = base;
        s.dispatch.x = xs[i];
        const auto r = sim::run(s);
        rows[i] = {xs[i], r.mean_wait_min, r.gini, r.fulfill_rate, r.mean_distance_km};
    };
    jobs = std::max<std::size_t>(jobs, 1);
    for (std::size_t begin = 0; begin < xs.size(); begin += jobs) {
        std::vector<std::future<void>> batch;
        for (std::size_t i = begin; i < std::min(xs.size(), begin + jobs); ++i) {
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run_one, i));
        }
        for (auto& f : batch) f.get();
    }
    return rows;
}

void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << sweep_header << '\n';
    for (const auto& r : rows) {
        out << csv::format_double(r.x) << ',' << csv::format_double(r.mean_wait_min) << ','
            << csv::format_double(r.gini) << ',' << csv::format_double(r.fulfill_rate) << ','
            << csv::format_double(r.mean_distance_km) << '\n';
    }
}

void write_comparison(std::ostream& out, double km)
{
    const auto tv = emissions::default_combustion_specs();
    const auto ev = emissions::default_electric_specs();
    const double tv_rate = emissions::tv_co2_per_100km(tv);
    const double ev_rate = emissions::ev_co2_per_100km(ev);
    const auto per100 = emissions::fleet_comparison(100.0, tv_rate, ev_rate);
    const auto fleet = emissions::fleet_comparison(km, tv_rate, ev_rate);
    out << "scope,tv_kg,ev_kg,reduction_pct\n";
    out << "per_100km," << csv::format_double(per100.tv_kg) << ',' << csv::format_double(per100.ev_kg) << ','
        << csv::format_double(per100.reduction_fraction * 100.0) << '\n';
    out << "fleet," << csv::format_double(fleet.tv_kg) << ',' << csv::format_double(fleet.ev_kg) << ','
        << csv::format_double(fleet.reduction_fraction * 100.0) << '\n';
}

std::string law_name(const queueing::ServiceLaw& law)
{
    if (std::holds_alternative<queueing::Exponential>(law)) return "exponential";
    if (std::holds_alternative<queueing::Deterministic>(law)) return "deterministic";
    return "erlang" + std::to_string(std::get<queueing::Erlang>(law).k);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Electric taxi fleet dispatch simulator", "etaxi"};
    app.require_subcommand(1);

    // synth
    std::string synth_scenario;
    std::vector<std::string> synth_set;
    std::optional<std::uint64_t> synth_seed;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic GPS record file");
    synth->add_option("--scenario", synth_scenario, "Scenario file supplying synthetic.* keys");
    synth->add_option("--set", synth_set, "Override key=value")->take_all();
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("--out", synth_out, "Records CSV to write")->required();

    // ingest
    std::string ingest_records;
    std::string ingest_out_dir;
    std::string ingest_start;
    std::optional<std::size_t> ingest_hours;
    auto* ingest_cmd = app.add_subcommand("ingest", "Extract trips and the hourly demand curve from GPS records");
    ingest_cmd->add_option("--records", ingest_records, "Records CSV")->required();
    ingest_cmd->add_option("--out-dir", ingest_out_dir, "Output directory")->required();
    ingest_cmd->add_option("--horizon-start", ingest_start, "Demand curve origin YYYYMMDDHHMMSS (default: midnight before the first trip)");
    ingest_cmd->add_option("--hours", ingest_hours, "Demand curve length in hours");

    // stations
    std::string st_trips;
    std::string st_out;
    std::size_t st_k = 20;
    int st_chargers = 10;
    std::uint64_t st_seed = 1;
    int st_iter = 100;
    double st_tol = 1e-4;
    double st_ref_lon = 116.397;
    double st_ref_lat = 39.909;
    auto* stations = app.add_subcommand("stations", "Site charging stations by k-means over trip origins");
    stations->add_option("--trips", st_trips, "Trips CSV")->required();
    stations->add_option("--out", st_out, "Layout CSV to write")->required();
    stations->add_option("--k", st_k, "Number of stations")->capture_default_str();
    stations->add_option("--chargers", st_chargers, "Chargers per station")->capture_default_str();
    stations->add_option("--seed", st_seed, "k-means seed")->capture_default_str();
    stations->add_option("--max-iter", st_iter, "Iteration cap")->capture_default_str();
    stations->add_option("--tol", st_tol, "Centroid shift tolerance, km")->capture_default_str();
    stations->add_option("--ref-lon", st_ref_lon, "Projection origin longitude")->capture_default_str();
    stations->add_option("--ref-lat", st_ref_lat, "Projection origin latitude")->capture_default_str();

    // simulate
    std::string sim_scenario;
    std::vector<std::string> sim_set;
    std::optional<std::uint64_t> sim_seed;
    std::string sim_out_dir;
    auto* simulate = app.add_subcommand("simulate", "Run one scenario");
    simulate->add_option("--scenario", sim_scenario, "Scenario file")->required();
    simulate->add_option("--set", sim_set, "Override key=value")->take_all();
    simulate->add_option("--seed", sim_seed, "Seed override");
    simulate->add_option("--out-dir", sim_out_dir, "Directory for report.json, hourly.csv and station_chart.csv");

    // sweep
    std::string sw_scenario;
    std::vector<std::string> sw_set;
    std::optional<std::uint64_t> sw_seed;
    std::vector<double> sw_x{0.001, 0.01, 0.1};
    std::size_t sw_jobs = 1;
    std::string sw_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario for several values of x in f(demand)");
    sweep_cmd->add_option("--scenario", sw_scenario, "Scenario file")->required();
    sweep_cmd->add_option("--set", sw_set, "Override key=value")->take_all();
    sweep_cmd->add_option("--seed", sw_seed, "Seed override");
    sweep_cmd->add_option("--x", sw_x, "Comma-separated x values")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--jobs", sw_jobs, "Scenarios run in parallel")->capture_default_str();
    sweep_cmd->add_option("--out", sw_out, "CSV to write (default: stdout)");

    // emissions
    std::optional<double> em_km;
    std::string em_report;
    auto* emissions_cmd = app.add_subcommand("emissions", "Compare combustion and electric fleet CO2");
    auto* km_opt = emissions_cmd->add_option("--km", em_km, "Total fleet km");
    auto* report_opt = emissions_cmd->add_option("--report", em_report, "report.json from simulate");
    km_opt->excludes(report_opt);

    // oracle
    std::size_t or_arrivals = 1000000;
    std::uint64_t or_seed = 1;
    auto* oracle = app.add_subcommand("oracle", "Compare analytic queue waits with a discrete-event simulation");
    oracle->add_option("--arrivals", or_arrivals, "Arrivals per simulated queue")->capture_default_str();
    oracle->add_option("--seed", or_seed, "Simulation seed")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: config: " << e.what() << '\n';
        return config_error;
    }

    try {
        if (*synth) {
            const auto settings = scenario::resolve(load_scenario(synth_scenario, synth_set, synth_seed));
            const auto gen = ingest::generate_synthetic(scenario::synthetic_spec(settings), settings.seed);
            auto f = open_out(synth_out);
            ingest::write_records(f, gen.records);
            out << "records=" << gen.records.size() << " trips_planned=" << gen.trips_planned
                << " trips_dropped=" << gen.trips_dropped << '\n';
        } else if (*ingest_cmd) {
            const auto records = ingest::read_records_file(ingest_records);
            const auto ex = ingest::extract_trips(records);
            Timestamp start = 0;
            if (!ingest_start.empty()) {
                const auto t = parse_timestamp(ingest_start);
                if (!t) throw ConfigError("--horizon-start must be YYYYMMDDHHMMSS");
                start = *t;
            } else if (!ex.trips.empty()) {
                const auto first = std::min_element(ex.trips.begin(), ex.trips.end(), [](const auto& a, const auto& b) {
                    return a.start_time < b.start_time;
                });
                start = first->start_time - ((first->start_time % 86400) + 86400) % 86400;
            }
            const fs::path dir(ingest_out_dir);
            {
                auto f = open_out(dir / "summary.txt");
                f << "records=" << records.size() << '\n'
                  << "pickups=" << ex.pickups << '\n'
                  << "trips=" << ex.trips.size() << '\n'
                  << "excluded=" << ex.excluded << '\n'
                  << "excluded_too_short=" << ex.too_short << '\n'
                  << "excluded_missing_position=" << ex.missing_position << '\n'
                  << "excluded_unterminated=" << ex.unterminated << '\n'
                  << "truncated_dropoffs=" << ex.truncated_dropoffs << '\n'
                  << "duplicates_dropped=" << ex.duplicates_dropped << '\n';
            }
            if (ex.trips.empty()) throw DataError("no valid trips in '" + ingest_records + "'");
            const auto curve = ingest::build_demand_curve(ex.trips, start, ingest_hours);
            {
                auto f = open_out(dir / "trips.csv");
                ingest::write_trips(f, ex.trips);
            }
            {
                auto f = open_out(dir / "demand.csv");
                ingest::write_demand_curve(f, curve);
            }
            out << "trips=" << ex.trips.size() << " excluded=" << ex.excluded << '\n';
        } else if (*stations) {
            const auto trips = ingest::read_trips_file(st_trips);
            std::vector<geo::GeoPoint> origins;
            origins.reserve(trips.size());
            for (const auto& t : trips) origins.push_back(geo::project(t.origin, {st_ref_lon, st_ref_lat}));
            if (st_chargers < 1) throw ConfigError("--chargers must be >= 1");
            geo::KMeansOptions km{st_k, st_seed, st_iter, st_tol};
            const auto layout = geo::site_stations(origins, km, st_chargers);
            auto f = open_out(st_out);
            geo::write_layout(f, layout);
            out << "stations=" << layout.size() << '\n';
        } else if (*simulate) {
            const auto settings = scenario::resolve(load_scenario(sim_scenario, sim_set, sim_seed));
            const auto built = scenario::build(settings);
            sim::Simulation simulation(built.scenario);
            const auto report = simulation.run();
            sim::write_report(out, report);
            if (!sim_out_dir.empty()) {
                const fs::path dir(sim_out_dir);
                auto rf = open_out(dir / "report.json");
                sim::write_report(rf, report);
                auto hf = open_out(dir / "hourly.csv");
                sim::write_hourly(hf, report);
                auto cf = open_out(dir / "station_chart.csv");
                sim::write_operation_chart(cf, simulation.operation_chart());
            }
        } else if (*sweep_cmd) {
            if (sw_x.empty()) throw ConfigError("--x needs at least one value");
            const auto settings = scenario::resolve(load_scenario(sw_scenario, sw_set, sw_seed));
            const auto built = scenario::build(settings);
            const auto rows = sweep(built.scenario, sw_x, sw_jobs);
            if (sw_out.empty()) {
                write_sweep(out, rows);
            } else {
                auto f = open_out(sw_out);
                write_sweep(f, rows);
            }
        } else if (*emissions_cmd) {
            double km = 0.0;
            if (em_km) {
                km = *em_km;
                if (!(km >= 0.0)) throw ConfigError("--km must be >= 0");
            } else if (!em_report.empty()) {
                std::ifstream in(em_report);
                if (!in) throw DataError("cannot open '" + em_report + "'");
                try {
                    km = nlohmann::json::parse(in).at("total_fleet_km").get<double>();
                } catch (const nlohmann::json::exception& e) {
                    throw DataError("malformed report '" + em_report + "': " + e.what());
                }
            } else {
                throw ConfigError("emissions needs --km or --report");
            }
            write_comparison(out, km);
        } else if (*oracle) {
            out << "s,lambda,mu,law,analytic,simulated,rel_err\n";
            const std::vector<queueing::ServiceLaw> laws{queueing::Exponential{}, queueing::Deterministic{},
                                                          queueing::Erlang{4}};
            for (int s : {1, 2, 4}) {
                for (double rho : {0.5, 0.8}) {
                    for (const auto& law : laws) {
                        const double mu = 1.0;
                        const double lambda = rho * s * mu;
                        double analytic = 0.0;
                        if (std::holds_alternative<queueing::Exponential>(law)) {
                            analytic = queueing::w_mms(lambda, mu, s);
                        } else if (std::holds_alternative<queueing::Deterministic>(law)) {
                            analytic = queueing::w_mds(lambda, mu, s);
                        } else {
                            const double xi = 1.0 / std::sqrt(std::get<queueing::Erlang>(law).k);
                            analytic = queueing::w_mgs({lambda, mu, xi / mu, s});
                        }
                        const double simulated = queueing::des_oracle(lambda, mu, law, s, or_arrivals, or_seed);
                        out << s << ',' << csv::format_double(lambda) << ',' << csv::format_double(mu) << ','
                            << law_name(law) << ',' << csv::format_double(analytic) << ','
                            << csv::format_double(simulated) << ','
                            << csv::format_double((simulated - analytic) / analytic) << '\n';
                    }
                }
            }
        }
    } catch (const ConfigError& e) {
        err << "error: config: " << e.what() << '\n';
        return config_error;
    } catch (const DataError& e) {
        err << "error: data: " << e.what() << '\n';
        return data_error;
    } catch (const std::exception& e) {
        err << "error: runtime: " << e.what() << '\n';
        return runtime_error;
    }
    return ok;
}

} // namespace etaxi::cli
