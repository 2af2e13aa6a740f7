#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <variant>
#include <vector>

namespace etaxi::queueing {

/// Rates are per hour, times in hours.
struct QueueParams {
    double lambda = 0.0;   // arrivals per hour
    double mu = 1.0;       // services per hour per charger (1 / mean charging time)
    double sigma_t = 0.0;  // standard deviation of the charging time, hours
    int s = 1;             // chargers

    double rho() const { return lambda / (static_cast<double>(s) * mu); }
};

/// How the interpolation parameter xi is formed from sigma_t and mu.
enum class XiConvention {
    /// xi = sigma_t * mu, the coefficient of variation of the service time.
    cv,
    /// xi = mu / sigma_t (sigma read as the reciprocal of the standard
    /// deviation); sigma_t = 0 switches to the xi -> infinity limit.
    reciprocal,
};

/// Exact M/M/s (Erlang C) mean time in queue. Throws UnstableQueueError when
/// rho >= 1 and std::invalid_argument for mu <= 0, s < 1 or lambda < 0.
double w_mms(double lambda, double mu, int s);

/// Cosmetatos correction factor H(s); zero at s = 1.
double cosmetatos_h(int s);

/// Cosmetatos approximation of the M/D/s mean time in queue, built on w_mms.
/// Exact for s = 1 (half the M/M/1 wait).
double w_mds(double lambda, double mu, int s);

/// Two-moment interpolation between the M/M/s and M/D/s waits.
double mgs_interpolate(double wmm, double wmd, double xi);
/// Limit of mgs_interpolate as xi -> infinity. Throws SingularityError when
/// 2 wmd == wmm (always the case for s = 1).
double mgs_limit(double wmm, double wmd);

/// M/G/s mean time in queue.
double w_mgs(const QueueParams& params, XiConvention convention = XiConvention::cv);

/// Maps a mean wait in [0, inf) to a utilization level in [0, 1). `c1` is
/// floored at `c1_floor`; an infinite wait maps to 1.
inline constexpr double c1_floor = 1e-6;
double utilization(double wait_h, double c1);

/// Quadratic closeness of utilization level and post-trip SOC.
double matching_degree(double u, double soc_after, double c2 = -1.0, double c3 = 1.0);

/// Rolling charging statistics for one station.
class StationStats {
public:
    explicit StationStats(std::size_t sample_window = 100) : sample_window_(sample_window) {}

    /// Arrival at `t_h` (hours). Arrivals are expected in time order.
    void record_arrival(double t_h);
    /// Non-positive durations are ignored.
    void record_charging_time(double duration_h);

    /// Arrivals in the trailing hour (t_h - 1, t_h].
    std::size_t arrivals_last_hour(double t_h) const;
    std::span<const double> samples() const;
    std::size_t sample_window() const { return sample_window_; }

private:
    std::size_t sample_window_;
    std::deque<double> arrivals_;
    std::vector<double> samples_;
};

struct ServiceDefaults {
    double mean_h = 1.0;
    double sigma_h = 0.0;
};

/// lambda = arrivals in the trailing hour, mu = 1 / mean(samples), sigma_t =
/// population standard deviation of the samples. Without samples the
/// defaults stand in for the service statistics.
QueueParams estimate_params(const StationStats& stats, double now_h, int chargers, const ServiceDefaults& defaults);

struct Exponential {};
struct Deterministic {};
struct Erlang {
    int k = 2;
};
using ServiceLaw = std::variant<Exponential, Deterministic, Erlang>;

/// Discrete-event simulation of a FIFO multi-server queue with Poisson
/// arrivals, starting empty. Returns the mean time in queue over all
/// arrivals (0 when n_arrivals == 0).
double des_oracle(double lambda, double mu, const ServiceLaw& law, int s, std::size_t n_arrivals,
                  std::uint64_t seed);

} // namespace etaxi::queueing
