#include "etaxi/queueing.hpp"

#include "etaxi/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>

namespace etaxi::queueing {

namespace {

void check_inputs(double lambda, double mu, int s)
{
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("service rate mu must be positive");
    if (s < 1) throw std::invalid_argument("charger count s must be >= 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("arrival rate must be >= 0");
    if (lambda >= static_cast<double>(s) * mu) {
        throw UnstableQueueError("unstable queue: rho = " + std::to_string(lambda / (s * mu)) + " >= 1");
    }
}

} // namespace

double w_mms(double lambda, double mu, int s)
{
    check_inputs(lambda, mu, s);
    if (lambda == 0.0) return 0.0;

    // Erlang B by recursion, then Erlang C; avoids the factorials and powers of
    // the closed form for large s.
    const double a = lambda / mu;
    double erlang_b = 1.0;
    for (int n = 1; n <= s; ++n) erlang_b = a * erlang_b / (n + a * erlang_b);
    const double rho = a / s;
    const double erlang_c = erlang_b / (1.0 - rho * (1.0 - erlang_b));
    return erlang_c / (s * mu - lambda);
}

double cosmetatos_h(int s)
{
    if (s < 1) throw std::invalid_argument("charger count s must be >= 1");
    const double sd = s;
    return (sd - 1.0) / (16.0 * sd) * (std::sqrt((10.0 * sd + 8.0) / 2.0) - 2.0);
}

double w_mds(double lambda, double mu, int s)
{
    const double wmm = w_mms(lambda, mu, s);
    if (lambda == 0.0) return 0.0;
    if (s == 1) return 0.5 * wmm;

    const double h = cosmetatos_h(s);
    const double slack = s * mu - lambda;
    const double exponent = -lambda * (s - 1) / (h * slack * (s + 1));
    const double bracket = 1.0 + h * (slack / lambda) * (-std::expm1(exponent));
    return 0.5 * bracket * wmm;
}

double mgs_interpolate(double wmm, double wmd, double xi)
{
    if (wmm == 0.0) return 0.0;
    const double xi2 = xi * xi;
    return (1.0 + xi2) * wmm * wmd / (2.0 * xi2 * wmd + (1.0 - xi2) * wmm);
}

double mgs_limit(double wmm, double wmd)
{
    if (wmm == 0.0) return 0.0;
    const double denom = 2.0 * wmd - wmm;
    if (!(std::abs(denom) > 1e-15 * wmm)) {
        throw SingularityError("M/G/s limit is singular: 2 W_MD - W_MM = 0 (single-charger deterministic service)");
    }
    return wmm * wmd / denom;
}

double w_mgs(const QueueParams& p, XiConvention convention)
{
    if (!(p.sigma_t >= 0.0)) throw std::invalid_argument("sigma_t must be >= 0");
    const double wmm = w_mms(p.lambda, p.mu, p.s);
    const double wmd = w_mds(p.lambda, p.mu, p.s);
    switch (convention) {
    case XiConvention::cv:
        return mgs_interpolate(wmm, wmd, p.sigma_t * p.mu);
    case XiConvention::reciprocal:
        if (p.sigma_t == 0.0) return mgs_limit(wmm, wmd);
        return mgs_interpolate(wmm, wmd, p.mu / p.sigma_t);
    }
    throw std::invalid_argument("unknown xi convention");
}

double utilization(double wait_h, double c1)
{
    if (!(wait_h >= 0.0)) throw std::invalid_argument("waiting time must be >= 0");
    if (std::isinf(wait_h)) return 1.0;
    const double c = std::max(c1, c1_floor);
    return wait_h / (c + wait_h);
}

double matching_degree(double u, double soc_after, double c2, double c3)
{
    const double diff = u - soc_after;
    return c2 * diff * diff + c3;
}

void StationStats::record_arrival(double t_h)
{
    arrivals_.push_back(t_h);
    while (!arrivals_.empty() && arrivals_.front() <= t_h - 1.0) arrivals_.pop_front();
}

void StationStats::record_charging_time(double duration_h)
{
    if (!(duration_h > 0.0)) return;
    samples_.push_back(duration_h);
    if (samples_.size() > sample_window_) samples_.erase(samples_.begin());
}

std::size_t StationStats::arrivals_last_hour(double t_h) const
{
    return static_cast<std::size_t>(std::count_if(arrivals_.begin(), arrivals_.end(),
                                                  [&](double a) { return a > t_h - 1.0 && a <= t_h; }));
}

std::span<const double> StationStats::samples() const { return samples_; }

QueueParams estimate_params(const StationStats& stats, double now_h, int chargers, const ServiceDefaults& defaults)
{
    QueueParams p;
    p.s = chargers;
    p.lambda = static_cast<double>(stats.arrivals_last_hour(now_h));

    const auto samples = stats.samples();
    if (samples.empty()) {
        p.mu = 1.0 / defaults.mean_h;
        p.sigma_t = defaults.sigma_h;
        return p;
    }
    // Shifted by the first sample so identical samples give exactly zero spread.
    const double shift = samples.front();
    const double n = static_cast<double>(samples.size());
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double x : samples) {
        sum += x - shift;
        sum_sq += (x - shift) * (x - shift);
    }
    const double mean_shifted = sum / n;
    p.mu = 1.0 / (shift + mean_shifted);
    p.sigma_t = std::sqrt(std::max(0.0, sum_sq / n - mean_shifted * mean_shifted));
    return p;
}

double des_oracle(double lambda, double mu, const ServiceLaw& law, int s, std::size_t n_arrivals, std::uint64_t seed)
{
    check_inputs(lambda, mu, s);
    if (const auto* e = std::get_if<Erlang>(&law); e != nullptr && e->k < 1) {
        throw std::invalid_argument("Erlang service needs k >= 1");
    }
    if (n_arrivals == 0 || lambda == 0.0) return 0.0;

    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> interarrival(lambda);
    std::exponential_distribution<double> exp_service(mu);
    const auto service = [&]() -> double {
        return std::visit(
            [&](const auto& l) -> double {
                using L = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<L, Exponential>) {
                    return exp_service(rng);
                } else if constexpr (std::is_same_v<L, Deterministic>) {
                    return 1.0 / mu;
                } else {
                    std::gamma_distribution<double> g(l.k, 1.0 / (l.k * mu));
                    return g(rng);
                }
            },
            law);
    };

    // FIFO with s servers: each customer takes the server that frees first.
    std::priority_queue<double, std::vector<double>, std::greater<>> free_at;
    for (int i = 0; i < s; ++i) free_at.push(0.0);

    double t = 0.0;
    double total_wait = 0.0;
    for (std::size_t i = 0; i < n_arrivals; ++i) {
        t += interarrival(rng);
        const double server_free = free_at.top();
        free_at.pop();
        const double start = std::max(t, server_free);
        total_wait += start - t;
        free_at.push(start + service());
    }
    return total_wait / static_cast<double>(n_arrivals);
}

} // namespace etaxi::queueing
