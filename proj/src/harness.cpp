#include "dolrm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dolrm/oracle.hpp"
#include "dolrm/parallel.hpp"
#include "dolrm/rng.hpp"

namespace dolrm {


std::size_t default_stride(std::size_t horizon) { return std::max<std::size_t>(1, horizon / 1000); }

EpisodeTrace run_episode(const EnvironmentSpec& spec, const PolicyKind& kind, std::size_t horizon,
                         std::uint64_t seed, std::size_t stride) {
  auto policy = make_policy(kind, spec, horizon, make_stream(seed, Stream::kPolicy));
  return run_episode(spec, *policy, policy_label(kind), horizon, seed, stride);
}

EpisodeTrace run_episode(const EnvironmentSpec& spec, Policy& policy, const std::string& label,
                         std::size_t horizon, std::uint64_t seed, std::size_t stride) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  EpisodeTrace trace;
  trace.policy = label;
  trace.seed = seed;
  trace.horizon = horizon;
  trace.stride = stride == 0 ? default_stride(horizon) : stride;
  trace.rows.reserve(horizon / trace.stride + 2);

  auto arrivals = make_stream(seed, Stream::kArrival);
  auto feedback_rng = make_stream(seed, Stream::kFeedback);

  double cum_reward = 0.0;
  double cum_cost = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const auto type = sample_task(spec, arrivals);
    const auto arm = policy.select(type);
    const auto fb = sample_feedback(spec, type, arm, feedback_rng);
    policy.update(type, arm, fb);
    cum_reward += fb.reward;
    cum_cost += fb.cost;

    const auto theta = policy.theta();
    if (theta) {
      trace.theta_low = std::min(trace.theta_low.value_or(*theta), *theta);
      trace.theta_high = std::max(trace.theta_high.value_or(*theta), *theta);
    }
    if ((t - 1) % trace.stride == 0 || t == horizon) {
      trace.rows.push_back(
          TraceRow{t, type, arm, fb.reward, fb.cost, cum_reward, cum_cost, cum_reward / cum_cost,
                   theta});
    }
  }
  trace.cum_reward = cum_reward;
  trace.cum_cost = cum_cost;
  if (const auto* stats = policy.statistics()) trace.total_pulls = stats->total_count();
  return trace;
}

std::pair<double, double> mean_and_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double sq = 0.0;
  for (const double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / (n - 1.0))};
}

ReplicationSummary summarize_episodes(std::span<const EpisodeTrace> traces, double theta_star) {
  if (traces.empty()) throw std::invalid_argument("summary needs at least one episode");
  std::vector<double> ratios;
  std::vector<double> gaps;
  for (const auto& trace : traces) {
    if (trace.policy != traces.front().policy || trace.horizon != traces.front().horizon) {
      throw std::invalid_argument("summary mixes policies or horizons");
    }
    ratios.push_back(trace.final_ratio());
    gaps.push_back(compute_gap(theta_star, trace.cum_reward, trace.cum_cost, trace.horizon).gap);
  }
  ReplicationSummary summary;
  summary.policy = traces.front().policy;
  summary.horizon = traces.front().horizon;
  summary.replications = traces.size();
  summary.theta_star = theta_star;
  std::tie(summary.mean_ratio, summary.std_ratio) = mean_and_std(ratios);
  std::tie(summary.mean_gap, summary.std_gap) = mean_and_std(gaps);
  summary.mean_regret = static_cast<double>(summary.horizon) * summary.mean_gap;
  summary.final_ratios = std::move(ratios);
  return summary;
}

ReplicationSummary run_replications(const EnvironmentSpec& spec, const PolicyKind& kind,
                                    std::size_t horizon, std::span<const std::uint64_t> seeds,
                                    double theta_star, unsigned threads) {
  if (seeds.empty()) throw std::invalid_argument("replications need at least one seed");
  std::vector<EpisodeTrace> traces(seeds.size());
  // Only final sums are needed; a stride of T logs just rounds 1 and T.
  parallel_for(seeds.size(), threads, [&](std::size_t i) {
    traces[i] = run_episode(spec, kind, horizon, seeds[i], horizon);
  });
  return summarize_episodes(traces, theta_star);
}

ReplicationSummary run_replications(const EnvironmentSpec& spec, const PolicyKind& kind,
                                    std::size_t horizon, std::span<const std::uint64_t> seeds,
                                    unsigned threads) {
  return run_replications(spec, kind, horizon, seeds, dinkelbach_theta_star(spec).theta_star,
                          threads);
}

double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("slope fit needs at least two paired points");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw std::invalid_argument("log-log fit needs positive values");
    }
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("slope fit needs distinct x values");
  return sxy / sxx;
}

SlopeResult gap_slope(const EnvironmentSpec& spec, const PolicyKind& kind,
                      std::span<const std::size_t> horizons, std::span<const std::uint64_t> seeds,
                      unsigned threads) {
  if (horizons.size() < 3) throw std::invalid_argument("slope estimation needs >= 3 horizons");
  for (std::size_t i = 1; i < horizons.size(); ++i) {
    if (horizons[i] <= horizons[i - 1]) {
      throw std::invalid_argument("horizons must be strictly increasing");
    }
  }
  const double theta_star = dinkelbach_theta_star(spec).theta_star;
  SlopeResult result;
  result.horizons.assign(horizons.begin(), horizons.end());
  for (const auto horizon : horizons) {
    result.mean_gaps.push_back(
        run_replications(spec, kind, horizon, seeds, theta_star, threads).mean_gap);
  }
  const bool any_zero = std::any_of(result.mean_gaps.begin(), result.mean_gaps.end(),
                                    [](double g) { return g == 0.0; });
  if (!any_zero) {
    std::vector<double> xs(horizons.begin(), horizons.end());
    result.slope = fit_loglog_slope(xs, result.mean_gaps);
  }
  return result;
}

}  // namespace dolrm
