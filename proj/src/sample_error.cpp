#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "dfot/error.hpp"
#include "dfot/experiments.hpp"

namespace dfot {

namespace {

// First n entries of a partial Fisher-Yates shuffle of 0..size-1.
std::vector<Eigen::Index> draw_without_replacement(std::mt19937_64& rng, std::size_t size,
                                                   std::size_t n) {
  std::vector<Eigen::Index> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, size - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(n);
  return idx;
}

DiscreteMeasure subsample(const DiscreteMeasure& ref, const std::vector<Eigen::Index>& idx) {
  Matrix pts(static_cast<Eigen::Index>(idx.size()), ref.points().cols());
  for (std::size_t r = 0; r < idx.size(); ++r) pts.row(static_cast<Eigen::Index>(r)) = ref.points().row(idx[r]);
  return from_samples(pts);
}

ErrorSummary summarize(const std::vector<double>& errors) {
  ErrorSummary s;
  if (errors.empty()) return s;
  s.mean = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
  s.q10 = quantile(errors, 0.1);
  s.q90 = quantile(errors, 0.9);
  return s;
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidInput("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

SampleErrorSweep sample_error_sweep(const FeasibleRegion& region, const DiscreteMeasure& mu_ref,
                                    const DiscreteMeasure& nu_ref, const SampleErrorOptions& options) {
  for (std::size_t n : options.n_grid) {
    if (n == 0) throw InvalidInput("sample size must be positive");
    if (n > mu_ref.size() || n > nu_ref.size()) {
      throw InvalidInput("sample size " + std::to_string(n) + " exceeds a reference support (" +
                         std::to_string(mu_ref.size()) + ", " + std::to_string(nu_ref.size()) + ")");
    }
  }
  if (options.trials == 0) throw InvalidInput("need at least one trial");

  SampleErrorSweep sweep;
  sweep.reference_optimistic = optimistic(region, mu_ref, nu_ref).value;
  if (options.include_robust) sweep.reference_robust = robust(region, mu_ref, nu_ref).value;

  for (std::size_t n : options.n_grid) {
    std::vector<double> opt_err(options.trials, 0.0);
    std::vector<double> rob_err(options.include_robust ? options.trials : 0, 0.0);
    auto run_trial = [&](std::size_t t) {
      std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                        static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(t)};
      std::mt19937_64 rng(seq);
      const auto ia = draw_without_replacement(rng, mu_ref.size(), n);
      const auto ib = draw_without_replacement(rng, nu_ref.size(), n);
      const DiscreteMeasure mu = subsample(mu_ref, ia);
      const DiscreteMeasure nu = subsample(nu_ref, ib);
      opt_err[t] = std::abs(optimistic(region, mu, nu).value - sweep.reference_optimistic);
      if (options.include_robust) {
        rob_err[t] = std::abs(robust(region, mu, nu).value - sweep.reference_robust);
      }
    };
    const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, options.trials);
    if (jobs == 1) {
      for (std::size_t t = 0; t < options.trials; ++t) run_trial(t);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> failures(jobs);
      for (std::size_t w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t t = w; t < options.trials; t += jobs) run_trial(t);
          } catch (...) {
            failures[w] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& f : failures) {
        if (f) std::rethrow_exception(f);
      }
    }
    SampleErrorRow row;
    row.n = n;
    row.trials = options.trials;
    row.optimistic = summarize(opt_err);
    row.robust = summarize(rob_err);
    sweep.rows.push_back(row);
  }
  return sweep;
}

Table sample_error_csv(const SampleErrorSweep& sweep) {
  Table t;
  t.columns = {"n", "opt_mean", "opt_q10", "opt_q90", "rob_mean", "rob_q10", "rob_q90", "trials"};
  for (const auto& r : sweep.rows) {
    t.add_row({std::to_string(r.n), format_fixed(r.optimistic.mean, 4), format_fixed(r.optimistic.q10, 4),
               format_fixed(r.optimistic.q90, 4), format_fixed(r.robust.mean, 4),
               format_fixed(r.robust.q10, 4), format_fixed(r.robust.q90, 4), std::to_string(r.trials)});
  }
  return t;
}

double log_log_slope(const SampleErrorSweep& sweep) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : sweep.rows) {
    if (r.optimistic.mean <= 0.0) continue;
    xs.push_back(std::log(static_cast<double>(r.n)));
    ys.push_back(std::log(r.optimistic.mean));
  }
  if (xs.size() < 2) throw InvalidInput("slope needs at least two positive errors");
  const double k = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

SyntheticReferences synthetic_references(std::uint64_t seed, std::size_t atoms) {
  if (atoms == 0) throw InvalidInput("need at least one atom");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix hexagon(6, 2);
  for (int k = 0; k < 6; ++k) {
    const double angle = M_PI / 3.0 * k;
    hexagon(k, 0) = std::cos(angle);
    hexagon(k, 1) = std::sin(angle);
  }
  auto cloud = [&](double cx, double cy, double spread) {
    Matrix pts(static_cast<Eigen::Index>(atoms), 2);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      pts(i, 0) = cx + spread * normal(rng);
      pts(i, 1) = cy + spread * normal(rng);
    }
    return from_samples(pts);
  };
  DiscreteMeasure mu = cloud(0.3, -0.2, 1.0);
  DiscreteMeasure nu = cloud(-0.4, 0.5, 1.2);
  return SyntheticReferences{FeasibleRegion(hexagon), std::move(mu), std::move(nu)};
}

}  // namespace dfot
