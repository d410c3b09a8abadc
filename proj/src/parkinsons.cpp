#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <numeric>

#include "dfot/error.hpp"
#include "dfot/experiments.hpp"

namespace dfot {

namespace {

std::size_t column_index(const Table& t, const std::string& name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  if (it == t.columns.end()) throw InvalidInput("telemonitoring CSV lacks column '" + name + "'");
  return static_cast<std::size_t>(it - t.columns.begin());
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || !std::isfinite(v)) {
    throw InvalidInput("row " + std::to_string(row + 1) + ": bad value '" + cell + "' in " + column);
  }
  return v;
}

double normalize(double v, const FeatureRange& r) {
  if (r.max <= r.min) return 0.0;
  return -(v - r.min) / (r.max - r.min);
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

TelemonitoringData parse_telemonitoring_csv(const std::string& csv_text) {
  const Table t = parse_table_csv(csv_text);
  const std::size_t c_subject = column_index(t, "subject#");
  const std::size_t c_age = column_index(t, "age");
  const std::size_t c_time = column_index(t, "test_time");
  const std::size_t c_motor = column_index(t, "motor_UPDRS");
  const std::size_t c_total = column_index(t, "total_UPDRS");
  const std::size_t c_ppe = column_index(t, "PPE");

  TelemonitoringData data;
  if (t.rows.empty()) throw InvalidInput("telemonitoring CSV has no records");
  for (auto& r : data.ranges) {
    r.min = std::numeric_limits<double>::infinity();
    r.max = -std::numeric_limits<double>::infinity();
  }
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    PatientRecord rec;
    rec.subject = static_cast<int>(parse_number(row[c_subject], i, "subject#"));
    rec.age = parse_number(row[c_age], i, "age");
    rec.test_time = parse_number(row[c_time], i, "test_time");
    rec.motor_updrs = parse_number(row[c_motor], i, "motor_UPDRS");
    rec.total_updrs = parse_number(row[c_total], i, "total_UPDRS");
    rec.ppe = parse_number(row[c_ppe], i, "PPE");
    rec.row = i;
    const double features[4] = {rec.motor_updrs, rec.total_updrs, rec.age, rec.ppe};
    for (int f = 0; f < 4; ++f) {
      data.ranges[f].min = std::min(data.ranges[f].min, features[f]);
      data.ranges[f].max = std::max(data.ranges[f].max, features[f]);
    }
    data.records.push_back(rec);
  }
  return data;
}

CostVector cost_vector(const TelemonitoringData& data, const PatientRecord& r) {
  CostVector y(4);
  y << normalize(r.motor_updrs, data.ranges[0]), normalize(r.total_updrs, data.ranges[1]),
      normalize(r.age, data.ranges[2]), normalize(r.ppe, data.ranges[3]);
  return y;
}

long CohortWindow::index_of(int subject) const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].subject == subject) return static_cast<long>(i);
  }
  return -1;
}

CohortWindow build_window(const TelemonitoringData& data, double center, double half_width) {
  std::map<int, PatientRecord> best;
  for (const auto& rec : data.records) {
    const double day = std::round(rec.test_time);
    if (day < center - half_width || day > center + half_width) continue;
    auto it = best.find(rec.subject);
    if (it == best.end()) {
      best.emplace(rec.subject, rec);
    } else if (std::abs(rec.test_time - center) < std::abs(it->second.test_time - center)) {
      it->second = rec;
    }
  }
  if (best.empty()) {
    throw InvalidInput("no records in the window around day " + std::to_string(center));
  }
  CohortWindow w;
  w.center = center;
  w.half_width = half_width;
  w.cost_vectors.resize(static_cast<Eigen::Index>(best.size()), 4);
  w.severity.resize(static_cast<Eigen::Index>(best.size()), 2);
  Eigen::Index i = 0;
  for (const auto& [subject, rec] : best) {
    w.rows.push_back(rec);
    w.cost_vectors.row(i) = cost_vector(data, rec).transpose();
    w.severity(i, 0) = rec.motor_updrs;
    w.severity(i, 1) = rec.total_updrs;
    ++i;
  }
  return w;
}

FeasibleRegion care_plan_region() {
  Matrix plans(5, 4);
  plans << 3, 3, 3, 1,
           6, 2, 2, 0,
           2, 6, 2, 0,
           2, 2, 6, 0,
           3, 3, 2, 2;
  return FeasibleRegion(plans);
}

CostVector tracked_prediction(const Coupling& gamma, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu, std::size_t i) {
  const auto r = static_cast<Eigen::Index>(i);
  const double a = gamma.plan().row(r).sum();
  if (a <= 0.0) throw InvalidInput("coupling row has no mass");
  const Vector conditional = (gamma.plan().row(r) * nu.points()).transpose() / a;
  return 0.5 * mu.point(i) + 0.5 * conditional;
}

ParkinsonsReport parkinsons_pipeline(const TelemonitoringData& data, const ParkinsonsOptions& options) {
  ParkinsonsReport rep;
  rep.start = build_window(data, options.start, options.half_width);
  rep.middle = build_window(data, options.middle, options.half_width);
  rep.end = build_window(data, options.end, options.half_width);

  const FeasibleRegion region = care_plan_region();
  const DiscreteMeasure mu = rep.start.cost_measure();
  const DiscreteMeasure nu = rep.end.cost_measure();
  const DiscreteMeasure mu_sev = rep.start.severity_measure();
  const DiscreteMeasure nu_sev = rep.end.severity_measure();

  rep.w1_severity = w_p(mu_sev, nu_sev, 1);
  rep.w2_severity = w_p(mu_sev, nu_sev, 2);
  const DFResult opt = optimistic(region, mu, nu, OptimisticMethod::kDirect);
  const DFResult rob = robust(region, mu, nu);
  rep.w_dfo = opt.value;
  rep.w_dfr = rob.value;
  rep.regret = regret(region, mu, nu);

  const Coupling indep = Coupling::product(mu.weights(), nu.weights());
  const Coupling w2_plan =
      solve_exact(mu.weights(), nu.weights(), distance_cost(mu.points(), nu.points(), 2)).plan;
  const Coupling w2_sev_plan =
      solve_exact(mu.weights(), nu.weights(), distance_cost(mu_sev.points(), nu_sev.points(), 2)).plan;

  // Loss of the day-middle prediction built from row i of gamma.
  auto tracked_loss = [&](const Coupling& gamma, std::size_t i, const Vector& truth) {
    return region.spo_loss(tracked_prediction(gamma, mu, nu, i), truth);
  };

  std::vector<std::pair<std::size_t, Vector>> shared;  // start row, true middle cost
  for (std::size_t i = 0; i < rep.start.rows.size(); ++i) {
    const long m = rep.middle.index_of(rep.start.rows[i].subject);
    if (m < 0) continue;
    const Vector truth = rep.middle.cost_vectors.row(m).transpose();
    shared.emplace_back(i, truth);
    TrackedLoss t;
    t.subject = rep.start.rows[i].subject;
    t.optimistic = tracked_loss(opt.coupling, i, truth);
    t.robust = tracked_loss(rob.coupling, i, truth);
    t.independent = tracked_loss(indep, i, truth);
    t.w2 = tracked_loss(w2_plan, i, truth);
    t.w2_severity = tracked_loss(w2_sev_plan, i, truth);
    rep.tracked.push_back(t);
  }

  std::vector<double> transition;
  for (std::size_t i = 0; i < rep.start.rows.size(); ++i) {
    const long e = rep.end.index_of(rep.start.rows[i].subject);
    if (e < 0) continue;
    transition.push_back(
        region.spo_loss(mu.point(i), rep.end.cost_vectors.row(e).transpose()));
  }
  rep.true_transition_count = transition.size();
  rep.true_transition_mean = mean_of(transition);
  rep.true_transition_median = median_of(transition);

  auto sweep_point = [&](double eps) {
    EpsilonRow row;
    row.epsilon = eps;
    const DFResult lo = entropic_df(region, mu, nu, eps, DFMode::kOptimistic);
    const DFResult hi = entropic_df(region, mu, nu, eps, DFMode::kRobust);
    row.edfo_converged = lo.entropic->converged;
    row.edfr_converged = hi.entropic->converged;
    std::vector<double> lo_loss;
    std::vector<double> hi_loss;
    for (const auto& [i, truth] : shared) {
      lo_loss.push_back(tracked_loss(lo.coupling, i, truth));
      hi_loss.push_back(tracked_loss(hi.coupling, i, truth));
    }
    row.edfo_mean = mean_of(lo_loss);
    row.edfr_mean = mean_of(hi_loss);
    return row;
  };
  std::vector<std::future<EpsilonRow>> jobs;
  for (double eps : options.epsilons) jobs.push_back(std::async(std::launch::async, sweep_point, eps));
  for (auto& j : jobs) rep.epsilon_sweep.push_back(j.get());
  return rep;
}

Table window_table(const ParkinsonsReport& r) {
  Table t;
  t.columns = {"window", "center", "size"};
  const std::pair<const char*, const CohortWindow*> windows[] = {
      {"start", &r.start}, {"middle", &r.middle}, {"end", &r.end}};
  for (const auto& [name, w] : windows) {
    t.add_row({name, format_double(w->center), std::to_string(w->rows.size())});
  }
  return t;
}

Table distance_table(const ParkinsonsReport& r) {
  Table t;
  t.columns = {"quantity", "value"};
  t.add_row({"W1_severity", format_fixed(r.w1_severity, 4)});
  t.add_row({"W2_severity", format_fixed(r.w2_severity, 4)});
  t.add_row({"W_DFO", format_fixed(r.w_dfo, 4)});
  t.add_row({"R", format_fixed(r.regret, 4)});
  t.add_row({"W_DFR", format_fixed(r.w_dfr, 4)});
  t.add_row({"true_transition_mean", format_fixed(r.true_transition_mean, 4)});
  t.add_row({"true_transition_median", format_fixed(r.true_transition_median, 4)});
  return t;
}

Table tracked_summary_table(const ParkinsonsReport& r) {
  auto mean_by = [&r](double TrackedLoss::*field) {
    std::vector<double> v;
    for (const auto& t : r.tracked) v.push_back(t.*field);
    return format_fixed(mean_of(v), 4);
  };
  Table t;
  t.columns = {"method", "mean_tracked_spo"};
  t.add_row({"optimistic", mean_by(&TrackedLoss::optimistic)});
  t.add_row({"w2_cost", mean_by(&TrackedLoss::w2)});
  t.add_row({"independent", mean_by(&TrackedLoss::independent)});
  t.add_row({"robust", mean_by(&TrackedLoss::robust)});
  t.add_row({"w2_severity", mean_by(&TrackedLoss::w2_severity)});
  return t;
}

Table tracked_loss_table(const ParkinsonsReport& r) {
  Table t;
  t.columns = {"subject", "loss_optimistic", "loss_robust", "loss_independent", "loss_w2"};
  for (const auto& l : r.tracked) {
    t.add_row({std::to_string(l.subject), format_double(l.optimistic), format_double(l.robust),
               format_double(l.independent), format_double(l.w2)});
  }
  return t;
}

Table epsilon_table(const ParkinsonsReport& r) {
  Table t;
  t.columns = {"epsilon", "edfo_mean", "edfr_mean", "edfo_converged", "edfr_converged"};
  for (const auto& e : r.epsilon_sweep) {
    t.add_row({format_double(e.epsilon), format_fixed(e.edfo_mean, 4), format_fixed(e.edfr_mean, 4),
               e.edfo_converged ? "1" : "0", e.edfr_converged ? "1" : "0"});
  }
  return t;
}

}  // namespace dfot
