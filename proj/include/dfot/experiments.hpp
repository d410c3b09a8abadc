#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dfot/dfdist.hpp"
#include "dfot/io.hpp"

namespace dfot {

// ---------------------------------------------------------------- newsvendor

struct NewsvendorInstance {
  std::vector<double> demand;   // support d_i
  std::vector<double> orders;   // grid q_j
  double underage = 3.0;        // b
  double overage = 2.0;         // h
  std::vector<Vector> pmfs;     // one per customer type, over `demand`

  double fractile() const { return underage / (underage + overage); }
  // C_ij = b max(d_i - q_j, 0) + h max(q_j - d_i, 0)
  Matrix cost_matrix() const;
  // Throws InvalidInput on empty grids, negative prices, or bad pmfs.
  void validate() const;
};

// Three types on demand/order support {5, ..., 15}, b = 3, h = 2, whose
// 0.6-quantiles are 9, 10 and 11.
NewsvendorInstance default_newsvendor();

// {"demand": [...], "orders": [...], "underage": b, "overage": h,
//  "pmfs": [[...], ...]}
NewsvendorInstance parse_newsvendor(const std::string& json_text);
std::string newsvendor_to_json(const NewsvendorInstance& inst);

// c^(k)_j = sum_i p^(k)_i C_ij, one vector per type.
std::vector<CostVector> newsvendor_type_costs(const NewsvendorInstance& inst);

// Probability simplex conv{e_1, ..., e_n} in R^n.
FeasibleRegion simplex_region(std::size_t n);

struct MixtureRow {
  Vector lambda;
  double w_dfo = 0.0;
  double regret = 0.0;
  double w_dfr = 0.0;
  double tv = 0.0;
  double kl = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
};

// The four mixture weights of the reference table.
std::vector<Vector> default_lambdas();

// DF columns compare sum_k lambda_k delta_{c^(k)} with the lambda0 mixture;
// TV/KL act on the weight vectors; W1/W2 on the type indices {1, 2, 3}.
std::vector<MixtureRow> mixture_table(const NewsvendorInstance& inst,
                                      const std::vector<Vector>& lambdas,
                                      const Vector& lambda0);

// Columns: lambda1..lambdaK, W_DFO, R, W_DFR, TV, KL, W1, W2 (4 decimals).
Table mixture_table_csv(const std::vector<MixtureRow>& rows);

// -------------------------------------------------------------- sample error

struct SampleErrorOptions {
  std::vector<std::size_t> n_grid;
  std::size_t trials = 50;
  std::uint64_t seed = 42;
  std::size_t jobs = 1;
  bool include_robust = true;
};

struct ErrorSummary {
  double mean = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

struct SampleErrorRow {
  std::size_t n = 0;
  std::size_t trials = 0;
  ErrorSummary optimistic;
  ErrorSummary robust;  // zeros when robust errors were not requested
};

struct SampleErrorSweep {
  double reference_optimistic = 0.0;
  double reference_robust = 0.0;
  std::vector<SampleErrorRow> rows;
};

// Subsamples n atoms without replacement from each reference (uniform
// weights on the chosen atoms) and records |W_hat - W|. Trial t at size n
// draws from its own generator seeded by (seed, n, t), so results do not
// depend on `jobs`. Throws InvalidInput if some n exceeds a reference size.
SampleErrorSweep sample_error_sweep(const FeasibleRegion& region, const DiscreteMeasure& mu_ref,
                                    const DiscreteMeasure& nu_ref, const SampleErrorOptions& options);

// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

// Columns: n, opt_mean, opt_q10, opt_q90, rob_mean, rob_q10, rob_q90, trials.
Table sample_error_csv(const SampleErrorSweep& sweep);

// Least-squares slope of log(mean optimistic error) against log(n).
double log_log_slope(const SampleErrorSweep& sweep);

struct SyntheticReferences {
  FeasibleRegion region;
  DiscreteMeasure mu;
  DiscreteMeasure nu;
};

// Two Gaussian clouds of `atoms` points each in R^2 and a hexagonal region.
SyntheticReferences synthetic_references(std::uint64_t seed, std::size_t atoms = 200);

// ---------------------------------------------------------------- telemonitoring

struct PatientRecord {
  int subject = 0;
  double age = 0.0;
  double test_time = 0.0;
  double motor_updrs = 0.0;
  double total_updrs = 0.0;
  double ppe = 0.0;
  std::size_t row = 0;  // position in the file
};

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
};

struct TelemonitoringData {
  std::vector<PatientRecord> records;
  // motor_UPDRS, total_UPDRS, age, PPE over the whole file
  FeatureRange ranges[4];
};

// Requires the columns subject#, age, test_time, motor_UPDRS, total_UPDRS
// and PPE; other columns are ignored.
TelemonitoringData parse_telemonitoring_csv(const std::string& csv_text);

// Negated min-max normalization of (motor, total, age, PPE); lies in [-1, 0]^4.
CostVector cost_vector(const TelemonitoringData& data, const PatientRecord& r);

struct CohortWindow {
  double center = 0.0;
  double half_width = 5.0;
  std::vector<PatientRecord> rows;  // one per subject, ascending subject id
  Matrix cost_vectors;              // rows x 4
  Matrix severity;                  // rows x 2, (motor, total)

  DiscreteMeasure cost_measure() const { return from_samples(cost_vectors); }
  DiscreteMeasure severity_measure() const { return from_samples(severity); }
  // Row of `subject`, or -1.
  long index_of(int subject) const;
};

// Records whose rounded test_time lies in [t - w, t + w]; per subject the
// record with time closest to t (earliest row on ties). Throws InvalidInput
// if the window is empty.
CohortWindow build_window(const TelemonitoringData& data, double center, double half_width = 5.0);

// Five care plans of 10 weekly hours each.
FeasibleRegion care_plan_region();

struct TrackedLoss {
  int subject = 0;
  double optimistic = 0.0;
  double robust = 0.0;
  double independent = 0.0;
  double w2 = 0.0;           // quadratic coupling on cost vectors
  double w2_severity = 0.0;  // quadratic coupling on (motor, total)
};

struct EpsilonRow {
  double epsilon = 0.0;
  double edfo_mean = 0.0;
  double edfr_mean = 0.0;
  bool edfo_converged = false;
  bool edfr_converged = false;
};

struct ParkinsonsOptions {
  double start = 50.0;
  double middle = 100.0;
  double end = 150.0;
  double half_width = 5.0;
  std::vector<double> epsilons{0.1, 0.2, 0.5, 1.0, 2.0, 5.0};
};

struct ParkinsonsReport {
  CohortWindow start;
  CohortWindow middle;
  CohortWindow end;
  double w1_severity = 0.0;
  double w2_severity = 0.0;
  double w_dfo = 0.0;
  double regret = 0.0;
  double w_dfr = 0.0;
  std::vector<TrackedLoss> tracked;  // subjects in both start and middle
  double true_transition_mean = 0.0;   // l(Y_start, Y_end) over shared subjects
  double true_transition_median = 0.0;
  std::size_t true_transition_count = 0;
  std::vector<EpsilonRow> epsilon_sweep;
};

ParkinsonsReport parkinsons_pipeline(const TelemonitoringData& data,
                                     const ParkinsonsOptions& options = {});

// Prediction (x_i + sum_j gamma_ij y_j / a_i) / 2 for row i of gamma.
CostVector tracked_prediction(const Coupling& gamma, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu, std::size_t i);

// Columns: window, center, size.
Table window_table(const ParkinsonsReport& r);
// Columns: quantity, value.
Table distance_table(const ParkinsonsReport& r);
// Columns: method, mean_tracked_spo.
Table tracked_summary_table(const ParkinsonsReport& r);
// Columns: subject, loss_optimistic, loss_robust, loss_independent, loss_w2.
Table tracked_loss_table(const ParkinsonsReport& r);
// Columns: epsilon, edfo_mean, edfr_mean, edfo_converged, edfr_converged.
Table epsilon_table(const ParkinsonsReport& r);

}  // namespace dfot
