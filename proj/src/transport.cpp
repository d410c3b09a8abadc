#include <cmath>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "dfot/error.hpp"
#include "dfot/transport.hpp"

namespace dfot {

Coupling::Coupling(Matrix plan, Vector row_marginal, Vector col_marginal)
    : plan_(std::move(plan)),
      row_marginal_(std::move(row_marginal)),
      col_marginal_(std::move(col_marginal)) {
  if (plan_.rows() != row_marginal_.size() || plan_.cols() != col_marginal_.size()) {
    throw InvalidInput("coupling shape " + std::to_string(plan_.rows()) + "x" +
                       std::to_string(plan_.cols()) + " does not match marginals of sizes " +
                       std::to_string(row_marginal_.size()) + " and " +
                       std::to_string(col_marginal_.size()));
  }
  if (!plan_.allFinite()) throw InvalidInput("coupling has non-finite entries");
}

Coupling Coupling::product(const Vector& a, const Vector& b) {
  return Coupling(a * b.transpose(), a, b);
}

double Coupling::marginal_error() const {
  if (plan_.size() == 0) return 0.0;
  const double rows = (plan_.rowwise().sum() - row_marginal_).cwiseAbs().maxCoeff();
  const double cols = (plan_.colwise().sum().transpose() - col_marginal_).cwiseAbs().maxCoeff();
  return std::max(rows, cols);
}

Matrix distance_cost(const Matrix& x, const Matrix& y, int p) {
  if (x.cols() != y.cols()) {
    throw InvalidInput("point sets have dimensions " + std::to_string(x.cols()) + " and " +
                       std::to_string(y.cols()));
  }
  if (p != 1 && p != 2) throw InvalidInput("only p = 1 and p = 2 are supported");
  Matrix c(x.rows(), y.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < y.rows(); ++j) {
      const double sq = (x.row(i) - y.row(j)).squaredNorm();
      c(i, j) = (p == 2) ? sq : std::sqrt(sq);
    }
  }
  return c;
}

double w_p(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int p) {
  const Matrix cost = distance_cost(mu.points(), nu.points(), p);
  const double value = std::max(solve_exact(mu.weights(), nu.weights(), cost).value, 0.0);
  return p == 2 ? std::sqrt(value) : value;
}

std::string plan_to_csv(const Coupling& plan) {
  std::ostringstream out;
  out.precision(17);
  out << "i,j,mass\n";
  const Matrix& p = plan.plan();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      if (p(i, j) != 0.0) out << i << ',' << j << ',' << p(i, j) << '\n';
    }
  }
  return out.str();
}

std::string plan_to_dense_json(const Coupling& plan) {
  nlohmann::json j;
  j["rows"] = plan.rows();
  j["cols"] = plan.cols();
  nlohmann::json dense = nlohmann::json::array();
  for (Eigen::Index i = 0; i < plan.plan().rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < plan.plan().cols(); ++c) row.push_back(plan.plan()(i, c));
    dense.push_back(std::move(row));
  }
  j["plan"] = std::move(dense);
  return j.dump();
}

}  // namespace dfot
