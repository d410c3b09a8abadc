// Transportation simplex: northwest-corner start, MODI potentials on the
// spanning-tree basis, Dantzig pricing with a Bland fallback.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dfot/error.hpp"
#include "dfot/transport.hpp"

namespace dfot {
namespace {

constexpr double kPerturbation = 1e-12;
constexpr std::size_t kDegenerateStreakForBland = 64;

struct Problem {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  Matrix primary;    // minimized; negated cost for kMaximize
  Matrix secondary;  // empty unless lexicographic
  double primary_tol = 0.0;
  double secondary_tol = 0.0;
  bool lex() const { return secondary.size() > 0; }
};

class SpanningTreeBasis {
 public:
  SpanningTreeBasis(const Problem& pb, const Vector& supply, const Vector& demand)
      : pb_(pb),
        nodes_(pb.n + pb.m),
        adj_(static_cast<std::size_t>(nodes_)),
        u_(pb.n),
        v_(pb.m),
        u2_(pb.n),
        v2_(pb.m) {
    northwest_corner(supply, demand);
  }

  // Runs pivots until no improving cell remains; returns the pivot count.
  std::size_t optimize() {
    std::size_t pivots = 0;
    std::size_t degenerate_streak = 0;
    bool bland = false;
    const std::size_t max_pivots =
        1000 + 50 * static_cast<std::size_t>(pb_.n * pb_.m);
    while (true) {
      compute_potentials();
      Eigen::Index ei = -1;
      Eigen::Index ej = -1;
      if (!select_entering(bland, ei, ej)) break;
      const double theta = pivot(ei, ej);
      ++pivots;
      if (theta <= 1e-15) {
        if (++degenerate_streak >= kDegenerateStreakForBland) bland = true;
      } else {
        degenerate_streak = 0;
      }
      if (pivots > max_pivots) {
        throw std::runtime_error("transportation simplex exceeded its pivot budget");
      }
    }
    return pivots;
  }

  // Re-solves basic flows on the current tree for the given marginals.
  void resolve_flows(const Vector& supply, const Vector& demand) {
    std::vector<double> residual(static_cast<std::size_t>(nodes_));
    for (Eigen::Index i = 0; i < pb_.n; ++i) residual[static_cast<std::size_t>(i)] = supply[i];
    for (Eigen::Index j = 0; j < pb_.m; ++j) residual[static_cast<std::size_t>(pb_.n + j)] = demand[j];
    std::vector<std::size_t> degree(static_cast<std::size_t>(nodes_));
    for (Eigen::Index v = 0; v < nodes_; ++v) degree[static_cast<std::size_t>(v)] = adj_[static_cast<std::size_t>(v)].size();
    std::vector<char> done(cells_.size(), 0);
    std::vector<Eigen::Index> leaves;
    for (Eigen::Index v = 0; v < nodes_; ++v) {
      if (degree[static_cast<std::size_t>(v)] == 1) leaves.push_back(v);
    }
    while (!leaves.empty()) {
      const Eigen::Index leaf = leaves.back();
      leaves.pop_back();
      if (degree[static_cast<std::size_t>(leaf)] != 1) continue;
      std::size_t edge = 0;
      for (std::size_t e : adj_[static_cast<std::size_t>(leaf)]) {
        if (!done[e]) {
          edge = e;
          break;
        }
      }
      done[edge] = 1;
      Cell& c = cells_[edge];
      c.flow = residual[static_cast<std::size_t>(leaf)];
      const Eigen::Index other = (leaf < pb_.n) ? pb_.n + c.col : c.row;
      residual[static_cast<std::size_t>(other)] -= c.flow;
      --degree[static_cast<std::size_t>(leaf)];
      if (--degree[static_cast<std::size_t>(other)] == 1) leaves.push_back(other);
    }
    for (Cell& c : cells_) c.flow = std::max(c.flow, 0.0);
  }

  Matrix plan() const {
    Matrix out = Matrix::Zero(pb_.n, pb_.m);
    for (const Cell& c : cells_) out(c.row, c.col) += c.flow;
    return out;
  }

  const Vector& row_potentials() const { return u_; }
  const Vector& col_potentials() const { return v_; }
  void refresh_potentials() { compute_potentials(); }

 private:
  struct Cell {
    Eigen::Index row;
    Eigen::Index col;
    double flow;
  };

  void add_cell(Eigen::Index i, Eigen::Index j, double flow) {
    const std::size_t pos = cells_.size();
    cells_.push_back({i, j, flow});
    adj_[static_cast<std::size_t>(i)].push_back(pos);
    adj_[static_cast<std::size_t>(pb_.n + j)].push_back(pos);
  }

  void northwest_corner(const Vector& supply, const Vector& demand) {
    std::vector<double> s(supply.data(), supply.data() + supply.size());
    std::vector<double> d(demand.data(), demand.data() + demand.size());
    Eigen::Index i = 0;
    Eigen::Index j = 0;
    while (true) {
      const double x = std::min(s[static_cast<std::size_t>(i)], d[static_cast<std::size_t>(j)]);
      add_cell(i, j, std::max(x, 0.0));
      s[static_cast<std::size_t>(i)] -= x;
      d[static_cast<std::size_t>(j)] -= x;
      if (i == pb_.n - 1 && j == pb_.m - 1) break;
      if (i == pb_.n - 1) {
        ++j;
      } else if (j == pb_.m - 1) {
        ++i;
      } else if (s[static_cast<std::size_t>(i)] <= d[static_cast<std::size_t>(j)]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  void compute_potentials() {
    std::vector<char> seen(static_cast<std::size_t>(nodes_), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    u_[0] = 0.0;
    u2_[0] = 0.0;
    while (!stack.empty()) {
      const Eigen::Index node = stack.back();
      stack.pop_back();
      for (std::size_t e : adj_[static_cast<std::size_t>(node)]) {
        const Cell& c = cells_[e];
        const Eigen::Index other = (node < pb_.n) ? pb_.n + c.col : c.row;
        if (seen[static_cast<std::size_t>(other)]) continue;
        seen[static_cast<std::size_t>(other)] = 1;
        if (node < pb_.n) {
          v_[c.col] = pb_.primary(c.row, c.col) - u_[c.row];
          if (pb_.lex()) v2_[c.col] = pb_.secondary(c.row, c.col) - u2_[c.row];
        } else {
          u_[c.row] = pb_.primary(c.row, c.col) - v_[c.col];
          if (pb_.lex()) u2_[c.row] = pb_.secondary(c.row, c.col) - v2_[c.col];
        }
        stack.push_back(other);
      }
    }
  }

  // Candidates improve the primary cost, or (lexicographic mode) leave it
  // unchanged within tolerance while improving the secondary cost. Any
  // primary candidate outranks every secondary one.
  bool select_entering(bool bland, Eigen::Index& ei, Eigen::Index& ej) const {
    double best_primary = -pb_.primary_tol;
    double best_secondary = -pb_.secondary_tol;
    Eigen::Index pi = -1, pj = -1, si = -1, sj = -1;
    for (Eigen::Index i = 0; i < pb_.n; ++i) {
      for (Eigen::Index j = 0; j < pb_.m; ++j) {
        const double r = pb_.primary(i, j) - u_[i] - v_[j];
        if (r < best_primary || (bland && r < -pb_.primary_tol && pi < 0)) {
          best_primary = r;
          pi = i;
          pj = j;
          if (bland) {
            ei = pi;
            ej = pj;
            return true;
          }
          continue;
        }
        if (!pb_.lex() || pi >= 0 || r > pb_.primary_tol || r < -pb_.primary_tol) continue;
        if (bland && si >= 0) continue;
        const double r2 = pb_.secondary(i, j) - u2_[i] - v2_[j];
        if (r2 < best_secondary || (bland && r2 < -pb_.secondary_tol)) {
          best_secondary = r2;
          si = i;
          sj = j;
        }
      }
    }
    if (pi >= 0) {
      ei = pi;
      ej = pj;
      return true;
    }
    if (si >= 0) {
      ei = si;
      ej = sj;
      return true;
    }
    return false;
  }

  // Pivots cell (ei, ej) into the basis; returns the step length.
  double pivot(Eigen::Index ei, Eigen::Index ej) {
    // Tree path from row node ei to column node n + ej.
    const Eigen::Index target = pb_.n + ej;
    std::vector<std::ptrdiff_t> parent_edge(static_cast<std::size_t>(nodes_), -1);
    std::vector<char> seen(static_cast<std::size_t>(nodes_), 0);
    std::vector<Eigen::Index> stack{ei};
    seen[static_cast<std::size_t>(ei)] = 1;
    while (!stack.empty()) {
      const Eigen::Index node = stack.back();
      stack.pop_back();
      if (node == target) break;
      for (std::size_t e : adj_[static_cast<std::size_t>(node)]) {
        const Cell& c = cells_[e];
        const Eigen::Index other = (node < pb_.n) ? pb_.n + c.col : c.row;
        if (seen[static_cast<std::size_t>(other)]) continue;
        seen[static_cast<std::size_t>(other)] = 1;
        parent_edge[static_cast<std::size_t>(other)] = static_cast<std::ptrdiff_t>(e);
        stack.push_back(other);
      }
    }
    // Walk back from the column: edges alternate -, +, -, ..., -.
    std::vector<std::size_t> path;
    for (Eigen::Index node = target; node != ei;) {
      const auto e = static_cast<std::size_t>(parent_edge[static_cast<std::size_t>(node)]);
      path.push_back(e);
      const Cell& c = cells_[e];
      node = (node < pb_.n) ? pb_.n + c.col : c.row;
    }
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = path.front();
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const Cell& c = cells_[path[k]];
      const Cell& l = cells_[leaving];
      if (c.flow < theta ||
          (c.flow == theta && c.row * pb_.m + c.col < l.row * pb_.m + l.col)) {
        theta = c.flow;
        leaving = path[k];
      }
    }
    theta = std::max(theta, 0.0);
    for (std::size_t k = 0; k < path.size(); ++k) {
      Cell& c = cells_[path[k]];
      c.flow = (k % 2 == 0) ? std::max(c.flow - theta, 0.0) : c.flow + theta;
    }
    // Replace the leaving cell in place.
    Cell& out = cells_[leaving];
    auto detach = [&](Eigen::Index node) {
      auto& list = adj_[static_cast<std::size_t>(node)];
      list.erase(std::find(list.begin(), list.end(), leaving));
    };
    detach(out.row);
    detach(pb_.n + out.col);
    out = {ei, ej, theta};
    adj_[static_cast<std::size_t>(ei)].push_back(leaving);
    adj_[static_cast<std::size_t>(pb_.n + ej)].push_back(leaving);
    return theta;
  }

  const Problem& pb_;
  Eigen::Index nodes_;
  std::vector<Cell> cells_;
  std::vector<std::vector<std::size_t>> adj_;
  Vector u_, v_, u2_, v2_;
};

void check_inputs(const Vector& a, const Vector& b, const Matrix& cost) {
  if (a.size() == 0 || b.size() == 0) throw InvalidInput("transport marginals must be nonempty");
  if (cost.rows() != a.size() || cost.cols() != b.size()) {
    throw InvalidInput("cost matrix is " + std::to_string(cost.rows()) + "x" +
                       std::to_string(cost.cols()) + " but marginals have sizes " +
                       std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  if (!cost.allFinite()) throw InvalidInput("cost matrix has non-finite entries");
  if (!a.allFinite() || !b.allFinite() || (a.array() < 0.0).any() || (b.array() < 0.0).any()) {
    throw InvalidInput("marginals must be finite and nonnegative");
  }
  if (std::abs(a.sum() - b.sum()) > 1e-8) {
    throw Infeasible("marginal masses differ: " + std::to_string(a.sum()) + " vs " +
                     std::to_string(b.sum()));
  }
}

TransportResult solve(const Vector& a, const Vector& b, const Matrix& cost, const Matrix* secondary,
                      Sense sense) {
  check_inputs(a, b, cost);
  Problem pb;
  pb.n = a.size();
  pb.m = b.size();
  pb.primary = (sense == Sense::kMaximize) ? Matrix(-cost) : cost;
  pb.primary_tol = 1e-10 * std::max(1.0, cost.cwiseAbs().maxCoeff());
  if (secondary != nullptr) {
    if (secondary->rows() != cost.rows() || secondary->cols() != cost.cols() ||
        !secondary->allFinite()) {
      throw InvalidInput("secondary cost must be finite and match the primary cost shape");
    }
    pb.secondary = *secondary;
    pb.secondary_tol = 1e-10 * std::max(1.0, secondary->cwiseAbs().maxCoeff());
  }

  // Balance exactly, then perturb so that no basis is degenerate.
  const Vector demand = b * (a.sum() / b.sum());
  Vector perturbed_supply = a.array() + kPerturbation;
  Vector perturbed_demand = demand;
  perturbed_demand[pb.m - 1] += kPerturbation * static_cast<double>(pb.n);

  SpanningTreeBasis basis(pb, perturbed_supply, perturbed_demand);
  TransportResult result;
  result.pivots = basis.optimize();
  basis.resolve_flows(a, demand);
  basis.refresh_potentials();

  Matrix plan = basis.plan();
  result.value = (cost.array() * plan.array()).sum();
  result.dual_row = basis.row_potentials();
  result.dual_col = basis.col_potentials();
  if (sense == Sense::kMaximize) {
    result.dual_row = -result.dual_row;
    result.dual_col = -result.dual_col;
  }
  result.plan = Coupling(std::move(plan), a, b);
  return result;
}

}  // namespace

TransportResult solve_exact(const Vector& a, const Vector& b, const Matrix& cost, Sense sense) {
  return solve(a, b, cost, nullptr, sense);
}

TransportResult solve_exact_lex(const Vector& a, const Vector& b, const Matrix& cost,
                                const Matrix& secondary, Sense sense) {
  return solve(a, b, cost, &secondary, sense);
}

}  // namespace dfot
