#include <cmath>
#include <nlohmann/json.hpp>

#include "dfot/error.hpp"
#include "dfot/experiments.hpp"

namespace dfot {

using nlohmann::json;

Matrix NewsvendorInstance::cost_matrix() const {
  Matrix c(static_cast<Eigen::Index>(demand.size()), static_cast<Eigen::Index>(orders.size()));
  for (std::size_t i = 0; i < demand.size(); ++i) {
    for (std::size_t j = 0; j < orders.size(); ++j) {
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          underage * std::max(demand[i] - orders[j], 0.0) + overage * std::max(orders[j] - demand[i], 0.0);
    }
  }
  return c;
}

void NewsvendorInstance::validate() const {
  if (demand.empty() || orders.empty()) throw InvalidInput("newsvendor grids must be nonempty");
  if (!(underage >= 0.0) || !(overage >= 0.0) || underage + overage <= 0.0) {
    throw InvalidInput("newsvendor prices must be nonnegative and not both zero");
  }
  if (pmfs.empty()) throw InvalidInput("newsvendor needs at least one demand pmf");
  for (const auto& p : pmfs) {
    if (static_cast<std::size_t>(p.size()) != demand.size()) {
      throw InvalidInput("demand pmf length differs from the demand support");
    }
    if (!p.allFinite() || p.minCoeff() < 0.0 || std::abs(p.sum() - 1.0) > 1e-9) {
      throw InvalidInput("demand pmf must be nonnegative and sum to one");
    }
  }
}

NewsvendorInstance default_newsvendor() {
  NewsvendorInstance inst;
  for (int v = 5; v <= 15; ++v) {
    inst.demand.push_back(v);
    inst.orders.push_back(v);
  }
  auto pmf = [](std::initializer_list<double> values) {
    Vector p(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) p[i++] = v;
    return p;
  };
  inst.pmfs = {
      pmf({0.04, 0.10, 0.16, 0.18, 0.14, 0.11, 0.09, 0.07, 0.05, 0.04, 0.02}),
      pmf({0.10, 0.12, 0.08, 0.05, 0.07, 0.20, 0.14, 0.10, 0.07, 0.04, 0.03}),
      pmf({0.02, 0.03, 0.05, 0.07, 0.09, 0.11, 0.25, 0.18, 0.10, 0.06, 0.04}),
  };
  return inst;
}

NewsvendorInstance parse_newsvendor(const std::string& json_text) {
  NewsvendorInstance inst;
  try {
    const json j = json::parse(json_text);
    inst.demand = j.at("demand").get<std::vector<double>>();
    inst.orders = j.at("orders").get<std::vector<double>>();
    inst.underage = j.value("underage", 3.0);
    inst.overage = j.value("overage", 2.0);
    for (const auto& p : j.at("pmfs")) {
      const auto v = p.get<std::vector<double>>();
      inst.pmfs.push_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed newsvendor config: ") + e.what());
  }
  inst.validate();
  return inst;
}

std::string newsvendor_to_json(const NewsvendorInstance& inst) {
  json pmfs = json::array();
  for (const auto& p : inst.pmfs) pmfs.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  const json j = {{"demand", inst.demand},
                  {"orders", inst.orders},
                  {"underage", inst.underage},
                  {"overage", inst.overage},
                  {"pmfs", pmfs}};
  return j.dump(2) + "\n";
}

std::vector<CostVector> newsvendor_type_costs(const NewsvendorInstance& inst) {
  inst.validate();
  const Matrix c = inst.cost_matrix();
  std::vector<CostVector> out;
  out.reserve(inst.pmfs.size());
  for (const auto& p : inst.pmfs) out.push_back(c.transpose() * p);
  return out;
}

FeasibleRegion simplex_region(std::size_t n) {
  if (n == 0) throw InvalidInput("simplex needs at least one vertex");
  return FeasibleRegion(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
}

std::vector<Vector> default_lambdas() {
  auto v = [](double a, double b, double c) { return Vector((Vector(3) << a, b, c).finished()); };
  return {v(1.0 / 4, 1.0 / 4, 1.0 / 2), v(1.0 / 5, 1.0 / 5, 3.0 / 5), v(1.0 / 6, 1.0 / 6, 2.0 / 3),
          v(0.1, 0.1, 0.8)};
}

std::vector<MixtureRow> mixture_table(const NewsvendorInstance& inst,
                                      const std::vector<Vector>& lambdas, const Vector& lambda0) {
  const auto costs = newsvendor_type_costs(inst);
  const std::size_t k = costs.size();
  Matrix atoms(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(inst.orders.size()));
  Matrix types(static_cast<Eigen::Index>(k), 1);
  for (std::size_t t = 0; t < k; ++t) {
    atoms.row(static_cast<Eigen::Index>(t)) = costs[t].transpose();
    types(static_cast<Eigen::Index>(t), 0) = static_cast<double>(t + 1);
  }
  const FeasibleRegion region = simplex_region(inst.orders.size());
  if (static_cast<std::size_t>(lambda0.size()) != k) throw InvalidInput("lambda0 length mismatch");
  const DiscreteMeasure base(atoms, lambda0);
  const DiscreteMeasure base_types(types, lambda0);

  std::vector<MixtureRow> rows;
  for (const auto& lambda : lambdas) {
    if (static_cast<std::size_t>(lambda.size()) != k) throw InvalidInput("lambda length mismatch");
    const DiscreteMeasure mix(atoms, lambda);
    const DiscreteMeasure mix_types(types, lambda);
    MixtureRow row;
    row.lambda = lambda;
    row.w_dfo = optimistic(region, mix, base, OptimisticMethod::kDirect).value;
    row.regret = regret(region, mix, base);
    row.w_dfr = robust(region, mix, base).value;
    row.tv = tv_distance(lambda, lambda0);
    row.kl = kl_divergence(lambda, lambda0);
    row.w1 = w_p(mix_types, base_types, 1);
    row.w2 = w_p(mix_types, base_types, 2);
    rows.push_back(std::move(row));
  }
  return rows;
}

Table mixture_table_csv(const std::vector<MixtureRow>& rows) {
  Table t;
  const std::size_t k = rows.empty() ? 0 : static_cast<std::size_t>(rows.front().lambda.size());
  for (std::size_t c = 0; c < k; ++c) t.columns.push_back("lambda" + std::to_string(c + 1));
  for (const char* name : {"W_DFO", "R", "W_DFR", "TV", "KL", "W1", "W2"}) t.columns.push_back(name);
  for (const auto& r : rows) {
    std::vector<std::string> cells;
    for (Eigen::Index c = 0; c < r.lambda.size(); ++c) cells.push_back(format_fixed(r.lambda[c], 4));
    for (double v : {r.w_dfo, r.regret, r.w_dfr, r.tv, r.kl, r.w1, r.w2}) {
      cells.push_back(format_fixed(v, 4));
    }
    t.add_row(std::move(cells));
  }
  return t;
}

}  // namespace dfot
