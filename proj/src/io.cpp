#include "dfot/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dfot/error.hpp"

namespace dfot {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("malformed ") + what + " JSON: " + e.what());
  }
}

Matrix rows_to_matrix(const json& rows, const char* what) {
  if (!rows.is_array() || rows.empty()) {
    throw InvalidInput(std::string(what) + " must be a nonempty array of arrays");
  }
  const std::size_t d = rows.front().is_array() ? rows.front().size() : 0;
  if (d == 0) throw InvalidInput(std::string(what) + " rows must be nonempty arrays");
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const json& row = rows[i];
    if (!row.is_array() || row.size() != d) {
      throw InvalidInput(std::string(what) + " rows must all have length " + std::to_string(d));
    }
    for (std::size_t c = 0; c < d; ++c) {
      if (!row[c].is_number()) throw InvalidInput(std::string(what) + " entries must be numbers");
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return out;
}

Vector array_to_vector(const json& arr, const char* what) {
  if (!arr.is_array()) throw InvalidInput(std::string(what) + " must be an array");
  Vector out(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw InvalidInput(std::string(what) + " entries must be numbers");
    out[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return out;
}

json matrix_to_rows(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_array(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

DFMethod parse_method(const std::string& s) {
  if (s == "direct_lp") return DFMethod::kDirectLP;
  if (s == "reduction") return DFMethod::kReduction;
  if (s == "entropic") return DFMethod::kEntropic;
  if (s == "product") return DFMethod::kProduct;
  throw InvalidInput("unknown method '" + s + "'");
}

json coupling_to_json(const Coupling& c) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < c.plan().rows(); ++i) {
    for (Eigen::Index j = 0; j < c.plan().cols(); ++j) {
      if (c.plan()(i, j) != 0.0) entries.push_back(json::array({i, j, c.plan()(i, j)}));
    }
  }
  return {{"rows", c.rows()},
          {"cols", c.cols()},
          {"entries", std::move(entries)},
          {"row_marginal", vector_to_array(c.row_marginal())},
          {"col_marginal", vector_to_array(c.col_marginal())}};
}

Coupling coupling_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries")) {
    throw InvalidInput("coupling needs rows, cols and entries");
  }
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  Matrix plan = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (const json& e : j.at("entries")) {
    if (!e.is_array() || e.size() != 3) throw InvalidInput("coupling entries are [i, j, mass]");
    const auto i = e[0].get<std::size_t>();
    const auto c = e[1].get<std::size_t>();
    if (i >= rows || c >= cols) throw InvalidInput("coupling entry index out of range");
    plan(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) += e[2].get<double>();
  }
  Vector a = j.contains("row_marginal") ? array_to_vector(j.at("row_marginal"), "row_marginal")
                                        : Vector(plan.rowwise().sum());
  Vector b = j.contains("col_marginal") ? array_to_vector(j.at("col_marginal"), "col_marginal")
                                        : Vector(plan.colwise().sum().transpose());
  return Coupling(std::move(plan), std::move(a), std::move(b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  out.push_back(cell);
  return out;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << contents;
  if (!out) throw InvalidInput("failed writing '" + path + "'");
}

FeasibleRegion parse_region(const std::string& json_text) {
  const json j = parse_json(json_text, "polytope");
  if (!j.is_object() || !j.contains("extreme_points")) {
    throw InvalidInput("polytope JSON needs an 'extreme_points' array");
  }
  return FeasibleRegion(rows_to_matrix(j.at("extreme_points"), "extreme_points"));
}

std::string region_to_json(const FeasibleRegion& region) {
  return json{{"extreme_points", matrix_to_rows(region.extreme_points())}}.dump(2) + "\n";
}

FeasibleRegion load_region(const std::string& path) { return parse_region(read_text_file(path)); }

DiscreteMeasure parse_measure(const std::string& json_text) {
  const json j = parse_json(json_text, "measure");
  if (!j.is_object() || !j.contains("points")) {
    throw InvalidInput("measure JSON needs a 'points' array");
  }
  Matrix pts = rows_to_matrix(j.at("points"), "points");
  if (!j.contains("weights") || j.at("weights").is_null()) return from_samples(pts);
  Vector w = array_to_vector(j.at("weights"), "weights");
  return DiscreteMeasure(std::move(pts), std::move(w));
}

std::string measure_to_json(const DiscreteMeasure& m) {
  return json{{"points", matrix_to_rows(m.points())}, {"weights", vector_to_array(m.weights())}}
             .dump(2) +
         "\n";
}

DiscreteMeasure load_measure(const std::string& path) { return parse_measure(read_text_file(path)); }

std::string df_result_to_json(const DFResult& r) {
  json j = {{"value", r.value}, {"method", to_string(r.method)}};
  // Symmetrized values combine several plans and carry none.
  if (r.coupling.rows() > 0) j["coupling"] = coupling_to_json(r.coupling);
  if (r.reduced_coupling) j["reduced_coupling"] = coupling_to_json(*r.reduced_coupling);
  if (r.dual) j["dual"] = {{"f", vector_to_array(r.dual->f)}, {"g", vector_to_array(r.dual->g)}};
  if (r.entropic) {
    const auto& e = *r.entropic;
    j["entropic"] = {{"epsilon", e.epsilon},
                     {"value_plain", e.value_plain},
                     {"kl_to_product", e.kl_to_product},
                     {"converged", e.converged},
                     {"marginal_error", e.marginal_error},
                     {"iterations", e.iterations}};
  }
  return j.dump(2) + "\n";
}

DFResult parse_df_result(const std::string& json_text) {
  const json j = parse_json(json_text, "result");
  try {
    DFResult r;
    r.value = j.at("value").get<double>();
    r.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("coupling")) r.coupling = coupling_from_json(j.at("coupling"));
    if (j.contains("reduced_coupling")) r.reduced_coupling = coupling_from_json(j.at("reduced_coupling"));
    if (j.contains("dual")) {
      DualPotentials d;
      d.f = array_to_vector(j.at("dual").at("f"), "dual.f");
      if (j.at("dual").contains("g")) d.g = array_to_vector(j.at("dual").at("g"), "dual.g");
      r.dual = std::move(d);
    }
    if (j.contains("entropic")) {
      const json& e = j.at("entropic");
      r.entropic = EntropicStatus{e.at("epsilon").get<double>(),    e.at("value_plain").get<double>(),
                                  e.at("kl_to_product").get<double>(), e.at("converged").get<bool>(),
                                  e.at("marginal_error").get<double>(), e.at("iterations").get<std::size_t>()};
    }
    return r;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed result JSON: ") + e.what());
  }
}

Coupling parse_plan_csv(const std::string& csv_text, std::size_t rows, std::size_t cols) {
  const Table t = parse_table_csv(csv_text);
  if (t.columns != std::vector<std::string>{"i", "j", "mass"}) {
    throw InvalidInput("plan CSV header must be i,j,mass");
  }
  Matrix plan = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (const auto& row : t.rows) {
    std::size_t i = 0;
    std::size_t j = 0;
    double mass = 0.0;
    try {
      i = std::stoul(row[0]);
      j = std::stoul(row[1]);
      mass = std::stod(row[2]);
    } catch (const std::exception&) {
      throw InvalidInput("plan CSV has a non-numeric entry");
    }
    if (i >= rows || j >= cols) throw InvalidInput("plan CSV index out of range");
    if (!std::isfinite(mass)) throw InvalidInput("plan CSV mass is not finite");
    plan(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += mass;
  }
  Vector a = plan.rowwise().sum();
  Vector b = plan.colwise().sum().transpose();
  return Coupling(std::move(plan), std::move(a), std::move(b));
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw InvalidInput("table row width mismatch");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::ostringstream out;
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out << ',';
      out << cells[c];
    }
    out << '\n';
  };
  emit(columns);
  for (const auto& r : rows) emit(r);
  return out.str();
}

Table parse_table_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  Table t;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (header) {
      t.columns = std::move(cells);
      header = false;
    } else {
      if (cells.size() != t.columns.size()) {
        throw InvalidInput("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(t.columns.size()));
      }
      t.rows.push_back(std::move(cells));
    }
  }
  if (header) throw InvalidInput("CSV is empty");
  return t;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  std::string s(buf);
  // Keep integral values recognizably floating point: 3 -> 3.0.
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string format_fixed(double v, int decimals) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out << std::fixed << std::setprecision(decimals) << v;
  return out.str();
}

}  // namespace dfot
