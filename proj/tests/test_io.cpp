#include <doctest.h>

#include <filesystem>

#include "dfot/error.hpp"
#include "dfot/io.hpp"

using dfot::Matrix;
using dfot::Vector;

TEST_CASE("region JSON round-trip") {
  const auto r = dfot::parse_region(R"({"extreme_points": [[0, 0], [1.5, 0], [0, 2]]})");
  CHECK(r.size() == 3);
  CHECK(r.dim() == 2);
  const auto back = dfot::parse_region(dfot::region_to_json(r));
  CHECK(back.extreme_points() == r.extreme_points());
}

TEST_CASE("measure JSON with and without weights") {
  const auto uniform = dfot::parse_measure(R"({"points": [[1], [2], [3], [4]]})");
  CHECK(uniform.weights().isApprox(Vector::Constant(4, 0.25)));
  const auto m = dfot::parse_measure(R"({"points": [[1, 2], [3, 4]], "weights": [0.1, 0.9]})");
  CHECK(m.weight(1) == 0.9);
  const auto back = dfot::parse_measure(dfot::measure_to_json(m));
  CHECK(back.points() == m.points());
  CHECK(back.weights() == m.weights());
}

TEST_CASE("malformed JSON is rejected") {
  CHECK_THROWS_AS(dfot::parse_region("{"), dfot::InvalidInput);
  CHECK_THROWS_AS(dfot::parse_region(R"({"points": [[1]]})"), dfot::InvalidInput);
  CHECK_THROWS_AS(dfot::parse_region(R"({"extreme_points": [[1, 2], [3]]})"), dfot::InvalidInput);
  CHECK_THROWS_AS(dfot::parse_measure(R"({"points": [[1], ["x"]]})"), dfot::InvalidInput);
  CHECK_THROWS_AS(dfot::parse_measure(R"({"points": [[1], [2]], "weights": [0.5]})"), dfot::InvalidInput);
  CHECK_THROWS_AS(dfot::parse_measure(R"({"points": []})"), dfot::InvalidInput);
  CHECK_THROWS_AS(dfot::load_measure("/nonexistent/file.json"), dfot::InvalidInput);
}

TEST_CASE("DF result JSON round-trip") {
  dfot::DFResult r;
  r.value = 0.123456789012345;
  Matrix plan(2, 2);
  plan << 0.25, 0.25, 0.0, 0.5;
  r.coupling = dfot::Coupling(plan, (Vector(2) << 0.5, 0.5).finished(), (Vector(2) << 0.25, 0.75).finished());
  r.dual = dfot::DualPotentials{(Vector(2) << 1, -1).finished(), (Vector(2) << 0.5, 2).finished()};
  r.entropic = dfot::EntropicStatus{0.5, 0.1, 0.02, true, 1e-10, 42};
  r.method = dfot::DFMethod::kEntropic;
  const std::string text = dfot::df_result_to_json(r);
  const auto back = dfot::parse_df_result(text);
  CHECK(back.value == r.value);
  CHECK(back.method == r.method);
  CHECK(back.coupling.plan() == plan);
  CHECK(back.coupling.col_marginal() == r.coupling.col_marginal());
  CHECK(back.dual->f == r.dual->f);
  CHECK(back.entropic->iterations == 42);
  CHECK(dfot::df_result_to_json(back) == text);

  dfot::DFResult bare;
  bare.value = 1.0;
  const auto bare_back = dfot::parse_df_result(dfot::df_result_to_json(bare));
  CHECK(bare_back.coupling.rows() == 0);
  CHECK(!bare_back.dual.has_value());
}

TEST_CASE("plan CSV parsing") {
  const auto c = dfot::parse_plan_csv("i,j,mass\n0,1,0.5\n1,0,0.5\n", 2, 2);
  CHECK(c.plan()(0, 1) == 0.5);
  CHECK(c.row_marginal().isApprox(Vector::Constant(2, 0.5)));
  CHECK_THROWS_AS(dfot::parse_plan_csv("a,b,c\n", 1, 1), dfot::InvalidInput);
  CHECK_THROWS_AS(dfot::parse_plan_csv("i,j,mass\n5,0,1\n", 2, 2), dfot::InvalidInput);
  CHECK_THROWS_AS(dfot::parse_plan_csv("i,j,mass\nx,0,1\n", 2, 2), dfot::InvalidInput);
}

TEST_CASE("tables and number formatting") {
  dfot::Table t;
  t.columns = {"a", "b"};
  t.add_row({"1", "x"});
  CHECK_THROWS_AS(t.add_row({"1"}), dfot::InvalidInput);
  const auto back = dfot::parse_table_csv(t.to_csv());
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);
  CHECK(dfot::parse_table_csv("h1,h2\r\n\"q,1\",2\r\n").rows[0][0] == "q,1");
  CHECK_THROWS_AS(dfot::parse_table_csv(""), dfot::InvalidInput);
  CHECK_THROWS_AS(dfot::parse_table_csv("a,b\n1\n"), dfot::InvalidInput);

  CHECK(dfot::format_double(0.1) == "0.1");
  CHECK(dfot::format_double(0.0) == "0.0");
  CHECK(dfot::format_double(3.0) == "3.0");
  CHECK(dfot::format_double(1e-20) == "1e-20");
  CHECK(std::stod(dfot::format_double(1.0 / 3)) == 1.0 / 3);
  CHECK(dfot::format_fixed(0.16666, 4) == "0.1667");
}

TEST_CASE("text files") {
  const auto path = std::filesystem::temp_directory_path() / "dfot_io_test.txt";
  dfot::write_text_file(path.string(), "hello\n");
  CHECK(dfot::read_text_file(path.string()) == "hello\n");
  std::filesystem::remove(path);
}
