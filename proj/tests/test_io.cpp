#include <random>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "helpers.hpp"
#include "rotmap/error.hpp"
#include "rotmap/io.hpp"

using namespace rotmap;

TEST_CASE("format_number keeps 17 significant digits") {
  CHECK(io::format_number(0.1) == "0.10000000000000001");
  CHECK(io::format_number(1.0) == "1");
  CHECK(io::format_number(std::nan("")) == "nan");
}

TEST_CASE("property: measure CSV round-trips bitwise") {
  std::mt19937_64 gen(41);
  for (int t = 0; t < 10; ++t) {
    const auto m = testing::random_cloud(gen, 5 + t, 1 + t % 3, -3.0, 7.0);
    std::stringstream ss;
    io::write_measure_csv(ss, m);
    const auto back = io::read_measure_csv(ss);
    CHECK(back.points() == m.points());
    CHECK(back.weights() == m.weights());
  }
}

TEST_CASE("malformed measure files name the line") {
  auto read = [](const std::string& text) {
    std::istringstream is(text);
    return io::read_measure_csv(is);
  };
  CHECK_THROWS_AS(read(""), InputError);
  CHECK_THROWS_AS(read("1\n"), InputError);
  CHECK_THROWS_AS(read("1,2\n0.1,0.5\n"), InputError);
  CHECK_THROWS_AS(read("1,1\n0.1,0.5,3\n"), InputError);
  try {
    read("1,2\n0.1,0.5\nabc,0.5\n");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(read("1,1\n0.1,-1\n"), InputError);
}

TEST_CASE("plan, potentials and report files") {
  const auto l = testing::unit_interval(12);
  const auto s = solve(l, l, Regularizer::polynomial(2.0), 0.2);
  std::stringstream plan;
  io::write_plan_csv(plan, s.plan);
  std::string line;
  std::getline(plan, line);
  CHECK(line == "x_index,y_index,Z");
  std::size_t rows = 0;
  while (std::getline(plan, line)) ++rows;
  CHECK(rows == s.plan.nnz());

  std::stringstream pot;
  io::write_potential_csv(pot, s.potentials.f, "f");
  std::getline(pot, line);
  CHECK(line == "index,f");
  std::getline(pot, line);
  CHECK(line == "0,0");

  std::stringstream rep;
  io::write_report_json(rep, s.report);
  const auto j = nlohmann::json::parse(rep.str());
  CHECK(j.at("iterations").get<int>() == s.report.iterations);
  CHECK(j.at("residual").get<double>() == s.report.residual);
  CHECK(j.at("gap").get<double>() == s.report.gap);

  std::stringstream map;
  io::write_map_csv(map, map_samples(s.potentials, s.plan, l, l));
  std::getline(map, line);
  CHECK(line == "x_1,T_1,mass,support_radius");
}

TEST_CASE("scan table and fit json") {
  ScanResult r;
  r.name = "demo";
  r.table.columns = {"eps", "value"};
  r.table.rows = {{0.1, 1.0}, {0.05, std::nan("")}};
  r.fit = fit_rate({{0.1, 1.0}, {0.05, 0.5}, {0.025, 0.25}});
  r.dropped.push_back({0.05, "nonpositive value"});
  r.predictions = {{"slope", 1.0}};
  r.checks = {{"ok", true}};
  std::stringstream csv;
  io::write_scan_csv(csv, r.table);
  CHECK(csv.str() == "eps,value\n0.10000000000000001,1\n0.050000000000000003,nan\n");
  std::stringstream js;
  io::write_fit_json(js, r);
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j.at("name") == "demo");
  CHECK(j.at("slope").get<double>() == doctest::Approx(1.0));
  CHECK(j.at("points").size() == 3);
  CHECK(j.at("dropped")[0].at("reason") == "nonpositive value");
  CHECK(j.at("checks").at("ok") == true);

  ScanResult empty;
  empty.name = "e";
  std::stringstream js2;
  io::write_fit_json(js2, empty);
  CHECK(nlohmann::json::parse(js2.str()).at("slope").is_null());
}

TEST_CASE("exact coupling csv") {
  const auto l = testing::unit_interval(4);
  std::stringstream ss;
  io::write_coupling_csv(ss, exact_1d(l, l));
  CHECK(ss.str() == "x_index,y_index,mass\n0,0,0.25\n1,1,0.25\n2,2,0.25\n3,3,0.25\n");
}
