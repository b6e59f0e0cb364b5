#include <doctest.h>

#include <sstream>
#include <vector>

#include "stp/analysis.hpp"
#include "stp/report.hpp"
#include "stp/scenario.hpp"

using namespace stp;

namespace {

Scenario scenario(std::uint64_t seed) {
  GeneratorParams p;
  p.frames = 40;
  p.objects = 14;
  p.seed = seed;
  return generate_scenario(p);
}

RunSettings settings(StrategyKind kind, int cnn) {
  RunSettings s;
  s.cnn_size = cnn;
  s.pipeline.strategy.kind = kind;
  s.detector.miss_rate = 0.1;
  s.detector.position_noise = 1.5;
  return s;
}

}  // namespace

TEST_CASE("resolution-scaled miss rate") {
  CHECK(downscale_factor(960, 544, 352) == doctest::Approx(960.0 / 352.0));
  CHECK(downscale_factor(300, 200, 352) == 1.0);
  CHECK(resized_miss_rate(0.0, 1.0, 1.0) == 0.0);
  CHECK(resized_miss_rate(0.0, 2.0, 1.0) == doctest::Approx(0.5));
  CHECK(resized_miss_rate(0.2, 4.0, 0.5) == doctest::Approx(0.6));
  CHECK(resized_miss_rate(0.1, downscale_factor(960, 544, 352), 1.0) >= 0.4);
}

TEST_CASE("a report compared with itself") {
  const Report r = execute(scenario(1), settings(StrategyKind::TSM, 256));
  const std::vector<Report> pair{r, r};
  const auto rows = compare(pair);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].delta_sen == 0.0);
  CHECK(rows[1].apt_ratio == 1.0);
}

TEST_CASE("all tiles against round robin costs N_T times more") {
  const Scenario sc = scenario(2);
  const std::vector<Report> reports{execute(sc, settings(StrategyKind::T1, 256)),
                                    execute(sc, settings(StrategyKind::TA, 256))};
  const auto rows = compare(reports);
  CHECK(*rows[1].apt_ratio == doctest::Approx(12.0));
  CHECK(*rows[1].delta_sen >= 0.0);
}

TEST_CASE("delta is antisymmetric in the baseline choice") {
  const Scenario sc = scenario(3);
  const std::vector<Report> reports{execute(sc, settings(StrategyKind::T1, 352)),
                                    execute(sc, settings(StrategyKind::TO, 352))};
  const auto a = compare(reports, 0);
  const auto b = compare(reports, 1);
  CHECK(*a[1].delta_sen == doctest::Approx(-*b[0].delta_sen));
  CHECK(*a[1].apt_ratio * *b[0].apt_ratio == doctest::Approx(1.0));
}

TEST_CASE("TSM beats the resize baseline at a similar cost") {
  const Scenario sc = scenario(4);
  RunSettings base = settings(StrategyKind::TA, 352);
  base.resize_baseline = true;
  base.pipeline.memory_enabled = false;
  RunSettings tsm = settings(StrategyKind::TSM, 352);
  tsm.pipeline.strategy.budget_n = 2;
  const std::vector<Report> reports{execute(sc, base), execute(sc, tsm)};
  const auto rows = compare(reports);
  CHECK(*rows[1].delta_sen > 0.0);
  CHECK(*rows[1].apt_ratio <= 2.0);
}

TEST_CASE("reports from different scenarios are not compared") {
  const std::vector<Report> reports{execute(scenario(5), settings(StrategyKind::TA, 352)),
                                    execute(scenario(6), settings(StrategyKind::TA, 352))};
  CHECK_THROWS_AS(compare(reports), ReportError);
  const std::vector<Report> single{reports[0]};
  CHECK_THROWS_AS(compare(single), ReportError);
}

TEST_CASE("trade-off table layout") {
  const Report r = execute(scenario(7), settings(StrategyKind::T1, 544));
  const std::vector<Report> pair{r, r};
  std::ostringstream os;
  const auto rows = compare(pair);
  write_tradeoff_table(os, rows);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "config\ttiles\tsen\tapt\tdelta_sen\tapt_ratio");
  std::getline(in, line);
  CHECK(line.rfind("t1@544\t2\t", 0) == 0);
}
