#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gin/errors.hpp"
#include "gin/eval.hpp"
#include "gin/rng.hpp"

using namespace gin;

namespace {

// independent MAP computation: rank by score (index breaks ties), then
// textbook AP summed by hand
double brute_force_map(const ScoreMatrix& sm) {
  double sum = 0.0;
  int counted = 0;
  for (int q = 0; q < sm.rows; ++q) {
    std::vector<int> order(sm.cols);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (sm.at(q, a) != sm.at(q, b)) return sm.at(q, a) > sm.at(q, b);
      return a < b;
    });
    int total_rel = 0;
    for (int c = 0; c < sm.cols; ++c)
      if (sm.candidate_labels[c] == sm.query_labels[q]) ++total_rel;
    if (total_rel == 0) continue;
    double ap = 0.0;
    int hits = 0;
    for (int r = 0; r < sm.cols; ++r)
      if (sm.candidate_labels[order[r]] == sm.query_labels[q]) {
        ++hits;
        ap += static_cast<double>(hits) / (r + 1);
      }
    sum += ap / total_rel;
    ++counted;
  }
  return sum / counted;
}

ScoreMatrix random_matrix(int rows, int cols, int classes, Rng& rng, bool with_ties) {
  ScoreMatrix sm;
  sm.rows = rows;
  sm.cols = cols;
  for (int q = 0; q < rows; ++q)
    sm.query_labels.push_back("c" + std::to_string(rng.uniform_index(classes)));
  for (int c = 0; c < cols; ++c)
    sm.candidate_labels.push_back("c" + std::to_string(rng.uniform_index(classes)));
  sm.scores.resize(static_cast<std::size_t>(rows) * cols);
  for (double& s : sm.scores)
    s = with_ties ? std::floor(rng.uniform(-3.0, 3.0)) * 0.5 : rng.uniform(-1.0, 1.0);
  return sm;
}

}  // namespace

TEST_CASE("average_precision hand examples") {
  CHECK(average_precision({true, true, false, false}) == doctest::Approx(1.0));
  CHECK(average_precision({false, false, true}) == doctest::Approx(1.0 / 3.0));
  // hits at ranks 1 and 3: (1/1 + 2/3) / 2
  CHECK(average_precision({true, false, true}) == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0));
  CHECK_THROWS_AS((average_precision({false, false})), std::invalid_argument);
}

TEST_CASE("perfect ranking gives MAP 1, inverted ranking is penalized") {
  ScoreMatrix sm;
  sm.rows = 2;
  sm.cols = 4;
  sm.query_labels = {"a", "b"};
  sm.candidate_labels = {"a", "a", "b", "b"};
  sm.scores = {4, 3, 2, 1,   // query a: both relevant items first
               1, 2, 3, 4};  // query b: both relevant items first
  auto r = evaluate(sm, "text2image");
  CHECK(r.map == doctest::Approx(1.0));
  CHECK(r.skipped_queries == 0);

  sm.scores = {1, 2, 3, 4, 4, 3, 2, 1};  // worst case: relevant ranked last
  auto w = evaluate(sm, "text2image");
  // AP with hits at ranks 3 and 4: (1/3 + 2/4) / 2
  CHECK(w.map == doctest::Approx((1.0 / 3.0 + 0.5) / 2.0));
}

TEST_CASE("evaluate matches the brute-force MAP oracle") {
  Rng rng(101);
  for (int trial = 0; trial < 25; ++trial) {
    int rows = 3 + static_cast<int>(rng.uniform_index(20));
    int cols = 3 + static_cast<int>(rng.uniform_index(20));
    bool ties = trial % 2 == 0;
    auto sm = random_matrix(rows, cols, 3, rng, ties);
    bool any_covered = false;
    for (int q = 0; q < rows && !any_covered; ++q)
      for (int c = 0; c < cols; ++c)
        any_covered |= sm.candidate_labels[c] == sm.query_labels[q];
    if (!any_covered) continue;
    auto r = evaluate(sm);
    CHECK(std::fabs(r.map - brute_force_map(sm)) <= 1e-12);
  }
}

TEST_CASE("MAP is invariant under monotone score transforms") {
  Rng rng(103);
  auto sm = random_matrix(10, 12, 3, rng, false);
  double base = evaluate(sm).map;
  ScoreMatrix t = sm;
  for (double& s : t.scores) s = std::tanh(2.0 * s) + 5.0;
  CHECK(evaluate(t).map == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("queries without a same-class candidate are skipped and counted") {
  ScoreMatrix sm;
  sm.rows = 2;
  sm.cols = 2;
  sm.query_labels = {"a", "zzz"};
  sm.candidate_labels = {"a", "a"};
  sm.scores = {1, 2, 3, 4};
  auto r = evaluate(sm);
  CHECK(r.skipped_queries == 1);
  CHECK(r.per_query_ap.size() == 1);

  sm.query_labels = {"x", "y"};
  CHECK_THROWS_AS((evaluate(sm)), DataError);
}

TEST_CASE("evaluate rejects non-finite scores") {
  ScoreMatrix sm;
  sm.rows = 1;
  sm.cols = 2;
  sm.query_labels = {"a"};
  sm.candidate_labels = {"a", "b"};
  sm.scores = {1.0, std::nan("")};
  CHECK_THROWS_AS((evaluate(sm)), NumericError);
}

TEST_CASE("transpose swaps roles exactly") {
  Rng rng(107);
  auto sm = random_matrix(5, 7, 2, rng, false);
  auto t = transpose(sm);
  CHECK(t.rows == sm.cols);
  CHECK(t.cols == sm.rows);
  CHECK(t.query_labels == sm.candidate_labels);
  for (int q = 0; q < sm.rows; ++q)
    for (int c = 0; c < sm.cols; ++c) CHECK(t.at(c, q) == sm.at(q, c));
  auto tt = transpose(t);
  CHECK(tt.scores == sm.scores);
}

TEST_CASE("PR curve is a valid non-increasing interpolated curve on [0,1]") {
  Rng rng(109);
  auto sm = random_matrix(12, 15, 3, rng, false);
  auto r = evaluate(sm);
  REQUIRE(r.pr_points.size() == 101);
  CHECK(r.pr_points.front().first == 0.0);
  CHECK(r.pr_points.back().first == 1.0);
  for (std::size_t i = 1; i < r.pr_points.size(); ++i) {
    CHECK(r.pr_points[i].first > r.pr_points[i - 1].first);
    CHECK(r.pr_points[i].second <= r.pr_points[i - 1].second + 1e-12);
    CHECK(r.pr_points[i].second >= 0.0);
    CHECK(r.pr_points[i].second <= 1.0);
  }
}

TEST_CASE("report and PR-curve writers produce parseable TSV") {
  Rng rng(113);
  auto sm = random_matrix(4, 6, 2, rng, false);
  auto r = evaluate(sm, "image2text");
  auto dir = std::filesystem::temp_directory_path();
  auto rp = dir / "gin_eval_report.tsv";
  auto pp = dir / "gin_eval_pr.tsv";
  write_report(rp.string(), r);
  write_pr_curve(pp.string(), r);

  std::ifstream rin(rp);
  std::string key, value;
  rin >> key >> value;
  CHECK(key == "direction");
  CHECK(value == "image2text");
  rin >> key >> value;
  CHECK(key == "map");
  CHECK(std::fabs(std::stod(value) - r.map) < 1e-8);

  std::ifstream pin(pp);
  std::string line;
  int lines = 0;
  while (std::getline(pin, line)) {
    std::istringstream ls(line);
    double recall, precision;
    REQUIRE((ls >> recall >> precision));
    ++lines;
  }
  CHECK(lines == 101);
  std::filesystem::remove(rp);
  std::filesystem::remove(pp);
}
