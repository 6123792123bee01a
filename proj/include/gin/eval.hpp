#pragma once

#include <span>
#include <string>
#include <vector>

#include "gin/model.hpp"

namespace gin {

struct ScoreMatrix {
  int rows = 0, cols = 0;  // queries x candidates
  std::vector<double> scores;  // row-major
  std::vector<std::string> query_labels, candidate_labels;

  double at(int q, int c) const { return scores[static_cast<std::size_t>(q) * cols + c]; }
  double& at(int q, int c) { return scores[static_cast<std::size_t>(q) * cols + c]; }
};

struct EvalReport {
  std::string direction;  // "text2image" or "image2text"
  std::vector<double> per_query_ap;
  double map = 0.0;
  std::vector<std::pair<double, double>> pr_points;  // (recall, interpolated precision)
  int skipped_queries = 0;  // queries with no same-class candidate
};

// Exhaustive text-query-image score matrix (inference mode). Row-parallel.
ScoreMatrix score_all(const GinModel& m, const TextGraph& g,
                      std::span<const TextSample> texts,
                      std::span<const ImageSample> images);

ScoreMatrix transpose(const ScoreMatrix& sm);

// Standard non-interpolated AP over a ranked relevance list.
double average_precision(const std::vector<bool>& ranked_relevance);

// Per-query ranking by descending score (candidate index breaks ties),
// mean AP, and an averaged interpolated PR curve.
EvalReport evaluate(const ScoreMatrix& sm, const std::string& direction = "");

void write_report(const std::string& path, const EvalReport& report);
void write_pr_curve(const std::string& path, const EvalReport& report);

}  // namespace gin
