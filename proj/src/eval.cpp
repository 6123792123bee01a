#include "gin/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "gin/errors.hpp"
#include "gin/format.hpp"

namespace gin {

ScoreMatrix score_all(const GinModel& m, const TextGraph& g,
                      std::span<const TextSample> texts,
                      std::span<const ImageSample> images) {
  if (texts.empty() || images.empty())
    throw std::invalid_argument("score_all: empty sample set");
  ScoreMatrix sm;
  sm.rows = static_cast<int>(texts.size());
  sm.cols = static_cast<int>(images.size());
  sm.scores.assign(static_cast<std::size_t>(sm.rows) * sm.cols, 0.0);
  for (const auto& t : texts) sm.query_labels.push_back(t.label);
  for (const auto& i : images) sm.candidate_labels.push_back(i.label);

#pragma omp parallel for schedule(dynamic)
  for (int q = 0; q < sm.rows; ++q) {
    auto f_t = text_forward(m, g, texts[q], false);
    for (int c = 0; c < sm.cols; ++c) {
      auto f_img = image_forward(m, images[c], false);
      sm.at(q, c) = score_pair(m, f_t, f_img);
    }
  }
  return sm;
}

ScoreMatrix transpose(const ScoreMatrix& sm) {
  ScoreMatrix t;
  t.rows = sm.cols;
  t.cols = sm.rows;
  t.query_labels = sm.candidate_labels;
  t.candidate_labels = sm.query_labels;
  t.scores.resize(sm.scores.size());
  for (int q = 0; q < sm.rows; ++q)
    for (int c = 0; c < sm.cols; ++c) t.at(c, q) = sm.at(q, c);
  return t;
}

double average_precision(const std::vector<bool>& ranked_relevance) {
  long long relevant = std::count(ranked_relevance.begin(), ranked_relevance.end(), true);
  if (relevant == 0)
    throw std::invalid_argument("average_precision: no relevant item in ranking");
  double ap = 0.0;
  long long hits = 0;
  for (std::size_t p = 0; p < ranked_relevance.size(); ++p) {
    if (!ranked_relevance[p]) continue;
    ++hits;
    ap += static_cast<double>(hits) / static_cast<double>(p + 1);
  }
  return ap / static_cast<double>(relevant);
}

EvalReport evaluate(const ScoreMatrix& sm, const std::string& direction) {
  if (sm.rows == 0 || sm.cols == 0)
    throw std::invalid_argument("evaluate: empty score matrix");
  for (double s : sm.scores)
    if (!std::isfinite(s)) throw NumericError("evaluate: non-finite score");

  EvalReport report;
  report.direction = direction;
  // averaged interpolated precision on a fixed recall grid
  const int kGrid = 101;
  std::vector<double> interp_sum(kGrid, 0.0);

  for (int q = 0; q < sm.rows; ++q) {
    std::vector<int> order(sm.cols);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (sm.at(q, a) != sm.at(q, b)) return sm.at(q, a) > sm.at(q, b);
      return a < b;
    });
    std::vector<bool> rel(sm.cols);
    long long total_rel = 0;
    for (int r = 0; r < sm.cols; ++r) {
      rel[r] = sm.candidate_labels[order[r]] == sm.query_labels[q];
      if (rel[r]) ++total_rel;
    }
    if (total_rel == 0) {
      ++report.skipped_queries;
      continue;
    }
    report.per_query_ap.push_back(average_precision(rel));

    // precision/recall at every rank, then interpolate
    std::vector<double> recall(sm.cols), precision(sm.cols);
    long long hits = 0;
    for (int r = 0; r < sm.cols; ++r) {
      if (rel[r]) ++hits;
      recall[r] = static_cast<double>(hits) / static_cast<double>(total_rel);
      precision[r] = static_cast<double>(hits) / static_cast<double>(r + 1);
    }
    for (int gi = 0; gi < kGrid; ++gi) {
      double r_level = static_cast<double>(gi) / (kGrid - 1);
      double best = 0.0;
      for (int r = 0; r < sm.cols; ++r)
        if (recall[r] >= r_level) best = std::max(best, precision[r]);
      interp_sum[gi] += best;
    }
  }
  if (report.per_query_ap.empty())
    throw DataError("evaluate: every query lacks a same-class candidate");
  report.map = std::accumulate(report.per_query_ap.begin(), report.per_query_ap.end(), 0.0) /
               static_cast<double>(report.per_query_ap.size());
  for (int gi = 0; gi < kGrid; ++gi)
    report.pr_points.push_back({static_cast<double>(gi) / (kGrid - 1),
                                interp_sum[gi] / report.per_query_ap.size()});
  return report;
}

void write_report(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report: " + path);
  out << "direction\t" << report.direction << '\n';
  out << "map\t" << format_g9(report.map) << '\n';
  out << "skipped_queries\t" << report.skipped_queries << '\n';
  for (std::size_t q = 0; q < report.per_query_ap.size(); ++q)
    out << q << '\t' << format_g9(report.per_query_ap[q]) << '\n';
}

void write_pr_curve(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write PR curve: " + path);
  for (const auto& [r, p] : report.pr_points)
    out << format_g9(r) << '\t' << format_g9(p) << '\n';
}

}  // namespace gin
