#include "gin/loss.hpp"

#include <cmath>
#include <stdexcept>

#include "gin/errors.hpp"

namespace gin {

namespace {

void check_scores(std::span<const double> pos, std::span<const double> neg) {
  if (pos.size() < 2 || neg.size() < 2)
    throw std::invalid_argument(
        "pairwise_loss: need at least 2 matching and 2 non-matching scores");
  for (double s : pos)
    if (!std::isfinite(s)) throw NumericError("pairwise_loss: non-finite matching score");
  for (double s : neg)
    if (!std::isfinite(s)) throw NumericError("pairwise_loss: non-finite non-matching score");
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_variance(std::span<const double> v, double mu) {
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size());
}

}  // namespace

LossBreakdown pairwise_loss(std::span<const double> pos_scores,
                            std::span<const double> neg_scores,
                            const LossConfig& cfg) {
  check_scores(pos_scores, neg_scores);
  LossBreakdown b;
  b.u_plus = mean(pos_scores);
  b.u_minus = mean(neg_scores);
  b.var_plus = population_variance(pos_scores, b.u_plus);
  b.var_minus = population_variance(neg_scores, b.u_minus);
  b.hinge = std::max(0.0, cfg.margin - (b.u_plus - b.u_minus));
  b.total = b.var_plus + b.var_minus + cfg.lambda * b.hinge;
  return b;
}

ScoreGradients loss_gradient(std::span<const double> pos_scores,
                             std::span<const double> neg_scores,
                             const LossConfig& cfg) {
  check_scores(pos_scores, neg_scores);
  const double q1 = static_cast<double>(pos_scores.size());
  const double q2 = static_cast<double>(neg_scores.size());
  const double u_plus = mean(pos_scores);
  const double u_minus = mean(neg_scores);
  // hinge active strictly inside the margin; subgradient 0 at the kink
  const bool hinge_active = (cfg.margin - (u_plus - u_minus)) > 0.0;

  ScoreGradients g;
  g.d_pos.resize(pos_scores.size());
  g.d_neg.resize(neg_scores.size());
  // d var+/d s_i = 2 (s_i - u+) / Q1  (the mean term's contribution cancels)
  for (std::size_t i = 0; i < pos_scores.size(); ++i) {
    g.d_pos[i] = 2.0 * (pos_scores[i] - u_plus) / q1;
    if (hinge_active) g.d_pos[i] -= cfg.lambda / q1;
  }
  for (std::size_t i = 0; i < neg_scores.size(); ++i) {
    g.d_neg[i] = 2.0 * (neg_scores[i] - u_minus) / q2;
    if (hinge_active) g.d_neg[i] += cfg.lambda / q2;
  }
  return g;
}

}  // namespace gin
