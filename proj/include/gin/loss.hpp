#pragma once

#include <span>
#include <vector>

namespace gin {

struct LossConfig {
  double margin = 0.6;
  double lambda = 0.35;
  double l2 = 0.005;
};

struct LossBreakdown {
  double u_plus = 0.0, u_minus = 0.0;
  double var_plus = 0.0, var_minus = 0.0;
  double hinge = 0.0;
  double l2_penalty = 0.0;  // filled by the batch path when parameters are in play
  double total = 0.0;
};

// (var+ + var-) + lambda * max(0, m - (u+ - u-)), population variances.
LossBreakdown pairwise_loss(std::span<const double> pos_scores,
                            std::span<const double> neg_scores,
                            const LossConfig& cfg);

struct ScoreGradients {
  std::vector<double> d_pos;
  std::vector<double> d_neg;
};

// Analytic d(total)/d(score); subgradient 0 at the hinge kink.
ScoreGradients loss_gradient(std::span<const double> pos_scores,
                             std::span<const double> neg_scores,
                             const LossConfig& cfg);

}  // namespace gin
