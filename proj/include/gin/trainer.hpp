#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gin/model.hpp"

namespace gin {

struct TrainConfig {
  int batch_size = 200;
  int q1 = 100, q2 = 100;
  int epochs = 50;
  double learning_rate = 0.001;
  double adam_beta1 = 0.9, adam_beta2 = 0.999, adam_eps = 1e-8;
  std::uint64_t seed = 1;
  long long total_pos = 40000, total_neg = 40000;
  bool parallel = false;  // unordered gradient accumulation, opt-in
  std::string checkpoint_path;  // empty = no checkpointing
  int checkpoint_every = 0;     // epochs; 0 = final only
};

struct PairPool {
  std::vector<std::pair<int, int>> positives;  // (text index, image index), same class
  std::vector<std::pair<int, int>> negatives;  // different class
};

PairPool build_pair_pool(std::span<const TextSample> texts,
                         std::span<const ImageSample> images,
                         const TrainConfig& cfg, std::uint64_t seed);

struct AdamState {
  long long step = 0;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> moments;
};

// Standard bias-corrected Adam over all parameter tensors.
void adam_step(GinModel& params, Gradients& grads, AdamState& state, double lr,
               double beta1, double beta2, double eps);

struct BatchRecord {
  int epoch = 0, batch = 0;
  LossBreakdown loss;
};

using ProgressSink = std::function<void(const BatchRecord&)>;

struct TrainResult {
  std::vector<BatchRecord> trace;
};

TrainResult train(GinModel& model, const TextGraph& graph,
                  std::span<const TextSample> texts,
                  std::span<const ImageSample> images, const PairPool& pool,
                  const TrainConfig& cfg, const LossConfig& loss_cfg,
                  const ProgressSink& sink = nullptr);

}  // namespace gin
