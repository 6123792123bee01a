#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gin/loss.hpp"
#include "gin/spectral.hpp"
#include "gin/text_graph.hpp"

namespace gin {

/// Graph-convolution layer: one Chebyshev coefficient vector per
/// (in-channel, out-channel) pair plus a per-output-channel bias.
struct GcnLayer {
  int in_channels = 0, out_channels = 0, order = 0;
  std::vector<double> theta;  // [in][out][k]
  std::vector<double> bias;   // [out]

  double& th(int i, int o, int k) {
    return theta[(static_cast<std::size_t>(i) * out_channels + o) * order + k];
  }
  double th(int i, int o, int k) const {
    return theta[(static_cast<std::size_t>(i) * out_channels + o) * order + k];
  }
};

struct DenseLayer {
  int in_dim = 0, out_dim = 0;
  std::vector<double> weight;  // row-major, out_dim x in_dim
  std::vector<double> bias;    // [out_dim]
};

struct ModelConfig {
  int vertices = 0;       // N, fixed by the corpus graph
  int image_dim = 0;
  int cheb_order = 3;     // K
  int conv1_channels = 16;
  int conv2_channels = 32;
  int common_dim = 64;
  int graph_k = 8;
  double dropout_rate = 0.2;
  bool scalar_score = false;  // score = w * <f_t, f_img> + b instead of Hadamard+FC
  std::uint64_t seed = 1;
};

struct GinModel {
  ModelConfig cfg;
  GcnLayer text_conv1, text_conv2;
  DenseLayer text_fc;   // (N * conv2_channels) -> common_dim
  DenseLayer image_fc;  // image_dim -> common_dim
  DenseLayer score_fc;  // common_dim (or 1 in scalar mode) -> 1
};

struct ImageSample {
  std::vector<double> features;
  std::string label;
  std::string img_id;
};

struct PairBatch {
  struct Pair {
    int text = 0, image = 0;
    bool match = false;
  };
  std::vector<Pair> pairs;  // all matching pairs first is not required
  int q1 = 0, q2 = 0;
};

struct Gradients {
  GcnLayer text_conv1, text_conv2;
  DenseLayer text_fc, image_fc, score_fc;
};

// Uniform +-sqrt(6/(fan_in+fan_out)) init, deterministic under cfg.seed.
GinModel init_model(const ModelConfig& cfg);

Gradients zero_gradients(const GinModel& m);

// Named views over every parameter tensor; order is fixed and shared with
// Gradients so the optimizer can walk both in lockstep.
struct ParamRef {
  std::string name;
  std::span<double> values;
  bool regularized = false;  // weights and theta yes, biases no
};
std::vector<ParamRef> param_refs(GinModel& m);
std::vector<ParamRef> param_refs(Gradients& g);

// conv1 -> ReLU -> conv2 -> ReLU -> (inverted dropout iff training) -> FC.
// dropout_seed selects the mask; ignored when training=false.
std::vector<double> text_forward(const GinModel& m, const TextGraph& g,
                                 const TextSample& t, bool training = false,
                                 std::uint64_t dropout_seed = 0);

std::vector<double> image_forward(const GinModel& m, const ImageSample& img,
                                  bool training = false);

double score_pair(const GinModel& m, std::span<const double> f_t,
                  std::span<const double> f_img);

struct BatchResult {
  LossBreakdown loss;
  Gradients grads;
  std::vector<double> pos_scores, neg_scores;
};

// Forward + backward over a full batch: variance + hinge loss with L2 on weights
// and theta, gradients for every parameter tensor. Deterministic mode
// accumulates in pair order; parallel mode uses per-thread buffers.
BatchResult batch_backward(const GinModel& m, const TextGraph& g,
                           std::span<const TextSample> texts,
                           std::span<const ImageSample> images,
                           const PairBatch& batch, const LossConfig& loss_cfg,
                           std::uint64_t dropout_seed, bool training = true,
                           bool parallel = false);

// Forward-only batch loss with the same dropout masks; finite-difference
// counterpart of batch_backward.
double batch_loss(const GinModel& m, const TextGraph& g,
                  std::span<const TextSample> texts,
                  std::span<const ImageSample> images, const PairBatch& batch,
                  const LossConfig& loss_cfg, std::uint64_t dropout_seed,
                  bool training = true);

// Versioned JSON checkpoint: config block plus named tensors with shapes.
// Loading fails loudly on version, shape, or dtype mismatch.
void save_checkpoint(const std::string& path, const GinModel& m);
GinModel load_checkpoint(const std::string& path);
std::string checkpoint_to_string(const GinModel& m);

}  // namespace gin
