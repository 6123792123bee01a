#include "gin/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "gin/errors.hpp"
#include "gin/format.hpp"
#include "gin/rng.hpp"

namespace gin {

PairPool build_pair_pool(std::span<const TextSample> texts,
                         std::span<const ImageSample> images,
                         const TrainConfig& cfg, std::uint64_t seed) {
  if (cfg.total_pos < 2 || cfg.total_neg < 2)
    throw std::invalid_argument(
        "build_pair_pool: pool sizes must be >= 2 on both sides");
  std::map<std::string, std::vector<int>> texts_by_class, images_by_class;
  for (std::size_t i = 0; i < texts.size(); ++i)
    texts_by_class[texts[i].label].push_back(static_cast<int>(i));
  for (std::size_t i = 0; i < images.size(); ++i)
    images_by_class[images[i].label].push_back(static_cast<int>(i));

  std::set<std::string> classes;
  for (const auto& [c, _] : texts_by_class) classes.insert(c);
  for (const auto& [c, _] : images_by_class) classes.insert(c);
  for (const auto& c : classes) {
    if (!texts_by_class.count(c))
      throw DataError("build_pair_pool: class '" + c + "' has no text samples");
    if (!images_by_class.count(c))
      throw DataError("build_pair_pool: class '" + c + "' has no image samples");
  }
  if (classes.size() < 2)
    throw DataError("build_pair_pool: need at least 2 classes to form negative pairs");

  Rng rng(seed);
  PairPool pool;
  pool.positives.reserve(cfg.total_pos);
  for (long long i = 0; i < cfg.total_pos; ++i) {
    int t = static_cast<int>(rng.uniform_index(texts.size()));
    const auto& same = images_by_class.at(texts[t].label);
    pool.positives.push_back({t, same[rng.uniform_index(same.size())]});
  }
  pool.negatives.reserve(cfg.total_neg);
  for (long long i = 0; i < cfg.total_neg; ++i) {
    int t = static_cast<int>(rng.uniform_index(texts.size()));
    int img;
    do {
      img = static_cast<int>(rng.uniform_index(images.size()));
    } while (images[img].label == texts[t].label);
    pool.negatives.push_back({t, img});
  }
  return pool;
}

void adam_step(GinModel& params, Gradients& grads, AdamState& state, double lr,
               double beta1, double beta2, double eps) {
  auto prefs = param_refs(params);
  auto grefs = param_refs(grads);
  ++state.step;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (std::size_t t = 0; t < prefs.size(); ++t) {
    auto& [m, v] = state.moments[prefs[t].name];
    if (m.empty()) {
      m.assign(prefs[t].values.size(), 0.0);
      v.assign(prefs[t].values.size(), 0.0);
    }
    if (m.size() != prefs[t].values.size())
      throw std::invalid_argument("adam_step: state shape mismatch for " + prefs[t].name);
    for (std::size_t i = 0; i < prefs[t].values.size(); ++i) {
      double g = grefs[t].values[i];
      if (!std::isfinite(g))
        throw NumericError("adam_step: non-finite gradient in " + prefs[t].name +
                           "[" + std::to_string(i) + "]");
      m[i] = beta1 * m[i] + (1.0 - beta1) * g;
      v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
      prefs[t].values[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }
  }
}

TrainResult train(GinModel& model, const TextGraph& graph,
                  std::span<const TextSample> texts,
                  std::span<const ImageSample> images, const PairPool& pool,
                  const TrainConfig& cfg, const LossConfig& loss_cfg,
                  const ProgressSink& sink) {
  if (cfg.q1 + cfg.q2 != cfg.batch_size)
    throw std::invalid_argument("train: q1 + q2 must equal batch_size");
  if (cfg.q1 < 2 || cfg.q2 < 2)
    throw std::invalid_argument("train: q1 and q2 must both be >= 2");
  long long batches_per_epoch =
      std::min(static_cast<long long>(pool.positives.size()) / cfg.q1,
               static_cast<long long>(pool.negatives.size()) / cfg.q2);
  if (batches_per_epoch < 1)
    throw DataError("train: pair pool too small for a single batch");

  TrainResult result;
  AdamState adam;
  std::vector<std::pair<int, int>> pos = pool.positives;
  std::vector<std::pair<int, int>> neg = pool.negatives;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(hash_combine(cfg.seed, 0x5bd1e995ull + static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(pos);
    shuffle_rng.shuffle(neg);
    for (long long b = 0; b < batches_per_epoch; ++b) {
      PairBatch batch;
      batch.q1 = cfg.q1;
      batch.q2 = cfg.q2;
      for (int i = 0; i < cfg.q1; ++i) {
        auto [t, img] = pos[b * cfg.q1 + i];
        batch.pairs.push_back({t, img, true});
      }
      for (int i = 0; i < cfg.q2; ++i) {
        auto [t, img] = neg[b * cfg.q2 + i];
        batch.pairs.push_back({t, img, false});
      }
      std::uint64_t dropout_seed = hash_combine(
          hash_combine(cfg.seed, static_cast<std::uint64_t>(epoch) + 1),
          static_cast<std::uint64_t>(b));
      BatchResult br = batch_backward(model, graph, texts, images, batch,
                                      loss_cfg, dropout_seed, true, cfg.parallel);
      if (!std::isfinite(br.loss.total)) {
        std::string msg = "train: non-finite loss at epoch " +
                          std::to_string(epoch) + " batch " + std::to_string(b) +
                          " (u+=" + format_g9(br.loss.u_plus) +
                          ", u-=" + format_g9(br.loss.u_minus) +
                          ", var+=" + format_g9(br.loss.var_plus) +
                          ", var-=" + format_g9(br.loss.var_minus) + ")";
        throw NumericError(msg);
      }
      adam_step(model, br.grads, adam, cfg.learning_rate, cfg.adam_beta1,
                cfg.adam_beta2, cfg.adam_eps);
      BatchRecord rec{epoch, static_cast<int>(b), br.loss};
      if (sink) sink(rec);
      result.trace.push_back(rec);
    }
    if (!cfg.checkpoint_path.empty() && cfg.checkpoint_every > 0 &&
        (epoch + 1) % cfg.checkpoint_every == 0)
      save_checkpoint(cfg.checkpoint_path, model);
  }
  if (!cfg.checkpoint_path.empty()) save_checkpoint(cfg.checkpoint_path, model);
  return result;
}

}  // namespace gin
