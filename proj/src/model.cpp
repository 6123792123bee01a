#include "gin/model.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "gin/errors.hpp"
#include "gin/rng.hpp"
#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gin {

namespace {

GcnLayer make_gcn_layer(int in_ch, int out_ch, int order, Rng& rng) {
  GcnLayer l;
  l.in_channels = in_ch;
  l.out_channels = out_ch;
  l.order = order;
  l.theta.resize(static_cast<std::size_t>(in_ch) * out_ch * order);
  l.bias.assign(out_ch, 0.0);
  double bound = std::sqrt(6.0 / (in_ch + out_ch));
  for (double& t : l.theta) t = rng.uniform(-bound, bound);
  return l;
}

DenseLayer make_dense_layer(int in_dim, int out_dim, Rng& rng) {
  DenseLayer l;
  l.in_dim = in_dim;
  l.out_dim = out_dim;
  l.weight.resize(static_cast<std::size_t>(in_dim) * out_dim);
  l.bias.assign(out_dim, 0.0);
  double bound = std::sqrt(6.0 / (in_dim + out_dim));
  for (double& w : l.weight) w = rng.uniform(-bound, bound);
  return l;
}

}  // namespace

GinModel init_model(const ModelConfig& cfg) {
  if (cfg.vertices < 2 || cfg.image_dim < 1 || cfg.common_dim < 1 ||
      cfg.cheb_order < 1 || cfg.conv1_channels < 1 || cfg.conv2_channels < 1)
    throw std::invalid_argument("init_model: invalid configuration");
  if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
    throw std::invalid_argument("init_model: dropout_rate must be in [0, 1)");
  Rng rng(cfg.seed);
  GinModel m;
  m.cfg = cfg;
  m.text_conv1 = make_gcn_layer(1, cfg.conv1_channels, cfg.cheb_order, rng);
  m.text_conv2 = make_gcn_layer(cfg.conv1_channels, cfg.conv2_channels, cfg.cheb_order, rng);
  m.text_fc = make_dense_layer(cfg.vertices * cfg.conv2_channels, cfg.common_dim, rng);
  m.image_fc = make_dense_layer(cfg.image_dim, cfg.common_dim, rng);
  m.score_fc = make_dense_layer(cfg.scalar_score ? 1 : cfg.common_dim, 1, rng);
  return m;
}

Gradients zero_gradients(const GinModel& m) {
  Gradients g;
  auto zero_gcn = [](const GcnLayer& l) {
    GcnLayer z = l;
    std::fill(z.theta.begin(), z.theta.end(), 0.0);
    std::fill(z.bias.begin(), z.bias.end(), 0.0);
    return z;
  };
  auto zero_dense = [](const DenseLayer& l) {
    DenseLayer z = l;
    std::fill(z.weight.begin(), z.weight.end(), 0.0);
    std::fill(z.bias.begin(), z.bias.end(), 0.0);
    return z;
  };
  g.text_conv1 = zero_gcn(m.text_conv1);
  g.text_conv2 = zero_gcn(m.text_conv2);
  g.text_fc = zero_dense(m.text_fc);
  g.image_fc = zero_dense(m.image_fc);
  g.score_fc = zero_dense(m.score_fc);
  return g;
}

namespace {

template <typename T>
std::vector<ParamRef> refs_impl(T& t) {
  return {
      {"text_conv1.theta", std::span<double>(t.text_conv1.theta), true},
      {"text_conv1.bias", std::span<double>(t.text_conv1.bias), false},
      {"text_conv2.theta", std::span<double>(t.text_conv2.theta), true},
      {"text_conv2.bias", std::span<double>(t.text_conv2.bias), false},
      {"text_fc.weight", std::span<double>(t.text_fc.weight), true},
      {"text_fc.bias", std::span<double>(t.text_fc.bias), false},
      {"image_fc.weight", std::span<double>(t.image_fc.weight), true},
      {"image_fc.bias", std::span<double>(t.image_fc.bias), false},
      {"score_fc.weight", std::span<double>(t.score_fc.weight), true},
      {"score_fc.bias", std::span<double>(t.score_fc.bias), false},
  };
}

}  // namespace

std::vector<ParamRef> param_refs(GinModel& m) { return refs_impl(m); }
std::vector<ParamRef> param_refs(Gradients& g) { return refs_impl(g); }

namespace {

// channel-major activation block: channel c occupies [c*N, (c+1)*N)
struct TextCache {
  std::vector<std::vector<std::vector<double>>> basis1;  // [in1][K][N]
  std::vector<double> pre1, act1;                        // [c1*N]
  std::vector<std::vector<std::vector<double>>> basis2;  // [c1][K][N]
  std::vector<double> pre2, act2;                        // [c2*N]
  std::vector<double> mask;                              // [c2*N], 0 or 1/(1-p)
  std::vector<double> fc_in;                             // [c2*N]
  std::vector<double> f_t;                               // [common_dim]
};

void gcn_forward(const GcnLayer& layer, const SparseSym& lt,
                 std::span<const double> in,
                 std::vector<std::vector<std::vector<double>>>& basis,
                 std::vector<double>& pre) {
  const int n = lt.n;
  basis.clear();
  basis.reserve(layer.in_channels);
  for (int i = 0; i < layer.in_channels; ++i)
    basis.push_back(cheb_basis(lt, in.subspan(static_cast<std::size_t>(i) * n, n),
                               layer.order));
  pre.assign(static_cast<std::size_t>(layer.out_channels) * n, 0.0);
  for (int o = 0; o < layer.out_channels; ++o) {
    double* out = pre.data() + static_cast<std::size_t>(o) * n;
    for (int v = 0; v < n; ++v) out[v] = layer.bias[o];
    for (int i = 0; i < layer.in_channels; ++i)
      for (int k = 0; k < layer.order; ++k) {
        double t = layer.th(i, o, k);
        const double* b = basis[i][k].data();
        for (int v = 0; v < n; ++v) out[v] += t * b[v];
      }
  }
}

void relu(std::span<const double> pre, std::vector<double>& act) {
  act.resize(pre.size());
  for (std::size_t i = 0; i < pre.size(); ++i) act[i] = pre[i] > 0.0 ? pre[i] : 0.0;
}

// Forward through a dense layer with value-sorted row reductions, so the
// output is bit-identical under any consistent permutation of the inputs.
std::vector<double> dense_forward_stable(const DenseLayer& l,
                                         std::span<const double> in) {
  if (static_cast<int>(in.size()) != l.in_dim)
    throw std::invalid_argument("dense layer: input dimension mismatch");
  std::vector<double> out(l.out_dim);
  std::vector<double> prod(l.in_dim);
  for (int o = 0; o < l.out_dim; ++o) {
    const double* w = l.weight.data() + static_cast<std::size_t>(o) * l.in_dim;
    for (int j = 0; j < l.in_dim; ++j) prod[j] = w[j] * in[j];
    out[o] = l.bias[o] + stable_sum(prod);
  }
  return out;
}

void fill_dropout_mask(std::vector<double>& mask, std::size_t size, double rate,
                       std::uint64_t seed) {
  mask.assign(size, 1.0);
  if (rate <= 0.0) return;
  Rng rng(seed);
  double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < size; ++i)
    mask[i] = rng.uniform() < rate ? 0.0 : keep_scale;
}

void text_forward_cached(const GinModel& m, const TextGraph& g,
                         const TextSample& t, bool training,
                         std::uint64_t dropout_seed, TextCache& c) {
  const int n = g.vertices();
  if (static_cast<int>(t.features.size()) != n)
    throw std::invalid_argument("text_forward: feature length " +
                                std::to_string(t.features.size()) +
                                " does not match graph size " + std::to_string(n));
  gcn_forward(m.text_conv1, g.scaled_laplacian, t.features, c.basis1, c.pre1);
  relu(c.pre1, c.act1);
  gcn_forward(m.text_conv2, g.scaled_laplacian, c.act1, c.basis2, c.pre2);
  relu(c.pre2, c.act2);
  if (training)
    fill_dropout_mask(c.mask, c.act2.size(), m.cfg.dropout_rate, dropout_seed);
  else
    c.mask.assign(c.act2.size(), 1.0);
  c.fc_in.resize(c.act2.size());
  for (std::size_t i = 0; i < c.act2.size(); ++i) c.fc_in[i] = c.act2[i] * c.mask[i];
  c.f_t = dense_forward_stable(m.text_fc, c.fc_in);
}

}  // namespace

std::vector<double> text_forward(const GinModel& m, const TextGraph& g,
                                 const TextSample& t, bool training,
                                 std::uint64_t dropout_seed) {
  TextCache c;
  text_forward_cached(m, g, t, training, dropout_seed, c);
  return std::move(c.f_t);
}

std::vector<double> image_forward(const GinModel& m, const ImageSample& img,
                                  bool /*training*/) {
  if (static_cast<int>(img.features.size()) != m.image_fc.in_dim)
    throw std::invalid_argument("image_forward: feature dimension mismatch");
  std::vector<double> out(m.image_fc.out_dim);
  for (int o = 0; o < m.image_fc.out_dim; ++o) {
    const double* w = m.image_fc.weight.data() +
                      static_cast<std::size_t>(o) * m.image_fc.in_dim;
    double s = m.image_fc.bias[o];
    for (int j = 0; j < m.image_fc.in_dim; ++j) s += w[j] * img.features[j];
    out[o] = s;
  }
  return out;
}

double score_pair(const GinModel& m, std::span<const double> f_t,
                  std::span<const double> f_img) {
  if (f_t.size() != f_img.size() ||
      static_cast<int>(f_t.size()) != m.cfg.common_dim)
    throw std::invalid_argument("score_pair: dimension mismatch");
  if (m.cfg.scalar_score) {
    double ip = 0.0;
    for (std::size_t c = 0; c < f_t.size(); ++c) ip += f_t[c] * f_img[c];
    return m.score_fc.weight[0] * ip + m.score_fc.bias[0];
  }
  double s = m.score_fc.bias[0];
  for (std::size_t c = 0; c < f_t.size(); ++c)
    s += m.score_fc.weight[c] * f_t[c] * f_img[c];
  return s;
}

namespace {

void gcn_backward(const GcnLayer& layer, const SparseSym& lt,
                  const std::vector<std::vector<std::vector<double>>>& basis,
                  std::span<const double> d_pre, GcnLayer& grad,
                  std::vector<double>* d_in) {
  const int n = lt.n;
  if (d_in) d_in->assign(static_cast<std::size_t>(layer.in_channels) * n, 0.0);
  for (int o = 0; o < layer.out_channels; ++o) {
    const double* g = d_pre.data() + static_cast<std::size_t>(o) * n;
    double bsum = 0.0;
    for (int v = 0; v < n; ++v) bsum += g[v];
    grad.bias[o] += bsum;
    for (int i = 0; i < layer.in_channels; ++i)
      for (int k = 0; k < layer.order; ++k) {
        double s = 0.0;
        const double* b = basis[i][k].data();
        for (int v = 0; v < n; ++v) s += b[v] * g[v];
        grad.th(i, o, k) += s;
      }
    if (d_in) {
      // T_k(lt) is symmetric, so d(in_i) accumulates theta-weighted
      // Chebyshev transforms of the upstream gradient
      auto gbasis = cheb_basis(lt, d_pre.subspan(static_cast<std::size_t>(o) * n, n),
                               layer.order);
      for (int i = 0; i < layer.in_channels; ++i) {
        double* di = d_in->data() + static_cast<std::size_t>(i) * n;
        for (int k = 0; k < layer.order; ++k) {
          double t = layer.th(i, o, k);
          const double* b = gbasis[k].data();
          for (int v = 0; v < n; ++v) di[v] += t * b[v];
        }
      }
    }
  }
}

// Backprop one pair into grads; d_score is d(loss)/d(score of this pair).
void pair_backward(const GinModel& m, const TextGraph& g, const TextCache& tc,
                   const ImageSample& img, std::span<const double> f_img,
                   double d_score, Gradients& grads) {
  const int cd = m.cfg.common_dim;
  std::vector<double> d_ft(cd), d_fimg(cd);
  if (m.cfg.scalar_score) {
    double ip = 0.0;
    for (int c = 0; c < cd; ++c) ip += tc.f_t[c] * f_img[c];
    grads.score_fc.weight[0] += d_score * ip;
    grads.score_fc.bias[0] += d_score;
    double w0 = m.score_fc.weight[0];
    for (int c = 0; c < cd; ++c) {
      d_ft[c] = d_score * w0 * f_img[c];
      d_fimg[c] = d_score * w0 * tc.f_t[c];
    }
  } else {
    for (int c = 0; c < cd; ++c) {
      grads.score_fc.weight[c] += d_score * tc.f_t[c] * f_img[c];
      d_ft[c] = d_score * m.score_fc.weight[c] * f_img[c];
      d_fimg[c] = d_score * m.score_fc.weight[c] * tc.f_t[c];
    }
    grads.score_fc.bias[0] += d_score;
  }

  // image path
  for (int o = 0; o < cd; ++o) {
    double* gw = grads.image_fc.weight.data() +
                 static_cast<std::size_t>(o) * m.image_fc.in_dim;
    for (int j = 0; j < m.image_fc.in_dim; ++j) gw[j] += d_fimg[o] * img.features[j];
    grads.image_fc.bias[o] += d_fimg[o];
  }

  // text FC
  const int fc_in_dim = m.text_fc.in_dim;
  std::vector<double> d_fc_in(fc_in_dim, 0.0);
  for (int o = 0; o < cd; ++o) {
    const double* w = m.text_fc.weight.data() + static_cast<std::size_t>(o) * fc_in_dim;
    double* gw = grads.text_fc.weight.data() + static_cast<std::size_t>(o) * fc_in_dim;
    for (int j = 0; j < fc_in_dim; ++j) {
      gw[j] += d_ft[o] * tc.fc_in[j];
      d_fc_in[j] += w[j] * d_ft[o];
    }
    grads.text_fc.bias[o] += d_ft[o];
  }

  // dropout and second ReLU
  std::vector<double> d_pre2(tc.pre2.size());
  for (std::size_t i = 0; i < d_pre2.size(); ++i)
    d_pre2[i] = tc.pre2[i] > 0.0 ? d_fc_in[i] * tc.mask[i] : 0.0;

  std::vector<double> d_act1;
  gcn_backward(m.text_conv2, g.scaled_laplacian, tc.basis2, d_pre2,
               grads.text_conv2, &d_act1);

  std::vector<double> d_pre1(tc.pre1.size());
  for (std::size_t i = 0; i < d_pre1.size(); ++i)
    d_pre1[i] = tc.pre1[i] > 0.0 ? d_act1[i] : 0.0;

  gcn_backward(m.text_conv1, g.scaled_laplacian, tc.basis1, d_pre1,
               grads.text_conv1, nullptr);
}

void add_gradients(Gradients& into, const Gradients& from) {
  auto add = [](std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  };
  add(into.text_conv1.theta, from.text_conv1.theta);
  add(into.text_conv1.bias, from.text_conv1.bias);
  add(into.text_conv2.theta, from.text_conv2.theta);
  add(into.text_conv2.bias, from.text_conv2.bias);
  add(into.text_fc.weight, from.text_fc.weight);
  add(into.text_fc.bias, from.text_fc.bias);
  add(into.image_fc.weight, from.image_fc.weight);
  add(into.image_fc.bias, from.image_fc.bias);
  add(into.score_fc.weight, from.score_fc.weight);
  add(into.score_fc.bias, from.score_fc.bias);
}

void validate_batch(const PairBatch& batch, std::size_t n_texts,
                    std::size_t n_images) {
  int pos = 0, neg = 0;
  for (const auto& p : batch.pairs) {
    if (p.text < 0 || p.text >= static_cast<int>(n_texts) || p.image < 0 ||
        p.image >= static_cast<int>(n_images))
      throw std::invalid_argument("batch: pair index out of range");
    (p.match ? pos : neg)++;
  }
  if (pos != batch.q1 || neg != batch.q2)
    throw std::invalid_argument("batch: q1/q2 do not match pair labels");
  if (batch.q1 < 2 || batch.q2 < 2)
    throw std::invalid_argument("batch: need q1 >= 2 and q2 >= 2");
}

double l2_penalty_and_grad(const GinModel& m, double l2, Gradients* grads) {
  if (l2 == 0.0) return 0.0;
  double pen = 0.0;
  auto mm = const_cast<GinModel&>(m);
  auto prefs = param_refs(mm);
  std::vector<ParamRef> grefs;
  if (grads) grefs = param_refs(*grads);
  for (std::size_t t = 0; t < prefs.size(); ++t) {
    if (!prefs[t].regularized) continue;
    for (std::size_t i = 0; i < prefs[t].values.size(); ++i) {
      double w = prefs[t].values[i];
      pen += l2 * w * w;
      if (grads) grefs[t].values[i] += 2.0 * l2 * w;
    }
  }
  return pen;
}

}  // namespace

BatchResult batch_backward(const GinModel& m, const TextGraph& g,
                           std::span<const TextSample> texts,
                           std::span<const ImageSample> images,
                           const PairBatch& batch, const LossConfig& loss_cfg,
                           std::uint64_t dropout_seed, bool training,
                           bool parallel) {
  validate_batch(batch, texts.size(), images.size());
  const int np = static_cast<int>(batch.pairs.size());

  std::vector<TextCache> tcaches(np);
  std::vector<std::vector<double>> fimgs(np);
  std::vector<double> scores(np);

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int p = 0; p < np; ++p) {
    const auto& pr = batch.pairs[p];
    text_forward_cached(m, g, texts[pr.text], training,
                        hash_combine(dropout_seed, static_cast<std::uint64_t>(p)),
                        tcaches[p]);
    fimgs[p] = image_forward(m, images[pr.image], training);
    scores[p] = score_pair(m, tcaches[p].f_t, fimgs[p]);
  }

  BatchResult res;
  for (int p = 0; p < np; ++p)
    (batch.pairs[p].match ? res.pos_scores : res.neg_scores).push_back(scores[p]);
  res.loss = pairwise_loss(res.pos_scores, res.neg_scores, loss_cfg);
  ScoreGradients sg = loss_gradient(res.pos_scores, res.neg_scores, loss_cfg);

  std::vector<double> d_scores(np);
  {
    std::size_t ip = 0, in = 0;
    for (int p = 0; p < np; ++p)
      d_scores[p] = batch.pairs[p].match ? sg.d_pos[ip++] : sg.d_neg[in++];
  }

  res.grads = zero_gradients(m);
  if (!parallel) {
    for (int p = 0; p < np; ++p)
      pair_backward(m, g, tcaches[p], images[batch.pairs[p].image], fimgs[p],
                    d_scores[p], res.grads);
  } else {
#ifdef _OPENMP
    int nthreads = omp_get_max_threads();
#else
    int nthreads = 1;
#endif
    std::vector<Gradients> partial(nthreads, zero_gradients(m));
#pragma omp parallel for schedule(dynamic)
    for (int p = 0; p < np; ++p) {
#ifdef _OPENMP
      int tid = omp_get_thread_num();
#else
      int tid = 0;
#endif
      pair_backward(m, g, tcaches[p], images[batch.pairs[p].image], fimgs[p],
                    d_scores[p], partial[tid]);
    }
    for (const auto& part : partial) add_gradients(res.grads, part);
  }

  res.loss.l2_penalty = l2_penalty_and_grad(m, loss_cfg.l2, &res.grads);
  res.loss.total += res.loss.l2_penalty;
  return res;
}

double batch_loss(const GinModel& m, const TextGraph& g,
                  std::span<const TextSample> texts,
                  std::span<const ImageSample> images, const PairBatch& batch,
                  const LossConfig& loss_cfg, std::uint64_t dropout_seed,
                  bool training) {
  validate_batch(batch, texts.size(), images.size());
  std::vector<double> pos, neg;
  for (std::size_t p = 0; p < batch.pairs.size(); ++p) {
    const auto& pr = batch.pairs[p];
    auto f_t = text_forward(m, g, texts[pr.text], training,
                            hash_combine(dropout_seed, static_cast<std::uint64_t>(p)));
    auto f_img = image_forward(m, images[pr.image], training);
    (pr.match ? pos : neg).push_back(score_pair(m, f_t, f_img));
  }
  LossBreakdown b = pairwise_loss(pos, neg, loss_cfg);
  return b.total + l2_penalty_and_grad(m, loss_cfg.l2, nullptr);
}

// ---------------------------------------------------------------------------
// checkpoint
// ---------------------------------------------------------------------------

namespace {
constexpr int kCheckpointVersion = 1;
}

std::string checkpoint_to_string(const GinModel& m) {
  nlohmann::ordered_json j;
  j["format"] = "gin-checkpoint";
  j["version"] = kCheckpointVersion;
  j["config"] = {
      {"vertices", m.cfg.vertices},
      {"image_dim", m.cfg.image_dim},
      {"cheb_order", m.cfg.cheb_order},
      {"conv1_channels", m.cfg.conv1_channels},
      {"conv2_channels", m.cfg.conv2_channels},
      {"common_dim", m.cfg.common_dim},
      {"graph_k", m.cfg.graph_k},
      {"dropout_rate", m.cfg.dropout_rate},
      {"scalar_score", m.cfg.scalar_score},
      {"seed", m.cfg.seed},
  };
  auto mm = const_cast<GinModel&>(m);
  nlohmann::ordered_json tensors;
  auto shape_of = [&](const std::string& name) -> std::vector<int> {
    if (name == "text_conv1.theta")
      return {1, m.cfg.conv1_channels, m.cfg.cheb_order};
    if (name == "text_conv1.bias") return {m.cfg.conv1_channels};
    if (name == "text_conv2.theta")
      return {m.cfg.conv1_channels, m.cfg.conv2_channels, m.cfg.cheb_order};
    if (name == "text_conv2.bias") return {m.cfg.conv2_channels};
    if (name == "text_fc.weight")
      return {m.cfg.common_dim, m.cfg.vertices * m.cfg.conv2_channels};
    if (name == "text_fc.bias") return {m.cfg.common_dim};
    if (name == "image_fc.weight") return {m.cfg.common_dim, m.cfg.image_dim};
    if (name == "image_fc.bias") return {m.cfg.common_dim};
    if (name == "score_fc.weight")
      return {1, m.cfg.scalar_score ? 1 : m.cfg.common_dim};
    return {1};  // score_fc.bias
  };
  for (const auto& ref : param_refs(mm)) {
    tensors[ref.name] = {
        {"shape", shape_of(ref.name)},
        {"dtype", "f64"},
        {"data", std::vector<double>(ref.values.begin(), ref.values.end())},
    };
  }
  j["tensors"] = std::move(tensors);
  return j.dump(1);
}

void save_checkpoint(const std::string& path, const GinModel& m) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out << checkpoint_to_string(m) << '\n';
}

GinModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DataError(path + ": checkpoint parse error: " + e.what());
  }
  if (j.value("format", "") != "gin-checkpoint" ||
      j.value("version", -1) != kCheckpointVersion)
    throw DataError(path + ": not a version-" + std::to_string(kCheckpointVersion) +
                    " gin checkpoint");
  const auto& c = j.at("config");
  ModelConfig cfg;
  cfg.vertices = c.at("vertices").get<int>();
  cfg.image_dim = c.at("image_dim").get<int>();
  cfg.cheb_order = c.at("cheb_order").get<int>();
  cfg.conv1_channels = c.at("conv1_channels").get<int>();
  cfg.conv2_channels = c.at("conv2_channels").get<int>();
  cfg.common_dim = c.at("common_dim").get<int>();
  cfg.graph_k = c.at("graph_k").get<int>();
  cfg.dropout_rate = c.at("dropout_rate").get<double>();
  cfg.scalar_score = c.at("scalar_score").get<bool>();
  cfg.seed = c.at("seed").get<std::uint64_t>();
  GinModel m = init_model(cfg);
  auto refs = param_refs(m);
  const auto& tensors = j.at("tensors");
  for (auto& ref : refs) {
    if (!tensors.contains(ref.name))
      throw DataError(path + ": checkpoint missing tensor '" + ref.name + "'");
    const auto& t = tensors.at(ref.name);
    if (t.value("dtype", "") != "f64")
      throw DataError(path + ": tensor '" + ref.name + "' has unsupported dtype");
    const auto& data = t.at("data");
    std::size_t expect = 1;
    for (int d : t.at("shape").get<std::vector<int>>()) expect *= d;
    if (data.size() != ref.values.size() || expect != ref.values.size())
      throw DataError(path + ": tensor '" + ref.name + "' shape mismatch: file has " +
                      std::to_string(data.size()) + " values, model expects " +
                      std::to_string(ref.values.size()));
    for (std::size_t i = 0; i < ref.values.size(); ++i)
      ref.values[i] = data[i].get<double>();
  }
  return m;
}

}  // namespace gin
