// Micro-benchmark comparing the OpenMP kernels against their serial
// reference counterparts: sparse matvec, Chebyshev filtering, and batch
// gradient accumulation (deterministic vs parallel).

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gin/linalg.hpp"
#include "gin/model.hpp"
#include "gin/rng.hpp"
#include "gin/spectral.hpp"
#include "gin/text_graph.hpp"

using namespace gin;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double time_secs(int reps, F&& fn) {
  auto start = Clock::now();
  for (int r = 0; r < reps; ++r) fn();
  return std::chrono::duration<double>(Clock::now() - start).count() / reps;
}

Vocabulary numbered_vocab(int n) {
  Vocabulary v;
  for (int i = 0; i < n; ++i) {
    std::string w = "w" + std::to_string(i);
    v.words.push_back(w);
    v.frequencies.push_back(1);
    v.index[w] = i;
  }
  return v;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel paths run serially\n");
#endif

  Rng rng(42);

  // --- spmv on a large k-NN graph Laplacian -----------------------------
  const int n = 20000, k = 16;
  EmbeddingTable emb;
  emb.dim = 16;
  emb.vectors.resize(n);
  for (auto& v : emb.vectors) {
    v.resize(emb.dim);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
  }
  std::printf("building %d-vertex k-NN graph (k=%d)...\n", n, k);
  auto adj = knn_adjacency(emb, k);
  auto lap = normalized_laplacian(adj);
  std::vector<double> x(n);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);

  volatile double sink = 0.0;
  double t_par = time_secs(50, [&] { sink += spmv(lap, x)[0]; });
  double t_ref = time_secs(50, [&] { sink += reference::spmv(lap, x)[0]; });
  std::printf("spmv %dx%d (nnz %lld): parallel %.3f ms, reference %.3f ms, speedup %.2fx\n", n,
              n, static_cast<long long>(lap.nnz()), t_par * 1e3, t_ref * 1e3, t_ref / t_par);

  // --- Chebyshev filter (K-1 chained matvecs) ----------------------------
  auto lam = power_iteration_lambda_max(lap, 200, 1e-6);
  auto lt = scale_laplacian(lap, lam.value);
  ChebCoeffs coeffs{{0.4, -0.3, 0.2, 0.1, -0.05}};
  double t_cheb = time_secs(20, [&] { sink += cheb_filter(lt, x, coeffs)[0]; });
  std::printf("cheb_filter K=5 on %d vertices: %.3f ms\n", n, t_cheb * 1e3);

  // --- batch gradient accumulation: deterministic vs parallel -----------
  const int gn = 200;
  EmbeddingTable gemb;
  gemb.dim = 8;
  gemb.vectors.resize(gn);
  for (auto& v : gemb.vectors) {
    v.resize(gemb.dim);
    for (double& e : v) e = rng.uniform(-1.0, 1.0);
  }
  auto graph = build_text_graph(numbered_vocab(gn), gemb, 8);

  ModelConfig mc;
  mc.vertices = gn;
  mc.image_dim = 32;
  mc.conv1_channels = 4;
  mc.conv2_channels = 8;
  mc.common_dim = 32;
  GinModel model = init_model(mc);

  std::vector<TextSample> texts;
  std::vector<ImageSample> images;
  for (int i = 0; i < 64; ++i) {
    TextSample t;
    t.label = i % 2 ? "a" : "b";
    t.features.resize(gn);
    for (double& f : t.features) f = static_cast<double>(rng.uniform_index(3));
    texts.push_back(std::move(t));
    ImageSample img;
    img.label = i % 2 ? "a" : "b";
    img.features.resize(mc.image_dim);
    for (double& f : img.features) f = rng.uniform(-1.0, 1.0);
    images.push_back(std::move(img));
  }
  PairBatch batch;
  batch.q1 = 32;
  batch.q2 = 32;
  for (int p = 0; p < 32; ++p) batch.pairs.push_back({2 * (p % 32), 2 * (p % 32), true});
  for (int p = 0; p < 32; ++p) batch.pairs.push_back({2 * (p % 32), 2 * (p % 32) + 1, false});
  LossConfig lc;

  double t_det = time_secs(5, [&] {
    sink += batch_backward(model, graph, texts, images, batch, lc, 1, true, false).loss.total;
  });
  double t_fast = time_secs(5, [&] {
    sink += batch_backward(model, graph, texts, images, batch, lc, 1, true, true).loss.total;
  });
  std::printf(
      "batch_backward 64 pairs, %d vertices: deterministic %.1f ms, parallel %.1f ms, "
      "speedup %.2fx\n",
      gn, t_det * 1e3, t_fast * 1e3, t_det / t_fast);
  return 0;
}
