#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gin/errors.hpp"
#include "gin/rng.hpp"
#include "gin/text_graph.hpp"

using namespace gin;

namespace {

EmbeddingTable random_embeddings(int n, int dim, Rng& rng) {
  EmbeddingTable e;
  e.dim = dim;
  e.vectors.resize(n);
  for (auto& v : e.vectors) {
    v.resize(dim);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    // avoid near-zero vectors
    v[0] += v[0] >= 0 ? 0.5 : -0.5;
  }
  return e;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("build_vocabulary ranks by frequency then lexicographic") {
  std::vector<std::vector<std::string>> corpus{{"a", "b", "a"}, {"b", "c"}};
  auto v = build_vocabulary(corpus, 2, 1);
  REQUIRE(v.size() == 2);
  // freq(a)=2, freq(b)=2, tie broken lexicographically
  CHECK(v.words[0] == "a");
  CHECK(v.words[1] == "b");
  CHECK(v.frequencies[0] == 2);
  CHECK(v.frequencies[1] == 2);
}

TEST_CASE("build_vocabulary keeps all words when max_words is large") {
  std::vector<std::vector<std::string>> corpus{{"x", "y"}, {"z", "x"}};
  auto v = build_vocabulary(corpus, 100, 1);
  CHECK(v.size() == 3);
  CHECK(v.words[0] == "x");  // freq 2
}

TEST_CASE("build_vocabulary errors when nothing survives min_doc_freq") {
  std::vector<std::vector<std::string>> corpus{{"a"}, {"b"}};
  CHECK_THROWS_AS((build_vocabulary(corpus, 10, 3)), DataError);
  CHECK_THROWS_AS((build_vocabulary({}, 10, 1)), DataError);
}

TEST_CASE("knn_adjacency on a hand-computed 3-vector example") {
  EmbeddingTable e;
  e.dim = 2;
  e.vectors = {{1.0, 0.0}, {0.9, 0.1}, {0.0, 1.0}};
  auto a = knn_adjacency(e, 1);
  // nearest(0)=1, nearest(1)=0, nearest(2)=1 -> edges {(0,1),(1,2)}
  CHECK(a.at(0, 1) == 1.0);
  CHECK(a.at(1, 2) == 1.0);
  CHECK(a.at(0, 2) == 0.0);
  for (int i = 0; i < 3; ++i) CHECK(a.at(i, i) == 0.0);
}

TEST_CASE("k = N-1 gives the complete graph without self-loops") {
  Rng rng(3);
  auto e = random_embeddings(6, 4, rng);
  auto a = knn_adjacency(e, 5);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(a.at(i, j) == (i == j ? 0.0 : 1.0));
}

TEST_CASE("identical embeddings become mutual nearest neighbors deterministically") {
  EmbeddingTable e;
  e.dim = 2;
  e.vectors = {{1.0, 1.0}, {1.0, 1.0}, {-1.0, 0.5}, {0.3, -0.9}};
  auto a = knn_adjacency(e, 1);
  CHECK(a.at(0, 1) == 1.0);
  // deterministic rerun
  auto b = knn_adjacency(e, 1);
  CHECK(a.col_indices == b.col_indices);
  CHECK(a.values == b.values);
}

TEST_CASE("knn_adjacency rejects out-of-range k and zero vectors") {
  Rng rng(5);
  auto e = random_embeddings(4, 3, rng);
  CHECK_THROWS_AS((knn_adjacency(e, 0)), std::invalid_argument);
  CHECK_THROWS_AS((knn_adjacency(e, 4)), std::invalid_argument);
  e.vectors[2] = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS((knn_adjacency(e, 2)), std::invalid_argument);
}

TEST_CASE("knn adjacency is scale-invariant and structurally symmetric") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    auto e = random_embeddings(12, 5, rng);
    auto a = knn_adjacency(e, 3);
    EmbeddingTable scaled = e;
    for (auto& v : scaled.vectors)
      for (double& x : v) x *= 37.5;
    auto b = knn_adjacency(scaled, 3);
    CHECK(a.col_indices == b.col_indices);
    for (int i = 0; i < a.n; ++i) {
      CHECK(a.at(i, i) == 0.0);
      int deg = a.row_offsets[i + 1] - a.row_offsets[i];
      CHECK(deg >= 3);  // OR-symmetrization can only add edges
      for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
        CHECK(a.at(a.col_indices[p], i) == a.values[p]);
    }
  }
}

TEST_CASE("normalized Laplacian hand examples") {
  // single edge: D = I
  auto a1 = SparseSym::from_triplets(2, {{0, 1, 1.0}});
  auto l1 = normalized_laplacian(a1);
  CHECK(l1.at(0, 0) == 1.0);
  CHECK(l1.at(0, 1) == -1.0);

  // empty adjacency -> identity
  auto a2 = SparseSym::from_triplets(3, {});
  auto l2 = normalized_laplacian(a2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(l2.at(i, j) == (i == j ? 1.0 : 0.0));

  // triangle: D = 2I, off-diagonal -1/2
  auto a3 = SparseSym::from_triplets(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
  auto l3 = normalized_laplacian(a3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(l3.at(i, j) == doctest::Approx(i == j ? 1.0 : -0.5).epsilon(1e-15));
}

TEST_CASE("normalized Laplacian annihilates D^{1/2} 1 when no vertex is isolated") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    auto e = random_embeddings(16, 4, rng);
    auto a = knn_adjacency(e, 3);
    auto l = normalized_laplacian(a);
    std::vector<double> sqrt_deg(16);
    for (int i = 0; i < 16; ++i) {
      double d = 0.0;
      for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) d += a.values[p];
      sqrt_deg[i] = std::sqrt(d);
    }
    auto y = spmv(l, sqrt_deg);
    for (double v : y) CHECK(std::fabs(v) < 1e-10);
  }
}

TEST_CASE("Laplacian spectrum lies in [0, 2] (dense oracle)") {
  Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    int n = 8 + static_cast<int>(rng.uniform_index(25));
    auto e = random_embeddings(n, 4, rng);
    auto a = knn_adjacency(e, 1 + static_cast<int>(rng.uniform_index(4)));
    auto l = normalized_laplacian(a);
    auto eig = dense_eigh(to_dense(l));
    CHECK(eig.eigenvalues.front() >= -1e-10);
    CHECK(eig.eigenvalues.back() <= 2.0 + 1e-10);
  }
}

TEST_CASE("scale_laplacian hand examples and round trip") {
  auto l = SparseSym::from_triplets(2, {{0, 0, 1.0}, {1, 1, 1.0}, {0, 1, -1.0}});
  auto lt = scale_laplacian(l, 2.0);
  CHECK(lt.at(0, 0) == 0.0);
  CHECK(lt.at(0, 1) == -1.0);

  auto id = SparseSym::from_triplets(2, {{0, 0, 1.0}, {1, 1, 1.0}});
  auto z = scale_laplacian(id, 2.0);
  CHECK(z.nnz() == 0);
  auto same = scale_laplacian(id, 1.0);
  CHECK(same.at(0, 0) == 1.0);
  CHECK(same.at(1, 1) == 1.0);

  CHECK_THROWS_AS((scale_laplacian(l, 0.0)), std::invalid_argument);

  // unscale recovers L
  double lambda = 1.7;
  auto scaled = scale_laplacian(l, lambda);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double back = (scaled.at(i, j) + (i == j ? 1.0 : 0.0)) * lambda / 2.0;
      CHECK(std::fabs(back - l.at(i, j)) < 1e-12);
    }
}

TEST_CASE("vectorize_text counts in-vocabulary words") {
  Vocabulary v;
  v.words = {"a", "b", "c"};
  for (int i = 0; i < 3; ++i) v.index[v.words[i]] = i;
  v.frequencies = {3, 2, 1};
  auto s = vectorize_text({"a", "a", "b"}, v);
  CHECK(s.features == std::vector<double>{2.0, 1.0, 0.0});
  CHECK_THROWS_AS((vectorize_text({"zzz"}, v)), DataError);
  CHECK_THROWS_AS((vectorize_text({}, v)), DataError);

  auto norm = vectorize_text({"a", "a", "b", "oov"}, v, true);
  CHECK(norm.features[0] == doctest::Approx(0.5));
}

TEST_CASE("scaled Laplacian spectrum fits the Chebyshev domain") {
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    int n = 10 + static_cast<int>(rng.uniform_index(23));
    auto e = random_embeddings(n, 4, rng);
    Vocabulary vocab;
    for (int i = 0; i < n; ++i) {
      vocab.words.push_back("w" + std::to_string(i));
      vocab.index[vocab.words.back()] = i;
      vocab.frequencies.push_back(1);
    }
    auto g = build_text_graph(vocab, e, 3);
    auto eig = dense_eigh(to_dense(g.scaled_laplacian));
    CHECK(eig.eigenvalues.front() >= -1.0 - 1e-9);
    CHECK(eig.eigenvalues.back() <= 1.0 + 1e-6);
  }
}

TEST_CASE("word2vec text round trip and validation") {
  Rng rng(19);
  std::string path = temp_path("gin_test_emb.txt");
  RawEmbeddings emb;
  emb.dim = 3;
  std::vector<std::string> order{"alpha", "beta", "gamma"};
  for (const auto& w : order) {
    std::vector<double> v(3);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    emb.table[w] = v;
  }
  save_word2vec_text(path, emb, order);
  auto loaded = load_word2vec_text(path);
  CHECK(loaded.dim == 3);
  CHECK(loaded.table.size() == 3);
  for (const auto& w : order)
    for (int d = 0; d < 3; ++d)
      CHECK(loaded.table[w][d] == doctest::Approx(emb.table[w][d]).epsilon(1e-8));

  // malformed: wrong arity
  {
    std::ofstream bad(path);
    bad << "1 3\nword 0.5 0.25\n";
  }
  CHECK_THROWS_AS((load_word2vec_text(path)), DataError);
  // all-zero vector rejected
  {
    std::ofstream bad(path);
    bad << "1 2\nword 0 0\n";
  }
  CHECK_THROWS_AS((load_word2vec_text(path)), DataError);
  std::remove(path.c_str());
}

TEST_CASE("vocabulary TSV round trip") {
  std::string path = temp_path("gin_test_vocab.tsv");
  Vocabulary v;
  v.words = {"the", "cat"};
  v.frequencies = {10, 4};
  v.index = {{"the", 0}, {"cat", 1}};
  save_vocabulary(path, v);
  auto loaded = load_vocabulary(path);
  CHECK(loaded.words == v.words);
  CHECK(loaded.frequencies == v.frequencies);
  std::remove(path.c_str());
}

TEST_CASE("align_with_embeddings drops words without vectors") {
  Vocabulary v;
  v.words = {"a", "b", "c"};
  v.frequencies = {5, 4, 3};
  for (int i = 0; i < 3; ++i) v.index[v.words[i]] = i;
  RawEmbeddings raw;
  raw.dim = 2;
  raw.table["a"] = {1.0, 0.0};
  raw.table["c"] = {0.0, 1.0};
  auto aligned = align_with_embeddings(v, raw);
  CHECK(aligned.dropped == 1);
  CHECK(aligned.vocab.words == std::vector<std::string>{"a", "c"});
  CHECK(aligned.emb.vectors.size() == 2);
}

TEST_CASE("graph persistence: save then load rebuilds identical operators") {
  Rng rng(23);
  int n = 14;
  auto e = random_embeddings(n, 4, rng);
  Vocabulary vocab;
  for (int i = 0; i < n; ++i) {
    vocab.words.push_back("w" + std::to_string(i));
    vocab.index[vocab.words.back()] = i;
    vocab.frequencies.push_back(1);
  }
  auto g = build_text_graph(vocab, e, 3);
  std::string path = temp_path("gin_test_graph.txt");
  save_graph(path, g);
  auto g2 = load_graph(path, g.vocab);
  CHECK(g2.k == g.k);
  CHECK(g2.lambda_max == g.lambda_max);  // bit-exact via round-trip formatting
  CHECK(g2.adjacency.col_indices == g.adjacency.col_indices);
  CHECK(g2.laplacian.values == g.laplacian.values);
  CHECK(g2.scaled_laplacian.values == g.scaled_laplacian.values);
  std::remove(path.c_str());
}
