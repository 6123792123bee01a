#include "gin/text_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "gin/errors.hpp"
#include "gin/format.hpp"

namespace gin {

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus,
                            std::size_t max_words, std::size_t min_doc_freq) {
  if (corpus.empty()) throw DataError("build_vocabulary: empty corpus");
  std::map<std::string, long long> freq;
  std::map<std::string, long long> doc_freq;
  for (const auto& doc : corpus) {
    std::map<std::string, bool> seen;
    for (const auto& tok : doc) {
      ++freq[tok];
      if (!seen[tok]) {
        seen[tok] = true;
        ++doc_freq[tok];
      }
    }
  }
  std::vector<std::pair<std::string, long long>> ranked;
  for (const auto& [w, f] : freq)
    if (doc_freq[w] >= static_cast<long long>(min_doc_freq)) ranked.push_back({w, f});
  if (ranked.empty())
    throw DataError("build_vocabulary: no word meets min_doc_freq=" +
                    std::to_string(min_doc_freq));
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > max_words) ranked.resize(max_words);
  Vocabulary v;
  for (const auto& [w, f] : ranked) {
    v.index[w] = static_cast<int>(v.words.size());
    v.words.push_back(w);
    v.frequencies.push_back(f);
  }
  return v;
}

SparseSym knn_adjacency(const EmbeddingTable& emb, int k) {
  const int n = static_cast<int>(emb.vectors.size());
  if (k < 1 || k > n - 1)
    throw std::invalid_argument("knn_adjacency: k must be in [1, N-1], got " +
                                std::to_string(k));
  std::vector<double> norms(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (double x : emb.vectors[i]) s += x * x;
    if (s == 0.0)
      throw std::invalid_argument("knn_adjacency: zero embedding vector at index " +
                                  std::to_string(i));
    norms[i] = std::sqrt(s);
  }

  std::vector<std::vector<int>> neighbors(n);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    std::vector<std::pair<double, int>> cand;
    cand.reserve(n - 1);
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      double dot = 0.0;
      for (int d = 0; d < emb.dim; ++d) dot += emb.vectors[i][d] * emb.vectors[j][d];
      cand.push_back({dot / (norms[i] * norms[j]), i});
    }
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    neighbors[j].reserve(k);
    for (int t = 0; t < k; ++t) neighbors[j].push_back(cand[t].second);
  }

  std::vector<std::tuple<int, int, double>> edges;
  for (int j = 0; j < n; ++j)
    for (int i : neighbors[j])
      if (i < j || std::find(neighbors[i].begin(), neighbors[i].end(), j) ==
                       neighbors[i].end())
        edges.push_back({std::min(i, j), std::max(i, j), 1.0});
  return SparseSym::from_triplets(n, edges);
}

SparseSym normalized_laplacian(const SparseSym& a) {
  for (int i = 0; i < a.n; ++i)
    for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
      if (a.col_indices[p] == i)
        throw std::invalid_argument("normalized_laplacian: nonzero diagonal");
      if (a.values[p] < 0.0)
        throw std::invalid_argument("normalized_laplacian: negative entry");
    }
  std::vector<double> inv_sqrt_deg(a.n, 0.0);
  for (int i = 0; i < a.n; ++i) {
    double deg = 0.0;
    for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) deg += a.values[p];
    // pseudo-inverse convention: isolated vertices keep D^{-1/2} = 0
    if (deg > 0.0) inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
  }
  std::vector<std::tuple<int, int, double>> entries;
  for (int i = 0; i < a.n; ++i) {
    entries.push_back({i, i, 1.0});
    for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
      int j = a.col_indices[p];
      if (j > i)
        entries.push_back({i, j, -a.values[p] * inv_sqrt_deg[i] * inv_sqrt_deg[j]});
    }
  }
  return SparseSym::from_triplets(a.n, entries);
}

SparseSym scale_laplacian(const SparseSym& l, double lambda_max) {
  if (lambda_max <= 0.0)
    throw std::invalid_argument("scale_laplacian: lambda_max must be > 0");
  double scale = 2.0 / lambda_max;
  std::vector<std::tuple<int, int, double>> entries;
  std::vector<bool> has_diag(l.n, false);
  for (int i = 0; i < l.n; ++i)
    for (int p = l.row_offsets[i]; p < l.row_offsets[i + 1]; ++p) {
      int j = l.col_indices[p];
      if (j < i) continue;
      double v = scale * l.values[p];
      if (j == i) {
        v -= 1.0;
        has_diag[i] = true;
      }
      entries.push_back({i, j, v});
    }
  for (int i = 0; i < l.n; ++i)
    if (!has_diag[i]) entries.push_back({i, i, -1.0});
  return SparseSym::from_triplets(l.n, entries);
}

TextSample vectorize_text(const std::vector<std::string>& tokens,
                          const Vocabulary& vocab, bool normalize_by_length,
                          const std::string& label, const std::string& doc_id) {
  TextSample s;
  s.features.assign(vocab.size(), 0.0);
  s.label = label;
  s.doc_id = doc_id;
  long long in_vocab = 0;
  for (const auto& tok : tokens) {
    auto it = vocab.index.find(tok);
    if (it == vocab.index.end()) continue;
    s.features[it->second] += 1.0;
    ++in_vocab;
  }
  if (in_vocab == 0)
    throw DataError("vectorize_text: document '" + doc_id +
                    "' has no in-vocabulary token");
  if (normalize_by_length) {
    double len = static_cast<double>(tokens.size());
    for (double& f : s.features) f /= len;
  }
  return s;
}

TextGraph build_text_graph(Vocabulary vocab, const EmbeddingTable& emb, int k) {
  if (static_cast<int>(emb.vectors.size()) != vocab.size())
    throw std::invalid_argument("build_text_graph: embeddings not aligned to vocabulary");
  TextGraph g;
  g.vocab = std::move(vocab);
  g.k = k;
  g.adjacency = knn_adjacency(emb, k);
  g.laplacian = normalized_laplacian(g.adjacency);
  // tighter than the API default: the scaled spectrum must stay within
  // [-1, 1] to well below test tolerances
  auto lm = power_iteration_lambda_max(g.laplacian, 500, 1e-9);
  g.lambda_max = lm.value;
  g.lambda_converged = lm.converged;
  g.scaled_laplacian = scale_laplacian(g.laplacian, g.lambda_max);
  return g;
}

// ---------------------------------------------------------------------------
// formats
// ---------------------------------------------------------------------------

RawEmbeddings load_word2vec_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw DataError(path + ": empty embeddings file");
  std::istringstream hs(header);
  long long count = 0;
  int dim = 0;
  if (!(hs >> count >> dim) || count <= 0 || dim <= 0)
    throw DataError(path + ":1: malformed word2vec header");
  RawEmbeddings emb;
  emb.dim = dim;
  std::string line;
  long long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    std::vector<double> vec(dim);
    bool all_zero = true;
    for (int d = 0; d < dim; ++d) {
      if (!(ls >> vec[d]))
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": expected " + std::to_string(dim) + " values");
      if (vec[d] != 0.0) all_zero = false;
    }
    double extra;
    if (ls >> extra)
      throw DataError(path + ":" + std::to_string(line_no) + ": too many values");
    if (all_zero)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": all-zero embedding for '" + word + "' (cosine undefined)");
    emb.table[word] = std::move(vec);
  }
  if (static_cast<long long>(emb.table.size()) != count)
    throw DataError(path + ": header promises " + std::to_string(count) +
                    " words, found " + std::to_string(emb.table.size()));
  return emb;
}

void save_word2vec_text(const std::string& path, const RawEmbeddings& emb,
                        const std::vector<std::string>& order) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write embeddings file: " + path);
  out << order.size() << ' ' << emb.dim << '\n';
  for (const auto& w : order) {
    auto it = emb.table.find(w);
    if (it == emb.table.end())
      throw DataError("save_word2vec_text: no vector for '" + w + "'");
    out << w;
    for (double v : it->second) out << ' ' << format_g9(v);
    out << '\n';
  }
}

AlignedEmbeddings align_with_embeddings(const Vocabulary& vocab,
                                        const RawEmbeddings& raw) {
  AlignedEmbeddings out;
  out.emb.dim = raw.dim;
  for (int i = 0; i < vocab.size(); ++i) {
    auto it = raw.table.find(vocab.words[i]);
    if (it == raw.table.end()) {
      ++out.dropped;
      continue;
    }
    out.vocab.index[vocab.words[i]] = static_cast<int>(out.vocab.words.size());
    out.vocab.words.push_back(vocab.words[i]);
    out.vocab.frequencies.push_back(vocab.frequencies[i]);
    out.emb.vectors.push_back(it->second);
  }
  if (out.vocab.size() < 2)
    throw DataError("align_with_embeddings: fewer than 2 vocabulary words have embeddings");
  return out;
}

void save_vocabulary(const std::string& path, const Vocabulary& vocab) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write vocabulary file: " + path);
  for (int i = 0; i < vocab.size(); ++i)
    out << vocab.words[i] << '\t' << vocab.frequencies[i] << '\n';
}

Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary file: " + path);
  Vocabulary v;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected word<TAB>frequency");
    std::string word = line.substr(0, tab);
    long long freq = 0;
    try {
      freq = std::stoll(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(line_no) + ": bad frequency");
    }
    if (v.index.count(word))
      throw DataError(path + ":" + std::to_string(line_no) + ": duplicate word '" + word + "'");
    v.index[word] = static_cast<int>(v.words.size());
    v.words.push_back(word);
    v.frequencies.push_back(freq);
  }
  if (v.size() < 2) throw DataError(path + ": vocabulary needs at least 2 words");
  return v;
}

void save_graph(const std::string& path, const TextGraph& g) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write graph file: " + path);
  out << g.adjacency.n << ' ' << g.k << ' ' << format_roundtrip(g.lambda_max) << '\n';
  for (int i = 0; i < g.adjacency.n; ++i)
    for (int p = g.adjacency.row_offsets[i]; p < g.adjacency.row_offsets[i + 1]; ++p)
      if (g.adjacency.col_indices[p] > i)
        out << i << ' ' << g.adjacency.col_indices[p] << '\n';
}

TextGraph load_graph(const std::string& path, Vocabulary vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open graph file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw DataError(path + ": empty graph file");
  std::istringstream hs(header);
  TextGraph g;
  int n = 0;
  if (!(hs >> n >> g.k >> g.lambda_max) || n <= 0 || g.lambda_max <= 0.0)
    throw DataError(path + ":1: malformed graph header");
  if (n != vocab.size())
    throw DataError(path + ": graph has " + std::to_string(n) +
                    " vertices but vocabulary has " + std::to_string(vocab.size()));
  g.vocab = std::move(vocab);
  std::vector<std::tuple<int, int, double>> edges;
  std::string line;
  long long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    int i = -1, j = -1;
    if (!(ls >> i >> j) || i < 0 || j < 0 || i >= n || j >= n || i >= j)
      throw DataError(path + ":" + std::to_string(line_no) + ": bad edge line");
    edges.push_back({i, j, 1.0});
  }
  g.adjacency = SparseSym::from_triplets(n, edges);
  g.laplacian = normalized_laplacian(g.adjacency);
  g.scaled_laplacian = scale_laplacian(g.laplacian, g.lambda_max);
  g.lambda_converged = true;
  return g;
}

}  // namespace gin
