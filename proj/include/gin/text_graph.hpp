#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "gin/linalg.hpp"

namespace gin {

struct Vocabulary {
  std::vector<std::string> words;          // rank order
  std::vector<long long> frequencies;      // corpus frequency, aligned
  std::unordered_map<std::string, int> index;

  int size() const { return static_cast<int>(words.size()); }
};

struct EmbeddingTable {
  int dim = 0;
  std::vector<std::vector<double>> vectors;  // aligned to Vocabulary order
};

/// Corpus-level word graph shared by every text sample.
struct TextGraph {
  Vocabulary vocab;
  SparseSym adjacency;         // 0/1, zero diagonal
  SparseSym laplacian;         // I - D^{-1/2} A D^{-1/2}
  SparseSym scaled_laplacian;  // (2/lambda_max) L - I
  double lambda_max = 2.0;
  bool lambda_converged = false;
  int k = 0;

  int vertices() const { return adjacency.n; }
};

struct TextSample {
  std::vector<double> features;  // word frequency per vertex
  std::string label;
  std::string doc_id;
};

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus,
                            std::size_t max_words, std::size_t min_doc_freq);

// e_ij = 1 iff i in kNN(j) or j in kNN(i), cosine similarity, self excluded.
// Ties broken by (descending similarity, ascending index).
SparseSym knn_adjacency(const EmbeddingTable& emb, int k);

SparseSym normalized_laplacian(const SparseSym& a);

SparseSym scale_laplacian(const SparseSym& l, double lambda_max);

TextSample vectorize_text(const std::vector<std::string>& tokens,
                          const Vocabulary& vocab,
                          bool normalize_by_length = false,
                          const std::string& label = "",
                          const std::string& doc_id = "");

TextGraph build_text_graph(Vocabulary vocab, const EmbeddingTable& emb, int k);

// --- embedding / persistence formats ---

struct RawEmbeddings {
  int dim = 0;
  std::unordered_map<std::string, std::vector<double>> table;
};

// word2vec textual format: "N dim" header then "token v1 ... vdim" lines.
RawEmbeddings load_word2vec_text(const std::string& path);
void save_word2vec_text(const std::string& path, const RawEmbeddings& emb,
                        const std::vector<std::string>& order);

struct AlignedEmbeddings {
  Vocabulary vocab;    // words lacking an embedding removed
  EmbeddingTable emb;  // aligned to the pruned vocabulary
  int dropped = 0;
};

AlignedEmbeddings align_with_embeddings(const Vocabulary& vocab,
                                        const RawEmbeddings& raw);

void save_vocabulary(const std::string& path, const Vocabulary& vocab);
Vocabulary load_vocabulary(const std::string& path);

// "n k lambda_max" header then one "i j" line per undirected edge, i<j
// ascending. Loader rebuilds adjacency and recomputes L and L-tilde.
void save_graph(const std::string& path, const TextGraph& g);
TextGraph load_graph(const std::string& path, Vocabulary vocab);

}  // namespace gin
