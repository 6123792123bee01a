#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gin/model.hpp"
#include "gin/text_graph.hpp"

namespace gin {

struct TextDoc {
  std::string id, label;
  std::vector<std::string> tokens;
};

/// A corpus of aligned text-image pairs: texts[i] and images[i] share an id
/// and a class label.
struct Corpus {
  std::vector<TextDoc> texts;
  std::vector<ImageSample> images;
  std::vector<std::string> classes;
  std::vector<int> train_indices, test_indices;  // pair indices
  std::string embeddings_path;
};

struct CorpusManifest {
  std::string texts_path, images_path, embeddings_path;
  std::vector<std::string> classes;
  std::vector<std::string> train_ids, test_ids;
};

// texts file: one document per line, "doc_id<TAB>label<TAB>tok tok ..."
std::vector<TextDoc> load_texts_file(const std::string& path);
void save_texts_file(const std::string& path, const std::vector<TextDoc>& docs);

// image features: "img_id<TAB>label<TAB>v1,v2,..."; dimensionality inferred
// from the first row and enforced thereafter
std::vector<ImageSample> load_images_file(const std::string& path);
void save_images_file(const std::string& path, const std::vector<ImageSample>& images);

CorpusManifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const CorpusManifest& manifest);

// Full ingestion: all paths in the manifest are resolved relative to the
// manifest's directory. Checks id alignment, label membership, split coverage.
Corpus load_corpus(const std::string& manifest_path);

struct SyntheticSpec {
  int num_classes = 3;
  int texts_per_class = 100;
  int images_per_class = 100;
  int vocab_size = 60;
  int embed_dim = 16;
  int image_dim = 32;
  int doc_length = 20;
  double noise_level = 0.1;
  double test_fraction = 0.25;
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  Corpus corpus;
  RawEmbeddings embeddings;
  std::vector<std::string> vocab_order;  // embedding file row order
};

// Seeded cluster corpus: per class one embedding-space center and one
// image-feature center; class-c documents draw class-c cluster words with a
// noise_level chance of a uniform word; image features are center plus
// noise_level-scaled gaussian noise. Exactly separable at noise_level = 0.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

// Writes texts.tsv, images.tsv, embeddings.txt, manifest.json into dir.
// Byte-deterministic for identical inputs.
void write_corpus(const std::string& dir, const SyntheticCorpus& sc);

}  // namespace gin
