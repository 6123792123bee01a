#include "gin/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gin/errors.hpp"
#include "gin/format.hpp"
#include "gin/rng.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace gin {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

std::vector<TextDoc> load_texts_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open texts file: " + path);
  std::vector<TextDoc> docs;
  std::set<std::string> seen_ids;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected doc_id<TAB>label<TAB>tokens");
    TextDoc d;
    d.id = fields[0];
    d.label = fields[1];
    if (d.id.empty())
      throw DataError(path + ":" + std::to_string(line_no) + ": empty doc id");
    if (!seen_ids.insert(d.id).second)
      throw DataError(path + ":" + std::to_string(line_no) + ": duplicate doc id '" + d.id + "'");
    std::istringstream ts(fields[2]);
    std::string tok;
    while (ts >> tok) d.tokens.push_back(tok);
    docs.push_back(std::move(d));
  }
  if (docs.empty()) throw DataError(path + ": no documents");
  return docs;
}

void save_texts_file(const std::string& path, const std::vector<TextDoc>& docs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write texts file: " + path);
  for (const auto& d : docs) {
    out << d.id << '\t' << d.label << '\t';
    for (std::size_t i = 0; i < d.tokens.size(); ++i) {
      if (i) out << ' ';
      out << d.tokens[i];
    }
    out << '\n';
  }
}

std::vector<ImageSample> load_images_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open image features file: " + path);
  std::vector<ImageSample> images;
  std::set<std::string> seen_ids;
  std::string line;
  long long line_no = 0;
  int dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected img_id<TAB>label<TAB>values");
    ImageSample s;
    s.img_id = fields[0];
    s.label = fields[1];
    if (!seen_ids.insert(s.img_id).second)
      throw DataError(path + ":" + std::to_string(line_no) + ": duplicate image id");
    std::stringstream vs(fields[2]);
    std::string piece;
    while (std::getline(vs, piece, ',')) {
      bool ok = false;
      double v = parse_double(piece, ok);
      if (!ok || !std::isfinite(v))
        throw DataError(path + ":" + std::to_string(line_no) + ": bad feature value '" + piece + "'");
      s.features.push_back(v);
    }
    if (s.features.empty())
      throw DataError(path + ":" + std::to_string(line_no) + ": empty feature vector");
    if (dim < 0) dim = static_cast<int>(s.features.size());
    if (static_cast<int>(s.features.size()) != dim)
      throw DataError(path + ":" + std::to_string(line_no) + ": feature row has " +
                      std::to_string(s.features.size()) + " values, expected " +
                      std::to_string(dim));
    images.push_back(std::move(s));
  }
  if (images.empty()) throw DataError(path + ": no image rows");
  return images;
}

void save_images_file(const std::string& path, const std::vector<ImageSample>& images) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write image features file: " + path);
  for (const auto& s : images) {
    out << s.img_id << '\t' << s.label << '\t';
    for (std::size_t i = 0; i < s.features.size(); ++i) {
      if (i) out << ',';
      out << format_g9(s.features[i]);
    }
    out << '\n';
  }
}

CorpusManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DataError(path + ": manifest parse error: " + e.what());
  }
  CorpusManifest m;
  try {
    m.texts_path = j.at("texts").get<std::string>();
    m.images_path = j.at("images").get<std::string>();
    m.embeddings_path = j.at("embeddings").get<std::string>();
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.train_ids = j.at("splits").at("train").get<std::vector<std::string>>();
    m.test_ids = j.at("splits").at("test").get<std::vector<std::string>>();
  } catch (const std::exception& e) {
    throw DataError(path + ": manifest field error: " + e.what());
  }
  return m;
}

void save_manifest(const std::string& path, const CorpusManifest& manifest) {
  nlohmann::ordered_json j;
  j["format"] = "gin-manifest";
  j["texts"] = manifest.texts_path;
  j["images"] = manifest.images_path;
  j["embeddings"] = manifest.embeddings_path;
  j["classes"] = manifest.classes;
  j["splits"]["train"] = manifest.train_ids;
  j["splits"]["test"] = manifest.test_ids;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write manifest: " + path);
  out << j.dump(1) << '\n';
}

Corpus load_corpus(const std::string& manifest_path) {
  CorpusManifest m = load_manifest(manifest_path);
  fs::path base = fs::path(manifest_path).parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };

  Corpus c;
  c.texts = load_texts_file(resolve(m.texts_path));
  c.images = load_images_file(resolve(m.images_path));
  c.embeddings_path = resolve(m.embeddings_path);
  c.classes = m.classes;

  if (c.texts.size() != c.images.size())
    throw DataError(manifest_path + ": " + std::to_string(c.texts.size()) +
                    " texts vs " + std::to_string(c.images.size()) + " images");
  std::set<std::string> class_set(c.classes.begin(), c.classes.end());
  std::map<std::string, int> by_id;
  for (std::size_t i = 0; i < c.texts.size(); ++i) {
    if (c.texts[i].id != c.images[i].img_id)
      throw DataError(manifest_path + ": pair " + std::to_string(i) +
                      " id mismatch: text '" + c.texts[i].id + "' vs image '" +
                      c.images[i].img_id + "'");
    if (c.texts[i].label != c.images[i].label)
      throw DataError(manifest_path + ": pair '" + c.texts[i].id + "' label mismatch");
    if (!class_set.count(c.texts[i].label))
      throw DataError(manifest_path + ": pair '" + c.texts[i].id +
                      "' has unknown label '" + c.texts[i].label + "'");
    by_id[c.texts[i].id] = static_cast<int>(i);
  }

  std::set<std::string> assigned;
  auto resolve_split = [&](const std::vector<std::string>& ids, std::vector<int>& out) {
    for (const auto& id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end())
        throw DataError(manifest_path + ": split references unknown pair id '" + id + "'");
      if (!assigned.insert(id).second)
        throw DataError(manifest_path + ": pair id '" + id + "' appears in both splits");
      out.push_back(it->second);
    }
  };
  resolve_split(m.train_ids, c.train_indices);
  resolve_split(m.test_ids, c.test_indices);
  for (const auto& [id, _] : by_id)
    if (!assigned.count(id))
      throw DataError(manifest_path + ": pair id '" + id + "' missing from splits");
  return c;
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  if (spec.num_classes < 1 || spec.texts_per_class < 1 || spec.images_per_class < 1)
    throw std::invalid_argument("generate_synthetic: counts must be >= 1");
  if (spec.vocab_size < spec.num_classes)
    throw std::invalid_argument("generate_synthetic: vocab_size < num_classes");
  if (spec.noise_level < 0.0)
    throw std::invalid_argument("generate_synthetic: noise_level must be >= 0");
  if (spec.texts_per_class != spec.images_per_class)
    throw std::invalid_argument(
        "generate_synthetic: texts_per_class must equal images_per_class (pairs)");

  Rng rng(spec.seed);
  SyntheticCorpus sc;
  const int C = spec.num_classes;
  const int V = spec.vocab_size;
  const int block = (V + C - 1) / C;
  auto cluster_of = [&](int w) { return std::min(w / block, C - 1); };

  // class centers
  std::vector<std::vector<double>> embed_centers(C), image_centers(C);
  for (int c = 0; c < C; ++c) {
    embed_centers[c].resize(spec.embed_dim);
    double norm = 0.0;
    for (double& x : embed_centers[c]) {
      x = rng.normal();
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : embed_centers[c]) x /= norm;
    image_centers[c].resize(spec.image_dim);
    norm = 0.0;
    for (double& x : image_centers[c]) {
      x = rng.normal();
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : image_centers[c]) x /= norm;
  }

  // vocabulary embeddings, clustered per class
  sc.embeddings.dim = spec.embed_dim;
  std::vector<std::vector<int>> cluster_words(C);
  for (int w = 0; w < V; ++w) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "w%03d", w);
    std::string word(buf);
    int c = cluster_of(w);
    cluster_words[c].push_back(w);
    std::vector<double> vec(spec.embed_dim);
    for (int d = 0; d < spec.embed_dim; ++d)
      vec[d] = embed_centers[c][d] + 0.2 * rng.normal();
    sc.embeddings.table[word] = std::move(vec);
    sc.vocab_order.push_back(word);
  }

  auto word_name = [](int w) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "w%03d", w);
    return std::string(buf);
  };

  // paired samples
  int pair_no = 0;
  for (int c = 0; c < C; ++c) {
    std::string label = "c" + std::to_string(c);
    for (int t = 0; t < spec.texts_per_class; ++t) {
      char idbuf[16];
      std::snprintf(idbuf, sizeof(idbuf), "p%05d", pair_no++);
      std::string id(idbuf);

      TextDoc doc;
      doc.id = id;
      doc.label = label;
      for (int tok = 0; tok < spec.doc_length; ++tok) {
        int w;
        if (spec.noise_level > 0.0 && rng.uniform() < spec.noise_level)
          w = static_cast<int>(rng.uniform_index(V));
        else
          w = cluster_words[c][rng.uniform_index(cluster_words[c].size())];
        doc.tokens.push_back(word_name(w));
      }
      sc.corpus.texts.push_back(std::move(doc));

      ImageSample img;
      img.img_id = id;
      img.label = label;
      img.features.resize(spec.image_dim);
      for (int d = 0; d < spec.image_dim; ++d)
        img.features[d] = image_centers[c][d] + spec.noise_level * rng.normal();
      sc.corpus.images.push_back(std::move(img));
    }
    sc.corpus.classes.push_back(label);
  }

  // per-class split: shuffle then carve the test fraction off the front
  for (int c = 0; c < C; ++c) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < sc.corpus.texts.size(); ++i)
      if (sc.corpus.texts[i].label == sc.corpus.classes[c])
        idx.push_back(static_cast<int>(i));
    rng.shuffle(idx);
    int n_test = static_cast<int>(std::floor(spec.test_fraction * idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
      (static_cast<int>(i) < n_test ? sc.corpus.test_indices
                                    : sc.corpus.train_indices)
          .push_back(idx[i]);
  }
  std::sort(sc.corpus.train_indices.begin(), sc.corpus.train_indices.end());
  std::sort(sc.corpus.test_indices.begin(), sc.corpus.test_indices.end());
  return sc;
}

void write_corpus(const std::string& dir, const SyntheticCorpus& sc) {
  fs::create_directories(dir);
  fs::path base(dir);
  save_texts_file((base / "texts.tsv").string(), sc.corpus.texts);
  save_images_file((base / "images.tsv").string(), sc.corpus.images);
  save_word2vec_text((base / "embeddings.txt").string(), sc.embeddings, sc.vocab_order);
  CorpusManifest m;
  m.texts_path = "texts.tsv";
  m.images_path = "images.tsv";
  m.embeddings_path = "embeddings.txt";
  m.classes = sc.corpus.classes;
  for (int i : sc.corpus.train_indices) m.train_ids.push_back(sc.corpus.texts[i].id);
  for (int i : sc.corpus.test_indices) m.test_ids.push_back(sc.corpus.texts[i].id);
  save_manifest((base / "manifest.json").string(), m);
}

}  // namespace gin
