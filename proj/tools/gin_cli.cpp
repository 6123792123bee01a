// gin: dual-path text/image retrieval over a word-similarity graph.
//
// Subcommands: vocab, graph, train, eval, query, synth, grad-check.
// Hyperparameters come from built-in defaults, overridden by a JSON config
// file (--config, or the GIN_CONFIG environment variable), overridden in
// turn by command-line flags. Exit codes: 0 success, 1 usage/config error,
// 2 data error, 3 numeric failure.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "gin/data_io.hpp"
#include "gin/errors.hpp"
#include "gin/eval.hpp"
#include "gin/format.hpp"
#include "gin/model.hpp"
#include "gin/rng.hpp"
#include "gin/text_graph.hpp"
#include "gin/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// run configuration: defaults < config file < flags

struct RunConfig {
  // vocabulary / graph
  long long max_words = 10000;
  long long min_doc_freq = 1;
  int graph_k = 8;
  bool normalize_features = false;
  // model
  int cheb_order = 3;
  int conv1_channels = 16;
  int conv2_channels = 32;
  int common_dim = 64;
  double dropout = 0.2;
  bool scalar_score = false;
  // loss
  double margin = 0.6;
  double lambda = 0.35;
  double l2 = 0.005;
  // training
  int batch_size = 200;
  int q1 = 100, q2 = 100;
  int epochs = 50;
  double learning_rate = 0.001;
  long long total_pos = 40000, total_neg = 40000;
  int checkpoint_every = 0;
  // execution
  std::uint64_t seed = 1;
  bool fast = false;  // parallel, unordered gradient accumulation
  int threads = 0;    // 0 = library default
};

// every key a config file may set; anything else is rejected
const std::set<std::string> kConfigKeys = {
    "max_words",     "min_doc_freq",  "graph_k",       "normalize_features",
    "cheb_order",    "conv1_channels", "conv2_channels", "common_dim",
    "dropout",       "scalar_score",  "margin",        "lambda",
    "l2",            "batch_size",    "q1",            "q2",
    "epochs",        "learning_rate", "total_pos",     "total_neg",
    "checkpoint_every", "seed",       "fast",          "threads"};

// option handles so the config file only fills in what flags did not set
struct OptionMap {
  // a key may be registered on several subcommands
  std::map<std::string, std::vector<CLI::Option*>> by_key;

  void track(const std::string& key, CLI::Option* opt) { by_key[key].push_back(opt); }
  bool flag_given(const std::string& key) const {
    auto it = by_key.find(key);
    if (it == by_key.end()) return false;
    for (const CLI::Option* opt : it->second)
      if (opt->count() > 0) return true;
    return false;
  }
};

void apply_config_file(const std::string& path, RunConfig& rc, const OptionMap& opts) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument(path + ": config parse error: " + std::string(e.what()));
  }
  if (!j.is_object()) throw std::invalid_argument(path + ": config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kConfigKeys.count(key))
      throw std::invalid_argument(path + ": unknown config key '" + key + "'");
    if (opts.flag_given(key)) continue;  // flags beat the file
    try {
      if (key == "max_words") rc.max_words = value.get<long long>();
      else if (key == "min_doc_freq") rc.min_doc_freq = value.get<long long>();
      else if (key == "graph_k") rc.graph_k = value.get<int>();
      else if (key == "normalize_features") rc.normalize_features = value.get<bool>();
      else if (key == "cheb_order") rc.cheb_order = value.get<int>();
      else if (key == "conv1_channels") rc.conv1_channels = value.get<int>();
      else if (key == "conv2_channels") rc.conv2_channels = value.get<int>();
      else if (key == "common_dim") rc.common_dim = value.get<int>();
      else if (key == "dropout") rc.dropout = value.get<double>();
      else if (key == "scalar_score") rc.scalar_score = value.get<bool>();
      else if (key == "margin") rc.margin = value.get<double>();
      else if (key == "lambda") rc.lambda = value.get<double>();
      else if (key == "l2") rc.l2 = value.get<double>();
      else if (key == "batch_size") rc.batch_size = value.get<int>();
      else if (key == "q1") rc.q1 = value.get<int>();
      else if (key == "q2") rc.q2 = value.get<int>();
      else if (key == "epochs") rc.epochs = value.get<int>();
      else if (key == "learning_rate") rc.learning_rate = value.get<double>();
      else if (key == "total_pos") rc.total_pos = value.get<long long>();
      else if (key == "total_neg") rc.total_neg = value.get<long long>();
      else if (key == "checkpoint_every") rc.checkpoint_every = value.get<int>();
      else if (key == "seed") rc.seed = value.get<std::uint64_t>();
      else if (key == "fast") rc.fast = value.get<bool>();
      else if (key == "threads") rc.threads = value.get<int>();
    } catch (const json::exception& e) {
      throw std::invalid_argument(path + ": bad value for '" + key + "': " + e.what());
    }
  }
}

ordered_json effective_config_json(const RunConfig& rc) {
  ordered_json j;
  j["max_words"] = rc.max_words;
  j["min_doc_freq"] = rc.min_doc_freq;
  j["graph_k"] = rc.graph_k;
  j["normalize_features"] = rc.normalize_features;
  j["cheb_order"] = rc.cheb_order;
  j["conv1_channels"] = rc.conv1_channels;
  j["conv2_channels"] = rc.conv2_channels;
  j["common_dim"] = rc.common_dim;
  j["dropout"] = rc.dropout;
  j["scalar_score"] = rc.scalar_score;
  j["margin"] = rc.margin;
  j["lambda"] = rc.lambda;
  j["l2"] = rc.l2;
  j["batch_size"] = rc.batch_size;
  j["q1"] = rc.q1;
  j["q2"] = rc.q2;
  j["epochs"] = rc.epochs;
  j["learning_rate"] = rc.learning_rate;
  j["total_pos"] = rc.total_pos;
  j["total_neg"] = rc.total_neg;
  j["checkpoint_every"] = rc.checkpoint_every;
  j["seed"] = rc.seed;
  j["fast"] = rc.fast;
  j["threads"] = rc.threads;
  return j;
}

void write_effective_config(const fs::path& dir, const RunConfig& rc) {
  std::ofstream out(dir / "effective_config.json");
  if (!out) throw gin::DataError("cannot write effective config in " + dir.string());
  out << effective_config_json(rc).dump(1) << '\n';
}

void apply_thread_setting(const RunConfig& rc) {
#ifdef _OPENMP
  if (rc.threads > 0) omp_set_num_threads(rc.threads);
#else
  (void)rc;
#endif
}

// ---------------------------------------------------------------------------
// shared pipeline pieces

struct Pipeline {
  gin::Corpus corpus;
  gin::TextGraph graph;
  std::vector<gin::TextSample> texts;  // aligned with corpus pairs
};

std::vector<gin::TextSample> vectorize_corpus(const gin::Corpus& corpus,
                                              const gin::Vocabulary& vocab,
                                              bool normalize) {
  std::vector<gin::TextSample> out;
  out.reserve(corpus.texts.size());
  for (const auto& doc : corpus.texts)
    out.push_back(gin::vectorize_text(doc.tokens, vocab, normalize, doc.label, doc.id));
  return out;
}

// build vocab + graph from the corpus itself (train path)
Pipeline build_pipeline(const std::string& manifest, const RunConfig& rc) {
  Pipeline p;
  p.corpus = gin::load_corpus(manifest);
  std::vector<std::vector<std::string>> token_lists;
  for (const auto& doc : p.corpus.texts) token_lists.push_back(doc.tokens);
  auto vocab = gin::build_vocabulary(token_lists, static_cast<std::size_t>(rc.max_words),
                                     static_cast<std::size_t>(rc.min_doc_freq));
  auto raw = gin::load_word2vec_text(p.corpus.embeddings_path);
  auto aligned = gin::align_with_embeddings(vocab, raw);
  if (aligned.dropped > 0)
    std::cerr << "warning: dropped " << aligned.dropped
              << " vocabulary words without embeddings\n";
  p.graph = gin::build_text_graph(aligned.vocab, aligned.emb,
                                  std::min(rc.graph_k, aligned.vocab.size() - 1));
  if (!p.graph.lambda_converged)
    std::cerr << "warning: power iteration did not converge; using lambda_max = "
              << gin::format_g9(p.graph.lambda_max) << '\n';
  p.texts = vectorize_corpus(p.corpus, p.graph.vocab, rc.normalize_features);
  return p;
}

// reuse the vocab/graph a previous train run wrote (eval/query path)
Pipeline load_pipeline(const std::string& manifest, const std::string& model_dir,
                       const RunConfig& rc) {
  Pipeline p;
  p.corpus = gin::load_corpus(manifest);
  fs::path dir(model_dir);
  auto vocab = gin::load_vocabulary((dir / "vocab.tsv").string());
  p.graph = gin::load_graph((dir / "graph.txt").string(), vocab);
  p.texts = vectorize_corpus(p.corpus, p.graph.vocab, rc.normalize_features);
  return p;
}

template <typename T>
std::vector<T> select(const std::vector<T>& items, const std::vector<int>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(items[i]);
  return out;
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_vocab(const std::string& texts_path, const std::string& output,
              const RunConfig& rc) {
  auto docs = gin::load_texts_file(texts_path);
  std::vector<std::vector<std::string>> token_lists;
  for (const auto& d : docs) token_lists.push_back(d.tokens);
  auto vocab = gin::build_vocabulary(token_lists, static_cast<std::size_t>(rc.max_words),
                                     static_cast<std::size_t>(rc.min_doc_freq));
  gin::save_vocabulary(output, vocab);
  std::cout << "vocab: " << vocab.size() << " words -> " << output << '\n';
  return 0;
}

int cmd_graph(const std::string& vocab_path, const std::string& embeddings_path,
              const std::string& output, const std::string& vocab_out,
              const RunConfig& rc) {
  auto vocab = gin::load_vocabulary(vocab_path);
  auto raw = gin::load_word2vec_text(embeddings_path);
  auto aligned = gin::align_with_embeddings(vocab, raw);
  if (aligned.dropped > 0)
    std::cout << "dropped " << aligned.dropped << " words without embeddings\n";
  // k >= N yields the complete graph rather than an error
  int k_eff = std::min(rc.graph_k, aligned.vocab.size() - 1);
  auto graph = gin::build_text_graph(aligned.vocab, aligned.emb, k_eff);
  if (!graph.lambda_converged)
    std::cerr << "warning: power iteration did not converge; using lambda_max = "
              << gin::format_g9(graph.lambda_max) << '\n';
  gin::save_graph(output, graph);
  if (!vocab_out.empty()) gin::save_vocabulary(vocab_out, graph.vocab);
  std::cout << "graph: " << graph.vertices() << " vertices, k=" << graph.k
            << ", lambda_max=" << gin::format_g9(graph.lambda_max) << " -> " << output << '\n';
  return 0;
}

int cmd_train(const std::string& manifest, const std::string& outdir,
              const RunConfig& rc) {
  apply_thread_setting(rc);
  fs::create_directories(outdir);
  fs::path dir(outdir);
  write_effective_config(dir, rc);

  Pipeline p = build_pipeline(manifest, rc);
  gin::save_vocabulary((dir / "vocab.tsv").string(), p.graph.vocab);
  gin::save_graph((dir / "graph.txt").string(), p.graph);

  auto train_texts = select(p.texts, p.corpus.train_indices);
  auto train_images = select(p.corpus.images, p.corpus.train_indices);

  gin::ModelConfig mc;
  mc.vertices = p.graph.vertices();
  mc.image_dim = static_cast<int>(train_images.at(0).features.size());
  mc.cheb_order = rc.cheb_order;
  mc.conv1_channels = rc.conv1_channels;
  mc.conv2_channels = rc.conv2_channels;
  mc.common_dim = rc.common_dim;
  mc.graph_k = rc.graph_k;
  mc.dropout_rate = rc.dropout;
  mc.scalar_score = rc.scalar_score;
  mc.seed = rc.seed;
  gin::GinModel model = gin::init_model(mc);

  gin::TrainConfig tc;
  tc.batch_size = rc.batch_size;
  tc.q1 = rc.q1;
  tc.q2 = rc.q2;
  tc.epochs = rc.epochs;
  tc.learning_rate = rc.learning_rate;
  tc.seed = rc.seed;
  tc.total_pos = rc.total_pos;
  tc.total_neg = rc.total_neg;
  tc.parallel = rc.fast;
  tc.checkpoint_path = (dir / "checkpoint.json").string();
  tc.checkpoint_every = rc.checkpoint_every;
  gin::LossConfig lc{rc.margin, rc.lambda, rc.l2};

  auto pool = gin::build_pair_pool(train_texts, train_images, tc, rc.seed);

  std::ofstream log(dir / "loss_log.tsv");
  if (!log) throw gin::DataError("cannot write loss log in " + outdir);
  log << "epoch\tbatch\ttotal\tvar_plus\tvar_minus\thinge\tl2\n";
  gin::train(model, p.graph, train_texts, train_images, pool, tc, lc,
             [&](const gin::BatchRecord& r) {
               log << r.epoch << '\t' << r.batch << '\t'
                   << gin::format_roundtrip(r.loss.total) << '\t'
                   << gin::format_roundtrip(r.loss.var_plus) << '\t'
                   << gin::format_roundtrip(r.loss.var_minus) << '\t'
                   << gin::format_roundtrip(r.loss.hinge) << '\t'
                   << gin::format_roundtrip(r.loss.l2_penalty) << '\n';
             });
  gin::save_checkpoint((dir / "checkpoint.json").string(), model);
  std::cout << "trained " << rc.epochs << " epochs -> " << (dir / "checkpoint.json").string()
            << '\n';
  return 0;
}

int cmd_eval(const std::string& manifest, const std::string& model_dir,
             const std::string& split, const std::string& outdir, const RunConfig& rc) {
  apply_thread_setting(rc);
  Pipeline p = load_pipeline(manifest, model_dir, rc);
  gin::GinModel model = gin::load_checkpoint((fs::path(model_dir) / "checkpoint.json").string());

  const std::vector<int>* idx = nullptr;
  if (split == "train") idx = &p.corpus.train_indices;
  else if (split == "test") idx = &p.corpus.test_indices;
  else throw std::invalid_argument("eval: --split must be 'train' or 'test'");
  if (idx->empty()) throw gin::DataError("eval: split '" + split + "' is empty");

  auto texts = select(p.texts, *idx);
  auto images = select(p.corpus.images, *idx);

  auto sm = gin::score_all(model, p.graph, texts, images);
  auto t2i = gin::evaluate(sm, "text2image");
  auto i2t = gin::evaluate(gin::transpose(sm), "image2text");

  fs::create_directories(outdir);
  fs::path dir(outdir);
  write_effective_config(dir, rc);
  gin::write_report((dir / "report_text2image.tsv").string(), t2i);
  gin::write_report((dir / "report_image2text.tsv").string(), i2t);
  gin::write_pr_curve((dir / "pr_text2image.tsv").string(), t2i);
  gin::write_pr_curve((dir / "pr_image2text.tsv").string(), i2t);

  std::cout << "text2image map " << gin::format_g9(t2i.map) << '\n';
  std::cout << "image2text map " << gin::format_g9(i2t.map) << '\n';
  std::cout << "average map " << gin::format_g9((t2i.map + i2t.map) / 2.0) << '\n';
  return 0;
}

int cmd_query(const std::string& manifest, const std::string& model_dir,
              const std::string& query_id, const std::string& direction, int top_n,
              const RunConfig& rc) {
  if (direction != "text2image" && direction != "image2text")
    throw std::invalid_argument("query: --direction must be text2image or image2text");
  if (top_n < 1) throw std::invalid_argument("query: --top-n must be >= 1");

  Pipeline p = load_pipeline(manifest, model_dir, rc);
  gin::GinModel model = gin::load_checkpoint((fs::path(model_dir) / "checkpoint.json").string());

  int q = -1;
  for (std::size_t i = 0; i < p.corpus.texts.size(); ++i)
    if (p.corpus.texts[i].id == query_id) q = static_cast<int>(i);
  if (q < 0) throw gin::DataError("query: unknown pair id '" + query_id + "'");

  struct Hit {
    double score;
    std::string id, label;
  };
  std::vector<Hit> hits;
  if (direction == "text2image") {
    auto f_q = gin::text_forward(model, p.graph, p.texts[q]);
    for (const auto& img : p.corpus.images) {
      auto f_c = gin::image_forward(model, img);
      hits.push_back({gin::score_pair(model, f_q, f_c), img.img_id, img.label});
    }
  } else {
    auto f_q = gin::image_forward(model, p.corpus.images[q]);
    for (std::size_t i = 0; i < p.texts.size(); ++i) {
      auto f_c = gin::text_forward(model, p.graph, p.texts[i]);
      hits.push_back({gin::score_pair(model, f_c, f_q), p.corpus.texts[i].id,
                      p.corpus.texts[i].label});
    }
  }
  std::vector<int> order(hits.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (hits[a].score != hits[b].score) return hits[a].score > hits[b].score;
    return a < b;
  });
  int n = std::min<int>(top_n, static_cast<int>(order.size()));
  for (int r = 0; r < n; ++r) {
    const Hit& h = hits[order[r]];
    std::cout << (r + 1) << '\t' << h.id << '\t' << h.label << '\t'
              << gin::format_g9(h.score) << '\n';
  }
  return 0;
}

int cmd_synth(const std::string& outdir, const gin::SyntheticSpec& spec) {
  auto sc = gin::generate_synthetic(spec);
  gin::write_corpus(outdir, sc);
  std::cout << "synthetic corpus: " << sc.corpus.texts.size() << " pairs, "
            << spec.num_classes << " classes -> " << outdir << '\n';
  return 0;
}

int cmd_gradcheck(double tolerance, double step, const RunConfig& rc) {
  // tiny but fully structured model exercising every parameter tensor
  const int n = 12;
  gin::Rng data_rng(gin::hash_combine(rc.seed, 0x9e3779b97f4a7c15ull));
  gin::EmbeddingTable emb;
  emb.dim = 8;
  emb.vectors.resize(n);
  for (auto& v : emb.vectors) {
    v.resize(emb.dim);
    for (double& x : v) x = data_rng.uniform(-1.0, 1.0);
  }
  gin::Vocabulary vocab;
  for (int i = 0; i < n; ++i) {
    std::string w = "w" + std::to_string(i);
    vocab.words.push_back(w);
    vocab.frequencies.push_back(1);
    vocab.index[w] = i;
  }
  auto graph = gin::build_text_graph(vocab, emb, 4);

  gin::ModelConfig mc;
  mc.vertices = n;
  mc.image_dim = 6;
  mc.cheb_order = 3;
  mc.conv1_channels = 4;
  mc.conv2_channels = 4;
  mc.common_dim = 4;
  mc.dropout_rate = 0.2;
  mc.scalar_score = rc.scalar_score;
  mc.seed = rc.seed;
  gin::GinModel model = gin::init_model(mc);

  std::vector<gin::TextSample> texts;
  std::vector<gin::ImageSample> images;
  for (int i = 0; i < 8; ++i) {
    gin::TextSample t;
    t.label = i % 2 ? "a" : "b";
    t.features.resize(n);
    for (double& f : t.features) f = static_cast<double>(data_rng.uniform_index(4));
    texts.push_back(std::move(t));
    gin::ImageSample img;
    img.label = i % 2 ? "a" : "b";
    img.features.resize(mc.image_dim);
    for (double& f : img.features) f = data_rng.uniform(-1.0, 1.0);
    images.push_back(std::move(img));
  }
  gin::PairBatch batch;
  batch.q1 = 4;
  batch.q2 = 4;
  for (int p = 0; p < 4; ++p) batch.pairs.push_back({2 * p, 2 * p, true});
  for (int p = 0; p < 4; ++p) batch.pairs.push_back({2 * p, 2 * p + 1, false});

  gin::LossConfig lc{rc.margin, rc.lambda, rc.l2};
  const std::uint64_t dropout_seed = gin::hash_combine(rc.seed, 17);
  auto br = gin::batch_backward(model, graph, texts, images, batch, lc, dropout_seed);
  auto grad_refs = gin::param_refs(br.grads);
  auto model_refs = gin::param_refs(model);

  bool all_ok = true;
  for (std::size_t t = 0; t < model_refs.size(); ++t) {
    double worst = 0.0;
    for (std::size_t i = 0; i < model_refs[t].values.size(); ++i) {
      double saved = model_refs[t].values[i];
      model_refs[t].values[i] = saved + step;
      double up = gin::batch_loss(model, graph, texts, images, batch, lc, dropout_seed);
      model_refs[t].values[i] = saved - step;
      double down = gin::batch_loss(model, graph, texts, images, batch, lc, dropout_seed);
      model_refs[t].values[i] = saved;
      double fd = (up - down) / (2.0 * step);
      double analytic = grad_refs[t].values[i];
      double denom = std::max({1e-6, std::fabs(fd), std::fabs(analytic)});
      worst = std::max(worst, std::fabs(fd - analytic) / denom);
    }
    bool ok = worst < tolerance;
    all_ok &= ok;
    std::cout << model_refs[t].name << "\tmax_rel_err " << gin::format_g9(worst) << '\t'
              << (ok ? "PASS" : "FAIL") << '\n';
  }
  if (!all_ok) {
    std::cerr << "grad-check failed at tolerance " << gin::format_g9(tolerance) << '\n';
    throw gin::NumericError("gradient check failed");
  }
  std::cout << "grad-check: all parameter groups pass at tolerance "
            << gin::format_g9(tolerance) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-convolutional cross-modal retrieval"};
  app.require_subcommand(1);

  RunConfig rc;
  OptionMap opts;
  std::string config_path;
  if (const char* env = std::getenv("GIN_CONFIG")) config_path = env;
  app.add_option("--config", config_path, "JSON config file (default: $GIN_CONFIG)");

  // shared hyperparameter flags, attached per subcommand as relevant
  auto add_common = [&](CLI::App* sub, bool exec_flags) {
    opts.track("seed", sub->add_option("--seed", rc.seed, "RNG seed"));
    if (exec_flags) {
      opts.track("fast", sub->add_flag("--fast", rc.fast,
                                       "parallel, unordered gradient accumulation"));
      opts.track("threads", sub->add_option("--threads", rc.threads, "worker threads (0 = default)"));
    }
  };
  auto add_model_flags = [&](CLI::App* sub) {
    opts.track("cheb_order", sub->add_option("--cheb-order", rc.cheb_order, "Chebyshev order K"));
    opts.track("conv1_channels", sub->add_option("--conv1-channels", rc.conv1_channels, ""));
    opts.track("conv2_channels", sub->add_option("--conv2-channels", rc.conv2_channels, ""));
    opts.track("common_dim", sub->add_option("--common-dim", rc.common_dim, "latent dimension"));
    opts.track("dropout", sub->add_option("--dropout", rc.dropout, "dropout rate"));
    opts.track("scalar_score", sub->add_flag("--scalar-score", rc.scalar_score,
                                             "inner-product scoring head"));
  };
  auto add_loss_flags = [&](CLI::App* sub) {
    opts.track("margin", sub->add_option("--margin", rc.margin, "hinge margin m"));
    opts.track("lambda", sub->add_option("--lambda", rc.lambda, "hinge weight"));
    opts.track("l2", sub->add_option("--l2", rc.l2, "L2 penalty on weights"));
  };
  auto add_vectorize_flags = [&](CLI::App* sub) {
    opts.track("normalize_features",
               sub->add_flag("--normalize-features", rc.normalize_features,
                             "divide word counts by document length"));
  };

  // vocab
  std::string texts_path, output;
  auto* vocab_cmd = app.add_subcommand("vocab", "build a vocabulary from a texts file");
  vocab_cmd->add_option("--texts", texts_path, "texts TSV")->required();
  vocab_cmd->add_option("--output", output, "vocabulary TSV to write")->required();
  opts.track("max_words", vocab_cmd->add_option("--max-words", rc.max_words, "vocabulary cap"));
  opts.track("min_doc_freq",
             vocab_cmd->add_option("--min-doc-freq", rc.min_doc_freq, "document frequency floor"));

  // graph
  std::string vocab_path, embeddings_path, vocab_out;
  auto* graph_cmd = app.add_subcommand("graph", "build the word k-NN graph");
  graph_cmd->add_option("--vocab", vocab_path, "vocabulary TSV")->required();
  graph_cmd->add_option("--embeddings", embeddings_path, "word2vec text file")->required();
  graph_cmd->add_option("--output", output, "graph file to write")->required();
  graph_cmd->add_option("--vocab-out", vocab_out, "write the embedding-pruned vocabulary here");
  opts.track("graph_k", graph_cmd->add_option("--k", rc.graph_k, "neighbors per word"));

  // train
  std::string manifest, outdir;
  auto* train_cmd = app.add_subcommand("train", "train a model from a corpus manifest");
  train_cmd->add_option("--manifest", manifest, "corpus manifest JSON")->required();
  train_cmd->add_option("--outdir", outdir, "output directory")->required();
  opts.track("max_words", train_cmd->add_option("--max-words", rc.max_words, ""));
  opts.track("min_doc_freq", train_cmd->add_option("--min-doc-freq", rc.min_doc_freq, ""));
  opts.track("graph_k", train_cmd->add_option("--k", rc.graph_k, "neighbors per word"));
  add_model_flags(train_cmd);
  add_loss_flags(train_cmd);
  add_vectorize_flags(train_cmd);
  opts.track("batch_size", train_cmd->add_option("--batch-size", rc.batch_size, ""));
  opts.track("q1", train_cmd->add_option("--q1", rc.q1, "matching pairs per batch"));
  opts.track("q2", train_cmd->add_option("--q2", rc.q2, "non-matching pairs per batch"));
  opts.track("epochs", train_cmd->add_option("--epochs", rc.epochs, ""));
  opts.track("learning_rate", train_cmd->add_option("--learning-rate", rc.learning_rate, ""));
  opts.track("total_pos", train_cmd->add_option("--total-pos", rc.total_pos, "pair pool size"));
  opts.track("total_neg", train_cmd->add_option("--total-neg", rc.total_neg, "pair pool size"));
  opts.track("checkpoint_every",
             train_cmd->add_option("--checkpoint-every", rc.checkpoint_every,
                                   "checkpoint cadence in epochs (0 = final only)"));
  add_common(train_cmd, true);

  // eval
  std::string model_dir, split = "test";
  auto* eval_cmd = app.add_subcommand("eval", "evaluate retrieval MAP on a split");
  eval_cmd->add_option("--manifest", manifest, "corpus manifest JSON")->required();
  eval_cmd->add_option("--model-dir", model_dir, "directory written by train")->required();
  eval_cmd->add_option("--split", split, "train or test (default test)");
  eval_cmd->add_option("--outdir", outdir, "report directory")->required();
  add_vectorize_flags(eval_cmd);
  add_common(eval_cmd, true);

  // query
  std::string query_id, direction = "text2image";
  int top_n = 10;
  auto* query_cmd = app.add_subcommand("query", "rank cross-modal candidates for one query");
  query_cmd->add_option("--manifest", manifest, "corpus manifest JSON")->required();
  query_cmd->add_option("--model-dir", model_dir, "directory written by train")->required();
  query_cmd->add_option("--id", query_id, "pair id of the query")->required();
  query_cmd->add_option("--direction", direction, "text2image or image2text");
  query_cmd->add_option("--top-n", top_n, "results to print");
  add_vectorize_flags(query_cmd);
  add_common(query_cmd, false);

  // synth
  gin::SyntheticSpec spec;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic clustered corpus");
  synth_cmd->add_option("--outdir", outdir, "output directory")->required();
  synth_cmd->add_option("--classes", spec.num_classes, "");
  synth_cmd->add_option("--texts-per-class", spec.texts_per_class, "");
  synth_cmd->add_option("--images-per-class", spec.images_per_class, "");
  synth_cmd->add_option("--vocab-size", spec.vocab_size, "");
  synth_cmd->add_option("--embed-dim", spec.embed_dim, "");
  synth_cmd->add_option("--image-dim", spec.image_dim, "");
  synth_cmd->add_option("--doc-length", spec.doc_length, "");
  synth_cmd->add_option("--noise-level", spec.noise_level, "");
  synth_cmd->add_option("--test-fraction", spec.test_fraction, "");
  synth_cmd->add_option("--synth-seed", spec.seed, "corpus seed");

  // grad-check
  double tolerance = 1e-4, step = 1e-5;
  auto* grad_cmd = app.add_subcommand("grad-check",
                                      "finite-difference gradient check per parameter group");
  grad_cmd->add_option("--tolerance", tolerance, "max relative error");
  grad_cmd->add_option("--step", step, "finite-difference step");
  add_loss_flags(grad_cmd);
  opts.track("scalar_score",
             grad_cmd->add_flag("--scalar-score", rc.scalar_score, "inner-product scoring head"));
  add_common(grad_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!config_path.empty()) apply_config_file(config_path, rc, opts);
    if (app.got_subcommand(vocab_cmd)) return cmd_vocab(texts_path, output, rc);
    if (app.got_subcommand(graph_cmd))
      return cmd_graph(vocab_path, embeddings_path, output, vocab_out, rc);
    if (app.got_subcommand(train_cmd)) return cmd_train(manifest, outdir, rc);
    if (app.got_subcommand(eval_cmd)) return cmd_eval(manifest, model_dir, split, outdir, rc);
    if (app.got_subcommand(query_cmd))
      return cmd_query(manifest, model_dir, query_id, direction, top_n, rc);
    if (app.got_subcommand(synth_cmd)) return cmd_synth(outdir, spec);
    if (app.got_subcommand(grad_cmd)) return cmd_gradcheck(tolerance, step, rc);
  } catch (const gin::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const gin::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
