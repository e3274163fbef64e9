#include "lexprop/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "lexprop/checksum.hpp"
#include "lexprop/error.hpp"
#include "lexprop/text.hpp"

namespace lexprop {

namespace fs = std::filesystem;

namespace {

bool parse_bool(std::string_view key, std::string_view v) {
  const std::string s = text::to_lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw UsageError("config key '" + std::string(key) + "' expects a boolean, got '" + std::string(v) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  try {
    if constexpr (std::is_floating_point_v<T>) {
      return static_cast<T>(text::parse_double(v, key));
    } else {
      return text::parse_int<T>(v, key);
    }
  } catch (const DataError&) {
    throw UsageError("config key '" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
  }
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string file_sha_or(const fs::path& p, std::string_view absent) {
  if (p.empty()) return std::string(absent);
  if (!fs::exists(p)) return "missing";
  return sha256_file(p);
}

std::string recipe_digest(const KeyValues& recipe) {
  std::string joined;
  for (const auto& [k, v] : recipe) joined += k + "=" + v + "\n";
  return sha256_hex(joined);
}

// Writes to "<path>.tmp" and renames it over `path`.
template <typename Writer>
void write_atomically(const fs::path& path, Writer&& write) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    write(out);
    out.flush();
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_sidecar(const fs::path& artifact, const KeyValues& recipe) {
  const std::string artifact_sha = sha256_file(artifact);
  write_atomically(sidecar_path(artifact), [&](std::ostream& out) {
    for (const auto& [k, v] : recipe) out << k << '=' << v << '\n';
    out << "recipe_sha256=" << recipe_digest(recipe) << '\n';
    out << "artifact_sha256=" << artifact_sha << '\n';
    out << "tool_version=" << kToolVersion << '\n';
  });
}

std::optional<std::string> lookup(const KeyValues& kv, std::string_view key) {
  for (const auto& [k, v] : kv) {
    if (k == key) return v;
  }
  return std::nullopt;
}

const std::map<std::string, std::string>& stage_files() {
  static const std::map<std::string, std::string> files{
      {"vocab", "vocab.tsv"}, {"cooc", "cooc.txt"}, {"ppmi", "ppmi.txt"},
      {"embeddings", "embeddings.txt"}, {"graph", "graph.txt"}};
  return files;
}

const std::map<std::string, std::string>& stage_commands() {
  static const std::map<std::string, std::string> cmds{
      {"vocab", "vocab"}, {"cooc", "cooccur"}, {"ppmi", "embed"}, {"embeddings", "embed"}, {"graph", "graph"}};
  return cmds;
}

}  // namespace

void PipelineConfig::validate() const {
  if (min_count < 1) throw UsageError("min_count must be >= 1");
  if (window_size < 1) throw UsageError("window_size must be >= 1");
  if (!(smoothing > 0.0 && smoothing <= 1.0)) throw UsageError("smoothing must lie in (0, 1]");
  if (dim < 1) throw UsageError("dim must be >= 1");
  if (!(svd_tol > 0.0)) throw UsageError("svd_tol must be positive");
  if (svd_max_iter < 1) throw UsageError("svd_max_iter must be >= 1");
  if (k < 1) throw UsageError("k must be >= 1");
  if (!(beta > 0.0 && beta < 1.0)) throw UsageError("beta must lie in (0, 1)");
  if (!(tol > 0.0)) throw UsageError("tol must be positive");
  if (max_iter < 1) throw UsageError("max_iter must be >= 1");
  if (bootstrap_samples < 2) throw UsageError("bootstrap_samples must be >= 2");
  if (subset_size < 1) throw UsageError("subset_size must be >= 1");
  if (method != "sentprop" && method != "clamped" && method != "bestpath" && method != "pmi") {
    throw UsageError("method must be one of sentprop, clamped, bestpath, pmi (got '" + method + "')");
  }
  if (max_hops < 1) throw UsageError("max_hops must be >= 1");
  if (!(absent_count > 0.0)) throw UsageError("absent_count must be positive");
  if (threads < 1) throw UsageError("threads must be >= 1");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "corpus", "stopwords", "seeds", "positive_seeds", "negative_seeds", "embeddings", "output_dir", "lexicon",
      "min_count", "top_n", "lowercase", "window_size", "smoothing", "dim", "svd_seed", "svd_tol",
      "svd_max_iter", "k", "beta", "tol", "max_iter", "bootstrap", "bootstrap_samples", "subset_size",
      "bootstrap_seed", "method", "max_hops", "absent_count", "threads"};
  return keys;
}

PipelineConfig apply_config(PipelineConfig c, const KeyValues& pairs) {
  for (const auto& [key, raw] : pairs) {
    const std::string v(text::trim(raw));
    if (key == "corpus") c.corpus = v;
    else if (key == "stopwords") c.stopwords = v;
    else if (key == "seeds") c.seeds = v;
    else if (key == "positive_seeds") c.positive_seeds = v;
    else if (key == "negative_seeds") c.negative_seeds = v;
    else if (key == "embeddings") c.embeddings = v;
    else if (key == "output_dir") c.output_dir = v;
    else if (key == "lexicon") c.lexicon = v;
    else if (key == "min_count") c.min_count = parse_number<std::uint64_t>(key, v);
    else if (key == "top_n") c.top_n = parse_number<std::size_t>(key, v);
    else if (key == "lowercase") c.lowercase = parse_bool(key, v);
    else if (key == "window_size") c.window_size = parse_number<int>(key, v);
    else if (key == "smoothing") c.smoothing = parse_number<double>(key, v);
    else if (key == "dim") c.dim = parse_number<int>(key, v);
    else if (key == "svd_seed") c.svd_seed = parse_number<std::uint64_t>(key, v);
    else if (key == "svd_tol") c.svd_tol = parse_number<double>(key, v);
    else if (key == "svd_max_iter") c.svd_max_iter = parse_number<int>(key, v);
    else if (key == "k") c.k = parse_number<std::size_t>(key, v);
    else if (key == "beta") c.beta = parse_number<double>(key, v);
    else if (key == "tol") c.tol = parse_number<double>(key, v);
    else if (key == "max_iter") c.max_iter = parse_number<int>(key, v);
    else if (key == "bootstrap") c.bootstrap = parse_bool(key, v);
    else if (key == "bootstrap_samples") c.bootstrap_samples = parse_number<int>(key, v);
    else if (key == "subset_size") c.subset_size = parse_number<std::size_t>(key, v);
    else if (key == "bootstrap_seed") c.bootstrap_seed = parse_number<std::uint64_t>(key, v);
    else if (key == "method") c.method = text::to_lower(v);
    else if (key == "max_hops") c.max_hops = parse_number<int>(key, v);
    else if (key == "absent_count") c.absent_count = parse_number<double>(key, v);
    else if (key == "threads") c.threads = parse_number<unsigned>(key, v);
    else throw UsageError("unknown config key '" + key + "'");
  }
  return c;
}

KeyValues read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  KeyValues out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto t = text::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    out.emplace_back(std::string(text::trim(t.substr(0, eq))), std::string(text::trim(t.substr(eq + 1))));
  }
  return out;
}

KeyValues config_to_pairs(const PipelineConfig& c) {
  return {{"corpus", c.corpus.string()},
          {"stopwords", c.stopwords.string()},
          {"seeds", c.seeds.string()},
          {"positive_seeds", c.positive_seeds.string()},
          {"negative_seeds", c.negative_seeds.string()},
          {"embeddings", c.embeddings.string()},
          {"output_dir", c.output_dir.string()},
          {"lexicon", c.lexicon.string()},
          {"min_count", std::to_string(c.min_count)},
          {"top_n", std::to_string(c.top_n)},
          {"lowercase", bool_str(c.lowercase)},
          {"window_size", std::to_string(c.window_size)},
          {"smoothing", text::format_double(c.smoothing)},
          {"dim", std::to_string(c.dim)},
          {"svd_seed", std::to_string(c.svd_seed)},
          {"svd_tol", text::format_double(c.svd_tol)},
          {"svd_max_iter", std::to_string(c.svd_max_iter)},
          {"k", std::to_string(c.k)},
          {"beta", text::format_double(c.beta)},
          {"tol", text::format_double(c.tol)},
          {"max_iter", std::to_string(c.max_iter)},
          {"bootstrap", bool_str(c.bootstrap)},
          {"bootstrap_samples", std::to_string(c.bootstrap_samples)},
          {"subset_size", std::to_string(c.subset_size)},
          {"bootstrap_seed", std::to_string(c.bootstrap_seed)},
          {"method", c.method},
          {"max_hops", std::to_string(c.max_hops)},
          {"absent_count", text::format_double(c.absent_count)},
          {"threads", std::to_string(c.threads)}};
}

fs::path sidecar_path(const fs::path& artifact) { return artifact.string() + ".meta"; }

KeyValues read_sidecar(const fs::path& artifact) {
  std::ifstream in(sidecar_path(artifact));
  if (!in) return {};
  KeyValues out;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return out;
}

Pipeline::Pipeline(PipelineConfig cfg, std::ostream& log) : cfg_(std::move(cfg)), log_(log) {
  cfg_.validate();
  fs::create_directories(cfg_.output_dir);
  lock_path_ = cfg_.output_dir / ".lexprop.lock";
  const int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    const std::string reason = errno == EEXIST ? "another run holds " + lock_path_.string() +
                                                     " (remove it if no run is active)"
                                               : std::strerror(errno);
    lock_path_.clear();
    throw UsageError("cannot lock output directory " + cfg_.output_dir.string() + ": " + reason);
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto written = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

Pipeline::~Pipeline() {
  if (!lock_path_.empty()) {
    std::error_code ec;
    fs::remove(lock_path_, ec);
  }
}

fs::path Pipeline::embeddings_path() const {
  return cfg_.embeddings.empty() ? cfg_.output_dir / "embeddings.txt" : cfg_.embeddings;
}

fs::path Pipeline::lexicon_path(bool bootstrapped) const {
  if (!cfg_.lexicon.empty()) return cfg_.lexicon;
  return cfg_.output_dir / ("lexicon_" + cfg_.method + (bootstrapped ? "_bootstrap" : "") + ".tsv");
}

std::uint64_t Pipeline::effective_dim(std::size_t vocab_size) const {
  const std::uint64_t cap = vocab_size > 1 ? vocab_size - 1 : 1;
  return std::min<std::uint64_t>(static_cast<std::uint64_t>(cfg_.dim), cap);
}

KeyValues Pipeline::recipe(const std::string& stage) const {
  KeyValues r{{"stage", stage}};
  auto sha_of = [&](const std::string& s) { return file_sha_or(cfg_.output_dir / stage_files().at(s), "none"); };
  if (stage == "vocab") {
    r.emplace_back("input.corpus", file_sha_or(cfg_.corpus, "none"));
    r.emplace_back("input.stopwords", file_sha_or(cfg_.stopwords, "none"));
    r.emplace_back("min_count", std::to_string(cfg_.min_count));
    r.emplace_back("top_n", std::to_string(cfg_.top_n));
    r.emplace_back("lowercase", bool_str(cfg_.lowercase));
  } else if (stage == "cooc") {
    r.emplace_back("input.corpus", file_sha_or(cfg_.corpus, "none"));
    r.emplace_back("input.vocab", sha_of("vocab"));
    r.emplace_back("window_size", std::to_string(cfg_.window_size));
    r.emplace_back("lowercase", bool_str(cfg_.lowercase));
  } else if (stage == "ppmi") {
    r.emplace_back("input.cooc", sha_of("cooc"));
    r.emplace_back("smoothing", text::format_double(cfg_.smoothing));
  } else if (stage == "embeddings") {
    r.emplace_back("input.ppmi", sha_of("ppmi"));
    r.emplace_back("input.vocab", sha_of("vocab"));
    r.emplace_back("dim", std::to_string(cfg_.dim));
    r.emplace_back("svd_seed", std::to_string(cfg_.svd_seed));
    r.emplace_back("svd_tol", text::format_double(cfg_.svd_tol));
    r.emplace_back("svd_max_iter", std::to_string(cfg_.svd_max_iter));
  } else if (stage == "graph") {
    r.emplace_back("input.embeddings", file_sha_or(embeddings_path(), "none"));
    r.emplace_back("k", std::to_string(cfg_.k));
  } else {
    throw UsageError("unknown stage '" + stage + "'");
  }
  return r;
}

bool Pipeline::fresh(const std::string& stage) const {
  const fs::path artifact = cfg_.output_dir / stage_files().at(stage);
  if (!fs::exists(artifact)) return false;
  const KeyValues side = read_sidecar(artifact);
  const auto recorded = lookup(side, "recipe_sha256");
  const auto artifact_sha = lookup(side, "artifact_sha256");
  if (!recorded || !artifact_sha) return false;
  return *recorded == recipe_digest(recipe(stage)) && *artifact_sha == sha256_file(artifact);
}

void Pipeline::require_fresh(const std::string& stage) const {
  static const std::map<std::string, std::vector<std::string>> upstream{
      {"vocab", {}}, {"cooc", {"vocab"}}, {"ppmi", {"cooc"}}, {"embeddings", {"ppmi", "vocab"}},
      {"graph", {"embeddings"}}};
  if (stage == "embeddings" && !cfg_.embeddings.empty()) {
    if (!fs::exists(cfg_.embeddings)) throw DataError("missing embedding file " + cfg_.embeddings.string());
    return;
  }
  for (const auto& up : upstream.at(stage)) require_fresh(up);
  const fs::path artifact = cfg_.output_dir / stage_files().at(stage);
  if (!fs::exists(artifact)) {
    throw DataError("missing artifact " + artifact.string() + "; run `lexprop " + stage_commands().at(stage) +
                    "` first");
  }
  if (!fresh(stage)) {
    throw DataError("stale artifact " + artifact.string() + ": its checksum or recipe does not match the " +
                    "current configuration; rerun `lexprop " + stage_commands().at(stage) + "`");
  }
}

Vocabulary Pipeline::load_vocab() const {
  std::ifstream in(vocab_path());
  if (!in) throw DataError("cannot open " + vocab_path().string());
  return read_vocabulary(in);
}

SeedSet Pipeline::load_seeds() const {
  if (!cfg_.seeds.empty()) return read_seed_file(cfg_.seeds);
  if (!cfg_.positive_seeds.empty() && !cfg_.negative_seeds.empty()) {
    return read_seed_files(cfg_.positive_seeds, cfg_.negative_seeds);
  }
  throw UsageError("no seeds configured: set 'seeds' or both 'positive_seeds' and 'negative_seeds'");
}

StageStatus Pipeline::vocab() {
  if (cfg_.corpus.empty()) throw UsageError("no corpus configured");
  if (!fs::exists(cfg_.corpus)) throw DataError("missing corpus file " + cfg_.corpus.string());
  if (fresh("vocab")) {
    log_ << "vocab: fresh (" << vocab_path().string() << ")\n";
    return StageStatus::Fresh;
  }
  const auto docs = read_corpus_file(cfg_.corpus, {cfg_.lowercase});
  WordSet stop;
  if (!cfg_.stopwords.empty()) stop = read_word_set(cfg_.stopwords, cfg_.lowercase);
  VocabularyOptions opts;
  opts.min_count = cfg_.min_count;
  if (cfg_.top_n > 0) opts.top_n = cfg_.top_n;
  opts.stopwords = cfg_.stopwords.empty() ? nullptr : &stop;
  const Vocabulary v = build_vocabulary(docs, opts);
  write_atomically(vocab_path(), [&](std::ostream& out) { write_vocabulary(out, v); });
  write_sidecar(vocab_path(), recipe("vocab"));
  log_ << "vocab: built " << v.size() << " words -> " << vocab_path().string() << '\n';
  return StageStatus::Built;
}

StageStatus Pipeline::cooccur() {
  require_fresh("vocab");
  if (fresh("cooc")) {
    log_ << "cooccur: fresh (" << cooc_path().string() << ")\n";
    return StageStatus::Fresh;
  }
  const Vocabulary v = load_vocab();
  const auto docs = read_corpus_file(cfg_.corpus, {cfg_.lowercase});
  const SparseCountMatrix counts = count_cooccurrences(docs, v, cfg_.window_size, cfg_.threads);
  write_atomically(cooc_path(), [&](std::ostream& out) { write_count_matrix(out, counts); });
  write_sidecar(cooc_path(), recipe("cooc"));
  log_ << "cooccur: built " << counts.nnz() << " nonzeros (window " << cfg_.window_size << ") -> "
       << cooc_path().string() << '\n';
  return StageStatus::Built;
}

StageStatus Pipeline::embed() {
  require_fresh("cooc");
  const Vocabulary v = load_vocab();
  bool built = false;
  if (!fresh("ppmi")) {
    std::ifstream in(cooc_path());
    const SparseCountMatrix counts = read_count_matrix(in, v.checksum());
    const PpmiMatrix m = ppmi(counts, cfg_.smoothing);
    write_atomically(ppmi_path(), [&](std::ostream& out) { write_ppmi(out, m); });
    write_sidecar(ppmi_path(), recipe("ppmi"));
    log_ << "embed: built PPMI matrix with " << m.nnz() << " nonzeros -> " << ppmi_path().string() << '\n';
    built = true;
  }
  const fs::path emb_path = cfg_.output_dir / "embeddings.txt";
  if (!built && fresh("embeddings")) {
    log_ << "embed: fresh (" << emb_path.string() << ")\n";
    return StageStatus::Fresh;
  }
  std::ifstream in(ppmi_path());
  const PpmiMatrix m = read_ppmi(in, v.checksum());
  const auto d = effective_dim(v.size());
  if (d < static_cast<std::uint64_t>(cfg_.dim)) {
    log_ << "embed: warning: dim " << cfg_.dim << " capped at " << d << " for a " << v.size()
         << "-word vocabulary\n";
  }
  SvdOptions opts;
  opts.tolerance = cfg_.svd_tol;
  opts.max_power_iterations = cfg_.svd_max_iter;
  const EmbeddingSet emb = svd_embed(m, v, static_cast<int>(d), cfg_.svd_seed, opts);
  if (const auto zeros = emb.zero_rows(); !zeros.empty()) {
    log_ << "embed: warning: " << zeros.size() << " words have all-zero embeddings and will be isolated\n";
  }
  write_atomically(emb_path, [&](std::ostream& out) { write_embeddings(out, emb); });
  write_sidecar(emb_path, recipe("embeddings"));
  log_ << "embed: built " << emb.size() << "x" << emb.width() << " embeddings -> " << emb_path.string() << '\n';
  return StageStatus::Built;
}

StageStatus Pipeline::graph() {
  require_fresh("embeddings");
  if (fresh("graph")) {
    log_ << "graph: fresh (" << graph_path().string() << ")\n";
    return StageStatus::Fresh;
  }
  const EmbeddingSet emb = load_embeddings(embeddings_path());
  if (emb.size() < 2) throw DataError("graph: need at least two embedded words");
  std::size_t k = cfg_.k;
  if (k >= emb.size()) {
    k = emb.size() - 1;
    log_ << "graph: warning: k " << cfg_.k << " capped at " << k << '\n';
  }
  const LexicalGraph g = build_knn_graph(emb, k, cfg_.threads);
  write_atomically(graph_path(), [&](std::ostream& out) { write_graph(out, g); });
  write_sidecar(graph_path(), recipe("graph"));
  if (const auto iso = g.isolated_nodes(); !iso.empty()) {
    log_ << "graph: warning: " << iso.size() << " isolated nodes will score neutral\n";
  }
  log_ << "graph: built " << g.edge_count() << " edges (k " << k << ") -> " << graph_path().string() << '\n';
  return StageStatus::Built;
}

fs::path Pipeline::induce(bool force_bootstrap) {
  const bool boot = force_bootstrap || cfg_.bootstrap;
  const SeedSet seeds = load_seeds();
  const std::string seed_file_sha =
      !cfg_.seeds.empty() ? sha256_file(cfg_.seeds)
                          : sha256_file(cfg_.positive_seeds) + "," + sha256_file(cfg_.negative_seeds);

  KeyValues r{{"stage", "lexicon"}, {"method", cfg_.method}, {"input.seeds", seed_file_sha}};
  const bool graph_method = cfg_.method == "sentprop" || cfg_.method == "clamped";
  if (graph_method) {
    require_fresh("graph");
    r.emplace_back("input.graph", sha256_file(graph_path()));
    r.emplace_back("input.embeddings", sha256_file(embeddings_path()));
  } else if (cfg_.method == "bestpath") {
    if (!fs::exists(ppmi_path())) {
      throw UsageError("method bestpath needs the PPMI matrix; run `lexprop embed` first");
    }
    require_fresh("ppmi");
    r.emplace_back("input.ppmi", sha256_file(ppmi_path()));
    r.emplace_back("input.vocab", sha256_file(vocab_path()));
  } else {
    if (!fs::exists(cooc_path())) {
      throw UsageError("method pmi needs the count matrix; run `lexprop cooccur` first");
    }
    require_fresh("cooc");
    r.emplace_back("input.cooc", sha256_file(cooc_path()));
    r.emplace_back("input.vocab", sha256_file(vocab_path()));
  }
  for (const auto& [k, v] : config_to_pairs(cfg_)) {
    if (k == "output_dir" || k == "lexicon" || k == "threads") continue;
    r.emplace_back("config." + k, v);
  }
  r.emplace_back("bootstrapped", bool_str(boot));

  const fs::path out_path = lexicon_path(boot);
  if (fs::exists(out_path)) {
    const KeyValues side = read_sidecar(out_path);
    const auto recorded = lookup(side, "recipe_sha256");
    const auto artifact_sha = lookup(side, "artifact_sha256");
    if (recorded && artifact_sha && *recorded == recipe_digest(r) && *artifact_sha == sha256_file(out_path)) {
      log_ << "induce: fresh (" << out_path.string() << ")\n";
      return out_path;
    }
  }

  const WalkParams walk{cfg_.beta, cfg_.tol, cfg_.max_iter};
  BootstrapParams bp;
  bp.samples = cfg_.bootstrap_samples;
  bp.subset_size = cfg_.subset_size;
  bp.rng_seed = cfg_.bootstrap_seed;
  bp.threads = cfg_.threads;

  Lexicon lex;
  SeedScorer scorer;
  std::optional<LexicalGraph> graph;
  std::optional<Vocabulary> vocab;
  std::optional<PpmiMatrix> ppmi_m;
  std::optional<SparseCountMatrix> counts;
  std::optional<LexicalGraph> cosine_graph;
  if (graph_method) {
    const EmbeddingSet emb = load_embeddings(embeddings_path());
    std::ifstream in(graph_path());
    graph = read_graph(in, emb.vocab());
    if (cfg_.method == "sentprop") {
      scorer = [&](const SeedSet& s) { return sentprop_scores(*graph, s, walk); };
    } else {
      scorer = [&](const SeedSet& s) { return clamped_propagation(*graph, s, walk); };
    }
  } else if (cfg_.method == "bestpath") {
    vocab = load_vocab();
    std::ifstream in(ppmi_path());
    ppmi_m = read_ppmi(in, vocab->checksum());
    const std::size_t k = std::min(cfg_.k, vocab->size() - 1);
    cosine_graph = build_cosine_graph(*ppmi_m, *vocab, k, cfg_.threads);
    scorer = [&](const SeedSet& s) { return bestpath_scores(*cosine_graph, s, cfg_.max_hops); };
  } else {
    vocab = load_vocab();
    std::ifstream in(cooc_path());
    counts = read_count_matrix(in, vocab->checksum());
    const PmiBaselineParams pp{cfg_.smoothing, cfg_.absent_count};
    scorer = [&](const SeedSet& s) { return pmi_baseline(*counts, *vocab, s, pp); };
  }

  if (boot) {
    if (graph_method && cfg_.method == "sentprop") {
      lex = bootstrap(*graph, seeds, walk, bp);
    } else {
      lex = bootstrap(scorer, seeds, bp);
    }
  } else {
    lex = scorer(seeds);
  }
  if (auto w = lex.meta("seed_warnings")) log_ << "induce: warning: " << *w << '\n';
  if (auto x = lex.meta("excluded_zero_count"); x && !x->empty()) {
    log_ << "induce: warning: words with zero co-occurrence count left out: " << *x << '\n';
  }

  for (const auto& [k, v] : r) {
    if (k.starts_with("config.") || k.starts_with("input.")) lex.set_meta(k, v);
  }
  lex.set_meta("tool_version", std::string(kToolVersion));
  write_atomically(out_path, [&](std::ostream& out) { write_lexicon(out, lex); });
  write_sidecar(out_path, r);
  log_ << "induce: " << cfg_.method << (boot ? " (bootstrap)" : "") << " lexicon with " << lex.size()
       << " words -> " << out_path.string() << '\n';
  return out_path;
}

fs::path Pipeline::run_all(bool force_bootstrap) {
  if (cfg_.embeddings.empty() || cfg_.method == "pmi" || cfg_.method == "bestpath") {
    vocab();
    cooccur();
    if (cfg_.method != "pmi") embed();
  }
  if (cfg_.method == "sentprop" || cfg_.method == "clamped") graph();
  return induce(force_bootstrap);
}

std::vector<Neighbor> Pipeline::neighbors(const std::string& word, std::size_t k) {
  const fs::path p = embeddings_path();
  if (!fs::exists(p)) throw DataError("missing embeddings " + p.string() + "; run `lexprop embed` first");
  const EmbeddingSet emb = load_embeddings(p);
  return nearest_neighbors(emb, word, k);
}

}  // namespace lexprop
