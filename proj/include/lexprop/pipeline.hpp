#pragma once

// End-to-end orchestration: each stage persists its artifact in the output
// directory next to a "<artifact>.meta" sidecar. The sidecar records the
// stage recipe (parameters plus input checksums) and the artifact checksum. A stage whose recorded
// recipe matches the current configuration and inputs is skipped.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lexprop/corpus.hpp"
#include "lexprop/embeddings.hpp"
#include "lexprop/graph.hpp"
#include "lexprop/lexicon.hpp"
#include "lexprop/propagation.hpp"

namespace lexprop {

inline constexpr std::string_view kToolVersion = "lexprop 1.0.0";
inline constexpr std::string_view kConfigEnvVar = "LEXPROP_CONFIG";

using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct PipelineConfig {
  std::filesystem::path corpus;
  std::filesystem::path stopwords;
  std::filesystem::path seeds;  // "+word"/"-word" lines
  std::filesystem::path positive_seeds;
  std::filesystem::path negative_seeds;
  std::filesystem::path embeddings;  // external embedding file; skips the corpus stages
  std::filesystem::path output_dir = "lexprop_out";
  std::filesystem::path lexicon;  // default: <output_dir>/lexicon_<method>.tsv

  std::uint64_t min_count = 1;
  std::size_t top_n = 0;  // 0 = no limit
  bool lowercase = true;
  int window_size = 4;
  double smoothing = 0.75;
  int dim = 300;
  std::uint64_t svd_seed = 0;
  double svd_tol = 1e-8;
  int svd_max_iter = 300;
  std::size_t k = 25;
  double beta = 0.9;
  double tol = 1e-6;
  int max_iter = 500;
  bool bootstrap = false;
  int bootstrap_samples = 50;
  std::size_t subset_size = 7;
  std::uint64_t bootstrap_seed = 0;
  std::string method = "sentprop";  // sentprop | clamped | bestpath | pmi
  int max_hops = 5;
  double absent_count = 0.01;
  unsigned threads = 1;

  // Range checks for every numeric field; throws UsageError.
  void validate() const;
};

const std::vector<std::string>& config_keys();
// Applies key/value pairs over `base`; unknown keys and malformed values are
// UsageErrors.
PipelineConfig apply_config(PipelineConfig base, const KeyValues& pairs);
// Flat "key = value" lines; '#' starts a comment.
KeyValues read_config_file(const std::filesystem::path& path);
// Every key, in config_keys() order.
KeyValues config_to_pairs(const PipelineConfig& cfg);

enum class StageStatus { Built, Fresh };

class Pipeline {
 public:
  // Takes the output directory's lock file for the object's lifetime.
  Pipeline(PipelineConfig cfg, std::ostream& log);
  ~Pipeline();
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  const PipelineConfig& config() const { return cfg_; }

  StageStatus vocab();
  StageStatus cooccur();
  // PPMI matrix and SVD embeddings.
  StageStatus embed();
  StageStatus graph();
  // Runs the configured method; bootstraps when cfg.bootstrap is set or
  // `force_bootstrap` is true. Returns the lexicon path.
  std::filesystem::path induce(bool force_bootstrap = false);
  // Every stage the configured method needs, then induce.
  std::filesystem::path run_all(bool force_bootstrap = false);

  std::vector<Neighbor> neighbors(const std::string& word, std::size_t k);

  std::filesystem::path vocab_path() const { return cfg_.output_dir / "vocab.tsv"; }
  std::filesystem::path cooc_path() const { return cfg_.output_dir / "cooc.txt"; }
  std::filesystem::path ppmi_path() const { return cfg_.output_dir / "ppmi.txt"; }
  std::filesystem::path embeddings_path() const;
  std::filesystem::path graph_path() const { return cfg_.output_dir / "graph.txt"; }
  std::filesystem::path lexicon_path(bool bootstrapped) const;

  // Recipe of the named stage ("vocab", "cooc", "ppmi", "embeddings",
  // "graph") as implied by the current config and input files.
  KeyValues recipe(const std::string& stage) const;
  bool fresh(const std::string& stage) const;

 private:
  void require_fresh(const std::string& stage) const;
  Vocabulary load_vocab() const;
  SeedSet load_seeds() const;
  std::uint64_t effective_dim(std::size_t vocab_size) const;

  PipelineConfig cfg_;
  std::ostream& log_;
  std::filesystem::path lock_path_;
};

// Sidecar I/O, exposed for tests and tooling.
KeyValues read_sidecar(const std::filesystem::path& artifact);
std::filesystem::path sidecar_path(const std::filesystem::path& artifact);

}  // namespace lexprop
