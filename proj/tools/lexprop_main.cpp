// Command-line front end for the lexprop pipeline.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lexprop/error.hpp"
#include "lexprop/evaluation.hpp"
#include "lexprop/lexicon.hpp"
#include "lexprop/pipeline.hpp"
#include "lexprop/text.hpp"

namespace {

using namespace lexprop;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitConvergence = 3;

struct ConfigOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
};

std::string dashed(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

void add_config_options(CLI::App* cmd, ConfigOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Config file (default: $LEXPROP_CONFIG)");
  cmd->add_option("--set", opts.sets, "Override a config key: --set key=value")->take_all();
  for (const auto& key : config_keys()) {
    cmd->add_option_function<std::string>(
        "--" + dashed(key), [&opts, key](const std::string& v) { opts.flags[key] = v; },
        "Config key '" + key + "'");
  }
}

// Config file first, then --set pairs, then per-key flags.
PipelineConfig resolve_config(const ConfigOptions& opts) {
  std::string path = opts.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(std::string(kConfigEnvVar).c_str())) path = env;
  }
  PipelineConfig cfg;
  if (!path.empty()) cfg = apply_config(cfg, read_config_file(path));
  KeyValues pairs;
  for (const auto& s : opts.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
    pairs.emplace_back(std::string(text::trim(s.substr(0, eq))), std::string(text::trim(s.substr(eq + 1))));
  }
  for (const auto& [k, v] : opts.flags) pairs.emplace_back(k, v);
  cfg = apply_config(cfg, pairs);
  cfg.validate();
  return cfg;
}

Lexicon load_lexicon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon " + path);
  try {
    return read_lexicon(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

ClassDistribution parse_distribution(const std::string& s) {
  const auto parts = text::split(s, ',');
  if (parts.size() != 3) throw UsageError("--dist expects 'positive,neutral,negative' fractions");
  ClassDistribution d;
  try {
    d.positive = text::parse_double(parts[0], "--dist");
    d.neutral = text::parse_double(parts[1], "--dist");
    d.negative = text::parse_double(parts[2], "--dist");
    d.validate();
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
  return d;
}

struct ReportLine {
  std::string metric;
  double value;
  std::size_t n;
  std::string params;
};

void emit_report(const std::vector<ReportLine>& lines, const std::string& report_path) {
  std::ostringstream out;
  out << "metric\tvalue\tn\tparams\n";
  for (const auto& l : lines) {
    out << l.metric << '\t' << text::format_double(l.value) << '\t' << l.n << '\t' << l.params << '\n';
  }
  std::cout << out.str();
  if (!report_path.empty()) {
    std::ofstream f(report_path, std::ios::trunc);
    if (!f) throw DataError("cannot write report " + report_path);
    f << out.str();
  }
}

template <typename Map>
std::size_t shared_count(const Lexicon& lex, const Map& gold) {
  std::size_t n = 0;
  for (const auto& [w, _] : gold) {
    if (lex.find(w)) ++n;
  }
  return n;
}

struct EvaluateArgs {
  std::string lexicon, gold, mode = "all", neutral, dist, report;
};

void run_evaluate(const EvaluateArgs& a) {
  const Lexicon lex = load_lexicon_file(a.lexicon);
  GoldLexicon gold;
  try {
    gold = load_gold_lexicon(a.gold);
  } catch (const DataError& e) {
    throw DataError(a.gold + ": " + e.what());
  }
  if (!a.neutral.empty()) {
    std::ifstream in(a.neutral);
    if (!in) throw DataError("cannot open neutral word list " + a.neutral);
    std::vector<std::string> words;
    for (std::string w; in >> w;) words.push_back(text::to_lower(w));
    add_neutral_words(gold, words);
  }
  const bool all = a.mode == "all";
  std::vector<ReportLine> lines;
  const std::string src = "lexicon=" + a.lexicon + ";gold=" + a.gold;
  auto guarded = [&](const char* metric, auto&& fn) {
    try {
      fn();
    } catch (const DataError& e) {
      if (!all) throw DataError(std::string(metric) + ": " + e.what());
      std::cerr << "evaluate: skipping " << metric << ": " << e.what() << '\n';
    }
  };
  if (all || a.mode == "binary") {
    guarded("auc", [&] {
      const auto bin = gold.binary();
      lines.push_back({"auc", auc_binary(lex, gold), shared_count(lex, bin), src});
    });
  }
  if (all || a.mode == "ternary") {
    guarded("ternary_f1", [&] {
      const ClassDistribution dist = a.dist.empty() ? ClassDistribution::from_gold(gold) : parse_distribution(a.dist);
      const std::string p = src + ";dist=" + text::format_double(dist.positive) + "," +
                            text::format_double(dist.neutral) + "," + text::format_double(dist.negative);
      lines.push_back({"ternary_f1", ternary_f1(class_mass_labels(lex, dist), gold), shared_count(lex, gold.ternary), p});
    });
  }
  if (all || a.mode == "continuous") {
    guarded("kendall_tau", [&] {
      lines.push_back({"kendall_tau", kendall_tau(lex, gold.continuous), shared_count(lex, gold.continuous), src});
    });
  }
  if (lines.empty()) throw DataError("no metric could be computed: the lexicon and gold share no usable words");
  emit_report(lines, a.report);
}

struct CompareArgs {
  std::string a, b, report;
  double top_frac = 0.25;
  bool intersection = false;
};

void run_compare(const CompareArgs& c) {
  const Lexicon la = load_lexicon_file(c.a);
  const Lexicon lb = load_lexicon_file(c.b);
  const TauTopOptions opts{c.top_frac, c.intersection};
  const double tau = lexicon_tau_top(la, lb, opts);
  const std::size_t n = top_sentiment_words(la, lb, opts).size();
  const std::string params = "a=" + c.a + ";b=" + c.b + ";top_frac=" + text::format_double(c.top_frac) +
                             ";set=" + (c.intersection ? "intersection" : "union");
  emit_report({{"tau_top", tau, n, params}}, c.report);
}

struct SwitchArgs {
  std::vector<std::string> lexicons;
  std::size_t head = 1, tail = 1;
  std::string dist, report;
};

void run_switches(const SwitchArgs& s) {
  std::vector<Lexicon> lexicons;
  for (const auto& p : s.lexicons) lexicons.push_back(load_lexicon_file(p));
  const ClassDistribution dist = s.dist.empty() ? ClassDistribution{} : parse_distribution(s.dist);
  const SwitchReport r = polarity_switch_report(lexicons, dist, s.head, s.tail);
  const std::string params = "head=" + std::to_string(s.head) + ";tail=" + std::to_string(s.tail);
  emit_report({{"full_switch_fraction", r.full_switch_fraction, r.polar_in_head, params},
               {"changed_fraction", r.changed_fraction, r.words, params}},
              s.report);
  for (const auto& w : r.full_switches) std::cout << "switch\t" << w << '\n';
  for (const auto& w : r.changed) std::cout << "changed\t" << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lexprop: domain-specific sentiment lexicon induction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  ConfigOptions cfg_opts;
  std::string stage;
  auto pipeline_cmd = [&](const std::string& name, const std::string& help) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_config_options(cmd, cfg_opts);
    cmd->callback([&stage, name] { stage = name; });
    return cmd;
  };
  pipeline_cmd("vocab", "Build the vocabulary");
  pipeline_cmd("cooccur", "Count windowed co-occurrences");
  pipeline_cmd("embed", "Build the PPMI matrix and SVD embeddings");
  pipeline_cmd("graph", "Build the kNN lexical graph");
  pipeline_cmd("induce", "Induce a lexicon with the configured method");
  pipeline_cmd("bootstrap", "Induce with bootstrap sampling over seed subsets");
  pipeline_cmd("run", "Run every stage the configured method needs");

  std::string nb_word;
  std::size_t nb_k = 10;
  CLI::App* nb = pipeline_cmd("neighbors", "Nearest neighbors of a word in the embedding space");
  nb->add_option("word", nb_word, "Query word")->required();
  nb->add_option("-n,--count", nb_k, "Number of neighbors")->capture_default_str();

  EvaluateArgs ev;
  CLI::App* ev_cmd = app.add_subcommand("evaluate", "Score a lexicon against a gold lexicon");
  ev_cmd->add_option("--lexicon", ev.lexicon, "Lexicon TSV")->required();
  ev_cmd->add_option("--gold", ev.gold, "Gold lexicon TSV")->required();
  ev_cmd->add_option("--mode", ev.mode, "all | binary | ternary | continuous")
      ->check(CLI::IsMember({"all", "binary", "ternary", "continuous"}))
      ->capture_default_str();
  ev_cmd->add_option("--neutral", ev.neutral, "File of neutral words added to the gold lexicon");
  ev_cmd->add_option("--dist", ev.dist, "Class mass 'positive,neutral,negative' (default: gold proportions)");
  ev_cmd->add_option("--report", ev.report, "Also write the report here");
  ev_cmd->callback([&] { stage = "evaluate"; });

  CompareArgs cmp;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "Kendall tau over the top sentiment words of two lexicons");
  cmp_cmd->add_option("--a", cmp.a, "First lexicon")->required();
  cmp_cmd->add_option("--b", cmp.b, "Second lexicon")->required();
  cmp_cmd->add_option("--top-frac", cmp.top_frac, "Fraction of words by |score|")->capture_default_str();
  cmp_cmd->add_flag("--intersection", cmp.intersection, "Intersect the two top sets instead of uniting them");
  cmp_cmd->add_option("--report", cmp.report, "Also write the report here");
  cmp_cmd->callback([&] { stage = "compare"; });

  SwitchArgs sw;
  CLI::App* sw_cmd = app.add_subcommand("switches", "Polarity switches between early and late lexicons");
  sw_cmd->add_option("lexicons", sw.lexicons, "Lexicons in time order")->required();
  sw_cmd->add_option("--head", sw.head, "Number of leading lexicons to average")->capture_default_str();
  sw_cmd->add_option("--tail", sw.tail, "Number of trailing lexicons to average")->capture_default_str();
  sw_cmd->add_option("--dist", sw.dist, "Class mass 'positive,neutral,negative'");
  sw_cmd->add_option("--report", sw.report, "Also write the report here");
  sw_cmd->callback([&] { stage = "switches"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (stage == "evaluate") {
      run_evaluate(ev);
    } else if (stage == "compare") {
      run_compare(cmp);
    } else if (stage == "switches") {
      run_switches(sw);
    } else {
      Pipeline p(resolve_config(cfg_opts), std::cerr);
      if (stage == "vocab") p.vocab();
      else if (stage == "cooccur") p.cooccur();
      else if (stage == "embed") p.embed();
      else if (stage == "graph") p.graph();
      else if (stage == "induce") std::cout << p.induce(false).string() << '\n';
      else if (stage == "bootstrap") std::cout << p.induce(true).string() << '\n';
      else if (stage == "run") std::cout << p.run_all(false).string() << '\n';
      else if (stage == "neighbors") {
        for (const auto& n : p.neighbors(text::to_lower(nb_word), nb_k)) {
          std::cout << n.word << '\t' << text::format_double(n.similarity) << '\n';
        }
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "lexprop: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConvergenceError& e) {
    std::cerr << "lexprop: " << e.what() << " (residual " << e.residual() << ")\n";
    return kExitConvergence;
  } catch (const DataError& e) {
    std::cerr << "lexprop: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "lexprop: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
