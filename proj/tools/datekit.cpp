// datekit: score caption/QA corpora with DATE and baselines, compare metric
// discrimination, and apply the benchmark's quality-control filters.
//
// Exit codes: 0 success, 2 usage or input error, 3 embedding-service failure.

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>

#include "datekit/error.hpp"
#include "datekit/pipeline.hpp"

namespace {

using namespace datekit;
namespace fs = std::filesystem;

constexpr int kExitUsage = 2;
constexpr int kExitRemote = 3;

std::vector<MetricId> parse_metrics(const std::string& list) {
  std::vector<MetricId> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto m = parse_metric(item);
    if (!m) throw InputError("unknown metric '" + item + "' (expected date, cosine, bleu1)");
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  return out;
}

fs::path default_cache_dir() {
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "datekit";
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "datekit";
  return fs::path(".datekit-cache");
}

struct Flags {
  std::string corpus, references, candidates, inputs, patterns;
  std::string task = "caption";
  std::string metrics;
  std::string embedder = "test";
  std::string endpoint;
  std::size_t dim = EmbedderConfig::kDefaultDimension;
  std::uint64_t embed_seed = EmbedderConfig::kDefaultSeed;
  std::uint64_t seed = kDefaultTierSeed;
  std::string matrix_scope = "per-subcategory";
  std::string matrix_reference = "first-variant";
  std::string agg = "cell-mean";
  double threshold = kDefaultMarginThreshold;
  int jobs = 0;
  std::size_t batch_size = 32;
  std::size_t concurrency = 4;
  int timeout_ms = 30000;
  std::string cache_dir;
  bool no_cache = false;
  std::string safe_template;
  std::string out, dump_matrix, plot_csv, dump_idf;
};

void add_input_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--corpus", f.corpus, "Combined corpus file (one JSON record per line)");
  cmd->add_option("--references", f.references, "Reference records (JSON lines, candidate optional)");
  cmd->add_option("--candidates", f.candidates, "Candidate lines {\"id\", \"candidate\"}");
  cmd->add_option("--task", f.task, "caption | qa")->check(CLI::IsMember({"caption", "qa"}));
}

void add_embedder_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--embedder", f.embedder, "test | remote")->check(CLI::IsMember({"test", "remote"}));
  cmd->add_option("--endpoint", f.endpoint, "Embedding service URL (default: $EMBED_ENDPOINT)");
  cmd->add_option("--dim", f.dim, "Test embedder dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--embed-seed", f.embed_seed, "Test embedder seed");
  cmd->add_option("--batch-size", f.batch_size, "Texts per embedding request")->check(CLI::PositiveNumber);
  cmd->add_option("--concurrency", f.concurrency, "Embedding requests in flight")->check(CLI::PositiveNumber);
  cmd->add_option("--timeout-ms", f.timeout_ms, "Embedding request timeout")->check(CLI::PositiveNumber);
  cmd->add_option("--cache-dir", f.cache_dir, "Remote embedding cache directory");
  cmd->add_flag("--no-cache", f.no_cache, "Disable the remote embedding cache");
}

void add_metric_flags(CLI::App* cmd, Flags& f, const std::string& default_metrics) {
  f.metrics = default_metrics;
  cmd->add_option("--metric", f.metrics, "Comma-separated: date,cosine,bleu1")->capture_default_str();
  cmd->add_option("--matrix-scope", f.matrix_scope, "per-subcategory | global")
      ->check(CLI::IsMember({"per-subcategory", "global"}));
  cmd->add_option("--matrix-reference", f.matrix_reference, "first-variant | max-over-variants")
      ->check(CLI::IsMember({"first-variant", "max-over-variants"}));
}

RunConfig to_config(Command command, const Flags& f) {
  RunConfig c;
  c.command = command;
  auto opt_path = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<fs::path>(s); };
  c.corpus = opt_path(f.corpus);
  c.references = opt_path(f.references);
  c.candidates = opt_path(f.candidates);
  c.filter_inputs = opt_path(f.inputs);
  c.hallucination_patterns = opt_path(f.patterns);
  c.task = *parse_task(f.task);
  if (command == Command::Score || command == Command::Compare) c.metrics = parse_metrics(f.metrics);

  c.embedder.backend = f.embedder == "remote" ? EmbedderBackend::Remote : EmbedderBackend::Test;
  c.embedder.dimension = f.dim;
  c.embedder.seed = f.embed_seed;
  c.embedder.endpoint = f.endpoint;
  if (c.embedder.endpoint.empty()) {
    if (const char* env = std::getenv("EMBED_ENDPOINT")) c.embedder.endpoint = env;
  }
  c.embedder.batch_size = f.batch_size;
  c.embedder.concurrency = f.concurrency;
  c.embedder.timeout = std::chrono::milliseconds(f.timeout_ms);
  if (c.embedder.backend == EmbedderBackend::Remote && !f.no_cache) {
    c.embedder.cache_dir = f.cache_dir.empty() ? default_cache_dir() : fs::path(f.cache_dir);
  }

  c.matrix_scope = f.matrix_scope == "global" ? MatrixScope::Global : MatrixScope::PerSubCategory;
  c.matrix_reference =
      f.matrix_reference == "max-over-variants" ? MatrixReference::MaxOverVariants : MatrixReference::FirstVariant;
  c.agg_convention = f.agg == "sample-mean" ? AggConvention::SampleMean : AggConvention::CellMean;
  c.seed = f.seed;
  c.threshold = f.threshold;
  if (!f.safe_template.empty()) c.safe_template = f.safe_template;
  c.out = f.out;
  c.matrix_dump = opt_path(f.dump_matrix);
  c.plot_csv = opt_path(f.plot_csv);
  c.idf_dump = opt_path(f.dump_idf);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DATE metric toolkit for audio caption and QA evaluation"};
  app.require_subcommand(1);
  Flags f;

  auto* score = app.add_subcommand("score", "Score a corpus and write a report");
  add_input_flags(score, f);
  add_embedder_flags(score, f);
  add_metric_flags(score, f, "date");
  score->add_option("--agg-convention", f.agg, "cell-mean | sample-mean")
      ->check(CLI::IsMember({"cell-mean", "sample-mean"}));
  score->add_option("--dump-matrix", f.dump_matrix, "Prefix for per-group matrix dumps");
  score->add_option("--dump-idf", f.dump_idf, "Write idf statistics (token, df, idf per line)");
  score->add_option("--out", f.out, "Report path")->required();

  auto* compare = app.add_subcommand("compare", "Compare metric discrimination on Right/Safe/Wrong tiers");
  add_input_flags(compare, f);
  add_embedder_flags(compare, f);
  add_metric_flags(compare, f, "date,cosine,bleu1");
  compare->add_option("--seed", f.seed, "Seed for the Wrong-tier derangement");
  compare->add_option("--safe-template", f.safe_template, "Generic candidate for the Safe tier");
  compare->add_option("--plot-csv", f.plot_csv, "Write CDF points as CSV");
  compare->add_option("--out", f.out, "Report path")->required();

  auto* filter = app.add_subcommand("filter", "Apply model- and rule-based quality filters");
  filter->add_option("--inputs", f.inputs, "Filter input lines")->required();
  filter->add_option("--threshold", f.threshold, "Margin over the mean distractor similarity (points)");
  filter->add_option("--hallucination-patterns", f.patterns, "File with one phrase per line");
  filter->add_option("--out", f.out, "Verdict lines path")->required();

  auto* tiers = app.add_subcommand("tiers", "Write Right/Safe/Wrong tier corpora");
  add_input_flags(tiers, f);
  tiers->add_option("--seed", f.seed, "Seed for the Wrong-tier derangement");
  tiers->add_option("--safe-template", f.safe_template, "Generic candidate for the Safe tier");
  tiers->add_option("--out", f.out, "Output directory")->required();

  for (auto* cmd : {score, compare, filter, tiers}) {
    cmd->add_option_function<int>("--jobs", [](int jobs) { omp_set_num_threads(jobs); }, "Worker threads")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (score->parsed()) {
      run_score(to_config(Command::Score, f), std::cout);
    } else if (compare->parsed()) {
      run_compare(to_config(Command::Compare, f), std::cout);
    } else if (filter->parsed()) {
      run_filter(to_config(Command::Filter, f), std::cout);
    } else {
      run_tiers(to_config(Command::Tiers, f), std::cout);
    }
  } catch (const RemoteError& e) {
    std::cerr << "datekit: " << e.what() << '\n';
    return kExitRemote;
  } catch (const std::exception& e) {
    std::cerr << "datekit: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
