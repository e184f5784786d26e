#include "datekit/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "datekit/error.hpp"
#include "datekit/quality_control.hpp"

namespace datekit {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Score:
      return "score";
    case Command::Compare:
      return "compare";
    case Command::Filter:
      return "filter";
    case Command::Tiers:
      break;
  }
  return "tiers";
}

namespace {

void require_file(const std::optional<fs::path>& path, const char* flag) {
  if (!path) throw InputError(std::string("missing required input ") + flag);
  if (!fs::exists(*path)) throw InputError("input not found: " + path->string());
}

bool needs_embedder(const std::vector<MetricId>& metrics) {
  return std::any_of(metrics.begin(), metrics.end(), [](MetricId m) { return m != MetricId::Bleu1; });
}

std::string_view scope_name(MatrixScope s) { return s == MatrixScope::Global ? "global" : "per-subcategory"; }
std::string_view reference_name(MatrixReference r) {
  return r == MatrixReference::MaxOverVariants ? "max-over-variants" : "first-variant";
}
std::string_view convention_name(AggConvention c) { return c == AggConvention::SampleMean ? "sample-mean" : "cell-mean"; }

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

struct LoadedCorpus {
  Corpus corpus;
  std::vector<std::string> warnings;
};

LoadedCorpus load_corpus(const RunConfig& config) {
  std::vector<std::string> warnings;
  if (config.corpus) {
    auto in = open_input(*config.corpus);
    auto corpus = parse_corpus(in, config.task, &warnings);
    return {std::move(corpus), std::move(warnings)};
  }
  auto refs = open_input(*config.references);
  auto cands = open_input(*config.candidates);
  auto corpus = parse_split_corpus(refs, cands, config.task, &warnings);
  return {std::move(corpus), std::move(warnings)};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json leaves_json(const CaptionBreakdown& b) {
  const auto& l = b.leaves;
  return json{{"long", l.s_long},
              {"short", l.s_short},
              {"speech_pure", l.s_speech_pure},
              {"speech_mixed", l.s_speech_mixed},
              {"music_pure", l.s_music_pure},
              {"music_mixed", l.s_music_mixed},
              {"sound_pure", l.s_sound_pure},
              {"sound_mixed", l.s_sound_mixed},
              {"environment", l.s_env},
              {"speech", b.s_speech},
              {"music", b.s_music},
              {"sound", b.s_sound},
              {"systemic", b.s_systemic},
              {"content_specific", b.s_content_specific},
              {"content_unrelated", l.s_env},
              {"score_cap", b.score_cap}};
}

json qa_json(const QaBreakdown& b) {
  return json{{"dp", b.s_dp}, {"sc", b.s_sc}, {"qas", b.s_qas}, {"er", b.s_er},
              {"ij", b.s_ij}, {"ac", b.s_ac}, {"score_qa", b.score_qa}};
}

DateOptions date_options(const RunConfig& config) {
  DateOptions o;
  o.scope = config.matrix_scope;
  o.reference = config.matrix_reference;
  o.execution = Execution::Parallel;
  return o;
}

/// Per-sample scores of one metric, with metric-specific report fields.
struct MetricRun {
  std::vector<double> scores;
  json section = json::object();
};

MetricRun run_metric(MetricId metric, const Corpus& corpus, const Embedder* embedder, const CorpusStats* stats,
                     const RunConfig& config) {
  MetricRun run;
  json samples = json::array();
  switch (metric) {
    case MetricId::Date: {
      const auto result = date_corpus(corpus, *embedder, *stats, date_options(config));
      for (const auto& s : result.samples) {
        run.scores.push_back(s.date);
        samples.push_back({{"id", s.id}, {"s_sim", s.s_sim}, {"s_dis", optional_number(s.s_dis)}, {"date", s.date}});
      }
      json matrices = json::array();
      for (const auto& g : result.groups) {
        matrices.push_back({{"group", g.key}, {"size", g.indices.size()}, {"has_matrix", g.matrix.has_value()}});
        if (config.matrix_dump && g.matrix) {
          std::vector<std::string> ids;
          for (auto i : g.indices) ids.push_back(corpus[i].id);
          auto prefix = *config.matrix_dump;
          prefix += "." + g.key;
          write_matrix(*g.matrix, ids, prefix);
        }
      }
      run.section["matrices"] = std::move(matrices);
      run.section["similarity_only_fallback"] = result.similarity_only_fallback;
      run.section["warnings"] = result.warnings;
      break;
    }
    case MetricId::Cosine: {
      run.scores = cosine_baseline_corpus(corpus, *embedder);
      for (std::size_t i = 0; i < corpus.size(); ++i) samples.push_back({{"id", corpus[i].id}, {"score", run.scores[i]}});
      break;
    }
    case MetricId::Bleu1: {
      for (const auto& r : corpus.records()) {
        run.scores.push_back(bleu1(r.candidate, r.references));
        samples.push_back({{"id", r.id}, {"score", run.scores.back()}});
      }
      break;
    }
  }
  double total = 0.0;
  for (double s : run.scores) total += s;
  run.section["dataset_mean"] = run.scores.empty() ? 0.0 : total / static_cast<double>(run.scores.size());
  run.section["samples"] = std::move(samples);
  return run;
}

void add_aggregation(json& section, const Corpus& corpus, std::span<const double> scores, const RunConfig& config,
                     const std::string& label, std::ostream& console) {
  const auto table = per_cell_scores(corpus.records(), scores);
  json cells = json::array();
  for (const auto& [key, stat] : table.cells) {
    cells.push_back({{"cell", to_string(key)}, {"mean", stat.mean()}, {"count", stat.count}});
  }
  section["cells"] = std::move(cells);
  json empty = json::array();
  for (const auto& k : table.empty_cells) empty.push_back(to_string(k));
  section["missing_cells"] = std::move(empty);
  section["excluded_ids"] = table.excluded_ids;

  if (!table.empty_cells.empty()) {
    section["breakdown"] = nullptr;
    console << label << ": breakdown skipped, " << table.empty_cells.size() << " cell(s) without samples\n";
    return;
  }
  if (corpus.task() == Task::Caption) {
    const auto b = score_caption(table, config.agg_convention);
    section["breakdown"] = leaves_json(b);
    render_caption_table(console, label, b);
  } else {
    const auto b = score_qa(table);
    section["breakdown"] = qa_json(b);
    render_qa_table(console, label, b);
  }
}

json report_header(const RunConfig& config, const Embedder* embedder) {
  return json{{"schema_version", kReportSchemaVersion},
              {"tool", {{"name", "datekit"}, {"version", kToolVersion}}},
              {"config", config_echo(config)},
              {"embedder", embedder ? json(embedder->fingerprint()) : json("none")}};
}

}  // namespace

void RunConfig::validate() const {
  switch (command) {
    case Command::Score:
    case Command::Compare:
    case Command::Tiers:
      if (corpus) {
        require_file(corpus, "--corpus");
        if (references || candidates) throw InputError("give either --corpus or --references/--candidates");
      } else if (references || candidates) {
        require_file(references, "--references");
        require_file(candidates, "--candidates");
      } else {
        throw InputError("missing input: --corpus or --references with --candidates");
      }
      if (metrics.empty()) throw InputError("no metric selected");
      if (needs_embedder(metrics) || command == Command::Compare) embedder.validate();
      break;
    case Command::Filter:
      require_file(filter_inputs, "--inputs");
      if (hallucination_patterns) require_file(hallucination_patterns, "--hallucination-patterns");
      break;
  }
  if (out.empty()) throw InputError("missing --out");
}

json config_echo(const RunConfig& config) {
  auto path_or_null = [](const std::optional<fs::path>& p) { return p ? json(p->string()) : json(nullptr); };
  json metrics = json::array();
  for (auto m : config.metrics) metrics.push_back(to_string(m));
  json echo{{"command", to_string(config.command)},
            {"corpus", path_or_null(config.corpus)},
            {"references", path_or_null(config.references)},
            {"candidates", path_or_null(config.candidates)},
            {"task", to_string(config.task)},
            {"metrics", metrics},
            {"matrix_scope", scope_name(config.matrix_scope)},
            {"matrix_reference", reference_name(config.matrix_reference)},
            {"agg_convention", convention_name(config.agg_convention)},
            {"seed", config.seed}};
  const auto& e = config.embedder;
  echo["embedder"] = {{"backend", e.backend == EmbedderBackend::Test ? "test" : "remote"},
                      {"dimension", e.dimension},
                      {"seed", e.seed},
                      {"endpoint", e.endpoint}};
  if (config.command == Command::Filter) {
    echo["inputs"] = path_or_null(config.filter_inputs);
    echo["threshold"] = config.threshold;
    echo["hallucination_patterns"] = path_or_null(config.hallucination_patterns);
  }
  if (config.safe_template) echo["safe_template"] = *config.safe_template;
  return echo;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

void write_atomically(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::random_device rd;
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary);
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw InputError("cannot write " + path.string());
    }
  }
  fs::rename(tmp, path);
}

json run_score(const RunConfig& config, std::ostream& console, const Embedder* embedder) {
  config.validate();
  auto loaded = load_corpus(config);
  const auto& corpus = loaded.corpus;

  std::unique_ptr<Embedder> owned;
  if (!embedder && needs_embedder(config.metrics)) {
    owned = make_embedder(config.embedder);
    embedder = owned.get();
  }
  const bool uses_embedder = needs_embedder(config.metrics);

  auto report = report_header(config, uses_embedder ? embedder : nullptr);
  report["records"] = corpus.size();
  report["warnings"] = loaded.warnings;

  std::optional<CorpusStats> stats;
  if (std::find(config.metrics.begin(), config.metrics.end(), MetricId::Date) != config.metrics.end()) {
    stats = reference_stats(corpus, *embedder);
    report["idf"] = {{"documents", stats->document_count()}, {"vocabulary", stats->entries().size()}};
    if (config.idf_dump) {
      std::ostringstream dump;
      stats->dump(dump);
      write_atomically(*config.idf_dump, dump.str());
    }
  }

  json metrics = json::object();
  for (auto metric : config.metrics) {
    auto run = run_metric(metric, corpus, embedder, stats ? &*stats : nullptr, config);
    console << to_string(metric) << " dataset mean: " << run.section["dataset_mean"].get<double>() << '\n';
    add_aggregation(run.section, corpus, run.scores, config, std::string(to_string(metric)), console);
    metrics[std::string(to_string(metric))] = std::move(run.section);
  }
  report["metrics"] = std::move(metrics);
  write_atomically(config.out, dump_report(report));
  return report;
}

json run_compare(const RunConfig& config, std::ostream& console, const Embedder* embedder) {
  config.validate();
  auto loaded = load_corpus(config);
  const auto safe_template = config.safe_template.value_or(default_safe_template(loaded.corpus));
  const auto tiers = build_tier_corpora(loaded.corpus, safe_template, config.seed);

  std::unique_ptr<Embedder> owned;
  if (!embedder && needs_embedder(config.metrics)) {
    owned = make_embedder(config.embedder);
    embedder = owned.get();
  }
  const bool uses_embedder = needs_embedder(config.metrics);

  // All tiers share references, so one set of idf statistics serves them all.
  std::optional<CorpusStats> stats;
  if (std::find(config.metrics.begin(), config.metrics.end(), MetricId::Date) != config.metrics.end()) {
    stats = reference_stats(tiers.at(QualityTier::Right), *embedder);
  }

  TierScores scores;
  for (auto metric : config.metrics) {
    for (const auto& [tier, corpus] : tiers) {
      scores[metric][tier] = run_metric(metric, corpus, embedder, stats ? &*stats : nullptr, config).scores;
    }
  }
  const auto analysis = discrimination_report(scores);

  auto report = report_header(config, uses_embedder ? embedder : nullptr);
  report["records"] = loaded.corpus.size();
  report["warnings"] = loaded.warnings;
  report["tiers"] = {{"right", "held-out reference variant 2 (paraphrase proxy for a detailed correct answer)"},
                     {"safe", safe_template},
                     {"wrong", "reference variant 1 of another record (seeded derangement)"}};
  json metrics = json::object();
  for (const auto& d : analysis) {
    json cdfs = json::object();
    for (const auto& [tier, cdf] : d.cdfs) {
      cdfs[std::string(to_string(tier))] = {{"x", cdf.points()}, {"F", cdf.fractions()}};
    }
    metrics[std::string(to_string(d.metric))] = {
        {"medians", {{"right", d.median_right}, {"safe", d.median_safe}, {"wrong", d.median_wrong}}},
        {"spans", {{"right_wrong", d.span_right_wrong}, {"right_safe", d.span_right_safe}}},
        {"ordering",
         {{"right_above_safe", d.right_above_safe}, {"safe_above_wrong", d.safe_above_wrong}, {"ordered", d.ordered}}},
        {"cdf", std::move(cdfs)}};
    console << to_string(d.metric) << ": median right/safe/wrong " << d.median_right << " / " << d.median_safe
            << " / " << d.median_wrong << ", span right-wrong " << d.span_right_wrong << ", right-safe "
            << d.span_right_safe << (d.ordered ? " (ordered)" : " (not ordered)") << '\n';
  }
  report["metrics"] = std::move(metrics);

  if (config.plot_csv) {
    std::ostringstream csv;
    write_cdf_csv(csv, analysis);
    write_atomically(*config.plot_csv, csv.str());
  }
  write_atomically(config.out, dump_report(report));
  return report;
}

json run_filter(const RunConfig& config, std::ostream& console) {
  config.validate();
  auto in = open_input(*config.filter_inputs);
  const auto inputs = parse_filter_inputs(in);

  FilterConfig filter;
  filter.threshold = config.threshold;
  if (config.hallucination_patterns) {
    auto patterns = open_input(*config.hallucination_patterns);
    std::string line;
    while (std::getline(patterns, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) filter.hallucination_patterns.push_back(line);
    }
  }
  const auto result = filter_corpus(inputs, filter);

  json summary{{"schema_version", kReportSchemaVersion},
               {"tool", {{"name", "datekit"}, {"version", kToolVersion}}},
               {"config", config_echo(config)},
               {"total", inputs.size()},
               {"kept", result.kept_ids.size()},
               {"rejected", result.rejected},
               {"failed_by_rule", result.failures_by_rule}};

  std::ostringstream verdicts;
  write_verdicts(verdicts, result);
  auto summary_path = config.out;
  summary_path += ".summary.json";
  write_atomically(config.out, verdicts.str());
  write_atomically(summary_path, dump_report(summary));
  console << "kept " << result.kept_ids.size() << " of " << inputs.size() << '\n';
  return summary;
}

void run_tiers(const RunConfig& config, std::ostream& console) {
  config.validate();
  auto loaded = load_corpus(config);
  const auto safe_template = config.safe_template.value_or(default_safe_template(loaded.corpus));
  const auto tiers = build_tier_corpora(loaded.corpus, safe_template, config.seed);
  for (const auto& [tier, corpus] : tiers) {
    std::ostringstream text;
    write_corpus(text, corpus);
    write_atomically(config.out / (std::string(to_string(tier)) + ".jsonl"), text.str());
  }
  console << "wrote 3 tier corpora of " << loaded.corpus.size() << " records to " << config.out.string() << '\n';
}

}  // namespace datekit
