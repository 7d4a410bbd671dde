/*
 * Copyright 2026 The Sector Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "sector/cli.h"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "sector/common.h"
#include "sector/corpus.h"
#include "sector/eval.h"
#include "sector/hash.h"
#include "sector/normalize.h"
#include "sector/pipeline.h"

namespace sector {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::string& path, std::string_view content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("failed writing '" + path + "'");
}

uint64_t ParseSeed(const std::string& text, const std::string& what) {
  uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw UsageError(what + " must be a non-negative integer, got '" + text + "'");
  }
  return value;
}

// One config key: how to read it from JSON and how to echo it back.
struct Field {
  std::function<void(RunConfig&, const json&)> set;
  std::function<json(const RunConfig&)> get;
};

template <typename T>
T As(const json& value, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!value.is_string()) throw std::invalid_argument("string");
    } else if constexpr (std::is_integral_v<T>) {
      if (!value.is_number_unsigned() &&
          !(value.is_number_integer() && value.get<int64_t>() >= 0)) {
        throw std::invalid_argument("non-negative integer");
      }
    } else {
      if (!value.is_number()) throw std::invalid_argument("number");
    }
    return value.get<T>();
  } catch (const std::exception& e) {
    throw UsageError("config key '" + key + "' must be a " + e.what());
  }
}

template <typename T, typename Ref>
Field Plain(const std::string& key, Ref ref) {
  return {[key, ref](RunConfig& c, const json& v) { ref(c) = static_cast<
               std::remove_reference_t<decltype(ref(c))>>(As<T>(v, key)); },
          [ref](const RunConfig& c) {
            return json(ref(const_cast<RunConfig&>(c)));
          }};
}

const std::map<std::string, Field>& Fields() {
  static const std::map<std::string, Field> fields = [] {
    std::map<std::string, Field> f;
    f["data.corpus"] = Plain<std::string>("data.corpus", [](RunConfig& c) -> auto& { return c.corpus_path; });
    f["data.train"] = Plain<std::string>("data.train", [](RunConfig& c) -> auto& { return c.train_path; });
    f["data.validation"] = Plain<std::string>("data.validation", [](RunConfig& c) -> auto& { return c.validation_path; });
    f["data.test"] = Plain<std::string>("data.test", [](RunConfig& c) -> auto& { return c.test_path; });
    f["data.embeddings"] = Plain<std::string>("data.embeddings", [](RunConfig& c) -> auto& { return c.embeddings_path; });
    f["data.name"] = Plain<std::string>("data.name", [](RunConfig& c) -> auto& { return c.dataset_name; });
    f["data.max_sentences"] = Plain<uint64_t>("data.max_sentences", [](RunConfig& c) -> auto& { return c.max_sentences; });

    f["encoder.variant"] = {
        [](RunConfig& c, const json& v) {
          c.encoder.variant = ParseEncoderVariant(As<std::string>(v, "encoder.variant"));
        },
        [](const RunConfig& c) { return json(std::string(EncoderVariantName(c.encoder.variant))); }};
    f["encoder.bloom_m"] = Plain<uint64_t>("encoder.bloom_m", [](RunConfig& c) -> auto& { return c.encoder.bloom_m; });
    f["encoder.bloom_k"] = Plain<uint64_t>("encoder.bloom_k", [](RunConfig& c) -> auto& { return c.encoder.bloom_k; });
    f["encoder.sif_alpha"] = Plain<double>("encoder.sif_alpha", [](RunConfig& c) -> auto& { return c.encoder.sif_alpha; });
    f["encoder.vocab_max_size"] = Plain<uint64_t>("encoder.vocab_max_size", [](RunConfig& c) -> auto& { return c.encoder.vocab_max_size; });
    f["encoder.vocab_min_count"] = Plain<uint64_t>("encoder.vocab_min_count", [](RunConfig& c) -> auto& { return c.encoder.vocab_min_count; });

    f["task"] = {
        [](RunConfig& c, const json& v) {
          c.train.task = ParseTask(As<std::string>(v, "task"));
        },
        [](const RunConfig& c) { return json(TaskName(c.train.task)); }};
    f["train.loss"] = {
        [](RunConfig& c, const json& v) {
          c.train.loss = ParseLoss(As<std::string>(v, "train.loss"));
        },
        [](const RunConfig& c) { return json(LossName(c.train.loss)); }};
    f["train.hidden"] = Plain<uint64_t>("train.hidden", [](RunConfig& c) -> auto& { return c.train.hidden; });
    f["train.embedding"] = Plain<uint64_t>("train.embedding", [](RunConfig& c) -> auto& { return c.train.embedding; });
    f["train.batch_size"] = Plain<uint64_t>("train.batch_size", [](RunConfig& c) -> auto& { return c.train.batch_size; });
    f["train.learning_rate"] = Plain<double>("train.learning_rate", [](RunConfig& c) -> auto& { return c.train.learning_rate; });
    f["train.dropout"] = Plain<double>("train.dropout", [](RunConfig& c) -> auto& { return c.train.dropout; });
    f["train.adam_beta1"] = Plain<double>("train.adam_beta1", [](RunConfig& c) -> auto& { return c.train.adam_beta1; });
    f["train.adam_beta2"] = Plain<double>("train.adam_beta2", [](RunConfig& c) -> auto& { return c.train.adam_beta2; });
    f["train.adam_epsilon"] = Plain<double>("train.adam_epsilon", [](RunConfig& c) -> auto& { return c.train.adam_epsilon; });
    f["train.patience"] = Plain<uint64_t>("train.patience", [](RunConfig& c) -> auto& { return c.train.patience; });
    f["train.max_epochs"] = Plain<uint64_t>("train.max_epochs", [](RunConfig& c) -> auto& { return c.train.max_epochs; });
    f["train.heading_min_frequency"] = Plain<uint64_t>("train.heading_min_frequency", [](RunConfig& c) -> auto& { return c.train.heading_min_frequency; });
    f["train.rank_gamma"] = Plain<double>("train.rank_gamma", [](RunConfig& c) -> auto& { return c.train.ranking.gamma; });
    f["train.rank_margin_positive"] = Plain<double>("train.rank_margin_positive", [](RunConfig& c) -> auto& { return c.train.ranking.margin_positive; });
    f["train.rank_margin_negative"] = Plain<double>("train.rank_margin_negative", [](RunConfig& c) -> auto& { return c.train.ranking.margin_negative; });

    f["segment.strategy"] = {
        [](RunConfig& c, const json& v) {
          c.segment.strategy = ParseStrategy(As<std::string>(v, "segment.strategy"));
        },
        [](const RunConfig& c) { return json(std::string(StrategyName(c.segment.strategy))); }};
    f["segment.pca_dims"] = Plain<uint64_t>("segment.pca_dims", [](RunConfig& c) -> auto& { return c.segment.pca_dims; });
    f["segment.sigma"] = Plain<double>("segment.sigma", [](RunConfig& c) -> auto& { return c.segment.gaussian_sigma; });
    f["segment.bemd_pairing"] = {
        [](RunConfig& c, const json& v) {
          const auto name = As<std::string>(v, "segment.bemd_pairing");
          if (name == "transition") {
            c.segment.bemd_pairing = BemdPairing::kTransition;
          } else if (name == "literal") {
            c.segment.bemd_pairing = BemdPairing::kLiteral;
          } else {
            throw UsageError("segment.bemd_pairing must be transition or literal");
          }
        },
        [](const RunConfig& c) {
          return json(c.segment.bemd_pairing == BemdPairing::kTransition ? "transition"
                                                                          : "literal");
        }};

    f["output.dir"] = Plain<std::string>("output.dir", [](RunConfig& c) -> auto& { return c.output_dir; });
    f["seed"] = Plain<uint64_t>("seed", [](RunConfig& c) -> auto& { return c.seed; });
    return f;
  }();
  return fields;
}

std::string ResolvePath(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

SegmentStrategy StrategyOrDefault(const std::string& flag, const RunConfig* config) {
  if (!flag.empty()) return ParseStrategy(flag);
  return config != nullptr ? config->segment.strategy : SegmentStrategy::kBemd;
}

std::vector<Document> LoadDocs(const std::string& path, size_t max_sentences,
                               bool allow_unannotated) {
  LoadOptions options;
  options.max_sentences = max_sentences;
  options.allow_unannotated = allow_unannotated;
  return LoadWikiSection(path, options);
}

struct Splits {
  std::vector<Document> train;
  std::vector<Document> validation;
  std::vector<Document> test;
};

Splits LoadSplits(const RunConfig& config) {
  Splits splits;
  if (!config.corpus_path.empty()) {
    auto split = SplitCorpus(LoadDocs(config.corpus_path, config.max_sentences, false),
                             config.seed);
    splits.train = std::move(split.train);
    splits.validation = std::move(split.validation);
    splits.test = std::move(split.test);
  } else {
    splits.train = LoadDocs(config.train_path, config.max_sentences, false);
    splits.validation = LoadDocs(config.validation_path, config.max_sentences, false);
    if (!config.test_path.empty()) {
      splits.test = LoadDocs(config.test_path, config.max_sentences, false);
    }
  }
  return splits;
}

int CmdTrain(const std::string& config_path, size_t threads,
             const std::string& out_override) {
  RunConfig config = RunConfig::Load(config_path);
  config.ApplyEnvironment();
  config.train.threads = threads;
  if (!out_override.empty()) config.output_dir = out_override;
  config.Validate();

  const Splits splits = LoadSplits(config);
  std::optional<WordEmbeddingStore> store;
  if (config.encoder.variant == EncoderVariant::kEmb) {
    store = WordEmbeddingStore::Load(config.embeddings_path);
  }
  auto encoder = SentenceEncoder::Fit(config.encoder, splits.train,
                                      store ? &*store : nullptr);

  fs::create_directories(config.output_dir);
  const std::string model_path = (fs::path(config.output_dir) / "model.secm").string();
  const std::string log_path = (fs::path(config.output_dir) / "train_log.jsonl").string();
  std::ofstream log(log_path, std::ios::trunc);
  if (!log) throw DataError("cannot write '" + log_path + "'");

  std::cerr << "training on " << splits.train.size() << " documents, validating on "
            << splits.validation.size() << "\n";
  auto result = Train(splits.train, splits.validation, std::move(encoder), config.train,
                      [&](const EpochRecord& record, const SectorModel&) {
                        log << record.ToJsonLine() << "\n";
                        log.flush();
                        std::cerr << "epoch " << record.epoch << "  loss "
                                  << record.train_loss << "  validation MAP "
                                  << record.validation_map
                                  << (record.improved ? "  *" : "") << "\n";
                        return true;
                      });
  const std::string model_bytes = SerializeModel(result.model);
  WriteFile(model_path, model_bytes);

  json manifest;
  manifest["config"] = config.ToFlatJson();
  json inputs = json::object();
  for (const auto& path : {config.corpus_path, config.train_path, config.validation_path,
                           config.test_path, config.embeddings_path}) {
    if (path.empty()) continue;
    const std::string content = ReadFile(path);
    inputs[path] = {{"git_blob", GitBlobHash(content)}, {"bytes", content.size()}};
  }
  manifest["inputs"] = inputs;
  manifest["model"] = {{"path", "model.secm"}, {"git_blob", GitBlobHash(model_bytes)}};
  manifest["labels"] = result.model.labels;
  manifest["epochs"] = result.log.size();
  manifest["best_epoch"] = result.best_epoch;
  manifest["split_sizes"] = {{"train", splits.train.size()},
                             {"validation", splits.validation.size()},
                             {"test", splits.test.size()}};
  WriteFile((fs::path(config.output_dir) / "manifest.json").string(),
            manifest.dump(2) + "\n");
  if (!splits.test.empty() && !config.corpus_path.empty()) {
    WriteFile((fs::path(config.output_dir) / "test.json").string(),
              SerializeWikiSection(splits.test));
  }
  std::cerr << "best epoch " << result.best_epoch << ", model written to " << model_path
            << "\n";
  return 0;
}

int CmdPredict(const std::string& model_path, const std::string& input,
               const std::string& strategy, const std::string& config_path,
               const std::string& out, const std::string& name, size_t threads) {
  std::optional<RunConfig> config;
  if (!config_path.empty()) config = RunConfig::Load(config_path);
  SegConfig seg = config ? config->segment : SegConfig{};
  seg.strategy = StrategyOrDefault(strategy, config ? &*config : nullptr);
  seg.Validate();
  const auto model = LoadModel(model_path);
  const auto docs = LoadDocs(input, config ? config->max_sentences : 512, true);
  const auto predictions =
      PredictAll(model, docs, seg, name.empty() ? ModelDisplayName(model) : name, threads);
  const std::string text = SerializePredictions(predictions);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    WriteFile(out, text);
  }
  return 0;
}

int CmdEvaluate(const std::string& gold_path, const std::string& predictions_path,
                const std::string& dataset, const std::string& out) {
  const auto gold = LoadDocs(gold_path, 512, false);
  const auto predictions = ParsePredictions(ReadFile(predictions_path));
  const std::string name = dataset.empty() ? fs::path(gold_path).stem().string() : dataset;
  const auto report = EvaluateRun(gold, predictions, predictions.task, name);
  std::cout << report.ToTable();
  if (!out.empty()) {
    WriteFile(out, report.ToJson());
  } else {
    std::cout << report.ToJson();
  }
  return 0;
}

int CmdPlotDeviation(const std::string& model_path, const std::string& input,
                     const std::string& doc_id, const std::string& config_path,
                     const std::string& strategy, const std::string& out,
                     const std::string& heatmap) {
  std::optional<RunConfig> config;
  if (!config_path.empty()) config = RunConfig::Load(config_path);
  SegConfig seg = config ? config->segment : SegConfig{};
  seg.strategy = StrategyOrDefault(strategy, config ? &*config : nullptr);
  seg.Validate();
  const auto model = LoadModel(model_path);
  const auto docs = LoadDocs(input, config ? config->max_sentences : 512, true);
  if (docs.empty()) throw DataError("'" + input + "' contains no documents");
  const Document* doc = &docs.front();
  if (!doc_id.empty()) {
    doc = nullptr;
    for (const auto& d : docs) {
      if (d.id == doc_id) doc = &d;
    }
    if (doc == nullptr) throw DataError("document '" + doc_id + "' not found in " + input);
  }
  const auto run = PredictDocument(model, *doc, seg);

  std::set<size_t> predicted;
  for (const auto& section : run.prediction.sections) {
    if (section.span.begin > 0) predicted.insert(section.span.begin);
  }
  std::set<size_t> gold;
  for (const auto& section : doc->sections) {
    if (section.begin_sentence > 0) gold.insert(section.begin_sentence);
  }
  std::ostringstream csv;
  csv.precision(17);
  csv << "sentence_index,emd,bemd,is_predicted_boundary,gold_boundary\n";
  for (size_t k = 0; k < doc->size(); ++k) {
    csv << k << "," << run.segmentation.emd[k] << "," << run.segmentation.bemd[k] << ","
        << (predicted.count(k) ? 1 : 0) << "," << (gold.count(k) ? 1 : 0) << "\n";
  }
  WriteFile(out, csv.str());

  if (!heatmap.empty()) {
    std::ostringstream heat;
    heat.precision(9);
    heat << "sentence_index";
    for (const auto& label : model.labels) heat << "," << label;
    heat << "\n";
    for (Eigen::Index k = 0; k < run.output.scores.rows(); ++k) {
      heat << k;
      for (Eigen::Index j = 0; j < run.output.scores.cols(); ++j) {
        heat << "," << run.output.scores(k, j);
      }
      heat << "\n";
    }
    WriteFile(heatmap, heat.str());
  }
  return 0;
}

int CmdNormalize(const std::string& headings_path, const std::string& lexicon_path,
                 const std::string& out_dir) {
  const auto headings = ParseHeadingCounts(ReadFile(headings_path));
  const auto lexicon = SynsetLexicon::Load(lexicon_path);
  const auto result = NormalizeHeadings(headings, lexicon);
  WriteFile((fs::path(out_dir) / "label_map.tsv").string(), LabelMapTsv(result));
  WriteFile((fs::path(out_dir) / "clusters.json").string(), ClusterReportJson(result));
  size_t kept = 0;
  for (bool k : result.kept) kept += k ? 1 : 0;
  std::cerr << result.clusters.size() << " clusters, " << kept << " kept, coverage "
            << result.coverage << ", unmatched heading rate " << result.unmatched_rate
            << "\n";
  return 0;
}

int CmdSynth(SyntheticConfig config, bool seed_given, const std::string& out) {
  if (!seed_given) {
    if (const char* env = std::getenv("SECTOR_SEED"); env != nullptr && *env != '\0') {
      config.seed = ParseSeed(env, "SECTOR_SEED");
    }
  }
  const auto docs = GenerateSynthetic(config);
  WriteFile(out, SerializeWikiSection(docs));
  return 0;
}

}  // namespace

RunConfig RunConfig::FromJson(std::string_view text, const std::string& base_dir) {
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!parsed.is_object()) throw UsageError("config must be a JSON object");
  RunConfig config;
  bool loss_given = false;
  for (const auto& [key, value] : parsed.items()) {
    const auto it = Fields().find(key);
    if (it == Fields().end()) throw UsageError("unknown config key '" + key + "'");
    it->second.set(config, value);
    if (key == "train.loss") loss_given = true;
  }
  if (!loss_given && config.train.task == Task::kMulti) config.train.loss = LossKind::kBce;
  config.train.seed = config.seed;
  for (auto* path : {&config.corpus_path, &config.train_path, &config.validation_path,
                     &config.test_path, &config.embeddings_path}) {
    *path = ResolvePath(*path, base_dir);
  }
  if (parsed.contains("output.dir")) config.output_dir = ResolvePath(config.output_dir, base_dir);
  return config;
}

RunConfig RunConfig::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return FromJson(buffer.str(), fs::path(path).parent_path().string());
}

void RunConfig::ApplyEnvironment() {
  if (const char* env = std::getenv("SECTOR_SEED"); env != nullptr && *env != '\0') {
    seed = ParseSeed(env, "SECTOR_SEED");
    train.seed = seed;
  }
}

void RunConfig::Validate() const {
  encoder.Validate();
  train.Validate();
  segment.Validate();
  if (max_sentences < 1) throw UsageError("data.max_sentences must be >= 1");
  if (corpus_path.empty() && (train_path.empty() || validation_path.empty())) {
    throw UsageError("config needs data.corpus or both data.train and data.validation");
  }
  if (!corpus_path.empty() && !train_path.empty()) {
    throw UsageError("data.corpus and data.train are mutually exclusive");
  }
  if (encoder.variant == EncoderVariant::kEmb && embeddings_path.empty()) {
    throw UsageError("encoder variant emb needs data.embeddings");
  }
  for (const auto& path : {corpus_path, train_path, validation_path, test_path}) {
    if (!path.empty() && !fs::is_regular_file(path)) {
      throw DataError("input file not found: " + path);
    }
  }
  if (encoder.variant == EncoderVariant::kEmb && !fs::is_regular_file(embeddings_path)) {
    throw DataError("word embedding file not found: " + embeddings_path);
  }
}

json RunConfig::ToFlatJson() const {
  json out;
  for (const auto& [key, field] : Fields()) out[key] = field.get(*this);
  return out;
}

std::string ModelDisplayName(const SectorModel& model) {
  std::string name = model.task == Task::kSingle ? "SEC>T+" : "SEC>H+";
  name += EncoderVariantName(model.encoder.config().variant);
  if (model.loss == LossKind::kRanking) name += "+rank";
  return name;
}

int RunCli(int argc, const char* const* argv) {
  CLI::App app{"Topic segmentation and classification with topic embeddings", "sector"};
  app.require_subcommand(1);

  size_t threads = 1;
  std::string config_path, model_path, input, strategy, out, name, doc_id, heatmap;
  std::string gold_path, predictions_path, dataset, headings_path, lexicon_path;

  auto* train = app.add_subcommand("train", "Train a model from a run config");
  train->add_option("--config,-c", config_path, "Flat JSON run config")->required();
  train->add_option("--threads", threads, "Worker threads (default 1)")->check(CLI::PositiveNumber);
  train->add_option("--out,-o", out, "Output directory (overrides output.dir)");

  auto* predict = app.add_subcommand("predict", "Segment and label documents");
  predict->add_option("--model,-m", model_path, "Model file")->required();
  predict->add_option("--input,-i", input, "Documents (WikiSection JSON)")->required();
  predict->add_option("--strategy,-s", strategy, "nl, max, emd or bemd (default bemd)");
  predict->add_option("--config,-c", config_path, "Run config for segmentation settings");
  predict->add_option("--out,-o", out, "Predictions file (default stdout)");
  predict->add_option("--name", name, "Model name recorded in the predictions");
  predict->add_option("--threads", threads, "Worker threads (default 1)")->check(CLI::PositiveNumber);

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold documents");
  evaluate->add_option("--gold,-g", gold_path, "Gold documents (WikiSection JSON)")->required();
  evaluate->add_option("--predictions,-p", predictions_path, "Predictions file")->required();
  evaluate->add_option("--dataset", dataset, "Dataset name for the report");
  evaluate->add_option("--out,-o", out, "Write the JSON report here instead of stdout");

  auto* plot = app.add_subcommand("plot-deviation", "Per-sentence deviation curves as CSV");
  plot->add_option("--model,-m", model_path, "Model file")->required();
  plot->add_option("--input,-i", input, "Documents (WikiSection JSON)")->required();
  plot->add_option("--doc", doc_id, "Document id (default: first document)");
  plot->add_option("--config,-c", config_path, "Run config for segmentation settings");
  plot->add_option("--strategy,-s", strategy, "Strategy for the predicted-boundary column");
  plot->add_option("--out,-o", out, "Deviation CSV")->required();
  plot->add_option("--heatmap", heatmap, "Sentence x label score CSV");

  auto* normalize = app.add_subcommand("normalize-headings", "Cluster headings into topic labels");
  normalize->add_option("--headings", headings_path, "TSV: heading, count")->required();
  normalize->add_option("--lexicon", lexicon_path, "TSV: lemma, synset id, primary lemma")->required();
  normalize->add_option("--out,-o", out, "Output directory")->required();

  SyntheticConfig synth_config;
  uint64_t synth_seed = synth_config.seed;
  bool newlines = true;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth->add_option("--out,-o", out, "Output file (WikiSection JSON)")->required();
  synth->add_option("--docs", synth_config.doc_count, "Number of documents");
  synth->add_option("--topics", synth_config.topic_count, "Number of topics");
  synth->add_option("--vocab", synth_config.vocab_size, "Vocabulary size");
  synth->add_option("--concentration", synth_config.concentration,
                    "Dirichlet concentration for overlapping vocabularies");
  synth->add_flag("--overlap{false},--disjoint{true}", synth_config.disjoint_vocab,
                  "Overlapping or disjoint topic vocabularies (default disjoint)");
  synth->add_flag("--newlines{true},--no-newlines{false}", newlines,
                  "Mark segment ends with newlines (default on)");
  auto* seed_option = synth->add_option("--seed", synth_seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kUsage);
  }

  try {
    if (*train) return CmdTrain(config_path, threads, out);
    if (*predict) {
      return CmdPredict(model_path, input, strategy, config_path, out, name, threads);
    }
    if (*evaluate) return CmdEvaluate(gold_path, predictions_path, dataset, out);
    if (*plot) {
      return CmdPlotDeviation(model_path, input, doc_id, config_path, strategy, out,
                              heatmap);
    }
    if (*normalize) return CmdNormalize(headings_path, lexicon_path, out);
    if (*synth) {
      synth_config.seed = synth_seed;
      synth_config.newline_after_segment = newlines;
      return CmdSynth(synth_config, seed_option->count() > 0, out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kData);
  }
  return static_cast<int>(ErrorKind::kUsage);
}

int RunCli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("sector");
  for (const auto& a : args) argv.push_back(a.c_str());
  return RunCli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sector
