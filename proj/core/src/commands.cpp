#include "olidtk/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <thread>

#include "olidtk/errors.hpp"
#include "olidtk/rng.hpp"

namespace olidtk {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  return out;
}

// TSV report plus a JSON twin, both starting with the same metadata.
void write_report_files(const ordered_json& meta, const EvalReport& rep,
                        const std::string& tsv_path) {
  std::string meta_line = "#";
  for (const auto& [key, value] : meta.items()) {
    meta_line += " " + key + "=";
    meta_line += value.is_string() ? value.get<std::string>() : value.dump();
  }
  {
    std::ofstream out = open_out(tsv_path);
    out << meta_line << "\n" << report_tsv(rep);
  }
  std::string json_path = tsv_path;
  if (json_path.size() >= 4 && json_path.ends_with(".tsv"))
    json_path.replace(json_path.size() - 4, 4, ".json");
  else
    json_path += ".json";
  ordered_json doc;
  doc["meta"] = meta;
  doc["report"] = ordered_json::parse(report_json(rep));
  std::ofstream out = open_out(json_path);
  out << doc.dump(2) << "\n";
}

bool is_punct_or_tag(const std::string& token) {
  if (token == "." || token == "," || token == "?" || token == "!") return true;
  return token == std::string(kUserTag) || token == std::string(kAllcapsTag);
}

}  // namespace

void cmd_explore(const ExploreOptions& options, std::ostream& out) {
  if (options.top_k < 1) throw ConfigError("top-k must be >= 1");
  const std::vector<LabeledExample> data = load_olid(options.data_path);
  const EmojiMap emojis =
      options.emoji_map_path ? EmojiMap::load(*options.emoji_map_path) : EmojiMap::builtin();
  const std::set<std::string> stoplist =
      options.stoplist_path ? load_stopwords(*options.stoplist_path) : builtin_stopwords();

  const std::vector<TaskInstance> instances = task_subset(data, options.task);
  const std::vector<std::string>& classes = task_classes(options.task);

  out << "# olidtk explore task=" << task_name(options.task) << " data=" << options.data_path
      << "\n";
  out << "rows\t" << instances.size() << "\n";
  for (const ClassStat& stat : class_distribution(data, options.task))
    out << "class\t" << stat.label << "\t" << stat.count << "\t" << fixed(stat.fraction, 6)
        << "\n";

  // Class-conditional token frequencies over cleaned text, stopwords and
  // punctuation excluded.
  std::vector<std::map<std::string, long long>> freq(classes.size());
  std::vector<long long> token_totals(classes.size(), 0);
  std::vector<long long> row_totals(classes.size(), 0);
  for (const TaskInstance& ti : instances) {
    const TokenSeq tokens = preprocess_pipeline(ti.text, emojis);
    token_totals[static_cast<size_t>(ti.label)] += static_cast<long long>(tokens.size());
    row_totals[static_cast<size_t>(ti.label)]++;
    for (const std::string& token : remove_stopwords(tokens, stoplist))
      if (!is_punct_or_tag(token)) freq[static_cast<size_t>(ti.label)][token]++;
  }
  for (size_t c = 0; c < classes.size(); ++c) {
    if (row_totals[c] == 0) continue;
    out << "avg_tokens\t" << classes[c] << "\t"
        << fixed(static_cast<double>(token_totals[c]) / static_cast<double>(row_totals[c]), 2)
        << "\n";
  }
  for (size_t c = 0; c < classes.size(); ++c) {
    std::vector<std::pair<std::string, long long>> items(freq[c].begin(), freq[c].end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    const size_t k = std::min(items.size(), static_cast<size_t>(options.top_k));
    for (size_t i = 0; i < k; ++i)
      out << "top\t" << classes[c] << "\t" << items[i].first << "\t" << items[i].second << "\n";
  }
}

void cmd_train(const TrainOptions& options, std::ostream& log) {
  const std::vector<LabeledExample> data = load_olid(options.data_path);
  std::vector<LabeledExample> external;
  if (options.external_test_path) external = load_olid(*options.external_test_path);

  RunResult result = run_training(options.config, data,
                                  options.external_test_path ? &external : nullptr, &log);
  save_artifact(result.artifact, options.model_out);
  log << "model written to " << options.model_out << "\n";

  if (options.report_out) {
    ordered_json meta;
    meta["command"] = "train";
    meta["task"] = task_name(options.config.task);
    meta["model"] = options.config.model;
    meta["features"] = options.config.features;
    meta["sampling"] = options.config.sampling;
    meta["seed"] = options.config.seed;
    write_report_files(meta, result.report, *options.report_out);
    log << "report written to " << *options.report_out << "\n";
  }
}

void cmd_evaluate(const EvaluateOptions& options, std::ostream& out) {
  const ModelArtifact artifact = load_artifact(options.model_path);
  const RunConfig recorded = parse_run_config(artifact.config_echo);
  const std::vector<LabeledExample> data = load_olid(options.data_path);

  std::vector<TaskInstance> instances = task_subset(data, artifact.task);
  if (options.use_recorded_split)
    instances = split_train_test(instances, recorded.split).second;
  if (instances.empty()) throw EmptyCorpus("no evaluation rows for this task");

  std::vector<int> y_true, y_pred;
  y_true.reserve(instances.size());
  y_pred.reserve(instances.size());
  for (const TaskInstance& ti : instances) {
    y_true.push_back(ti.label);
    y_pred.push_back(artifact.predict(ti.text));
  }
  const EvalReport rep = report(y_true, y_pred, artifact.classes);

  ordered_json meta;
  meta["command"] = "evaluate";
  meta["model"] = options.model_path;
  meta["data"] = options.data_path;
  meta["task"] = task_name(artifact.task);
  meta["split_test"] = options.use_recorded_split;
  meta["seed"] = recorded.seed;

  std::string meta_line = "#";
  for (const auto& [key, value] : meta.items()) {
    meta_line += " " + key + "=";
    meta_line += value.is_string() ? value.get<std::string>() : value.dump();
  }
  out << meta_line << "\n" << report_tsv(rep);
  if (options.out_prefix) write_report_files(meta, rep, *options.out_prefix + ".tsv");
}

void cmd_predict(const PredictOptions& options, std::ostream& out) {
  if (!options.text && !options.input_path)
    throw ConfigError("predict needs --text or --input");
  const ModelArtifact artifact = load_artifact(options.model_path);

  std::vector<std::string> texts;
  if (options.text) texts.push_back(*options.text);
  if (options.input_path) {
    std::ifstream in(*options.input_path, std::ios::binary);
    if (!in) throw DataError("cannot open input file '" + *options.input_path + "'");
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      texts.push_back(line);
    }
  }

  out << "# olidtk predict model=" << options.model_path << " task=" << task_name(artifact.task)
      << "\n";
  out << "label\tprobability\ttext\n";
  for (const std::string& text : texts) {
    std::optional<double> prob;
    const int label = artifact.predict(text, &prob);
    out << artifact.classes[static_cast<size_t>(label)] << "\t"
        << (prob ? fixed(*prob, 6) : std::string("-")) << "\t" << text << "\n";
  }
}

void cmd_experiment(const ExperimentOptions& options, std::ostream& out, std::ostream& err) {
  if (options.parallel < 1) throw ConfigError("--parallel must be >= 1");

  ordered_json grid_doc;
  try {
    grid_doc = ordered_json::parse(read_text_file(options.grid_config_path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad experiment config: ") + e.what());
  }
  if (!grid_doc.is_object()) throw ConfigError("experiment config must be a JSON object");

  std::vector<std::string> models, features, sampling;
  if (grid_doc.contains("grid")) {
    const ordered_json grid = grid_doc["grid"];
    grid_doc.erase("grid");
    try {
      if (grid.contains("models")) models = grid["models"].get<std::vector<std::string>>();
      if (grid.contains("features")) features = grid["features"].get<std::vector<std::string>>();
      if (grid.contains("sampling")) sampling = grid["sampling"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad grid lists: ") + e.what());
    }
  }
  const RunConfig base = parse_run_config(grid_doc.dump());
  if (models.empty()) models = {base.model};
  if (features.empty()) features = {base.features};
  if (sampling.empty()) sampling = {base.sampling};

  struct Row {
    RunConfig config;
    std::string name;
    bool ok = false;
    bool skipped = false;
    std::string error;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
  };
  std::vector<Row> rows;
  size_t index = 0;
  for (const std::string& m : models)
    for (const std::string& f : features)
      for (const std::string& s : sampling) {
        Row row;
        row.config = base;
        row.config.model = m;
        row.config.features = f;
        row.config.sampling = s;
        // Independent stream per run; the split settings stay shared so every
        // run sees the same folds.
        row.config.seed = mix_seed(base.seed, index);
        char tag[32];
        std::snprintf(tag, sizeof(tag), "run_%03zu", index);
        row.name = std::string(tag) + "_" + m + "_" + f + "_" + s;
        rows.push_back(std::move(row));
        ++index;
      }

  std::filesystem::create_directories(options.out_dir);
  const std::vector<LabeledExample> data = load_olid(options.data_path);

  std::mutex err_mutex;
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      Row& row = rows[i];
      const std::string prefix = options.out_dir + "/" + row.name;
      // Infeasible combinations are expected inside a cross product; they
      // become NA rows rather than failures.
      try {
        row.config.validate();
      } catch (const ConfigError& e) {
        row.skipped = true;
        row.error = e.what();
        std::lock_guard<std::mutex> lock(err_mutex);
        err << row.name << ": skipped: " << e.what() << "\n";
        continue;
      }
      try {
        std::ofstream log = open_out(prefix + ".log");
        RunResult result = run_training(row.config, data, nullptr, &log);
        save_artifact(result.artifact, prefix + ".model");
        ordered_json meta;
        meta["command"] = "experiment";
        meta["run"] = row.name;
        meta["task"] = task_name(row.config.task);
        meta["model"] = row.config.model;
        meta["features"] = row.config.features;
        meta["sampling"] = row.config.sampling;
        meta["seed"] = row.config.seed;
        write_report_files(meta, result.report, prefix + ".tsv");
        row.ok = true;
        row.accuracy = result.report.accuracy;
        row.macro_f1 = result.report.macro_f1;
        std::lock_guard<std::mutex> lock(err_mutex);
        err << row.name << ": accuracy " << fixed(row.accuracy, 4) << ", macro f1 "
            << fixed(row.macro_f1, 4) << "\n";
      } catch (const std::exception& e) {
        row.error = e.what();
        std::lock_guard<std::mutex> lock(err_mutex);
        err << row.name << ": failed: " << e.what() << "\n";
      }
    }
  };
  if (options.parallel == 1 || rows.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    const size_t n_threads = std::min(static_cast<size_t>(options.parallel), rows.size());
    threads.reserve(n_threads);
    for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  static const std::map<std::string, std::string> data_names = {{"none", "original"},
                                                                {"undersample", "undersampled"},
                                                                {"oversample", "oversampled"},
                                                                {"smote", "smote"}};
  std::ostringstream table;
  table << "# olidtk experiment task=" << task_name(base.task) << " data=" << options.data_path
        << " seed=" << base.seed << " split_seed=" << base.split.seed << " train_fraction="
        << fixed(base.split.train_fraction, 2) << "\n";
  table << "model\tdata\tfeatures\taccuracy\tf1_macro\n";
  for (const Row& row : rows) {
    table << row.config.model << "\t" << data_names.at(row.config.sampling) << "\t"
          << row.config.features << "\t";
    if (row.ok)
      table << fixed(row.accuracy, 4) << "\t" << fixed(row.macro_f1, 4) << "\n";
    else
      table << "NA\tNA\n";
  }
  out << table.str();
  std::ofstream table_file = open_out(options.out_dir + "/results.tsv");
  table_file << table.str();
}

}  // namespace olidtk
