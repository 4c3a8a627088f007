#include "olidtk/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "olidtk/errors.hpp"
#include "olidtk/rng.hpp"

namespace olidtk {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

bool is_null(const std::string& v) { return v == "NULL"; }

}  // namespace

TaskId parse_task(const std::string& name) {
  if (name.size() == 1) {
    switch (std::tolower(static_cast<unsigned char>(name[0]))) {
      case 'a': return TaskId::A;
      case 'b': return TaskId::B;
      case 'c': return TaskId::C;
    }
  }
  throw ConfigError("unknown task '" + name + "' (expected a, b or c)");
}

std::string task_name(TaskId task) {
  switch (task) {
    case TaskId::A: return "a";
    case TaskId::B: return "b";
    case TaskId::C: return "c";
  }
  return "?";
}

const std::vector<std::string>& task_classes(TaskId task) {
  static const std::vector<std::string> a = {"NOT", "OFF"};
  static const std::vector<std::string> b = {"TIN", "UNT"};
  static const std::vector<std::string> c = {"IND", "GRP", "OTH"};
  switch (task) {
    case TaskId::A: return a;
    case TaskId::B: return b;
    case TaskId::C: return c;
  }
  return a;
}

std::vector<LabeledExample> load_olid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file: " + path);
  return parse_olid(in, path);
}

std::vector<LabeledExample> parse_olid(std::istream& in, const std::string& source_name) {
  std::vector<LabeledExample> examples;
  std::string line;
  size_t line_no = 0;

  // Header is required and skipped; only its shape is checked so renamed
  // columns in other dataset versions still load.
  if (!std::getline(in, line)) throw DataError(source_name + ": empty file, header expected");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split_tabs(line).size() != 5)
    throw MalformedRow(source_name, line_no, "header must have 5 tab-separated columns");

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> f = split_tabs(line);
    if (f.size() != 5)
      throw MalformedRow(source_name, line_no,
                         "expected 5 columns, got " + std::to_string(f.size()));

    LabeledExample ex;
    ex.id = f[0];
    ex.text = f[1];
    if (ex.text.empty()) throw MalformedRow(source_name, line_no, "empty tweet text");

    if (f[2] == "NOT") ex.label_a = LabelA::NOT;
    else if (f[2] == "OFF") ex.label_a = LabelA::OFF;
    else throw UnknownLabel(source_name, line_no, f[2]);

    if (!is_null(f[3])) {
      if (f[3] == "TIN") ex.label_b = LabelB::TIN;
      else if (f[3] == "UNT") ex.label_b = LabelB::UNT;
      else throw UnknownLabel(source_name, line_no, f[3]);
    }
    if (!is_null(f[4])) {
      if (f[4] == "IND") ex.label_c = LabelC::IND;
      else if (f[4] == "GRP") ex.label_c = LabelC::GRP;
      else if (f[4] == "OTH") ex.label_c = LabelC::OTH;
      else throw UnknownLabel(source_name, line_no, f[4]);
    }

    if (ex.label_b.has_value() != (ex.label_a == LabelA::OFF))
      throw HierarchyViolation(source_name, line_no,
                               "subtask_b must be present exactly when subtask_a is OFF");
    if (ex.label_c.has_value() != (ex.label_b.has_value() && *ex.label_b == LabelB::TIN))
      throw HierarchyViolation(source_name, line_no,
                               "subtask_c must be present exactly when subtask_b is TIN");

    examples.push_back(std::move(ex));
  }
  return examples;
}

std::vector<TaskInstance> task_subset(const std::vector<LabeledExample>& examples, TaskId task) {
  std::vector<TaskInstance> out;
  for (const LabeledExample& ex : examples) {
    switch (task) {
      case TaskId::A:
        out.push_back({ex.id, ex.text, static_cast<int>(ex.label_a)});
        break;
      case TaskId::B:
        if (ex.label_b) out.push_back({ex.id, ex.text, static_cast<int>(*ex.label_b)});
        break;
      case TaskId::C:
        if (ex.label_c) out.push_back({ex.id, ex.text, static_cast<int>(*ex.label_c)});
        break;
    }
  }
  return out;
}

std::pair<std::vector<TaskInstance>, std::vector<TaskInstance>> split_train_test(
    const std::vector<TaskInstance>& items, const SplitSpec& spec) {
  if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0)
    throw ConfigError("train_fraction must lie in (0, 1)");

  const size_t n = items.size();
  const size_t n_train_total =
      static_cast<size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
  Rng rng(spec.seed);

  std::vector<size_t> train_idx;
  if (!spec.stratified) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    train_idx.assign(order.begin(), order.begin() + n_train_total);
  } else {
    // Group indices by class, in class-id order.
    std::map<int, std::vector<size_t>> by_class;
    for (size_t i = 0; i < n; ++i) by_class[items[i].label].push_back(i);
    for (const auto& [label, idx] : by_class) {
      if (idx.size() < 2)
        throw TooFewExamples("stratified split needs at least 2 examples per class; class " +
                             std::to_string(label) + " has " + std::to_string(idx.size()));
    }

    // Largest-remainder allocation of the train quota across classes.
    size_t floor_sum = 0;
    std::vector<std::pair<double, int>> remainders;  // (-remainder, class id) for sorting
    std::map<int, size_t> quota;
    for (const auto& [label, idx] : by_class) {
      double exact = spec.train_fraction * static_cast<double>(idx.size());
      size_t fl = static_cast<size_t>(std::floor(exact));
      quota[label] = fl;
      floor_sum += fl;
      remainders.push_back({-(exact - static_cast<double>(fl)), label});
    }
    std::sort(remainders.begin(), remainders.end());
    size_t leftover = n_train_total > floor_sum ? n_train_total - floor_sum : 0;
    for (const auto& [neg_rem, label] : remainders) {
      if (leftover == 0) break;
      if (-neg_rem <= 0.0) break;  // never bump a class past its exact share
      ++quota[label];
      --leftover;
    }

    for (auto& [label, idx] : by_class) {
      rng.shuffle(idx);
      size_t q = std::min(quota[label], idx.size());
      train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + q);
    }
  }

  std::sort(train_idx.begin(), train_idx.end());
  std::vector<TaskInstance> train, test;
  train.reserve(train_idx.size());
  test.reserve(n - train_idx.size());
  size_t next = 0;
  for (size_t i = 0; i < n; ++i) {
    if (next < train_idx.size() && train_idx[next] == i) {
      train.push_back(items[i]);
      ++next;
    } else {
      test.push_back(items[i]);
    }
  }
  return {std::move(train), std::move(test)};
}

std::vector<ClassStat> class_distribution(const std::vector<LabeledExample>& examples,
                                          TaskId task) {
  const std::vector<TaskInstance> subset = task_subset(examples, task);
  const std::vector<std::string>& classes = task_classes(task);
  std::vector<size_t> counts(classes.size(), 0);
  for (const TaskInstance& it : subset) counts[static_cast<size_t>(it.label)]++;

  std::vector<ClassStat> out;
  for (size_t c = 0; c < classes.size(); ++c) {
    if (counts[c] == 0) continue;
    out.push_back({classes[c], counts[c],
                   static_cast<double>(counts[c]) / static_cast<double>(subset.size())});
  }
  return out;
}

}  // namespace olidtk
