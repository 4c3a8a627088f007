#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace olidtk {

// Hierarchical OLID labels. Enum order doubles as the class-id order used
// for stratification tie-breaks and for prediction tie-breaks.
enum class LabelA { NOT = 0, OFF = 1 };
enum class LabelB { TIN = 0, UNT = 1 };
enum class LabelC { IND = 0, GRP = 1, OTH = 2 };

enum class TaskId { A, B, C };

TaskId parse_task(const std::string& name);  // "a" | "b" | "c", case-insensitive
std::string task_name(TaskId task);
// Class label names for a task, in class-id order.
const std::vector<std::string>& task_classes(TaskId task);

struct LabeledExample {
  std::string id;
  std::string text;
  LabelA label_a = LabelA::NOT;
  std::optional<LabelB> label_b;  // present iff label_a == OFF
  std::optional<LabelC> label_c;  // present iff label_b == TIN
};

// One row of a task-specific view of the corpus.
struct TaskInstance {
  std::string id;
  std::string text;
  int label = 0;  // index into task_classes(task)
};

struct SplitSpec {
  double train_fraction = 0.8;
  uint64_t seed = 0;
  bool stratified = true;
};

// Reads an OLID TSV file: header line, then rows of
// id <TAB> tweet <TAB> subtask_a <TAB> subtask_b <TAB> subtask_c
// with the literal string NULL for absent labels. Throws MalformedRow,
// UnknownLabel or HierarchyViolation with the offending line number.
std::vector<LabeledExample> load_olid(const std::string& path);
std::vector<LabeledExample> parse_olid(std::istream& in, const std::string& source_name);

// Task A keeps every example; B keeps OFF examples; C keeps TIN examples.
std::vector<TaskInstance> task_subset(const std::vector<LabeledExample>& examples, TaskId task);

// Deterministic, disjoint, exhaustive partition. Stratified splits allocate
// per-class train counts by the largest-remainder method (ties broken by
// class id) so each class proportion is preserved within one example.
std::pair<std::vector<TaskInstance>, std::vector<TaskInstance>> split_train_test(
    const std::vector<TaskInstance>& items, const SplitSpec& spec);

struct ClassStat {
  std::string label;
  size_t count = 0;
  double fraction = 0.0;
};

// Per-class counts and fractions for the given task's subset, in class-id
// order; classes absent from the data are omitted.
std::vector<ClassStat> class_distribution(const std::vector<LabeledExample>& examples,
                                          TaskId task);

}  // namespace olidtk
