#include "olidtk/eval.hpp"

#include <cstdio>
#include <nlohmann/json.hpp>

#include "olidtk/errors.hpp"

namespace olidtk {

namespace {

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

long long ConfusionMatrix::total() const {
  long long t = 0;
  for (const auto& row : counts)
    for (long long v : row) t += v;
  return t;
}

long long ConfusionMatrix::trace() const {
  long long t = 0;
  for (size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
  return t;
}

ConfusionMatrix confusion_matrix(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                 const std::vector<std::string>& classes) {
  if (y_true.size() != y_pred.size())
    throw LengthMismatch("y_true has " + std::to_string(y_true.size()) + " labels, y_pred has " +
                         std::to_string(y_pred.size()));
  const int k = static_cast<int>(classes.size());
  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts.assign(static_cast<size_t>(k), std::vector<long long>(static_cast<size_t>(k), 0));
  for (size_t i = 0; i < y_true.size(); ++i) {
    int t = y_true[i], p = y_pred[i];
    if (t < 0 || t >= k) throw UnknownClass("true label " + std::to_string(t) + " out of range");
    if (p < 0 || p >= k)
      throw UnknownClass("predicted label " + std::to_string(p) + " out of range");
    cm.counts[static_cast<size_t>(t)][static_cast<size_t>(p)]++;
  }
  return cm;
}

ClassMetrics precision_recall_f1(const ConfusionMatrix& cm, int class_index) {
  const size_t c = static_cast<size_t>(class_index);
  long long tp = cm.counts[c][c];
  long long fp = 0, fn = 0;
  for (size_t r = 0; r < cm.counts.size(); ++r) {
    if (r == c) continue;
    fp += cm.counts[r][c];
    fn += cm.counts[c][r];
  }
  ClassMetrics m;
  m.precision = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  m.recall = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

double accuracy(const ConfusionMatrix& cm) {
  long long total = cm.total();
  if (total == 0) throw EmptyMatrix("accuracy of an empty confusion matrix is undefined");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

EvalReport report(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                  const std::vector<std::string>& classes) {
  EvalReport rep;
  rep.confusion = confusion_matrix(y_true, y_pred, classes);
  rep.accuracy = accuracy(rep.confusion);
  double f1_sum = 0.0;
  for (size_t c = 0; c < classes.size(); ++c) {
    rep.per_class.push_back(precision_recall_f1(rep.confusion, static_cast<int>(c)));
    f1_sum += rep.per_class.back().f1;
  }
  rep.macro_f1 = classes.empty() ? 0.0 : f1_sum / static_cast<double>(classes.size());
  return rep;
}

std::string report_tsv(const EvalReport& rep) {
  std::string out;
  out += "metric\tclass\tvalue\n";
  out += "accuracy\t\t" + fmt6(rep.accuracy) + "\n";
  for (size_t c = 0; c < rep.confusion.classes.size(); ++c) {
    const std::string& name = rep.confusion.classes[c];
    out += "precision\t" + name + "\t" + fmt6(rep.per_class[c].precision) + "\n";
    out += "recall\t" + name + "\t" + fmt6(rep.per_class[c].recall) + "\n";
    out += "f1\t" + name + "\t" + fmt6(rep.per_class[c].f1) + "\n";
  }
  out += "macro_f1\t\t" + fmt6(rep.macro_f1) + "\n";

  out += "\nconfusion";
  for (const std::string& name : rep.confusion.classes) out += "\tpredicted:" + name;
  out += "\n";
  for (size_t r = 0; r < rep.confusion.classes.size(); ++r) {
    out += "actual:" + rep.confusion.classes[r];
    for (long long v : rep.confusion.counts[r]) out += "\t" + std::to_string(v);
    out += "\n";
  }
  return out;
}

std::string report_json(const EvalReport& rep) {
  nlohmann::ordered_json j;
  j["accuracy"] = rep.accuracy;
  j["macro_f1"] = rep.macro_f1;
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  for (size_t c = 0; c < rep.confusion.classes.size(); ++c) {
    per_class[rep.confusion.classes[c]] = {{"precision", rep.per_class[c].precision},
                                           {"recall", rep.per_class[c].recall},
                                           {"f1", rep.per_class[c].f1}};
  }
  j["per_class"] = per_class;
  j["confusion"] = {{"classes", rep.confusion.classes}, {"counts", rep.confusion.counts}};
  return j.dump(2) + "\n";
}

}  // namespace olidtk
