#pragma once

#include <string>
#include <vector>

namespace olidtk {

// Rows are actual classes, columns predicted.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<long long>> counts;

  long long total() const;
  long long trace() const;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                 const std::vector<std::string>& classes);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// p = TP/(TP+FP), r = TP/(TP+FN), f1 = 2pr/(p+r); every 0/0 is defined as 0.
ClassMetrics precision_recall_f1(const ConfusionMatrix& cm, int class_index);

double accuracy(const ConfusionMatrix& cm);

struct EvalReport {
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  double macro_f1 = 0.0;  // unweighted mean of per-class F1
  ConfusionMatrix confusion;
};

EvalReport report(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                  const std::vector<std::string>& classes);

// TSV rendering: a metrics block followed by the confusion matrix.
std::string report_tsv(const EvalReport& rep);
// The same fields as a JSON document.
std::string report_json(const EvalReport& rep);

}  // namespace olidtk
