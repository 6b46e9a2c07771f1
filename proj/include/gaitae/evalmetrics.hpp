#pragma once

// One-class evaluation. Abnormal is the positive class and a score at or
// above the threshold is called abnormal.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace gaitae {

enum class Label { normal, abnormal };

std::string_view label_name(Label l);
Label parse_label(std::string_view name);

struct LabeledScore {
  double score = 0.0;  // higher = more abnormal
  Label label = Label::normal;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // +inf for the (0, 0) origin
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) ... (1,1), fpr nondecreasing
  double auc = 0.0;
  double eer = 0.0;
  double eer_threshold = 0.0;
};

// Sweeps the distinct score values from high to low. AUC is the trapezoidal
// area; EER is interpolated linearly between the two ROC points bracketing
// fpr == 1 - tpr, and eer_threshold is the score threshold of whichever
// bracketing point is closer to equal error.
RocCurve roc(std::span<const LabeledScore> scores);

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
};

ConfusionCounts confusion_at(std::span<const LabeledScore> scores, double threshold);

struct MetricReport {
  double auc = 0.0;
  double eer = 0.0;
  double threshold = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
  ConfusionCounts counts;
  bool precision_undefined = false;  // tp + fp == 0, precision reported as 0
  bool f1_undefined = false;         // precision + sensitivity == 0, f1 reported as 0
};

// Rates and F1 from raw counts; auc/eer/threshold are left at zero.
MetricReport metrics_from_counts(const ConfusionCounts& c);

MetricReport report_at_eer(const RocCurve& curve, std::span<const LabeledScore> scores);

// Convenience: roc() followed by report_at_eer().
MetricReport evaluate(std::span<const LabeledScore> scores);

nlohmann::json to_json(const MetricReport& r);

struct NamedReport {
  std::string name;
  MetricReport report;
};

// Aligned text table with AUC, EER, sensitivity, specificity, precision,
// accuracy and F1 columns.
std::string format_report_table(std::span<const NamedReport> rows);

// CSV with header `fpr,tpr,threshold`.
std::string roc_to_csv(const RocCurve& curve);

}  // namespace gaitae
