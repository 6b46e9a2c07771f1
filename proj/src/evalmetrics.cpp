#include "gaitae/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gaitae/error.hpp"
#include "gaitae/model_io.hpp"

namespace gaitae {

std::string_view label_name(Label l) { return l == Label::normal ? "normal" : "abnormal"; }

Label parse_label(std::string_view name) {
  if (name == "normal") return Label::normal;
  if (name == "abnormal") return Label::abnormal;
  throw Error(ErrorKind::parse, "unknown label: " + std::string(name));
}

RocCurve roc(std::span<const LabeledScore> scores) {
  std::size_t positives = 0;
  for (const auto& s : scores) {
    if (!std::isfinite(s.score)) throw Error(ErrorKind::argument, "non-finite score");
    if (s.label == Label::abnormal) ++positives;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorKind::argument, "ROC needs at least one normal and one abnormal score");
  }

  std::vector<LabeledScore> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledScore& a, const LabeledScore& b) { return a.score > b.score; });

  RocCurve c;
  c.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double t = sorted[i].score;
    for (; i < sorted.size() && sorted[i].score == t; ++i) {
      (sorted[i].label == Label::abnormal ? tp : fp) += 1;
    }
    c.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                        static_cast<double>(tp) / static_cast<double>(positives), t});
  }

  for (std::size_t i = 1; i < c.points.size(); ++i) {
    const RocPoint& a = c.points[i - 1];
    const RocPoint& b = c.points[i];
    c.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }

  // d = fpr - (1 - tpr) goes from -1 at the origin to +1 at (1, 1).
  auto gap = [](const RocPoint& p) { return p.fpr - (1.0 - p.tpr); };
  std::size_t k = 1;
  while (gap(c.points[k]) < 0.0) ++k;
  const RocPoint& lo = c.points[k - 1];
  const RocPoint& hi = c.points[k];
  const double d_lo = gap(lo);
  const double d_hi = gap(hi);
  if (d_hi == 0.0) {
    c.eer = hi.fpr;
  } else {
    const double alpha = -d_lo / (d_hi - d_lo);
    c.eer = lo.fpr + alpha * (hi.fpr - lo.fpr);
  }
  // The origin carries no finite threshold; fall back to its neighbour.
  const bool use_lo = k - 1 > 0 && std::abs(d_lo) < std::abs(d_hi);
  c.eer_threshold = use_lo ? lo.threshold : hi.threshold;
  return c;
}

ConfusionCounts confusion_at(std::span<const LabeledScore> scores, double threshold) {
  ConfusionCounts c;
  for (const auto& s : scores) {
    const bool called_abnormal = s.score >= threshold;
    if (s.label == Label::abnormal) {
      (called_abnormal ? c.tp : c.fn) += 1;
    } else {
      (called_abnormal ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

MetricReport metrics_from_counts(const ConfusionCounts& c) {
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  MetricReport r;
  r.counts = c;
  r.sensitivity = ratio(c.tp, c.tp + c.fn);
  r.specificity = ratio(c.tn, c.tn + c.fp);
  r.precision_undefined = c.tp + c.fp == 0;
  r.precision = ratio(c.tp, c.tp + c.fp);
  r.accuracy = ratio(c.tp + c.tn, c.tp + c.tn + c.fp + c.fn);
  r.f1_undefined = r.precision + r.sensitivity == 0.0;
  r.f1 = r.f1_undefined ? 0.0 : 2.0 * r.precision * r.sensitivity / (r.precision + r.sensitivity);
  return r;
}

MetricReport report_at_eer(const RocCurve& curve, std::span<const LabeledScore> scores) {
  if (curve.points.size() < 2) throw Error(ErrorKind::argument, "ROC curve has no points");
  MetricReport r = metrics_from_counts(confusion_at(scores, curve.eer_threshold));
  r.auc = curve.auc;
  r.eer = curve.eer;
  r.threshold = curve.eer_threshold;
  return r;
}

MetricReport evaluate(std::span<const LabeledScore> scores) {
  return report_at_eer(roc(scores), scores);
}

nlohmann::json to_json(const MetricReport& r) {
  return nlohmann::json{
      {"auc", r.auc},
      {"eer", r.eer},
      {"threshold", r.threshold},
      {"sensitivity", r.sensitivity},
      {"specificity", r.specificity},
      {"precision", r.precision},
      {"accuracy", r.accuracy},
      {"f1", r.f1},
      {"tp", r.counts.tp},
      {"fp", r.counts.fp},
      {"tn", r.counts.tn},
      {"fn", r.counts.fn},
      {"precision_undefined", r.precision_undefined},
      {"f1_undefined", r.f1_undefined},
  };
}

std::string format_report_table(std::span<const NamedReport> rows) {
  std::size_t name_width = 16;
  for (const auto& row : rows) name_width = std::max(name_width, row.name.size());

  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %7s %7s %11s %11s %9s %8s %8s\n", static_cast<int>(name_width),
                "Index estimation", "AUC", "EER", "Sensitivity", "Specificity", "Precision", "Accuracy",
                "F1-score");
  out += buf;
  out += std::string(name_width + 74, '-') + '\n';
  for (const auto& row : rows) {
    const MetricReport& r = row.report;
    std::snprintf(buf, sizeof buf, "%-*s %7.3f %7.3f %11.3f %11.3f %9.3f %8.3f %8.3f\n",
                  static_cast<int>(name_width), row.name.c_str(), r.auc, r.eer, r.sensitivity, r.specificity,
                  r.precision, r.accuracy, r.f1);
    out += buf;
  }
  return out;
}

std::string roc_to_csv(const RocCurve& curve) {
  std::string out = "fpr,tpr,threshold\n";
  for (const auto& p : curve.points) {
    out += format_double(p.fpr) + ',' + format_double(p.tpr) + ',' +
           (std::isinf(p.threshold) ? std::string("inf") : format_double(p.threshold)) + '\n';
  }
  return out;
}

}  // namespace gaitae
