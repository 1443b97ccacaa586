#pragma once

#include <cmath>
#include <vector>

#include "vhed/common.hpp"

namespace vhed {

// positive outcome = label 1 (hemorrhage)
struct MetricsReport {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double sensitivity = 0, specificity = 0, accuracy = 0;
  bool sensitivity_defined = true;
  bool specificity_defined = true;
  int n_runs = 1;
  double mean_accuracy = 0, std_accuracy = 0;
  bool degenerate_std = false;  // single run

  long total() const { return tp + fp + tn + fn; }
};

inline MetricsReport compute_metrics(const std::vector<int>& predictions,
                                     const std::vector<int>& labels) {
  require(predictions.size() == labels.size(), "compute_metrics: length mismatch");
  require(!predictions.empty(), "compute_metrics: empty input");
  MetricsReport r;
  for (size_t i = 0; i < labels.size(); ++i) {
    require((predictions[i] == 0 || predictions[i] == 1) && (labels[i] == 0 || labels[i] == 1),
            "compute_metrics: entries must be binary");
    if (labels[i] == 1)
      (predictions[i] == 1 ? r.tp : r.fn)++;
    else
      (predictions[i] == 0 ? r.tn : r.fp)++;
  }
  if (r.tp + r.fn > 0) {
    r.sensitivity = static_cast<double>(r.tp) / (r.tp + r.fn);
  } else {
    r.sensitivity = std::nan("");
    r.sensitivity_defined = false;
  }
  if (r.tn + r.fp > 0) {
    r.specificity = static_cast<double>(r.tn) / (r.tn + r.fp);
  } else {
    r.specificity = std::nan("");
    r.specificity_defined = false;
  }
  r.accuracy = static_cast<double>(r.tp + r.tn) / r.total();
  r.mean_accuracy = r.accuracy;
  r.std_accuracy = 0;
  r.degenerate_std = true;
  return r;
}

// mean / sample std (n-1) of the accuracy over repeated trainings; counts summed
inline MetricsReport aggregate_runs(const std::vector<MetricsReport>& runs) {
  require(!runs.empty(), "aggregate_runs: empty run list");
  MetricsReport out;
  out.n_runs = static_cast<int>(runs.size());
  double mean = 0;
  for (const auto& r : runs) {
    out.tp += r.tp;
    out.fp += r.fp;
    out.tn += r.tn;
    out.fn += r.fn;
    mean += r.accuracy;
  }
  mean /= runs.size();
  double var = 0;
  if (runs.size() > 1) {
    for (const auto& r : runs) var += (r.accuracy - mean) * (r.accuracy - mean);
    var /= (runs.size() - 1);
  }
  out.mean_accuracy = mean;
  out.std_accuracy = std::sqrt(var);
  out.degenerate_std = runs.size() == 1;
  if (out.tp + out.fn > 0)
    out.sensitivity = static_cast<double>(out.tp) / (out.tp + out.fn);
  else {
    out.sensitivity = std::nan("");
    out.sensitivity_defined = false;
  }
  if (out.tn + out.fp > 0)
    out.specificity = static_cast<double>(out.tn) / (out.tn + out.fp);
  else {
    out.specificity = std::nan("");
    out.specificity_defined = false;
  }
  out.accuracy = static_cast<double>(out.tp + out.tn) / out.total();
  return out;
}

}  // namespace vhed
