#pragma once

#include <iomanip>
#include <sstream>

#include "vhed/dataset.hpp"
#include "vhed/metrics.hpp"
#include "vhed/nn/cnn.hpp"
#include "vhed/nn/train.hpp"

namespace vhed {

enum class NetworkKind { fcnn, cnn };

inline const char* to_string(NetworkKind n) { return n == NetworkKind::fcnn ? "fcnn" : "cnn"; }
inline NetworkKind network_from_string(const std::string& s) {
  if (s == "fcnn") return NetworkKind::fcnn;
  if (s == "cnn") return NetworkKind::cnn;
  throw data_error("unknown network kind: " + s);
}

enum class InputKind { dn, vhed };
inline const char* to_string(InputKind k) { return k == InputKind::dn ? "dn" : "vhed"; }
inline InputKind input_from_string(const std::string& s) {
  if (s == "dn") return InputKind::dn;
  if (s == "vhed") return InputKind::vhed;
  throw data_error("unknown input kind: " + s);
}

inline FeatureLayout vector_layout(InputKind k) {
  return k == InputKind::dn ? FeatureLayout::dn_1024 : FeatureLayout::fcnn_1024;
}
inline FeatureLayout image_layout(InputKind k) {
  return k == InputKind::dn ? FeatureLayout::dn_33x33 : FeatureLayout::cnn_128x256;
}

struct ExperimentSpec {
  fs::path train_dir;
  std::vector<std::pair<std::string, fs::path>> test_sets;  // (regime name, dataset dir)
  NetworkKind network = NetworkKind::fcnn;
  std::vector<InputKind> inputs{InputKind::dn, InputKind::vhed};
  std::vector<double> deltas{0.0};
  int runs = 20;
  std::uint64_t seed = 1;
  nn::FcnnTrainConfig fcnn;
  nn::CnnTrainConfig cnn;
};

struct ExperimentCell {
  std::string regime;
  InputKind input = InputKind::dn;
  double delta = 0;
  MetricsReport aggregate;             // over runs (FCNN) or folds (CNN)
  std::vector<MetricsReport> per_run;
};

// noise-free rows keep the paper's "intrinsic numerical error" label
inline std::string delta_label(double delta) {
  if (delta == 0) return "1e-05";
  std::ostringstream os;
  os << std::scientific << std::setprecision(0) << delta;
  return os.str();
}

inline std::vector<ExperimentCell> run_experiment(const ExperimentSpec& spec,
                                                  std::ostream* log = nullptr) {
  std::vector<ExperimentCell> cells;
  if (spec.test_sets.empty()) return cells;
  DatasetReader train(spec.train_dir);
  std::vector<int> y_train = train.labels();

  for (double delta : spec.deltas) {
    for (InputKind input : spec.inputs) {
      if (spec.network == NetworkKind::fcnn) {
        Mat x_train = train.feature_matrix(vector_layout(input), delta);
        Vec yv(y_train.size());
        for (size_t i = 0; i < y_train.size(); ++i) yv[static_cast<Eigen::Index>(i)] = y_train[i];

        std::vector<nn::FcnnModel> models;
        for (int run = 0; run < spec.runs; ++run) {
          nn::FcnnTrainConfig tc = spec.fcnn;
          tc.seed = derive_seed(spec.seed, 7919 * run + 13);
          models.push_back(train_fcnn(x_train, yv, tc).model);
          if (log)
            *log << "trained fcnn input=" << to_string(input) << " delta=" << delta_label(delta)
                 << " run=" << run + 1 << "/" << spec.runs << "\n";
        }
        for (const auto& [regime, dir] : spec.test_sets) {
          DatasetReader test(dir);
          Mat x_test = test.feature_matrix(vector_layout(input), delta);
          std::vector<int> y_test = test.labels();
          ExperimentCell cell;
          cell.regime = regime;
          cell.input = input;
          cell.delta = delta;
          for (const auto& m : models)
            cell.per_run.push_back(compute_metrics(m.predict(x_test), y_test));
          cell.aggregate = aggregate_runs(cell.per_run);
          cells.push_back(std::move(cell));
        }
      } else {
        nn::Batch x_train = train.image_batch(image_layout(input), delta);
        nn::CnnTrainConfig tc = spec.cnn;
        tc.seed = derive_seed(spec.seed, 104729);
        nn::CnnSpec arch = (input == InputKind::dn) ? nn::cnn_dn_spec() : nn::cnn_vhed_spec();
        nn::CnnTrainResult tr = nn::train_cnn(arch, x_train, y_train, tc);
        if (log)
          *log << "trained cnn input=" << to_string(input) << " delta=" << delta_label(delta)
               << " (" << tc.folds << " folds)\n";
        for (const auto& [regime, dir] : spec.test_sets) {
          DatasetReader test(dir);
          nn::Batch x_test = test.image_batch(image_layout(input), delta);
          std::vector<int> y_test = test.labels();
          ExperimentCell cell;
          cell.regime = regime;
          cell.input = input;
          cell.delta = delta;
          for (auto& params : tr.fold_params)
            cell.per_run.push_back(compute_metrics(nn::cnn_predict(params, x_test), y_test));
          cell.aggregate = aggregate_runs(cell.per_run);
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

// plain-text table in the layout of the paper's per-regime tables:
// rows sensitivity/specificity/accuracy, columns (input kind x noise level)
inline std::string format_regime_table(const std::string& title,
                                       const std::vector<ExperimentCell>& cells,
                                       const std::string& regime) {
  std::vector<const ExperimentCell*> dn_cells, vhed_cells;
  for (const auto& c : cells) {
    if (c.regime != regime) continue;
    (c.input == InputKind::dn ? dn_cells : vhed_cells).push_back(&c);
  }
  auto by_delta = [](const ExperimentCell* a, const ExperimentCell* b) {
    return a->delta < b->delta;
  };
  std::sort(dn_cells.begin(), dn_cells.end(), by_delta);
  std::sort(vhed_cells.begin(), vhed_cells.end(), by_delta);

  std::ostringstream os;
  os << title << ": " << regime << " inclusions\n";
  os << std::left << std::setw(14) << "Noise";
  for (auto* c : dn_cells) os << std::setw(10) << ("DN " + delta_label(c->delta));
  for (auto* c : vhed_cells) os << std::setw(10) << ("VHED " + delta_label(c->delta));
  os << "\n";
  auto row = [&](const char* name, auto get) {
    os << std::left << std::setw(14) << name;
    os << std::fixed << std::setprecision(4);
    for (auto* c : dn_cells) os << std::setw(10) << get(*c);
    for (auto* c : vhed_cells) os << std::setw(10) << get(*c);
    os << "\n";
  };
  row("Sensitivity", [](const ExperimentCell& c) { return c.aggregate.sensitivity; });
  row("Specificity", [](const ExperimentCell& c) { return c.aggregate.specificity; });
  row("Accuracy", [](const ExperimentCell& c) { return c.aggregate.mean_accuracy; });
  return os.str();
}

// mean/std summary across regimes, like the paper's aggregate tables
inline std::string format_stats_table(const std::vector<ExperimentCell>& cells) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "Inclusion" << std::setw(10) << "Noise" << std::setw(12)
     << "DN mean" << std::setw(12) << "DN std" << std::setw(12) << "VHED mean" << std::setw(12)
     << "VHED std" << "\n";
  std::vector<std::pair<std::string, double>> keys;
  for (const auto& c : cells) {
    std::pair<std::string, double> k{c.regime, c.delta};
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  for (const auto& [regime, delta] : keys) {
    const ExperimentCell *dn = nullptr, *vh = nullptr;
    for (const auto& c : cells)
      if (c.regime == regime && c.delta == delta)
        (c.input == InputKind::dn ? dn : vh) = &c;
    os << std::left << std::setw(12) << regime << std::setw(10) << delta_label(delta)
       << std::fixed << std::setprecision(4);
    if (dn)
      os << std::setw(12) << dn->aggregate.mean_accuracy << std::setw(12) << dn->aggregate.std_accuracy;
    else
      os << std::setw(12) << "-" << std::setw(12) << "-";
    if (vh)
      os << std::setw(12) << vh->aggregate.mean_accuracy << std::setw(12) << vh->aggregate.std_accuracy;
    else
      os << std::setw(12) << "-" << std::setw(12) << "-";
    os << "\n";
  }
  return os.str();
}

inline json cell_to_json(const ExperimentCell& c) {
  json j;
  j["regime"] = c.regime;
  j["input"] = to_string(c.input);
  j["delta"] = c.delta;
  j["noise_label"] = delta_label(c.delta);
  j["sensitivity"] = c.aggregate.sensitivity;
  j["specificity"] = c.aggregate.specificity;
  j["accuracy"] = c.aggregate.accuracy;
  j["mean_accuracy"] = c.aggregate.mean_accuracy;
  j["std_accuracy"] = c.aggregate.std_accuracy;
  j["n_runs"] = c.aggregate.n_runs;
  json runs = json::array();
  for (const auto& r : c.per_run)
    runs.push_back({{"tp", r.tp}, {"fp", r.fp}, {"tn", r.tn}, {"fn", r.fn},
                    {"accuracy", r.accuracy}});
  j["runs"] = runs;
  return j;
}

}  // namespace vhed
