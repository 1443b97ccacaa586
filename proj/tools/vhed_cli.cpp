// batch CLI for the stroke-EIT VHED pipeline: dataset generation, training,
// evaluation, report tables, and figure-data diagnostics
#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "vhed/dataset.hpp"
#include "vhed/experiment.hpp"

using namespace vhed;

namespace {

fs::path resolve_out(const std::string& out) {
  if (!out.empty()) return out;
  const char* root = std::getenv("VHED_DATA_ROOT");
  require_data(root != nullptr, "no --out given and VHED_DATA_ROOT is not set");
  return fs::path(root);
}

std::vector<double> parse_deltas(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

Phantom unit_disc_phantom() {
  Phantom p;
  p.skull.conductivity = 1.0;
  p.skull.width = 0.035;
  p.brain.lo = p.brain.hi = p.brain.base = 1.0;
  return p;
}

int cmd_generate(const std::string& regime, int n, std::uint64_t seed, const std::string& deltas,
                 int mesh_level, const std::string& out, int workers,
                 const std::string& noise_target, bool drop_traces) {
  GenerateConfig cfg;
  cfg.regime = regime_from_string(regime);
  cfg.n = n;
  cfg.master_seed = seed;
  cfg.deltas = parse_deltas(deltas);
  cfg.mesh_level = mesh_level;
  cfg.noise_target = noise_target == "nd" ? NoiseTarget::nd : NoiseTarget::dn;
  cfg.workers = workers;
  cfg.keep_traces = !drop_traces;
  fs::path dir = resolve_out(out);
  auto t0 = std::chrono::steady_clock::now();
  GenerateOutcome res = generate_dataset(cfg, dir, [&](int done, int total) {
    std::cerr << "\rgenerated " << done << "/" << total << std::flush;
  });
  if (res.generated > 0) std::cerr << "\n";
  auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "dataset " << dir.string() << ": " << res.generated << " generated, "
            << res.skipped << " reused (" << std::fixed << std::setprecision(1) << secs
            << " s)\n";
  return 0;
}

int cmd_train(const std::string& manifest, const std::string& network, const std::string& input,
              double delta, const std::string& out, std::uint64_t seed, int hidden, int iters,
              const std::string& optimizer) {
  require_data(network == "fcnn", "cmd_train: only --network fcnn produces a standalone model; "
                                  "use `report --experiment` for CNN cross-validation runs");
  DatasetReader reader(manifest);
  InputKind kind = input_from_string(input);
  Mat x = reader.feature_matrix(vector_layout(kind), delta);
  std::vector<int> yl = reader.labels();
  Vec y(yl.size());
  for (size_t i = 0; i < yl.size(); ++i) y[static_cast<Eigen::Index>(i)] = yl[i];

  nn::FcnnTrainConfig tc;
  tc.hidden = hidden;
  tc.max_epochs = iters;
  tc.seed = seed;
  tc.optimizer = optimizer == "adam" ? nn::Optimizer::adam : nn::Optimizer::scg;
  auto res = nn::train_fcnn(x, y, tc);

  SavedFcnnModel sm;
  sm.model = res.model;
  sm.input_layout = vector_layout(kind);
  sm.delta = delta;
  sm.meta = {{"train_manifest", manifest}, {"seed", seed}, {"iterations", res.iterations},
             {"final_loss", res.final_loss}, {"optimizer", optimizer}};
  save_fcnn_model(sm, resolve_out(out));
  std::cout << "model " << out << ": " << res.iterations << " iterations, final training loss "
            << res.final_loss << "\n";
  return 0;
}

int cmd_eval(const std::string& model_prefix, const std::string& manifest,
             const std::string& input, double delta_flag, bool has_delta,
             const std::string& out) {
  SavedFcnnModel sm = load_fcnn_model(model_prefix);
  if (!input.empty()) {
    FeatureLayout requested = vector_layout(input_from_string(input));
    require_data(requested == sm.input_layout,
                 std::string("feature-layout mismatch: model expects ") +
                     to_string(sm.input_layout) + " but eval requested " + to_string(requested));
  }
  double delta = has_delta ? delta_flag : sm.delta;
  DatasetReader reader(manifest);
  Mat x = reader.feature_matrix(sm.input_layout, delta);
  MetricsReport r = compute_metrics(sm.model.predict(x), reader.labels());

  json cell;
  cell["regime"] = reader.manifest().at("config").at("regime");
  cell["input"] = sm.input_layout == FeatureLayout::dn_1024 ? "dn" : "vhed";
  cell["delta"] = delta;
  cell["noise_label"] = delta_label(delta);
  cell["sensitivity"] = r.sensitivity;
  cell["specificity"] = r.specificity;
  cell["accuracy"] = r.accuracy;
  cell["mean_accuracy"] = r.accuracy;
  cell["std_accuracy"] = 0.0;
  cell["n_runs"] = 1;
  cell["counts"] = {{"tp", r.tp}, {"fp", r.fp}, {"tn", r.tn}, {"fn", r.fn}};

  std::cout << "sensitivity " << r.sensitivity << "  specificity " << r.specificity
            << "  accuracy " << r.accuracy << "\n";
  if (!out.empty()) {
    fs::path path = out;
    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::trunc);
    require_data(f.good(), "cannot write " + path.string());
    f << cell.dump(1) << "\n";
  }
  return 0;
}

int cmd_report_collate(const std::string& eval_dir) {
  std::vector<json> cells;
  for (const auto& e : fs::directory_iterator(eval_dir)) {
    if (e.path().extension() != ".json") continue;
    std::ifstream f(e.path());
    json j = json::parse(f, nullptr, true, true);
    if (j.contains("accuracy") && j.contains("regime")) cells.push_back(j);
  }
  require_data(!cells.empty(), "no metric records (*.json) found in " + eval_dir);

  std::vector<std::string> regimes;
  for (const auto& c : cells) {
    std::string r = c.at("regime");
    if (std::find(regimes.begin(), regimes.end(), r) == regimes.end()) regimes.push_back(r);
  }
  for (const auto& regime : regimes) {
    std::cout << regime << " inclusions\n";
    std::cout << std::left << std::setw(8) << "input" << std::setw(10) << "noise" << std::setw(13)
              << "sensitivity" << std::setw(13) << "specificity" << std::setw(10) << "accuracy"
              << std::setw(10) << "std" << "\n";
    for (const auto& c : cells) {
      if (c.at("regime") != regime) continue;
      std::cout << std::left << std::setw(8) << c.at("input").get<std::string>() << std::setw(10)
                << c.at("noise_label").get<std::string>() << std::fixed << std::setprecision(4)
                << std::setw(13) << c.at("sensitivity").get<double>() << std::setw(13)
                << c.at("specificity").get<double>() << std::setw(10)
                << c.at("mean_accuracy").get<double>() << std::setw(10)
                << c.at("std_accuracy").get<double>() << "\n";
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_report_experiment(const std::string& spec_path, const std::string& out) {
  std::ifstream f(spec_path);
  require_data(f.good(), "cannot read experiment spec " + spec_path);
  json j = json::parse(f, nullptr, true, true);

  ExperimentSpec spec;
  spec.train_dir = j.at("train_dir").get<std::string>();
  for (const auto& [regime, dir] : j.at("test_sets").items())
    spec.test_sets.emplace_back(regime, dir.get<std::string>());
  spec.network = network_from_string(j.value("network", "fcnn"));
  spec.inputs.clear();
  for (const auto& s : j.value("inputs", std::vector<std::string>{"dn", "vhed"}))
    spec.inputs.push_back(input_from_string(s));
  spec.deltas = j.value("deltas", std::vector<double>{0.0});
  spec.runs = j.value("runs", 20);
  spec.seed = j.value("seed", 1);
  spec.fcnn.hidden = j.value("hidden", 30);
  spec.fcnn.max_epochs = j.value("iterations", 300);
  spec.cnn.epochs = j.value("cnn_epochs", 10);
  spec.cnn.batch_size = j.value("cnn_batch", 60);

  auto cells = run_experiment(spec, &std::cerr);
  if (cells.empty()) {
    std::cout << "(no test regimes; empty table)\n";
    return 0;
  }
  std::string title = std::string(to_string(spec.network)) +
                      (spec.network == NetworkKind::fcnn
                           ? " (" + std::to_string(spec.runs) + " trainings)"
                           : " (5-fold)");
  std::vector<std::string> regimes;
  for (const auto& c : cells)
    if (std::find(regimes.begin(), regimes.end(), c.regime) == regimes.end())
      regimes.push_back(c.regime);
  for (const auto& r : regimes) std::cout << format_regime_table(title, cells, r) << "\n";
  std::cout << format_stats_table(cells);

  if (!out.empty()) {
    fs::path dir = out;
    fs::create_directories(dir);
    int i = 0;
    for (const auto& c : cells) {
      std::ofstream of(dir / ("cell_" + std::to_string(i++) + ".json"), std::ios::trunc);
      of << cell_to_json(c).dump(1) << "\n";
    }
  }
  return 0;
}

int cmd_diagnose(std::uint64_t seed, const std::string& regime, bool unit_disc, int mesh_level,
                 double delta, int n_noise, double window_r, double window_a,
                 const std::string& out) {
  fs::path dir = resolve_out(out);
  fs::create_directories(dir);

  Phantom phantom = unit_disc
                        ? unit_disc_phantom()
                        : sample_phantom(PhantomConfig::for_regime(regime_from_string(regime)), seed);
  Mesh mesh = build_mesh(mesh_level);
  BoundaryMatrix dn = nd_to_dn(assemble_nd(phantom, mesh));

  // (a) noise ensemble of Re omega+(1, tau), one column per realization
  Vec tau = default_tau_grid(4.0, 33);
  CgoOperators clean_ops = build_hilbert(dn);
  CgoTrace clean = trace_grid(clean_ops, tau);
  Mat ens(tau.size(), n_noise);
  for (int s = 0; s < n_noise; ++s) {
    BoundaryMatrix noisy = add_noise(dn, delta, derive_seed(seed, 5000 + s));
    CgoTrace tr = trace_grid(build_hilbert(noisy), tau);
    for (int i = 0; i < tau.size(); ++i) ens(i, s) = tr.omega_plus(0, i).real();
  }
  {
    std::ofstream f(dir / "noise_ensemble.dat", std::ios::trunc);
    f << "# tau  re_omega_plus_clean(z=1)  then " << n_noise << " noisy realizations at delta="
      << delta << "\n";
    for (int i = 0; i < tau.size(); ++i) {
      f << std::setprecision(12) << tau[i] << " " << clean.omega_plus(0, i).real();
      for (int s = 0; s < n_noise; ++s) f << " " << ens(i, s);
      f << "\n";
    }
  }

  // (b) window comparison: default R=4 profile vs the requested wide window
  Vec tg = default_t_grid();
  VhedProfile p4 = windowed_ft(clean, WindowSpec{4.0, 0.35}, tg);

  WindowSpec wide{window_r, window_a};
  int n_wide = static_cast<int>(std::lround(2 * window_r / 0.25)) + 1;
  Vec tau_wide = default_tau_grid(window_r, n_wide);
  CgoConfig wide_cfg;
  wide_cfg.max_abs_k = window_r;
  CgoOperators wide_ops = build_hilbert(dn, wide_cfg);
  CgoTrace wide_trace;
  wide_trace.tau_grid = tau_wide;
  wide_trace.phi = 0.0;
  wide_trace.omega_plus = CMat::Zero(wide_cfg.n_theta, n_wide);
  wide_trace.omega_minus = CMat::Zero(wide_cfg.n_theta, n_wide);
  int failed = 0;
  for (int i = 0; i < n_wide; ++i) {
    if (tau_wide[i] == 0) continue;
    try {
      BieSolution s = solve_bie(wide_ops, complexd(tau_wide[i], 0.0));
      wide_trace.omega_plus.col(i) = s.omega_plus;
      wide_trace.omega_minus.col(i) = s.omega_minus;
    } catch (const numerical_error&) {
      ++failed;
      wide_trace.omega_plus.col(i).setConstant(std::nan(""));
      wide_trace.omega_minus.col(i).setConstant(std::nan(""));
    }
  }
  if (failed > 0)
    std::cerr << "warning: " << failed << "/" << n_wide << " BIE solves did not converge at large "
              << "|tau| (exponential conditioning); NaN columns emitted\n";
  VhedProfile pw = windowed_ft(wide_trace, wide, tg);
  {
    std::ofstream f(dir / "window_profiles.dat", std::ios::trunc);
    f << "# t  re4 im4 (R=4, a=0.35)  re_wide im_wide (R=" << window_r << ", a=" << window_a
      << ") of diff profile at z=1\n";
    for (int i = 0; i < tg.size(); ++i)
      f << std::setprecision(12) << tg[i] << " " << p4.hat_diff(0, i).real() << " "
        << p4.hat_diff(0, i).imag() << " " << pw.hat_diff(0, i).real() << " "
        << pw.hat_diff(0, i).imag() << "\n";
  }
  {
    std::ofstream f(dir / "window_values.dat", std::ios::trunc);
    f << "# tau  W_{0.35}(tau)  W_{" << window_a << "}(tau)\n";
    for (int i = 0; i < tau_wide.size(); ++i)
      f << std::setprecision(12) << tau_wide[i] << " " << WindowSpec{4.0, 0.35}.weight(tau_wide[i])
        << " " << wide.weight(tau_wide[i]) << "\n";
  }
  std::cout << "diagnostic data written to " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stroke-EIT pipeline: DN matrices, VHED features, classification"};
  app.require_subcommand(1);

  // generate
  std::string regime = "circular", deltas = "", out, noise_target = "dn";
  int n = 0, mesh_level = 5, workers = 0;
  std::uint64_t seed = 1;
  bool drop_traces = false;
  auto* gen = app.add_subcommand("generate", "simulate phantoms and persist DN/CGO/VHED artifacts");
  gen->add_option("--regime", regime, "circular|elliptic|irregular|multiple")->capture_default_str();
  gen->add_option("--n", n, "number of samples")->required();
  gen->add_option("--seed", seed, "master seed")->capture_default_str();
  gen->add_option("--deltas", deltas, "extra relative noise levels, comma separated (clean always kept)");
  gen->add_option("--mesh-level", mesh_level, "refinement level (elements = 8*4^level)")->capture_default_str();
  gen->add_option("--out", out, "output dataset directory (default $VHED_DATA_ROOT)");
  gen->add_option("--workers", workers, "worker threads (0 = hardware)")->capture_default_str();
  gen->add_option("--noise-target", noise_target, "dn|nd: matrix the noise is applied to")->capture_default_str();
  gen->add_flag("--no-traces", drop_traces, "do not persist CGO traces");

  // train
  std::string t_manifest, t_network = "fcnn", t_input = "vhed", t_out, t_optimizer = "scg";
  double t_delta = 0.0;
  int t_hidden = 30, t_iters = 300;
  std::uint64_t t_seed = 1;
  auto* tr = app.add_subcommand("train", "train a classifier on a generated dataset");
  tr->add_option("--manifest", t_manifest, "training dataset directory")->required();
  tr->add_option("--network", t_network, "fcnn|cnn")->capture_default_str();
  tr->add_option("--input", t_input, "dn|vhed")->capture_default_str();
  tr->add_option("--delta", t_delta, "noise level of the training features")->capture_default_str();
  tr->add_option("--out", t_out, "model path prefix")->required();
  tr->add_option("--seed", t_seed, "training seed")->capture_default_str();
  tr->add_option("--hidden", t_hidden, "FCNN hidden width")->capture_default_str();
  tr->add_option("--iters", t_iters, "optimizer iterations/epochs")->capture_default_str();
  tr->add_option("--optimizer", t_optimizer, "scg|adam")->capture_default_str();

  // eval
  std::string e_model, e_manifest, e_input, e_out;
  double e_delta = 0.0;
  auto* ev = app.add_subcommand("eval", "evaluate a trained model on a dataset");
  ev->add_option("--model", e_model, "model path prefix")->required();
  ev->add_option("--manifest", e_manifest, "test dataset directory")->required();
  ev->add_option("--input", e_input, "dn|vhed (checked against the model)");
  auto* e_delta_opt = ev->add_option("--delta", e_delta, "noise level (default: model's)");
  ev->add_option("--out", e_out, "metrics record (json) to write");

  // report
  std::string r_eval_dir, r_experiment, r_out;
  auto* rp = app.add_subcommand("report", "tabulate metrics records or run a full experiment grid");
  rp->add_option("--eval-dir", r_eval_dir, "directory of metrics records to collate");
  rp->add_option("--experiment", r_experiment, "experiment spec (json) to execute");
  rp->add_option("--out", r_out, "directory for per-cell records (experiment mode)");

  // diagnose
  std::string d_regime = "circular", d_out;
  std::uint64_t d_seed = 1;
  int d_mesh = 5, d_noise = 10;
  double d_delta = 1e-3, d_wr = 60.0, d_wa = 0.0019;
  bool d_unit = false;
  auto* dg = app.add_subcommand("diagnose", "emit figure data: noise ensembles and window comparison");
  dg->add_option("--seed", d_seed, "phantom seed")->capture_default_str();
  dg->add_option("--regime", d_regime, "phantom regime")->capture_default_str();
  dg->add_flag("--unit-disc", d_unit, "use the sigma=1 phantom");
  dg->add_option("--mesh-level", d_mesh, "mesh refinement level")->capture_default_str();
  dg->add_option("--delta", d_delta, "noise level for the ensemble")->capture_default_str();
  dg->add_option("--noise-seeds", d_noise, "number of noise realizations")->capture_default_str();
  dg->add_option("--window-R", d_wr, "wide-window cutoff for the comparison")->capture_default_str();
  dg->add_option("--window-a", d_wa, "wide-window Gaussian parameter")->capture_default_str();
  dg->add_option("--out", d_out, "output directory (default $VHED_DATA_ROOT)");

  try {
    app.parse(argc, argv);
    if (gen->parsed())
      return cmd_generate(regime, n, seed, deltas, mesh_level, out, workers, noise_target,
                          drop_traces);
    if (tr->parsed())
      return cmd_train(t_manifest, t_network, t_input, t_delta, t_out, t_seed, t_hidden, t_iters,
                       t_optimizer);
    if (ev->parsed())
      return cmd_eval(e_model, e_manifest, e_input, e_delta, e_delta_opt->count() > 0, e_out);
    if (rp->parsed()) {
      require_data(!r_eval_dir.empty() || !r_experiment.empty(),
                   "report needs --eval-dir or --experiment");
      return r_experiment.empty() ? cmd_report_collate(r_eval_dir)
                                  : cmd_report_experiment(r_experiment, r_out);
    }
    if (dg->parsed())
      return cmd_diagnose(d_seed, d_regime, d_unit, d_mesh, d_delta, d_noise, d_wr, d_wa, d_out);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors -> 1, --help -> 0
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
