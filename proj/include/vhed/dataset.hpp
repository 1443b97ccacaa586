#pragma once

#include <atomic>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "vhed/cgo.hpp"
#include "vhed/fem.hpp"
#include "vhed/nn/tensor.hpp"
#include "vhed/phantom.hpp"
#include "vhed/windowed.hpp"

namespace vhed {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- raw little-endian float64 payloads (row-major; complex as re,im pairs) --

inline void write_doubles(const fs::path& path, const double* data, size_t count) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require_data(f.good(), "cannot open for write: " + path.string());
  f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
  require_data(f.good(), "short write: " + path.string());
}

inline std::vector<double> read_doubles(const fs::path& path, size_t expected_count) {
  std::ifstream f(path, std::ios::binary);
  require_data(f.good(), "missing binary file: " + path.string());
  std::vector<double> v(expected_count);
  f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(expected_count * sizeof(double)));
  require_data(static_cast<size_t>(f.gcount()) == expected_count * sizeof(double),
               "short read: " + path.string());
  return v;
}

inline std::vector<double> mat_to_rowmajor(const Mat& m) {
  std::vector<double> v(static_cast<size_t>(m.rows()) * m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = m(i, j);
  return v;
}

inline Mat rowmajor_to_mat(const std::vector<double>& v, int rows, int cols) {
  require_data(v.size() == static_cast<size_t>(rows) * cols, "payload shape mismatch");
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = v[static_cast<size_t>(i) * cols + j];
  return m;
}

inline std::vector<double> cmat_to_pairs(const CMat& m) {
  std::vector<double> v(2 * static_cast<size_t>(m.rows()) * m.cols());
  size_t o = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      v[o++] = m(i, j).real();
      v[o++] = m(i, j).imag();
    }
  return v;
}

inline CMat pairs_to_cmat(const std::vector<double>& v, int rows, int cols) {
  require_data(v.size() == 2 * static_cast<size_t>(rows) * cols, "complex payload shape mismatch");
  CMat m(rows, cols);
  size_t o = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      m(i, j) = complexd(v[o], v[o + 1]);
      o += 2;
    }
  return m;
}

// ---- phantom <-> json --------------------------------------------------------

inline json to_json(const Inclusion& inc) {
  json j;
  j["shape"] = inc.shape == Inclusion::Shape::circle    ? "circle"
               : inc.shape == Inclusion::Shape::ellipse ? "ellipse"
                                                        : "star";
  j["center"] = {inc.cx, inc.cy};
  j["r"] = inc.r;
  j["ax"] = inc.ax;
  j["ay"] = inc.ay;
  j["rot"] = inc.rot;
  j["harm_amp"] = inc.harm_amp;
  j["harm_phase"] = inc.harm_phase;
  j["conductivity"] = inc.conductivity;
  return j;
}

inline Inclusion inclusion_from_json(const json& j) {
  Inclusion inc;
  std::string s = j.at("shape");
  inc.shape = s == "circle" ? Inclusion::Shape::circle
              : s == "ellipse" ? Inclusion::Shape::ellipse
                               : Inclusion::Shape::star;
  inc.cx = j.at("center")[0];
  inc.cy = j.at("center")[1];
  inc.r = j.at("r");
  inc.ax = j.at("ax");
  inc.ay = j.at("ay");
  inc.rot = j.at("rot");
  for (int i = 0; i < 4; ++i) {
    inc.harm_amp[i] = j.at("harm_amp")[i];
    inc.harm_phase[i] = j.at("harm_phase")[i];
  }
  inc.conductivity = j.at("conductivity");
  return inc;
}

inline json to_json(const Phantom& p) {
  json j;
  j["seed"] = p.seed;
  j["label"] = static_cast<int>(p.label);
  j["scalp_conductivity"] = p.scalp_conductivity;
  j["skull"] = {{"outer_ax", p.skull.outer_ax}, {"outer_ay", p.skull.outer_ay},
                {"rotation", p.skull.rotation}, {"width", p.skull.width},
                {"conductivity", p.skull.conductivity}};
  j["brain"] = {{"lo", p.brain.lo}, {"hi", p.brain.hi}, {"base", p.brain.base}};
  json bumps = json::array();
  for (const auto& b : p.brain.bumps)
    bumps.push_back({{"cx", b.cx}, {"cy", b.cy}, {"width", b.width}, {"amp", b.amp}});
  j["brain"]["bumps"] = bumps;
  json incs = json::array();
  for (const auto& inc : p.inclusions) incs.push_back(to_json(inc));
  j["inclusions"] = incs;
  return j;
}

inline Phantom phantom_from_json(const json& j) {
  Phantom p;
  p.seed = j.at("seed");
  p.label = static_cast<StrokeLabel>(j.at("label").get<int>());
  p.scalp_conductivity = j.at("scalp_conductivity");
  p.skull.outer_ax = j.at("skull").at("outer_ax");
  p.skull.outer_ay = j.at("skull").at("outer_ay");
  p.skull.rotation = j.at("skull").at("rotation");
  p.skull.width = j.at("skull").at("width");
  p.skull.conductivity = j.at("skull").at("conductivity");
  p.brain.lo = j.at("brain").at("lo");
  p.brain.hi = j.at("brain").at("hi");
  p.brain.base = j.at("brain").at("base");
  for (const auto& b : j.at("brain").at("bumps"))
    p.brain.bumps.push_back({b.at("cx"), b.at("cy"), b.at("width"), b.at("amp")});
  for (const auto& inc : j.at("inclusions")) p.inclusions.push_back(inclusion_from_json(inc));
  return p;
}

// ---- generation config -------------------------------------------------------

enum class NoiseTarget { dn, nd };

struct GenerateConfig {
  InclusionRegime regime = InclusionRegime::circular;
  int n = 0;
  std::uint64_t master_seed = 1;
  int mesh_level = 5;
  std::vector<double> deltas;  // extra noise levels; a clean (delta=0) pass is always present
  NoiseTarget noise_target = NoiseTarget::dn;
  WindowSpec window;
  double phi = 0.0;
  int n_tau = 33;
  int n_t = 256;
  double t_max = 2.0;
  CgoConfig cgo;
  int workers = 0;  // 0: hardware_concurrency
  bool keep_traces = true;

  std::vector<double> all_deltas() const {
    std::vector<double> d{0.0};
    for (double x : deltas)
      if (x != 0.0) d.push_back(x);
    return d;
  }
};

inline json to_json(const GenerateConfig& c) {
  json j;
  j["regime"] = to_string(c.regime);
  j["master_seed"] = c.master_seed;
  j["mesh_level"] = c.mesh_level;
  j["deltas"] = c.all_deltas();
  j["noise_target"] = c.noise_target == NoiseTarget::dn ? "dn" : "nd";
  j["window"] = {{"R", c.window.r}, {"a_R", c.window.a_r}};
  j["phi"] = c.phi;
  j["n_tau"] = c.n_tau;
  j["n_t"] = c.n_t;
  j["t_max"] = c.t_max;
  j["n_theta"] = c.cgo.n_theta;
  j["max_freq"] = c.cgo.max_freq;
  j["n_quad"] = c.cgo.n_quad;
  j["keep_traces"] = c.keep_traces;
  return j;
}

// ---- per-sample pipeline (in memory) ------------------------------------------

struct SampleArtifacts {
  Phantom phantom;
  BoundaryMatrix dn_clean;
  // one entry per delta (index aligned with GenerateConfig::all_deltas())
  std::vector<BoundaryMatrix> dn;
  std::vector<CgoTrace> traces;
  std::vector<VhedProfile> profiles;
  std::vector<FeatureVector> fcnn_features;
  std::vector<std::uint64_t> noise_seeds;
};

inline std::uint64_t sample_seed_for(std::uint64_t master, int index) {
  return derive_seed(master, static_cast<std::uint64_t>(index));
}

inline SampleArtifacts run_sample_pipeline(const GenerateConfig& cfg, int index, const Mesh& mesh,
                                           const Mat& reference_nd) {
  PhantomConfig pc = PhantomConfig::for_regime(cfg.regime);
  pc.label = (index % 2 == 0) ? StrokeLabel::ischemic : StrokeLabel::hemorrhagic;
  SampleArtifacts art;
  art.phantom = sample_phantom(pc, sample_seed_for(cfg.master_seed, index));

  BoundaryMatrix nd = assemble_nd(art.phantom, mesh, reference_nd);
  art.dn_clean = nd_to_dn(nd);

  Vec tau = default_tau_grid(cfg.window.r, cfg.n_tau);
  Vec tg = Vec::LinSpaced(cfg.n_t, -cfg.t_max, cfg.t_max);
  auto deltas = cfg.all_deltas();
  for (size_t d = 0; d < deltas.size(); ++d) {
    std::uint64_t noise_seed =
        deltas[d] == 0 ? 0 : derive_seed(art.phantom.seed, 1000 + static_cast<std::uint64_t>(d));
    art.noise_seeds.push_back(noise_seed);
    BoundaryMatrix dn_d;
    if (deltas[d] == 0) {
      dn_d = art.dn_clean;
    } else if (cfg.noise_target == NoiseTarget::dn) {
      dn_d = add_noise(art.dn_clean, deltas[d], noise_seed);
    } else {
      BoundaryMatrix nd_noisy = add_noise(nd, deltas[d], noise_seed);
      dn_d = nd_to_dn(nd_noisy);
      dn_d.noise_delta = deltas[d];
    }
    CgoOperators ops = build_hilbert(dn_d, cfg.cgo);
    CgoTrace trace = trace_grid(ops, tau, cfg.phi);
    VhedProfile prof = windowed_ft(trace, cfg.window, tg);
    art.fcnn_features.push_back(make_features(prof, FeatureLayout::fcnn_1024));
    art.dn.push_back(std::move(dn_d));
    art.traces.push_back(std::move(trace));
    art.profiles.push_back(std::move(prof));
  }
  return art;
}

// ---- dataset writer / reader ---------------------------------------------------

struct GenerateOutcome {
  int generated = 0;
  int skipped = 0;
};

namespace detail {

inline std::string artifact_name(const char* kind, int delta_idx) {
  return std::string(kind) + "_" + std::to_string(delta_idx);
}

inline std::string sample_file(int index, const char* kind, int delta_idx) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "bin/s%06d_%s_%d.bin", index, kind, delta_idx);
  return buf;
}

inline void write_manifest_atomic(const fs::path& dir, const json& manifest) {
  fs::path tmp = dir / "manifest.json.tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    require_data(f.good(), "cannot write manifest in " + dir.string());
    f << manifest.dump(1) << "\n";
  }
  fs::rename(tmp, dir / "manifest.json");
}

inline json config_fingerprint(const json& cfg) {
  json c = cfg;
  c.erase("keep_traces");  // does not affect generated numbers
  return c;
}

}  // namespace detail

// each artifact's cache identity: the inputs that fully determine its bytes
inline std::uint64_t artifact_cache_key(std::uint64_t phantom_seed, int mesh_level, double delta,
                                        std::uint64_t noise_seed, const WindowSpec& w) {
  std::uint64_t h = splitmix64(phantom_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(mesh_level));
  std::uint64_t bits;
  static_assert(sizeof(double) == sizeof(std::uint64_t));
  std::memcpy(&bits, &delta, 8);
  h = splitmix64(h ^ bits);
  h = splitmix64(h ^ noise_seed);
  std::memcpy(&bits, &w.r, 8);
  h = splitmix64(h ^ bits);
  std::memcpy(&bits, &w.a_r, 8);
  h = splitmix64(h ^ bits);
  return h;
}

inline GenerateOutcome generate_dataset(const GenerateConfig& cfg, const fs::path& out_dir,
                                        std::function<void(int, int)> progress = {}) {
  fs::create_directories(out_dir / "bin");
  json manifest;
  fs::path mpath = out_dir / "manifest.json";
  json cfg_json = to_json(cfg);
  if (fs::exists(mpath)) {
    std::ifstream f(mpath);
    manifest = json::parse(f);
    require_data(detail::config_fingerprint(manifest.at("config")) ==
                     detail::config_fingerprint(cfg_json),
                 "generate: existing dataset at " + out_dir.string() +
                     " was produced with a different config (no silent mixing)");
  } else {
    manifest["schema_version"] = 1;
    manifest["kind"] = "vhed-dataset";
    manifest["config"] = cfg_json;
    manifest["samples"] = json::array();
  }
  manifest["config"]["n"] = std::max<int>(cfg.n, manifest["config"].value("n", 0));

  std::map<int, json> existing;
  for (const auto& s : manifest.at("samples")) existing[s.at("index").get<int>()] = s;

  auto complete = [&](int idx) {
    auto it = existing.find(idx);
    if (it == existing.end()) return false;
    for (const auto& [name, a] : it->second.at("artifacts").items()) {
      fs::path p = out_dir / a.at("file").get<std::string>();
      if (!fs::exists(p) || fs::file_size(p) != a.at("bytes").get<std::uintmax_t>()) return false;
    }
    return true;
  };

  std::vector<int> todo;
  int skipped = 0;
  for (int i = 0; i < cfg.n; ++i)
    complete(i) ? static_cast<void>(++skipped) : todo.push_back(i);

  if (todo.empty()) {
    detail::write_manifest_atomic(out_dir, manifest);
    return {0, skipped};
  }

  Mesh mesh = build_mesh(cfg.mesh_level);
  Mat reference = nd_reference_raw(mesh);
  auto deltas = cfg.all_deltas();

  std::mutex write_mutex;
  std::atomic<size_t> next{0};
  std::atomic<int> done{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      size_t slot = next.fetch_add(1);
      if (slot >= todo.size()) return;
      int index = todo[slot];
      try {
        SampleArtifacts art = run_sample_pipeline(cfg, index, mesh, reference);
        json rec;
        rec["index"] = index;
        rec["seed"] = art.phantom.seed;
        rec["label"] = static_cast<int>(art.phantom.label);
        rec["phantom"] = to_json(art.phantom);
        json arts = json::object();
        auto put = [&](const std::string& name, const std::string& file,
                       const std::vector<double>& payload, std::vector<int> shape,
                       const char* dtype, int delta_idx) {
          write_doubles(out_dir / file, payload.data(), payload.size());
          json a;
          a["file"] = file;
          a["bytes"] = payload.size() * sizeof(double);
          a["shape"] = shape;
          a["dtype"] = dtype;
          a["delta"] = deltas[delta_idx];
          a["noise_seed"] = art.noise_seeds[delta_idx];
          a["cache_key"] = artifact_cache_key(art.phantom.seed, cfg.mesh_level, deltas[delta_idx],
                                              art.noise_seeds[delta_idx], cfg.window);
          arts[name] = a;
        };
        for (size_t d = 0; d < deltas.size(); ++d) {
          int di = static_cast<int>(d);
          put(detail::artifact_name("dn", di), detail::sample_file(index, "dn", di),
              mat_to_rowmajor(art.dn[d].entries), {33, 33}, "f64", di);
          if (cfg.keep_traces) {
            CMat both(art.traces[d].omega_plus.rows() * 2, art.traces[d].omega_plus.cols());
            both << art.traces[d].omega_plus, art.traces[d].omega_minus;
            put(detail::artifact_name("trace", di), detail::sample_file(index, "trace", di),
                cmat_to_pairs(both), {2, cfg.cgo.n_theta, cfg.n_tau}, "c128", di);
          }
          put(detail::artifact_name("vhed", di), detail::sample_file(index, "vhed", di),
              cmat_to_pairs(art.profiles[d].hat_diff), {cfg.cgo.n_theta, cfg.n_t}, "c128", di);
          std::vector<double> fv(art.fcnn_features[d].values.data(),
                                 art.fcnn_features[d].values.data() +
                                     art.fcnn_features[d].values.size());
          put(detail::artifact_name("fcnn", di), detail::sample_file(index, "fcnn", di), fv,
              {static_cast<int>(fv.size())}, "f64", di);
        }
        std::lock_guard<std::mutex> lock(write_mutex);
        existing[index] = rec;
        manifest["samples"] = json::array();
        for (const auto& [i, r] : existing) manifest["samples"].push_back(r);
        detail::write_manifest_atomic(out_dir, manifest);
        int d2 = ++done;
        if (progress) progress(d2, static_cast<int>(todo.size()));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(todo.size());
        return;
      }
    }
  };

  int n_workers = cfg.workers > 0 ? cfg.workers
                                  : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min<int>(n_workers, static_cast<int>(todo.size()));
  std::vector<std::thread> pool;
  for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return {static_cast<int>(todo.size()), skipped};
}

class DatasetReader {
 public:
  explicit DatasetReader(const fs::path& dir) : dir_(dir) {
    fs::path mpath = dir / "manifest.json";
    require_data(fs::exists(mpath), "missing manifest: " + mpath.string());
    std::ifstream f(mpath);
    manifest_ = json::parse(f);
    require_data(manifest_.value("kind", "") == "vhed-dataset",
                 "not a dataset manifest: " + mpath.string());
    for (const auto& s : manifest_.at("samples")) samples_.push_back(s);
    for (const auto& s : samples_) {
      int label = s.at("label");
      require_data(label == 0 || label == 1, "manifest label outside {0,1}");
      for (const auto& [name, a] : s.at("artifacts").items()) {
        fs::path p = dir / a.at("file").get<std::string>();
        require_data(fs::exists(p), "manifest references missing file: " + p.string());
        require_data(fs::file_size(p) == a.at("bytes").get<std::uintmax_t>(),
                     "file length mismatch: " + p.string());
      }
    }
  }

  int n_samples() const { return static_cast<int>(samples_.size()); }
  const json& manifest() const { return manifest_; }
  const json& sample(int i) const { return samples_.at(i); }

  std::vector<double> deltas() const {
    return manifest_.at("config").at("deltas").get<std::vector<double>>();
  }

  int delta_index(double delta) const {
    auto d = deltas();
    for (size_t i = 0; i < d.size(); ++i)
      if (std::abs(d[i] - delta) <= 1e-15 + 1e-9 * std::abs(delta)) return static_cast<int>(i);
    std::string have;
    for (double x : d) have += std::to_string(x) + " ";
    throw data_error("dataset has no noise level " + std::to_string(delta) + " (available: " + have + ")");
  }

  std::vector<int> labels() const {
    std::vector<int> y;
    y.reserve(samples_.size());
    for (const auto& s : samples_) y.push_back(s.at("label").get<int>());
    return y;
  }

  std::vector<double> load_payload(int sample, const std::string& artifact) const {
    const json& a = artifact_json(sample, artifact);
    size_t count = a.at("bytes").get<size_t>() / sizeof(double);
    return read_doubles(dir_ / a.at("file").get<std::string>(), count);
  }

  Mat load_dn(int sample, int delta_idx) const {
    return rowmajor_to_mat(load_payload(sample, detail::artifact_name("dn", delta_idx)), 33, 33);
  }

  CMat load_vhed_diff(int sample, int delta_idx) const {
    const json& cfg = manifest_.at("config");
    return pairs_to_cmat(load_payload(sample, detail::artifact_name("vhed", delta_idx)),
                         cfg.at("n_theta"), cfg.at("n_t"));
  }

  Vec load_fcnn_features(int sample, int delta_idx) const {
    auto v = load_payload(sample, detail::artifact_name("fcnn", delta_idx));
    return Eigen::Map<Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  // FCNN design matrices: rows are samples
  Mat feature_matrix(FeatureLayout layout, double delta) const {
    int di = delta_index(delta);
    require_data(layout == FeatureLayout::dn_1024 || layout == FeatureLayout::fcnn_1024,
                 std::string("feature_matrix supports vector layouts, got ") + to_string(layout));
    Mat x;
    for (int s = 0; s < n_samples(); ++s) {
      Vec row;
      if (layout == FeatureLayout::dn_1024) {
        BoundaryMatrix dn{MatrixKind::DN, load_dn(s, di), 0.0};
        row = make_features(dn, layout).values;
      } else {
        row = load_fcnn_features(s, di);
      }
      if (x.size() == 0) x.resize(n_samples(), row.size());
      x.row(s) = row.transpose();
    }
    return x;
  }

  // CNN image batches
  nn::Batch image_batch(FeatureLayout layout, double delta) const {
    int di = delta_index(delta);
    require_data(layout == FeatureLayout::dn_33x33 || layout == FeatureLayout::cnn_128x256,
                 std::string("image_batch supports image layouts, got ") + to_string(layout));
    nn::Batch batch;
    batch.reserve(n_samples());
    for (int s = 0; s < n_samples(); ++s) {
      FeatureVector f;
      if (layout == FeatureLayout::dn_33x33) {
        BoundaryMatrix dn{MatrixKind::DN, load_dn(s, di), 0.0};
        f = make_features(dn, layout);
      } else {
        VhedProfile p;
        p.hat_diff = load_vhed_diff(s, di);
        p.hat_plus = p.hat_diff;
        p.hat_minus = CMat::Zero(p.hat_diff.rows(), p.hat_diff.cols());
        f = make_features(p, layout);
      }
      nn::Tensor3 t(f.rows, f.cols, 1);
      for (int i = 0; i < f.rows; ++i)
        for (int j = 0; j < f.cols; ++j) t(i, j, 0) = f.values[static_cast<Eigen::Index>(i) * f.cols + j];
      batch.push_back(std::move(t));
    }
    return batch;
  }

 private:
  const json& artifact_json(int sample, const std::string& artifact) const {
    const json& s = samples_.at(sample);
    require_data(s.at("artifacts").contains(artifact),
                 "sample " + std::to_string(sample) + " lacks artifact " + artifact);
    return s.at("artifacts").at(artifact);
  }

  fs::path dir_;
  json manifest_;
  std::vector<json> samples_;
};

// ---- trained-model persistence -------------------------------------------------

struct SavedFcnnModel {
  nn::FcnnModel model;
  FeatureLayout input_layout = FeatureLayout::fcnn_1024;
  double delta = 0.0;
  json meta;
};

inline void save_fcnn_model(const SavedFcnnModel& m, const fs::path& prefix) {
  json j;
  j["kind"] = "fcnn-model";
  j["input_layout"] = to_string(m.input_layout);
  j["delta"] = m.delta;
  j["hidden"] = m.model.params.hidden_dim();
  j["input_dim"] = m.model.params.input_dim();
  j["standardized"] = m.model.feat_shift.size() > 0;
  j["meta"] = m.meta;
  std::vector<double> blob;
  Vec packed = m.model.params.pack();
  blob.insert(blob.end(), packed.data(), packed.data() + packed.size());
  blob.insert(blob.end(), m.model.feat_shift.data(), m.model.feat_shift.data() + m.model.feat_shift.size());
  blob.insert(blob.end(), m.model.feat_scale.data(), m.model.feat_scale.data() + m.model.feat_scale.size());
  j["payload_doubles"] = blob.size();
  fs::create_directories(prefix.parent_path().empty() ? "." : prefix.parent_path());
  {
    std::ofstream f(prefix.string() + ".json", std::ios::trunc);
    require_data(f.good(), "cannot write model descriptor " + prefix.string() + ".json");
    f << j.dump(1) << "\n";
  }
  write_doubles(prefix.string() + ".bin", blob.data(), blob.size());
}

inline SavedFcnnModel load_fcnn_model(const fs::path& prefix) {
  std::ifstream f(prefix.string() + ".json");
  require_data(f.good(), "missing model descriptor " + prefix.string() + ".json");
  json j = json::parse(f);
  require_data(j.value("kind", "") == "fcnn-model", "not an fcnn model: " + prefix.string());
  SavedFcnnModel m;
  m.input_layout = layout_from_string(j.at("input_layout"));
  m.delta = j.at("delta");
  m.meta = j.value("meta", json::object());
  int hidden = j.at("hidden"), in_dim = j.at("input_dim");
  bool standardized = j.at("standardized");
  size_t count = j.at("payload_doubles");
  auto blob = read_doubles(prefix.string() + ".bin", count);
  Eigen::Index n_params = nn::FcnnParams::zeros(in_dim, hidden).parameter_count();
  Vec packed = Eigen::Map<Vec>(blob.data(), n_params);
  m.model.params = nn::FcnnParams::unpack(packed, in_dim, hidden);
  if (standardized) {
    m.model.feat_shift = Eigen::Map<Vec>(blob.data() + n_params, in_dim);
    m.model.feat_scale = Eigen::Map<Vec>(blob.data() + n_params + in_dim, in_dim);
  }
  return m;
}

}  // namespace vhed
