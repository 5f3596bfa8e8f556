#include "dpplab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "nlohmann/json.hpp"

#include "dpplab/diffusion.hpp"
#include "dpplab/fredholm.hpp"
#include "dpplab/kernels.hpp"
#include "dpplab/modelc.hpp"
#include "dpplab/sampler.hpp"
#include "dpplab/statistics.hpp"

namespace dpplab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// configuration problems exit with code 2 and write nothing
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError(std::string(what) + ": invalid JSON");
  return j;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Window window_from_json(const json& w) {
  if (!w.is_object() || !w.contains("lo") || !w.contains("hi"))
    throw ValidationError("kernel spec: window must carry lo and hi arrays");
  const json& lo = w["lo"];
  const json& hi = w["hi"];
  if (!lo.is_array() || !hi.is_array() || lo.size() != hi.size() || lo.empty())
    throw ValidationError("kernel spec: window lo/hi must be equal-length arrays");
  Vec l(lo.size()), h(hi.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    l[static_cast<int>(i)] = lo[i].get<double>();
    h[static_cast<int>(i)] = hi[i].get<double>();
  }
  return Window(l, h);
}

Window parse_window_override(const std::string& text) {
  std::vector<double> vals;
  std::istringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  if (vals.size() < 2 || vals.size() % 2 != 0)
    throw ValidationError("--window needs lo,hi pairs, one per axis");
  const int d = static_cast<int>(vals.size() / 2);
  Vec lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = vals[2 * a];
    hi[a] = vals[2 * a + 1];
  }
  return Window(lo, hi);
}

Kernel kernel_from_spec(const json& spec, const Window& w) {
  if (!spec.is_object()) throw ValidationError("kernel spec must be a JSON object");
  const std::string kind = spec.value("kind", "");
  const json params = spec.value("params", json::object());
  if (kind == "sine") return sine_kernel(w.dim());
  if (kind == "gaussian")
    return gaussian_kernel(params.value("alpha", 0.5), params.value("ell", 1.0), w.dim());
  if (kind == "projection-fourier") {
    if (w.dim() != 1)
      throw ValidationError("projection-fourier kernels need a 1-D window");
    const int modes = params.value("modes", 2);
    if (modes < 1) throw ValidationError("projection-fourier: modes >= 1 required");
    return projection_kernel(fourier_basis(modes, w), w);
  }
  throw ValidationError("unknown kernel kind '" + kind + "'");
}

bool command_uses_kernel(const std::string& cmd) {
  return cmd == "sample" || cmd == "correlations" || cmd == "fredholm" || cmd == "count-law" ||
         cmd == "thin";
}

// ---- command bodies; each returns command-specific manifest fields ---------

using Emit = std::function<void(const std::string&, const std::string&)>;

json run_sample(const ExperimentConfig& cfg, const SpectralDecomposition& sd, const Emit& emit) {
  RandomStream rng(cfg.seed);
  std::vector<PointConfiguration> samples = sample_batch(sd, cfg.n, rng);
  std::vector<int> hist(sd.rank() + 1, 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::ostringstream ss;
    samples[i].write_csv(ss);
    char name[40];
    std::snprintf(name, sizeof name, "sample_%06zu.csv", i);
    emit(name, ss.str());
    hist[samples[i].size()] += 1;
  }
  json extra;
  extra["count_histogram"] = hist;
  return extra;
}

json run_correlations(const ExperimentConfig& cfg, const SpectralDecomposition& sd,
                      const Emit& emit) {
  RandomStream rng(cfg.seed);
  std::vector<PointConfiguration> samples = sample_batch(sd, cfg.n, rng);
  for (int order = 1; order <= 2; ++order) {
    CorrelationTable table = empirical_correlation(samples, sd, cfg.bins, order);
    std::ostringstream ss;
    table.write_csv(ss);
    emit("correlations_order" + std::to_string(order) + ".csv", ss.str());
  }
  return json::object();
}

json run_fredholm(const ExperimentConfig& cfg, const SpectralDecomposition& sd, const Emit& emit,
                  int& rc, std::string& status) {
  DeterminantReport rep = fredholm_det(sd, -1.0, cfg.method);
  json r;
  r["z"] = rep.z;
  json routes = json::object();
  for (const auto& [name, value] : rep.values) routes[name] = value;
  r["routes"] = routes;
  r["max_pairwise_gap"] = rep.max_pairwise_gap;
  r["series_terms"] = rep.series_terms;
  r["consistent"] = rep.routes_consistent;
  emit("fredholm.json", r.dump(2) + "\n");
  if (!rep.routes_consistent) {
    rc = 3;
    status = "determinant routes disagree beyond 1e-5";
  }
  return json::object();
}

json run_count_law(const ExperimentConfig& cfg, const SpectralDecomposition& sd, const Emit& emit,
                   int& rc, std::string& status) {
  RandomStream rng(cfg.seed);
  std::vector<PointConfiguration> samples = sample_batch(sd, cfg.n, rng);
  CountLawReport rep = verify_count_law(samples, sd);
  json r;
  r["observed"] = rep.observed;
  r["expected"] = rep.expected;
  r["chi_square"] = rep.chi_square;
  r["dof"] = rep.dof;
  r["p_value"] = rep.p_value;
  r["flagged"] = rep.flagged;
  r["mean_observed"] = rep.mean_observed;
  r["mean_model"] = rep.mean_model;
  r["variance_model"] = rep.variance_model;
  emit("count_law.json", r.dump(2) + "\n");
  if (rep.flagged) {
    rc = 3;
    status = "count law rejected at p < 1e-3";
  }
  return json::object();
}

json run_thin(const ExperimentConfig& cfg, const SpectralDecomposition& sd, const Window& w,
              const Emit& emit) {
  Vec z;
  if (cfg.removal.empty()) {
    z = w.center();
  } else {
    z = Vec(cfg.removal.size());
    for (std::size_t i = 0; i < cfg.removal.size(); ++i) z[static_cast<int>(i)] = cfg.removal[i];
  }
  SpectralDecomposition thinned = thinned_decomposition(sd, z);
  json r;
  r["point"] = std::vector<double>(z.data(), z.data() + z.size());
  r["diagonal_before"] = sd.kernel()(z, z).real();
  r["diagonal_after"] = thinned.kernel()(z, z).real();
  r["rank_before"] = sd.rank();
  r["rank_after"] = thinned.rank();
  r["eigenvalues_before"] = sd.eigenvalues();
  r["eigenvalues_after"] = thinned.eigenvalues();
  r["trace_before"] = sd.trace();
  r["trace_after"] = thinned.trace();
  emit("thin.json", r.dump(2) + "\n");

  if (w.dim() == 1) {
    std::string csv = "x,original_diagonal,thinned_diagonal\n";
    for (int i = 0; i <= 200; ++i) {
      Vec x(1);
      x[0] = w.lo[0] + (w.hi[0] - w.lo[0]) * i / 200.0;
      csv += fmt(x[0]) + "," + fmt(sd.kernel()(x, x).real()) + "," +
             fmt(thinned.kernel()(x, x).real()) + "\n";
    }
    emit("thinned_diagonal.csv", csv);
  }
  return json::object();
}

json run_diffuse(const ExperimentConfig& cfg, const Emit& emit) {
  RandomStream rng(cfg.seed);
  DiffusionState init = dyson_initial_gue(cfg.n, rng);
  const int steps = std::max(1, static_cast<int>(std::llround(cfg.total_time / cfg.dt)));
  const int burn = steps / 10;
  const int stride = 10;
  DiffusionRun run = dyson_run(init, steps, cfg.dt, cfg.theta, burn, stride, rng);

  std::string csv = "time";
  for (int i = 1; i <= cfg.n; ++i) csv += ",x" + std::to_string(i);
  csv += "\n";
  for (const auto& st : run.records) {
    csv += fmt(st.time);
    for (double v : st.x) csv += "," + fmt(v);
    csv += "\n";
  }
  emit("diffusion.csv", csv);

  json r;
  r["particles"] = cfg.n;
  r["steps"] = run.steps;
  r["dt"] = run.dt;
  r["theta"] = run.theta;
  r["records"] = run.records.size();
  r["max_halving_depth"] = run.max_halving_depth;
  if (run.records.size() >= 2 && cfg.n >= 4) {
    StationarityReport rep = stationarity_report(run);
    r["ks_spacing"] = rep.ks_spacing;
    r["mean_square_observed"] = rep.mean_square_observed;
    r["mean_square_model"] = rep.mean_square_model;
    r["edge_model"] = rep.edge_model;
    r["min_position"] = rep.min_position;
    r["max_position"] = rep.max_position;
    r["drift_ratio"] = rep.drift_ratio;
    r["stationary"] = rep.stationary;
  }
  emit("diffusion.json", r.dump(2) + "\n");
  return json::object();
}

json run_modelc(const ExperimentConfig& cfg, const Emit& emit) {
  const Window w = Window::interval(-12.0, 12.0);
  Vec center(1), wavevector(1);
  center[0] = -1.0;
  wavevector[0] = 2.0;
  const double sigma = 0.8;
  WaveFunction psi = gaussian_packet(w, cfg.grid, cfg.mass, center, sigma, wavevector);

  // 50-point time series over [0, 1], each state propagated from t = 0
  const double x0 = position_expectation(psi).value[0];
  const double p0 = momentum_expectation(psi).value[0];
  const double slope = p0 / cfg.mass;
  std::string csv = "t,mean_x,mean_p,width,norm\n";
  double max_affine_residual = 0.0;
  for (int i = 0; i < 50; ++i) {
    double t = i / 49.0;
    WaveFunction pt = free_propagate(psi, t);
    double mx = position_expectation(pt).value[0];
    double mp = momentum_expectation(pt).value[0];
    double width = position_width(pt)[0];
    csv += fmt(t) + "," + fmt(mx) + "," + fmt(mp) + "," + fmt(width) + "," + fmt(pt.norm()) + "\n";
    max_affine_residual = std::max(max_affine_residual, std::abs(mx - (x0 + slope * t)));
  }
  emit("timeseries.csv", csv);

  json r;
  r["grid"] = cfg.grid;
  r["mass"] = cfg.mass;
  r["sigma"] = sigma;
  r["ehrenfest"] = {{"intercept", x0},
                    {"slope", slope},
                    {"max_affine_residual", max_affine_residual}};

  VelocityReport vel = velocity_limit_check(psi, {1e-1, 1e-2, 1e-3, 1e-4});
  json vrows = json::array();
  for (const auto& row : vel.rows)
    vrows.push_back({{"dt", row.dt}, {"velocity", row.velocity[0]}, {"deviation", row.deviation}});
  r["velocity"] = {{"momentum_velocity", vel.momentum_velocity[0]},
                   {"rows", vrows},
                   {"max_deviation", vel.max_deviation}};

  CommutatorReport cd = commutator_check(psi);
  json refine = json::array();
  const Window wc = Window::interval(-8.0, 8.0);
  Vec zero1(1);
  zero1[0] = 0.0;
  const double sigma_c = 0.30 / std::sqrt(2.0);  // under-resolved at the coarsest grid
  for (int n : {64, 128, 256}) {
    WaveFunction pc = gaussian_packet(wc, n, cfg.mass, zero1, sigma_c, zero1);
    CommutatorReport cr = commutator_check(pc);
    refine.push_back({{"grid", n},
                      {"relative_residual", cr.relative_residual},
                      {"spectral_tail", cr.spectral_tail},
                      {"precondition_ok", cr.precondition_ok}});
  }
  r["commutator"] = {{"demo",
                      {{"relative_residual", cd.relative_residual},
                       {"spectral_tail", cd.spectral_tail},
                       {"precondition_ok", cd.precondition_ok},
                       {"position_commutator", cd.position_commutator}}},
                     {"refinement", refine}};

  EntropyReport ed = entropy_sum(psi);
  json widths = json::array();
  const Window we = Window::interval(-16.0, 16.0);
  for (double s : {0.12, 0.24, 0.48, 0.96}) {
    WaveFunction pe = gaussian_packet(we, 1024, cfg.mass, zero1, s, zero1);
    EntropyReport er = entropy_sum(pe);
    widths.push_back({{"sigma", s},
                      {"position_entropy", er.position_entropy},
                      {"momentum_entropy", er.momentum_entropy},
                      {"sum", er.sum}});
  }
  r["entropy"] = {{"demo",
                   {{"position_entropy", ed.position_entropy},
                    {"momentum_entropy", ed.momentum_entropy},
                    {"sum", ed.sum}}},
                  {"reference_widths", widths},
                  {"gaussian_target", 1.0 + std::log(std::numbers::pi)}};

  emit("modelc.json", r.dump(2) + "\n");
  return json::object();
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

int run_experiment(const ExperimentConfig& cfg) {
  json kernel_spec;
  std::optional<Window> window;
  std::optional<Kernel> kernel;

  // validation: no artifact is written past a bad configuration
  try {
    if (cfg.out_dir.empty()) throw ValidationError("--out directory is required");
    if (cfg.command.empty()) throw ValidationError("no command given");

    if (command_uses_kernel(cfg.command)) {
      std::string text = !cfg.kernel_json.empty() ? cfg.kernel_json
                         : !cfg.kernel_file.empty()
                             ? read_file(cfg.kernel_file)
                             : throw ValidationError("--kernel <file> is required");
      kernel_spec = parse_json(text, "kernel spec");
      Window w = cfg.window_override.empty() ? window_from_json(kernel_spec.value("window", json()))
                                             : parse_window_override(cfg.window_override);
      kernel = kernel_from_spec(kernel_spec, w);
      window = w;
      if (cfg.grid < 2) throw ValidationError("--grid must be at least 2");
    }
    if (cfg.n < 1) throw ValidationError("--n must be positive");
    if (cfg.command == "correlations") {
      if (cfg.n < 100) throw ValidationError("correlations: at least 100 samples required");
      if (cfg.bins < 1) throw ValidationError("--bins must be positive");
      if (window->dim() != 1) throw ValidationError("correlations: 1-D windows only");
    }
    if (cfg.command == "fredholm" && cfg.method != "spectral" && cfg.method != "series" &&
        cfg.method != "plemelj" && cfg.method != "all")
      throw ValidationError("--method must be spectral, series, plemelj or all");
    if (cfg.command == "thin" && !cfg.removal.empty() &&
        static_cast<int>(cfg.removal.size()) != window->dim())
      throw ValidationError("--z dimension does not match the window");
    if (cfg.command == "diffuse") {
      if (cfg.n < 4) throw ValidationError("diffuse: at least 4 particles required");
      if (cfg.theta < 0.0) throw ValidationError("--theta must be nonnegative");
      if (cfg.dt <= 0.0) throw ValidationError("--dt must be positive");
      if (cfg.total_time < cfg.dt) throw ValidationError("--T must be at least one step");
    }
    if (cfg.command == "modelc") {
      if (cfg.demo != "gaussian") throw ValidationError("unknown demo '" + cfg.demo + "'");
      if (cfg.grid < 32 || cfg.grid % 2 != 0)
        throw ValidationError("modelc: --grid must be even and at least 32");
      if (cfg.mass <= 0.0) throw ValidationError("--mass must be positive");
    }
    if (!command_uses_kernel(cfg.command) && cfg.command != "diffuse" && cfg.command != "modelc")
      throw ValidationError("unknown command '" + cfg.command + "'");

    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw ValidationError("cannot create output directory " + cfg.out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dpplab: %s\n", e.what());
    return 2;
  }

  const auto t_start = std::chrono::steady_clock::now();
  const fs::path out(cfg.out_dir);
  std::map<std::string, std::string> artifact_hashes;
  Emit emit = [&](const std::string& name, const std::string& bytes) {
    write_file_atomic(out / name, bytes);
    artifact_hashes[name] = fnv1a_hex(bytes);
  };

  int rc = 0;
  std::string status = "ok";
  json extra = json::object();
  try {
    if (command_uses_kernel(cfg.command)) {
      SpectralDecomposition sd = decompose(*kernel, *window, cfg.grid);
      if (cfg.command == "sample") extra = run_sample(cfg, sd, emit);
      else if (cfg.command == "correlations") extra = run_correlations(cfg, sd, emit);
      else if (cfg.command == "fredholm") extra = run_fredholm(cfg, sd, emit, rc, status);
      else if (cfg.command == "count-law") extra = run_count_law(cfg, sd, emit, rc, status);
      else extra = run_thin(cfg, sd, *window, emit);
    } else if (cfg.command == "diffuse") {
      extra = run_diffuse(cfg, emit);
    } else {
      extra = run_modelc(cfg, emit);
    }
  } catch (const std::exception& e) {
    rc = 3;
    status = e.what();
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  json manifest;
  manifest["schema"] = "dpplab-manifest-v1";
  manifest["command"] = cfg.command;
  json cj;
  cj["seed"] = cfg.seed;
  cj["n"] = cfg.n;
  cj["method"] = cfg.method;
  cj["grid"] = cfg.grid;
  cj["bins"] = cfg.bins;
  cj["mass"] = cfg.mass;
  cj["theta"] = cfg.theta;
  cj["dt"] = cfg.dt;
  cj["total_time"] = cfg.total_time;
  cj["demo"] = cfg.demo;
  cj["removal"] = cfg.removal;
  cj["window_override"] = cfg.window_override;
  cj["kernel"] = kernel_spec.is_discarded() ? json() : kernel_spec;
  manifest["config"] = cj;
  if (!kernel_spec.is_null() && !kernel_spec.is_discarded())
    manifest["kernel_hash"] = fnv1a_hex(kernel_spec.dump());
  manifest["artifacts"] = artifact_hashes;
  for (auto& [key, value] : extra.items()) manifest[key] = value;
  manifest["wall_time_seconds"] = wall;
  manifest["status"] = status;
  try {
    write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dpplab: %s\n", e.what());
    return 3;
  }
  if (rc != 0) std::fprintf(stderr, "dpplab: %s\n", status.c_str());
  return rc;
}

int replay_manifest(const std::string& manifest_path, const std::string& out_dir) {
  json m;
  try {
    m = parse_json(read_file(manifest_path), "manifest");
    if (!m.is_object() || !m.contains("config") || !m.contains("command") ||
        !m.contains("artifacts"))
      throw ValidationError("manifest: missing command, config or artifacts");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dpplab: %s\n", e.what());
    return 2;
  }

  ExperimentConfig cfg;
  const json& c = m["config"];
  cfg.command = m.value("command", "");
  cfg.seed = c.value("seed", std::uint64_t{1});
  cfg.n = c.value("n", 1000);
  cfg.method = c.value("method", "all");
  cfg.grid = c.value("grid", 24);
  cfg.bins = c.value("bins", 25);
  cfg.mass = c.value("mass", 1.0);
  cfg.theta = c.value("theta", 1.0);
  cfg.dt = c.value("dt", 1e-3);
  cfg.total_time = c.value("total_time", 1.0);
  cfg.demo = c.value("demo", "gaussian");
  cfg.removal = c.value("removal", std::vector<double>{});
  cfg.window_override = c.value("window_override", "");
  if (c.contains("kernel") && !c["kernel"].is_null()) cfg.kernel_json = c["kernel"].dump();
  cfg.out_dir = out_dir;

  int rc = run_experiment(cfg);
  if (rc == 2) return 2;

  json fresh;
  try {
    fresh = parse_json(read_file((fs::path(out_dir) / "manifest.json").string()), "manifest");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dpplab: %s\n", e.what());
    return 3;
  }
  if (fresh.value("artifacts", json::object()) != m["artifacts"]) {
    std::fprintf(stderr, "dpplab: replay mismatch: artifact hashes differ from the manifest\n");
    return 3;
  }
  std::printf("replay: %zu artifacts match the manifest\n",
              fresh.value("artifacts", json::object()).size());
  return rc;
}

}  // namespace dpplab
