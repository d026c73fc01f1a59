// simlab: configuration-driven experiments on the structured identity
// mapping task. Subcommands: run, verify, lattice, sample-data.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <semaphore>
#include <string>
#include <vector>

#include "simlab/covariance.hpp"
#include "simlab/dataset.hpp"
#include "simlab/io.hpp"
#include "simlab/losses.hpp"
#include "simlab/one_layer.hpp"
#include "simlab/phenomena.hpp"
#include "simlab/report_io.hpp"
#include "simlab/rng.hpp"
#include "simlab/theory.hpp"
#include "simlab/two_layer.hpp"

namespace fs = std::filesystem;
using namespace simlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitVerification = 4;

struct ExperimentSpec {
  ConfigMap raw;
  SimConfig sim;
  ModelKind model = ModelKind::OneLayerAnalytic;
  std::uint64_t seed = 0;
  bool use_empirical_covariance = false;

  // one-layer
  double horizon = 10.0;
  double dt = 0.01;
  double euler_step = 1e-3;
  long record_stride = 1;

  // two-layer
  int d_prime = 0;
  double eta = 0.0;
  long steps = 0;
  InitSpec init;
  bool record_decomposition = false;

  // analyses
  bool analyze_descents = false;
  bool analyze_order = false;
  bool analyze_slowdown = false;
  bool analyze_lattice = false;
  bool analyze_failure = false;
  double rho = 0.9;
  int window = 5;
  double delta = 0.05;
  std::vector<long> lattice_epochs;
  double failure_omega = -1.0;

  // verification
  bool has_constants = false;
  TheoryConstants constants;
  double lambda = 0.85;
};

InitSpec parse_init(const ConfigMap& m, std::uint64_t init_seed, int d, int d_prime) {
  const std::string mode = config_string(m, "init_mode", "zero");
  if (mode == "zero") return InitSpec::explicit_w(Eigen::MatrixXd::Zero(d, d));
  if (mode == "gaussian_u")
    return InitSpec::gaussian_u(config_number(m, "init_tau"), init_seed);
  if (mode == "uniform_magnitude")
    return InitSpec::uniform_magnitude(config_number(m, "init_omega"),
                                       config_number(m, "init_beta"), init_seed);
  if (mode == "explicit_w" || mode == "explicit_u") {
    std::vector<double> flat = config_array(m, "init_matrix");
    const int rows = d;
    const int cols = mode == "explicit_u" ? d_prime : d;
    if (static_cast<int>(flat.size()) != rows * cols)
      throw std::invalid_argument("config: init_matrix must have d*d (or d*d') entries");
    Eigen::MatrixXd W(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) W(i, j) = flat[i * cols + j];
    return mode == "explicit_u" ? InitSpec::explicit_u(W) : InitSpec::explicit_w(W);
  }
  throw std::invalid_argument("config: unknown init_mode '" + mode + "'");
}

ExperimentSpec load_spec(const std::string& config_path,
                         std::optional<std::uint64_t> seed_override) {
  ExperimentSpec spec;
  spec.raw = parse_config_file(config_path);
  const ConfigMap& m = spec.raw;
  spec.sim = sim_config_from_map(m);
  spec.model = model_kind_from_name(config_string(m, "model", "one_layer_analytic"));
  spec.seed = seed_override ? *seed_override : config_u64(m, "seed", 0);
  if (seed_override) spec.raw["seed"].raw = std::to_string(*seed_override);
  spec.use_empirical_covariance =
      config_string(m, "covariance", "true") == "empirical";

  spec.horizon = config_number(m, "horizon", 10.0);
  spec.dt = config_number(m, "dt", 0.01);
  spec.euler_step = config_number(m, "euler_step", 1e-3);
  spec.record_stride = config_int(m, "record_stride", 1);

  if (spec.model == ModelKind::TwoLayerW || spec.model == ModelKind::TwoLayerU) {
    if (!config_has(m, "eta") || !config_has(m, "steps"))
      throw std::invalid_argument(
          "config: two-layer models require 'eta' and 'steps'");
    spec.eta = config_number(m, "eta");
    spec.steps = config_int(m, "steps");
    spec.d_prime = static_cast<int>(config_int(m, "d_prime", spec.sim.d));
    spec.init = parse_init(m, spec.seed ^ kInitSeedRole, spec.sim.d, spec.d_prime);
    TwoLayerConfig tl{spec.sim.d, spec.d_prime, spec.eta, spec.steps, spec.init};
    tl.validate();
  }
  spec.record_decomposition = config_bool(m, "record_decomposition", false);

  spec.analyze_descents = config_bool(m, "analyze_descents", false);
  spec.analyze_order = config_bool(m, "analyze_order", false);
  spec.analyze_slowdown = config_bool(m, "analyze_slowdown", false);
  spec.analyze_lattice = config_bool(m, "analyze_lattice", false);
  spec.analyze_failure = config_bool(m, "analyze_failure", false);
  spec.rho = config_number(m, "rho", 0.9);
  spec.window = static_cast<int>(config_int(m, "window", 5));
  spec.delta = config_number(m, "delta", 0.05);
  if (config_has(m, "lattice_epochs")) {
    for (double e : config_array(m, "lattice_epochs"))
      spec.lattice_epochs.push_back(static_cast<long>(e));
  }
  spec.failure_omega = config_number(m, "failure_omega", -1.0);

  spec.has_constants = config_has(m, "constants_alpha");
  if (spec.has_constants) {
    TheoryConstants& c = spec.constants;
    c.alpha = config_number(m, "constants_alpha");
    c.gamma = config_number(m, "constants_gamma");
    c.beta = config_number(m, "constants_beta");
    c.omega = config_number(m, "constants_omega");
    c.K = config_number(m, "constants_K");
    c.P = config_number(m, "constants_P");
    c.kappa = config_number(m, "constants_kappa");
    c.C = config_number(m, "constants_C");
    c.eta = config_number(m, "constants_eta", spec.eta);
    spec.lambda = config_number(m, "lambda", 0.85);
    spec.record_decomposition = true;  // verification needs the records
  }
  return spec;
}

CovarianceSpectrum resolve_covariance(const ExperimentSpec& spec) {
  if (!spec.use_empirical_covariance) return build_covariance(spec.sim);
  Dataset data = sample_dataset(spec.sim, spec.seed ^ kDatasetSeedRole);
  return empirical_covariance(data);
}

Trajectory run_model(const ExperimentSpec& spec, const CovarianceSpectrum& cov) {
  const Eigen::VectorXd x_hat = test_point(spec.sim);
  switch (spec.model) {
    case ModelKind::OneLayerAnalytic: {
      Eigen::MatrixXd W0 = Eigen::MatrixXd::Zero(spec.sim.d, spec.sim.d);
      if (config_has(spec.raw, "init_matrix") || config_has(spec.raw, "init_mode"))
        W0 = initialize(parse_init(spec.raw, spec.seed ^ kInitSeedRole, spec.sim.d,
                                   spec.sim.d),
                        spec.sim.d, spec.sim.d)
                 .W0;
      Trajectory traj =
          sample_analytic_trajectory(W0, cov, x_hat, spec.horizon, spec.dt);
      traj.meta.seed = spec.seed;
      return traj;
    }
    case ModelKind::OneLayerEuler: {
      Eigen::MatrixXd W0 = Eigen::MatrixXd::Zero(spec.sim.d, spec.sim.d);
      if (config_has(spec.raw, "init_matrix") || config_has(spec.raw, "init_mode"))
        W0 = initialize(parse_init(spec.raw, spec.seed ^ kInitSeedRole, spec.sim.d,
                                   spec.sim.d),
                        spec.sim.d, spec.sim.d)
                 .W0;
      EulerResult res = euler_reference(W0, cov, spec.euler_step, spec.horizon,
                                        spec.record_stride);
      Trajectory traj;
      traj.meta.model = ModelKind::OneLayerEuler;
      traj.meta.dim = spec.sim.d;
      traj.meta.eta = spec.euler_step;
      if (cov.is_diagonal()) traj.meta.a = cov.a;
      traj.meta.x_hat = x_hat;
      traj.meta.seed = spec.seed;
      for (size_t k = 0; k < res.weights.size(); ++k) {
        traj.times.push_back(res.times[k]);
        traj.outputs.push_back(res.weights[k] * x_hat);
        traj.loss_population.push_back(population_loss(res.weights[k], cov));
        traj.loss_test.push_back(point_loss(res.weights[k], x_hat));
        traj.weights.push_back(res.weights[k]);
      }
      return traj;
    }
    case ModelKind::TwoLayerW: {
      InitResult init = initialize(spec.init, spec.sim.d, spec.d_prime);
      SimulateOptions opt;
      opt.record_decomposition = spec.record_decomposition;
      opt.x_hat = x_hat;
      opt.constants = spec.has_constants ? &spec.constants : nullptr;
      Trajectory traj = simulate_w_recursion(init.W0, cov, spec.eta, spec.steps, opt);
      traj.meta.seed = spec.seed;
      return traj;
    }
    case ModelKind::TwoLayerU: {
      InitResult init = initialize(spec.init, spec.sim.d, spec.d_prime);
      if (!init.U0)
        throw std::invalid_argument(
            "config: two_layer_u needs a U-valued init (gaussian_u or explicit_u)");
      SimulateOptions opt;
      opt.record_decomposition = spec.record_decomposition;
      opt.x_hat = x_hat;
      opt.constants = spec.has_constants ? &spec.constants : nullptr;
      Trajectory traj = simulate_u_descent(*init.U0, cov, spec.eta, spec.steps, opt);
      traj.meta.seed = spec.seed;
      return traj;
    }
  }
  throw std::invalid_argument("config: unknown model");
}

std::vector<LemmaReport> run_all_lemmas(const Trajectory& traj,
                                        const TheoryConstants& c, double lambda) {
  const Eigen::VectorXd& a = traj.meta.a;
  const int d = traj.dim();
  std::vector<LemmaReport> lemmas;
  if (!check_assumptions(c, a, d).all_pass()) {
    // Bounds are not guaranteed outside the assumptions; report every lemma
    // as vacuous without evaluating parameter-dependent preconditions.
    for (const char* id : {"noise_bound", "growth_bounds", "after_initial_growth",
                           "caps_and_terminal", "suppression"}) {
      LemmaReport rep;
      rep.lemma = id;
      rep.vacuous = true;
      lemmas.push_back(std::move(rep));
    }
    return lemmas;
  }
  lemmas.push_back(verify_noise_bound(traj, c, d));
  lemmas.push_back(verify_growth_bounds(traj, c, a));
  lemmas.push_back(verify_after_initial(traj, c, a, lambda));
  lemmas.push_back(verify_caps_and_terminal(traj, c));
  lemmas.push_back(verify_suppression(traj, c, a));
  return lemmas;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed) {
  ExperimentSpec spec = load_spec(config_path, seed);
  fs::create_directories(out_dir);
  CovarianceSpectrum cov = resolve_covariance(spec);
  Trajectory traj = run_model(spec, cov);

  write_trajectory_csv((fs::path(out_dir) / "trajectory.csv").string(), traj);
  write_trajectory_meta((fs::path(out_dir) / "trajectory.meta.json").string(),
                        traj.meta, spec.raw);

  // Analyses are independent; run them concurrently under the cap.
  std::counting_semaphore<64> slots(std::min(max_parallelism(), 64));
  std::vector<std::future<void>> tasks;
  auto launch = [&](std::function<void()> fn) {
    tasks.push_back(std::async(std::launch::async, [&slots, fn = std::move(fn)] {
      slots.acquire();
      try {
        fn();
      } catch (...) {
        slots.release();
        throw;
      }
      slots.release();
    }));
  };

  if (spec.analyze_descents)
    launch([&] {
      LossCurve curve{traj.loss_test, spec.window, spec.delta};
      write_descents_json((fs::path(out_dir) / "descents.json").string(),
                          count_descents(curve));
    });
  if (spec.analyze_order)
    launch([&] {
      write_order_json((fs::path(out_dir) / "order.json").string(),
                       learning_order(traj, spec.sim, spec.rho));
    });
  if (spec.analyze_slowdown)
    launch([&] {
      write_slowdown_json((fs::path(out_dir) / "slowdown.json").string(),
                          slowdown_profile(traj, spec.window), spec.window);
    });
  if (spec.analyze_lattice)
    launch([&] {
      std::vector<long> epochs = spec.lattice_epochs;
      if (epochs.empty()) {
        const long T = traj.steps();
        const long count = std::min<long>(50, T);
        for (long k = 0; k < count; ++k)
          epochs.push_back(k * (T - 1) / std::max<long>(1, count - 1));
      }
      write_lattice_json((fs::path(out_dir) / "lattice.json").string(),
                         lattice_losses(traj, spec.sim, epochs), spec.sim.s);
    });
  if (spec.analyze_failure)
    launch([&] {
      TheoryConstants c = spec.constants;
      if (!spec.has_constants) {
        double wmin = 0;
        const Eigen::MatrixXd& W0 = traj.weights.front();
        bool first = true;
        for (int i = 0; i < W0.rows(); ++i)
          for (int j = 0; j < W0.cols(); ++j)
            if (W0(i, j) != 0.0) {
              double w = std::abs(W0(i, j));
              wmin = first ? w : std::min(wmin, w);
              first = false;
            }
        c.omega = spec.failure_omega > 0 ? spec.failure_omega : wmin;
      }
      write_failure_json((fs::path(out_dir) / "failure.json").string(),
                         detect_failure_mode(traj, c));
    });
  for (auto& t : tasks) t.get();

  if (spec.has_constants) {
    AssumptionReport assumptions =
        check_assumptions(spec.constants, traj.meta.a, traj.dim());
    std::vector<LemmaReport> lemmas =
        run_all_lemmas(traj, spec.constants, spec.lambda);
    write_verification_json((fs::path(out_dir) / "verification.json").string(),
                            assumptions, lemmas);
    if (!assumptions.all_pass() || total_violations(lemmas) > 0)
      return kExitVerification;
  }
  return kExitOk;
}

int cmd_verify(const std::string& traj_path, const std::string& constants_path,
               std::string meta_path, const std::string& out_path) {
  if (meta_path.empty()) {
    meta_path = traj_path;
    const std::string suffix = ".csv";
    if (meta_path.size() > suffix.size() &&
        meta_path.compare(meta_path.size() - suffix.size(), suffix.size(), suffix) == 0)
      meta_path.resize(meta_path.size() - suffix.size());
    meta_path += ".meta.json";
  }
  TrajectoryMeta meta = read_trajectory_meta(meta_path);
  if (meta.model != ModelKind::TwoLayerW)
    throw std::invalid_argument(
        "verify: verification applies to two-layer W-recursion trajectories "
        "only (got " + model_kind_name(meta.model) + ")");
  Trajectory traj = read_trajectory_csv(traj_path, meta);
  if (!traj.has_decomposition)
    throw std::invalid_argument(
        "verify: trajectory file lacks the g/s/n decomposition columns");

  ConfigMap cm = parse_config_file(constants_path);
  TheoryConstants c;
  c.alpha = config_number(cm, "alpha");
  c.gamma = config_number(cm, "gamma");
  c.beta = config_number(cm, "beta");
  c.omega = config_number(cm, "omega");
  c.K = config_number(cm, "K");
  c.P = config_number(cm, "P");
  c.kappa = config_number(cm, "kappa");
  c.C = config_number(cm, "C");
  c.eta = config_number(cm, "eta", meta.eta);
  const double lambda = config_number(cm, "lambda", 0.85);

  AssumptionReport assumptions = check_assumptions(c, traj.meta.a, traj.dim());
  std::vector<LemmaReport> lemmas = run_all_lemmas(traj, c, lambda);
  const std::string path = out_path.empty() ? "/dev/stdout" : out_path;
  write_verification_json(path, assumptions, lemmas);
  const bool ok = assumptions.all_pass() && total_violations(lemmas) == 0;
  return ok ? kExitOk : kExitVerification;
}

int cmd_lattice(const std::string& config_path, const std::string& out_path) {
  ExperimentSpec spec = load_spec(config_path, std::nullopt);
  CovarianceSpectrum cov = resolve_covariance(spec);
  Trajectory traj = run_model(spec, cov);
  std::vector<long> epochs = spec.lattice_epochs;
  if (epochs.empty()) {
    const long T = traj.steps();
    const long count = std::min<long>(50, T);
    for (long k = 0; k < count; ++k)
      epochs.push_back(k * (T - 1) / std::max<long>(1, count - 1));
  }
  LatticeResult result = lattice_losses(traj, spec.sim, epochs);
  write_lattice_json(out_path.empty() ? "/dev/stdout" : out_path, result, spec.sim.s);
  return kExitOk;
}

int cmd_sample_data(const std::string& config_path, const std::string& out_path,
                    std::optional<std::uint64_t> seed) {
  ExperimentSpec spec = load_spec(config_path, seed);
  Dataset data = sample_dataset(spec.sim, spec.seed ^ kDatasetSeedRole);
  write_dataset_csv(out_path.empty() ? "/dev/stdout" : out_path, data);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structured identity mapping laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir, traj_path, constants_path, meta_path, out_path;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed, "override the experiment seed");

  auto* verify = app.add_subcommand("verify", "check lemma bounds on a trajectory");
  verify->add_option("--traj", traj_path, "trajectory CSV")->required();
  verify->add_option("--constants", constants_path, "theory constants file")->required();
  verify->add_option("--meta", meta_path, "trajectory meta JSON (default: derived)");
  verify->add_option("--out", out_path, "report path (default: stdout)");

  auto* lattice = app.add_subcommand("lattice", "evaluate the test-point lattice");
  lattice->add_option("--config", config_path, "experiment config file")->required();
  lattice->add_option("--out", out_path, "report path (default: stdout)");

  auto* sample = app.add_subcommand("sample-data", "sample and export a dataset");
  sample->add_option("--config", config_path, "experiment config file")->required();
  sample->add_option("--out", out_path, "CSV path (default: stdout)");
  sample->add_option("--seed", seed, "override the experiment seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, seed);
    if (verify->parsed())
      return cmd_verify(traj_path, constants_path, meta_path, out_path);
    if (lattice->parsed()) return cmd_lattice(config_path, out_path);
    if (sample->parsed()) return cmd_sample_data(config_path, out_path, seed);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
