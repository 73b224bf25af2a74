// lprobe: train small PDE networks (deep Galerkin / deep Ritz losses) and
// probe the loss landscape around any checkpoint: roughness index, Hessian
// eigenvalue index V(k), and 1D/2D slices.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lprobe/lprobe.hpp"

namespace fs = std::filesystem;
using namespace lprobe;

namespace {

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad numeric list entry: '" + item + "'");
    }
  }
  if (values.empty()) throw ConfigError("empty numeric list");
  return values;
}

QuadSpec resolve_quad(const std::string& quad, const Problem& problem,
                      std::uint64_t seed_quad) {
  RunConfig cfg;
  cfg.problem = problem_key(problem.kind);
  cfg.dim = problem.d;
  cfg.quad = quad;
  cfg.seed_quad = seed_quad;
  return cfg.make_quad();
}

struct ProbeTarget {
  Problem problem;
  NetworkSpec spec;
  LossKind kind = LossKind::DGM;
  QuadratureSet quad;  // frozen for every evaluation of this probe
  ParamVector theta;
  long epoch = 0;

  LossFn loss_fn() const {
    return [this](std::span<const double> values) {
      return loss_value(problem, spec, values, quad, kind);
    };
  }
};

struct TargetFlags {
  std::string checkpoint;
  std::string problem = "box1d_sine";
  int dim = 1;
  std::string loss = "dgm";
  std::string quad;
  std::uint64_t seed_quad = 2;

  void add_to(CLI::App* cmd, bool checkpoint_required = true) {
    auto* ck = cmd->add_option("--checkpoint", checkpoint,
                               "checkpoint JSON produced by train");
    if (checkpoint_required) ck->required();
    cmd->add_option("--problem", problem,
                    "box1d_cubic | box1d_sine | boxnd_sine | sphere3d");
    cmd->add_option("--dim", dim, "spatial dimension for boxnd_sine");
    cmd->add_option("--loss", loss, "dgm | drm");
    cmd->add_option("--quad", quad, "simpson:N | mc:N:seed (default by dimension)");
    cmd->add_option("--seed-quad", seed_quad, "seed for defaulted MC quadrature");
  }

  ProbeTarget load() const {
    ProbeTarget target;
    target.problem = problem_from_key(problem, dim);
    target.kind = loss_from_key(loss);
    const Checkpoint ck = read_checkpoint(checkpoint);
    target.spec = ck.spec;
    target.epoch = ck.epoch;
    if (target.spec.d != target.problem.d)
      throw ConfigError("checkpoint/problem mismatch: network d=" +
                        std::to_string(target.spec.d) + " but problem d=" +
                        std::to_string(target.problem.d));
    target.quad = build_quadrature(resolve_quad(quad, target.problem, seed_quad),
                                   target.problem);
    target.theta.values = ck.theta;
    target.theta.layout = make_filter_layout(target.spec);
    return target;
  }
};

void write_run_artifacts(const fs::path& dir, const RunConfig& echo,
                         const TrainResult& result, const NetworkSpec& spec,
                         std::uint64_t seed) {
  fs::create_directories(dir);
  atomic_write(dir / "config.echo", serialize(echo));
  CsvWriter traj("epoch,loss,rel_l2_error");
  for (const TrajectoryPoint& point : result.trajectory)
    traj.row(point.epoch, point.loss, point.rel_l2);
  traj.save(dir / "trajectory.csv");
  for (const TrajectoryPoint& point : result.trajectory) {
    Checkpoint ck{spec, seed, point.epoch, point.theta};
    write_checkpoint(dir / ("epoch_" + std::to_string(point.epoch) + ".json"), ck);
  }
}

int cmd_train(const RunConfig& cfg) {
  const Problem problem = cfg.make_problem();
  const NetworkSpec spec = cfg.make_spec();
  const ParamVector theta0 = init_xavier(spec, cfg.seed_init);

  TrainOptions opt;
  opt.loss = cfg.make_loss();
  opt.epochs = cfg.epochs;
  opt.quad = cfg.make_quad();
  opt.lr = cfg.lr;
  const TrainResult result = train(problem, spec, theta0.values, opt);

  RunConfig echo = cfg;
  echo.quad = opt.quad.to_string();
  write_run_artifacts(cfg.out, echo, result, spec, cfg.seed_init);

  if (result.diverged) {
    std::cerr << "train: loss diverged after epoch " << result.epochs_run
              << "; partial artifacts kept in " << cfg.out << "\n";
    return 3;
  }
  const TrajectoryPoint& last = result.trajectory.back();
  std::cout << "trained " << cfg.loss << " for " << result.epochs_run
            << " epochs: loss=" << fmt_g17(last.loss)
            << " rel_l2=" << fmt_g17(last.rel_l2) << "\n";
  std::cout << "artifacts in " << cfg.out << "\n";
  return 0;
}

/// Shifted quadratic test landscape 0.5 (theta-c)^T H (theta-c) with SPD H,
/// probed at its minimizer c. Its roughness index is zero by construction.
struct QuadraticLandscape {
  Matrix h;
  std::vector<double> center;

  static QuadraticLandscape make(int n, std::uint64_t seed) {
    QuadraticLandscape q;
    Xoshiro256pp rng(seed);
    Matrix g(n);
    for (double& v : g.a) v = rng.gaussian();
    q.h = Matrix(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += g.at(k, i) * g.at(k, j);
        q.h.at(i, j) = s / n + (i == j ? 0.1 : 0.0);
      }
    q.center.resize(n);
    for (double& v : q.center) v = rng.gaussian();
    return q;
  }

  double operator()(std::span<const double> theta) const {
    const std::size_t n = center.size();
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double hrow = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        hrow += h.at(i, j) * (theta[j] - center[j]);
      value += 0.5 * (theta[i] - center[i]) * hrow;
    }
    return value;
  }
};

int cmd_roughness(const TargetFlags& flags, int builtin_dim,
                  std::uint64_t builtin_seed, int m_directions,
                  const std::string& l_list, int grid, std::uint64_t seed,
                  const std::string& out_dir) {
  LossFn loss_fn;
  ParamVector theta;
  if (builtin_dim > 0) {
    static QuadraticLandscape landscape;  // keep alive for the lambda
    landscape = QuadraticLandscape::make(builtin_dim, builtin_seed);
    loss_fn = [](std::span<const double> v) { return landscape(v); };
    theta.values = landscape.center;
    theta.layout.filters = {{0, 0, 0, static_cast<std::size_t>(builtin_dim)}};
    theta.layout.total = builtin_dim;
  } else {
    static ProbeTarget target;
    target = flags.load();
    loss_fn = target.loss_fn();
    theta = target.theta;
  }

  const std::vector<double> l_values = parse_double_list(l_list);
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  std::vector<RoughnessReport> reports;
  for (double l : l_values) {
    ProbeConfig config{m_directions, l, grid, seed};
    reports.push_back(roughness_index(loss_fn, theta, config));
    std::cout << "l=" << fmt_g17(l) << " index=" << fmt_g17(reports.back().index)
              << " mu=" << fmt_g17(reports.back().mean)
              << " sigma=" << fmt_g17(reports.back().stddev)
              << " excluded=" << reports.back().excluded << "\n";
  }

  if (reports.size() == 1) {
    CsvWriter csv("direction,T");
    for (std::size_t i = 0; i < reports[0].tvs.size(); ++i)
      csv.row(static_cast<long>(i), reports[0].tvs[i]);
    csv.save(dir / "roughness.csv");
    atomic_write(dir / "summary.json", roughness_report_json(reports[0]) + "\n");
  } else {
    CsvWriter csv("l,mu,sigma,index,excluded");
    std::string json = "[";
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const RoughnessReport& r = reports[i];
      csv.row(r.config.half_length, r.mean, r.stddev, r.index, r.excluded);
      if (i) json += ",\n ";
      json += roughness_report_json(r);
    }
    json += "]\n";
    csv.save(dir / "sweep.csv");
    atomic_write(dir / "summaries.json", json);
  }
  return 0;
}

int cmd_eig(const TargetFlags& flags, int k, double h_step,
            const std::string& out_dir) {
  const ProbeTarget target = flags.load();
  const std::size_t p = target.theta.values.size();
  if (p > 1000)
    throw ConfigError("eig: " + std::to_string(p) +
                      " parameters exceed the dense eigensolver bound of 1000");

  LossGradient grad_eval(target.problem, target.spec, target.kind);
  const GradFn grad_fn = [&](std::span<const double> values) {
    return grad_eval.eval(values, target.quad).grad;
  };
  const Matrix hess = hessian_fd(grad_fn, target.theta.values, h_step);
  const std::vector<double> lambda = sym_eigenvalues(hess);

  const fs::path dir(out_dir);
  CsvWriter eig_csv("i,lambda");
  for (std::size_t i = 0; i < lambda.size(); ++i)
    eig_csv.row(static_cast<long>(i + 1), lambda[i]);
  eig_csv.save(dir / "eigenvalues.csv");

  const int k_max = std::min<int>(k, static_cast<int>(lambda.size()));
  CsvWriter vk_csv("k,V");
  double v = 0.0;
  int used = 0;
  for (int i = 0; i < k_max; ++i) {
    if (!(lambda[i] > 0.0)) break;
    v += std::log10(lambda[i]);
    ++used;
    vk_csv.row(static_cast<long>(i + 1), v);
  }
  vk_csv.save(dir / "vk.csv");

  if (used == 0) {
    std::cerr << "eig: no positive eigenvalues; V undefined\n";
    return 3;
  }
  if (used < k_max)
    std::cerr << "eig: k truncated to " << used
              << " (last positive eigenvalue)\n";
  std::cout << "V(" << used << ")=" << fmt_g17(v)
            << " lambda_max=" << fmt_g17(lambda.front()) << "\n";
  return 0;
}

int cmd_slice2d(const TargetFlags& flags, double l, int grid,
                std::uint64_t seed, bool svg, const std::string& out_dir) {
  const ProbeTarget target = flags.load();
  const Slice2D slice = slice_2d(target.loss_fn(), target.theta, seed, l, grid);
  const fs::path dir(out_dir);
  CsvWriter csv("alpha,beta,loss");
  for (int i = 0; i <= slice.n; ++i)
    for (int j = 0; j <= slice.n; ++j)
      csv.row(slice.coord(i), slice.coord(j), slice.at(i, j));
  csv.save(dir / "slice2d.csv");
  if (svg) atomic_write(dir / "slice2d.svg", contour_svg(slice));
  std::cout << "slice2d grid " << (slice.n + 1) << "x" << (slice.n + 1)
            << " written to " << out_dir << "\n";
  return 0;
}

int cmd_slice1d(const TargetFlags& flags, double l, int m, std::uint64_t seed,
                const std::string& out_dir) {
  const ProbeTarget target = flags.load();
  const Direction raw =
      sample_directions(target.theta.values.size(), 1, seed)[0];
  const Direction dir = filter_normalize(raw, target.theta);
  const std::vector<double> samples =
      project_1d(target.loss_fn(), target.theta.values, dir, l, m);
  CsvWriter csv("s,loss");
  for (int j = 0; j <= m; ++j)
    csv.row(l * (2.0 * j / m - 1.0), samples[j]);
  csv.save(fs::path(out_dir) / "slice1d.csv");
  std::cout << "slice1d written to " << out_dir << "\n";
  return 0;
}

int cmd_traj_roughness(const TargetFlags& flags, const std::string& run_dir,
                       int m_directions, double l, int grid,
                       std::uint64_t seed, const std::string& out_dir) {
  std::vector<std::pair<long, fs::path>> files;
  if (fs::is_directory(run_dir)) {
    for (const auto& entry : fs::directory_iterator(run_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("epoch_", 0) == 0 && entry.path().extension() == ".json")
        files.emplace_back(std::stol(name.substr(6)), entry.path());
    }
  }
  if (files.empty())
    throw ConfigError("traj-roughness: no epoch_*.json checkpoints in " + run_dir);
  std::sort(files.begin(), files.end());

  TargetFlags first = flags;
  first.checkpoint = files.front().second.string();
  const ProbeTarget target = first.load();

  std::vector<Snapshot> snapshots;
  for (const auto& [epoch, path] : files) {
    const Checkpoint ck = read_checkpoint(path);
    if (param_count(ck.spec) != param_count(target.spec))
      throw ConfigError("traj-roughness: inconsistent specs in " + run_dir);
    snapshots.push_back({epoch, ck.theta});
  }

  const ProbeConfig config{m_directions, l, grid, seed};
  const auto series = trajectory_roughness(target.loss_fn(),
                                           target.theta.layout, snapshots, config);
  CsvWriter csv("epoch,index");
  for (const RoughnessSeriesPoint& point : series) {
    csv.row(point.epoch, point.index);
    if (!point.error.empty())
      std::cerr << "traj-roughness: epoch " << point.epoch
                << " failed: " << point.error << "\n";
  }
  csv.save(fs::path(out_dir) / "traj_roughness.csv");
  std::cout << series.size() << " trajectory points written to " << out_dir
            << "\n";
  return 0;
}

int cmd_retrain_from(const TargetFlags& flags, long epochs, double grad_tol,
                     double lr, const std::string& out_dir) {
  const ProbeTarget target = flags.load();
  TrainOptions opt;
  opt.loss = target.kind;
  opt.epochs = epochs;
  opt.quad = resolve_quad(flags.quad, target.problem, flags.seed_quad);
  opt.lr = lr;
  opt.grad_tol = grad_tol;
  const TrainResult result =
      retrain_from(target.problem, target.spec, target.theta.values, opt);

  RunConfig echo;
  echo.problem = problem_key(target.problem.kind);
  echo.dim = target.problem.d;
  echo.network = kind_key(target.spec.kind);
  echo.width = target.spec.w;
  echo.blocks = target.spec.blocks;
  echo.activation = activation_key(target.spec.activation);
  echo.loss = loss_key(target.kind);
  echo.quad = opt.quad.to_string();
  echo.epochs = epochs;
  echo.lr = lr;
  echo.out = out_dir;
  write_run_artifacts(out_dir, echo, result, target.spec, 0);

  if (result.diverged) {
    std::cerr << "retrain-from: diverged after epoch " << result.epochs_run << "\n";
    return 3;
  }
  double dist = 0.0;
  for (std::size_t i = 0; i < result.theta.size(); ++i) {
    const double delta = result.theta[i] - target.theta.values[i];
    dist += delta * delta;
  }
  std::cout << (result.converged ? "converged" : "epoch budget exhausted")
            << " after " << result.epochs_run
            << " steps: grad_norm=" << fmt_g17(result.final_grad_norm)
            << " moved=" << fmt_g17(std::sqrt(dist)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loss-landscape probe for deep Galerkin / deep Ritz solvers"};
  app.require_subcommand(1);

  // train ----------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "train and write a run directory");
  std::string config_path;
  RunConfig flag_cfg;
  train_cmd->add_option("--config", config_path, "config file (key = value)");
  auto* o_problem = train_cmd->add_option("--problem", flag_cfg.problem, "");
  auto* o_dim = train_cmd->add_option("--dim", flag_cfg.dim, "");
  auto* o_network = train_cmd->add_option("--network", flag_cfg.network, "");
  auto* o_width = train_cmd->add_option("--width", flag_cfg.width, "");
  auto* o_blocks = train_cmd->add_option("--blocks", flag_cfg.blocks, "");
  auto* o_act = train_cmd->add_option("--activation", flag_cfg.activation, "");
  auto* o_loss = train_cmd->add_option("--loss", flag_cfg.loss, "");
  auto* o_quad = train_cmd->add_option("--quad", flag_cfg.quad, "");
  auto* o_epochs = train_cmd->add_option("--epochs", flag_cfg.epochs, "");
  auto* o_lr = train_cmd->add_option("--lr", flag_cfg.lr, "");
  auto* o_seed_init = train_cmd->add_option("--seed-init", flag_cfg.seed_init, "");
  auto* o_seed_quad = train_cmd->add_option("--seed-quad", flag_cfg.seed_quad, "");
  auto* o_seed_dir =
      train_cmd->add_option("--seed-directions", flag_cfg.seed_directions, "");
  auto* o_out = train_cmd->add_option("--out", flag_cfg.out, "run directory");

  // roughness --------------------------------------------------------------
  auto* rough_cmd =
      app.add_subcommand("roughness", "roughness index around a checkpoint");
  TargetFlags rough_flags;
  rough_flags.add_to(rough_cmd, /*checkpoint_required=*/false);
  int builtin_dim = 0;
  std::uint64_t builtin_seed = 42;
  rough_cmd->add_option("--builtin-quadratic", builtin_dim,
                        "probe a seeded SPD quadratic of this size instead of "
                        "a checkpoint (index is 0 by construction)");
  rough_cmd->add_option("--builtin-seed", builtin_seed, "seed for the builtin");
  int rough_m_dirs = 100, rough_grid = 100;
  std::uint64_t rough_seed = 1;
  std::string rough_l = "0.01", rough_out = "probe";
  rough_cmd->add_option("--M", rough_m_dirs, "number of directions");
  rough_cmd->add_option("--l", rough_l, "half-interval length(s), comma list");
  rough_cmd->add_option("--m", rough_grid, "grid subdivisions (m+1 points)");
  rough_cmd->add_option("--seed", rough_seed, "direction seed");
  rough_cmd->add_option("--out", rough_out, "output directory");

  // eig ----------------------------------------------------------------
  auto* eig_cmd = app.add_subcommand("eig", "Hessian eigenvalues and V(k)");
  TargetFlags eig_flags;
  eig_flags.add_to(eig_cmd);
  int eig_k = 20;
  double eig_h = 1e-4;
  std::string eig_out = "probe";
  eig_cmd->add_option("--k", eig_k, "top-k for the V(k) curve");
  eig_cmd->add_option("--fd-step", eig_h, "finite difference base step");
  eig_cmd->add_option("--out", eig_out, "output directory");

  // slice2d / slice1d -------------------------------------------------------
  auto* slice2_cmd = app.add_subcommand("slice2d", "2D landscape slice");
  TargetFlags slice2_flags;
  slice2_flags.add_to(slice2_cmd);
  double slice2_l = 0.01;
  int slice2_grid = 20;
  std::uint64_t slice2_seed = 1;
  bool slice2_svg = false;
  std::string slice2_out = "probe";
  slice2_cmd->add_option("--l", slice2_l, "half-interval length");
  slice2_cmd->add_option("--grid", slice2_grid, "grid subdivisions per axis");
  slice2_cmd->add_option("--seed", slice2_seed, "direction seed");
  slice2_cmd->add_flag("--svg", slice2_svg, "write an 8-isoline contour SVG");
  slice2_cmd->add_option("--out", slice2_out, "output directory");

  auto* slice1_cmd = app.add_subcommand("slice1d", "1D landscape slice");
  TargetFlags slice1_flags;
  slice1_flags.add_to(slice1_cmd);
  double slice1_l = 0.01;
  int slice1_m = 100;
  std::uint64_t slice1_seed = 1;
  std::string slice1_out = "probe";
  slice1_cmd->add_option("--l", slice1_l, "half-interval length");
  slice1_cmd->add_option("--m", slice1_m, "grid subdivisions (m+1 points)");
  slice1_cmd->add_option("--seed", slice1_seed, "direction seed");
  slice1_cmd->add_option("--out", slice1_out, "output directory");

  // traj-roughness -----------------------------------------------------------
  auto* traj_cmd = app.add_subcommand(
      "traj-roughness", "roughness index along a saved training trajectory");
  TargetFlags traj_flags;
  traj_flags.add_to(traj_cmd, /*checkpoint_required=*/false);
  std::string traj_run;
  traj_cmd->add_option("--run", traj_run, "run directory with epoch_*.json")
      ->required();
  int traj_m_dirs = 50, traj_grid = 10;
  double traj_l = 0.01;
  std::uint64_t traj_seed = 1;
  std::string traj_out = "probe";
  traj_cmd->add_option("--M", traj_m_dirs, "number of directions");
  traj_cmd->add_option("--l", traj_l, "half-interval length");
  traj_cmd->add_option("--m", traj_grid, "grid subdivisions");
  traj_cmd->add_option("--seed", traj_seed, "direction seed (fixed across epochs)");
  traj_cmd->add_option("--out", traj_out, "output directory");

  // retrain-from ---------------------------------------------------------
  auto* retrain_cmd = app.add_subcommand(
      "retrain-from", "descend a loss starting from another minimizer");
  TargetFlags retrain_flags;
  retrain_flags.add_to(retrain_cmd);
  long retrain_epochs = 10000;
  double retrain_tol = 1e-4, retrain_lr = 1e-3;
  std::string retrain_out = "retrain";
  retrain_cmd->add_option("--epochs", retrain_epochs, "epoch budget");
  retrain_cmd->add_option("--grad-tol", retrain_tol, "stop at this gradient norm");
  retrain_cmd->add_option("--lr", retrain_lr, "learning rate");
  retrain_cmd->add_option("--out", retrain_out, "run directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      RunConfig cfg;
      if (!config_path.empty()) cfg = parse_run_config(read_file(config_path));
      // Command-line flags override config-file values.
      if (o_problem->count()) { cfg.problem = flag_cfg.problem; cfg.provided.insert("problem"); }
      if (o_dim->count()) { cfg.dim = flag_cfg.dim; cfg.provided.insert("dim"); }
      if (o_network->count()) { cfg.network = flag_cfg.network; cfg.provided.insert("network"); }
      if (o_width->count()) { cfg.width = flag_cfg.width; cfg.provided.insert("width"); }
      if (o_blocks->count()) { cfg.blocks = flag_cfg.blocks; cfg.provided.insert("blocks"); }
      if (o_act->count()) { cfg.activation = flag_cfg.activation; cfg.provided.insert("activation"); }
      if (o_loss->count()) { cfg.loss = flag_cfg.loss; cfg.provided.insert("loss"); }
      if (o_quad->count()) { cfg.quad = flag_cfg.quad; cfg.provided.insert("quad"); }
      if (o_epochs->count()) { cfg.epochs = flag_cfg.epochs; cfg.provided.insert("epochs"); }
      if (o_lr->count()) { cfg.lr = flag_cfg.lr; cfg.provided.insert("lr"); }
      if (o_seed_init->count()) { cfg.seed_init = flag_cfg.seed_init; cfg.provided.insert("seed_init"); }
      if (o_seed_quad->count()) { cfg.seed_quad = flag_cfg.seed_quad; cfg.provided.insert("seed_quad"); }
      if (o_seed_dir->count()) { cfg.seed_directions = flag_cfg.seed_directions; cfg.provided.insert("seed_directions"); }
      if (o_out->count()) { cfg.out = flag_cfg.out; cfg.provided.insert("out"); }
      require_keys(cfg, {"problem", "out"});
      return cmd_train(cfg);
    }
    if (rough_cmd->parsed()) {
      if (builtin_dim == 0 && rough_flags.checkpoint.empty())
        throw ConfigError("roughness: need --checkpoint or --builtin-quadratic");
      return cmd_roughness(rough_flags, builtin_dim, builtin_seed, rough_m_dirs,
                           rough_l, rough_grid, rough_seed, rough_out);
    }
    if (eig_cmd->parsed())
      return cmd_eig(eig_flags, eig_k, eig_h, eig_out);
    if (slice2_cmd->parsed())
      return cmd_slice2d(slice2_flags, slice2_l, slice2_grid, slice2_seed,
                         slice2_svg, slice2_out);
    if (slice1_cmd->parsed())
      return cmd_slice1d(slice1_flags, slice1_l, slice1_m, slice1_seed,
                         slice1_out);
    if (traj_cmd->parsed())
      return cmd_traj_roughness(traj_flags, traj_run, traj_m_dirs, traj_l,
                                traj_grid, traj_seed, traj_out);
    if (retrain_cmd->parsed())
      return cmd_retrain_from(retrain_flags, retrain_epochs, retrain_tol,
                              retrain_lr, retrain_out);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return 2;
  } catch (const NumericalError& err) {
    std::cerr << "numerical error: " << err.what() << "\n";
    return 3;
  }
  return 0;
}
