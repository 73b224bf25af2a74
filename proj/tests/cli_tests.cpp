// End-to-end tests of the lprobe command-line tool. Each test drives the
// real binary (path injected by the build) inside a scratch directory.

#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lprobe/config.hpp"
#include "lprobe/io.hpp"

using namespace lprobe;
namespace fs = std::filesystem;

namespace {

const char* cli_path() { return LPROBE_CLI_PATH; }

struct Scratch {
  fs::path dir;
  Scratch() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("lprobe_cli_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++));
    fs::create_directories(dir);
  }
  fs::path operator/(const std::string& name) const { return dir / name; }
};

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(cli_path()) + " " + args + " >" +
                          log.string() + " 2>" + log.string() + ".err";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

// Quick toy training run shared by several tests.
fs::path toy_run(const Scratch& scratch, const std::string& loss,
                 long epochs = 3000, const std::string& name = "toy") {
  const fs::path out = scratch / name;
  const int code =
      run("train --problem box1d_cubic --network linear1d --loss " + loss +
              " --epochs " + std::to_string(epochs) + " --quad simpson:201 " +
              "--out " + out.string(),
          scratch / (name + ".log"));
  REQUIRE(code == 0);
  return out;
}

}  // namespace

TEST_CASE("train quickstart on the toy problem") {
  Scratch scratch;
  const fs::path out = toy_run(scratch, "dgm", 8000);

  CHECK(fs::exists(out / "config.echo"));
  CHECK(fs::exists(out / "trajectory.csv"));
  CHECK(fs::exists(out / "epoch_0.json"));
  CHECK(fs::exists(out / "epoch_8000.json"));

  // final relative error below 1e-3
  const auto rows = lines_of(slurp(out / "trajectory.csv"));
  CHECK(rows.front() == "epoch,loss,rel_l2_error");
  const std::string& last = rows.back();
  const double rel = std::stod(last.substr(last.rfind(',') + 1));
  CHECK(rel < 1e-3);

  // the config echo parses back and reproduces the run settings
  const RunConfig echo = parse_run_config(slurp(out / "config.echo"));
  CHECK(echo.problem == "box1d_cubic");
  CHECK(echo.loss == "dgm");
  CHECK(echo.epochs == 8000);
  CHECK(echo.quad == "simpson:201");
  const RunConfig reparsed = parse_run_config(serialize(echo));
  CHECK(reparsed == echo);
}

TEST_CASE("rerunning the same config is byte-identical") {
  Scratch scratch;
  const fs::path a = toy_run(scratch, "dgm", 500, "a");
  const fs::path b = toy_run(scratch, "dgm", 500, "b");
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
  CHECK(slurp(a / "epoch_500.json") == slurp(b / "epoch_500.json"));
}

TEST_CASE("train via config file; missing keys are named") {
  Scratch scratch;
  const fs::path cfg = scratch / "run.cfg";
  atomic_write(cfg, "problem = box1d_cubic\nnetwork = linear1d\n"
                    "loss = dgm\nepochs = 50\nquad = simpson:51\nout = " +
                        (scratch / "cfgrun").string() + "\n");
  CHECK(run("train --config " + cfg.string(), scratch / "cfg.log") == 0);
  CHECK(fs::exists(scratch / "cfgrun" / "trajectory.csv"));

  // drop the problem key: diagnostic must name it
  atomic_write(cfg, "network = linear1d\nout = x\n");
  CHECK(run("train --config " + cfg.string(), scratch / "cfg2.log") == 2);
  const std::string err = slurp(scratch / "cfg2.log.err");
  CHECK(err.find("problem") != std::string::npos);
}

TEST_CASE("roughness of the builtin quadratic landscape is zero") {
  Scratch scratch;
  const fs::path out = scratch / "probe";
  const int code = run(
      "roughness --builtin-quadratic 12 --M 20 --l 0.5 --m 10 --seed 3 --out " +
          out.string(),
      scratch / "rough.log");
  REQUIRE(code == 0);
  const auto j = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(j.at("index").get<double>() < 1e-12);
  CHECK(j.at("excluded") == 0);
  CHECK(j.at("M") == 20);
  // direction CSV has one row per direction plus header
  CHECK(lines_of(slurp(out / "roughness.csv")).size() == 21);
}

TEST_CASE("roughness sweep emits one row per l value") {
  Scratch scratch;
  const fs::path out = scratch / "sweep";
  const int code = run("roughness --builtin-quadratic 8 --M 10 --m 10 "
                       "--l 0.00025,0.0005,0.001 --seed 1 --out " +
                           out.string(),
                       scratch / "sweep.log");
  REQUIRE(code == 0);
  const auto rows = lines_of(slurp(out / "sweep.csv"));
  REQUIRE(rows.size() == 4);  // header + 3 values
  CHECK(rows[0] == "l,mu,sigma,index,excluded");
  const auto summaries = nlohmann::json::parse(slurp(out / "summaries.json"));
  CHECK(summaries.size() == 3);
}

TEST_CASE("eig on the toy minimizer reproduces the known spectra") {
  Scratch scratch;
  const fs::path run_dir = toy_run(scratch, "dgm", 5000);

  const fs::path out = scratch / "eig";
  const int code = run("eig --checkpoint " + (run_dir / "epoch_5000.json").string() +
                           " --problem box1d_cubic --loss dgm --quad simpson:201"
                           " --k 2 --out " + out.string(),
                       scratch / "eig.log");
  REQUIRE(code == 0);
  const auto rows = lines_of(slurp(out / "eigenvalues.csv"));
  REQUIRE(rows.size() == 3);
  const double l1 = std::stod(rows[1].substr(rows[1].find(',') + 1));
  const double l2 = std::stod(rows[2].substr(rows[2].find(',') + 1));
  CHECK(l1 == Catch::Approx(12.0).margin(0.05));
  CHECK(l2 == Catch::Approx(4.0).margin(0.05));
  const auto vk = lines_of(slurp(out / "vk.csv"));
  REQUIRE(vk.size() == 3);
  const double v2 = std::stod(vk[2].substr(vk[2].find(',') + 1));
  CHECK(v2 == Catch::Approx(1.68).margin(0.01));

  // DRM spectrum at the shared minimizer
  const fs::path out2 = scratch / "eig_drm";
  REQUIRE(run("eig --checkpoint " + (run_dir / "epoch_5000.json").string() +
                  " --problem box1d_cubic --loss drm --quad simpson:201"
                  " --k 2 --out " + out2.string(),
              scratch / "eig2.log") == 0);
  const auto drm_rows = lines_of(slurp(out2 / "eigenvalues.csv"));
  CHECK(std::stod(drm_rows[1].substr(drm_rows[1].find(',') + 1)) ==
        Catch::Approx(0.428).margin(5e-3));
  CHECK(std::stod(drm_rows[2].substr(drm_rows[2].find(',') + 1)) ==
        Catch::Approx(0.039).margin(5e-3));
}

TEST_CASE("eig refuses oversized parameter vectors, naming the bound") {
  Scratch scratch;
  // fabricate a large checkpoint: ResNet d=10, w=25, N=4 -> 5876 parameters
  Checkpoint ck;
  ck.spec = {NetKind::ResNet, 10, 25, 4, Activation::Swish};
  ck.theta.assign(param_count(ck.spec), 0.0);
  const fs::path path = scratch / "big.json";
  write_checkpoint(path, ck);
  const int code = run("eig --checkpoint " + path.string() +
                           " --problem boxnd_sine --dim 10 --loss dgm --quad "
                           "mc:16:1 --out " + (scratch / "x").string(),
                       scratch / "eig3.log");
  CHECK(code == 2);
  CHECK(slurp(scratch / "eig3.log.err").find("1000") != std::string::npos);
}

TEST_CASE("slice2d is deterministic and optionally renders SVG") {
  Scratch scratch;
  const fs::path run_dir = toy_run(scratch, "dgm", 500);
  const std::string ck = (run_dir / "epoch_500.json").string();

  const fs::path out1 = scratch / "s1";
  const fs::path out2 = scratch / "s2";
  const std::string common = " --problem box1d_cubic --loss dgm --quad simpson:201"
                             " --l 0.3 --grid 12 --seed 5 --out ";
  REQUIRE(run("slice2d --checkpoint " + ck + common + out1.string() + " --svg",
              scratch / "s1.log") == 0);
  REQUIRE(run("slice2d --checkpoint " + ck + common + out2.string(),
              scratch / "s2.log") == 0);
  CHECK(slurp(out1 / "slice2d.csv") == slurp(out2 / "slice2d.csv"));
  CHECK(fs::exists(out1 / "slice2d.svg"));
  CHECK(!fs::exists(out2 / "slice2d.svg"));
  CHECK(lines_of(slurp(out1 / "slice2d.csv")).size() == 1 + 13 * 13);
}

TEST_CASE("slice1d writes the sampled profile") {
  Scratch scratch;
  const fs::path run_dir = toy_run(scratch, "dgm", 200);
  const fs::path out = scratch / "p";
  REQUIRE(run("slice1d --checkpoint " + (run_dir / "epoch_128.json").string() +
                  " --problem box1d_cubic --loss dgm --quad simpson:201"
                  " --l 0.05 --m 20 --seed 2 --out " + out.string(),
              scratch / "p.log") == 0);
  const auto rows = lines_of(slurp(out / "slice1d.csv"));
  REQUIRE(rows.size() == 22);
  CHECK(rows[0] == "s,loss");
}

TEST_CASE("traj-roughness over a toy run started at the minimizer") {
  Scratch scratch;
  // train from the exact minimizer: every snapshot stays at (1,2)
  const fs::path start = scratch / "start.json";
  Checkpoint ck;
  ck.spec = {NetKind::Linear1DToy, 1, 0, 0, Activation::Swish};
  ck.theta = {1.0, 2.0};
  write_checkpoint(start, ck);
  const fs::path run_dir = scratch / "minrun";
  REQUIRE(run("retrain-from --checkpoint " + start.string() +
                  " --problem box1d_cubic --loss dgm --quad simpson:201"
                  " --epochs 50 --out " + run_dir.string(),
              scratch / "re.log") == 0);

  const fs::path out = scratch / "tr";
  REQUIRE(run("traj-roughness --run " + run_dir.string() +
                  " --problem box1d_cubic --loss dgm --quad simpson:201"
                  " --M 10 --l 0.05 --m 10 --seed 4 --out " + out.string(),
              scratch / "tr.log") == 0);
  const auto rows = lines_of(slurp(out / "traj_roughness.csv"));
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == "epoch,index");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double index = std::stod(rows[i].substr(rows[i].find(',') + 1));
    CHECK(index < 1e-10);  // quadratic landscape probed at its minimizer
  }
}

TEST_CASE("retrain-from a DRM minimizer reaches the DGM minimizer") {
  Scratch scratch;
  const fs::path drm_run = toy_run(scratch, "drm", 30000, "drm");
  const fs::path out = scratch / "regf";
  REQUIRE(run("retrain-from --checkpoint " + (drm_run / "epoch_30000.json").string() +
                  " --problem box1d_cubic --loss dgm --quad simpson:201"
                  " --epochs 20000 --out " + out.string(),
              scratch / "regf.log") == 0);
  const Checkpoint final_ck = [&] {
    // last checkpoint in the run dir
    long best = -1;
    fs::path best_path;
    for (const auto& entry : fs::directory_iterator(out)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("epoch_", 0) == 0 && entry.path().extension() == ".json") {
        const long e = std::stol(name.substr(6));
        if (e > best) {
          best = e;
          best_path = entry.path();
        }
      }
    }
    REQUIRE(best >= 0);
    return read_checkpoint(best_path);
  }();
  CHECK(final_ck.theta[0] == Catch::Approx(1.0).margin(0.05));
  CHECK(final_ck.theta[1] == Catch::Approx(2.0).margin(0.05));
}

TEST_CASE("trained ResNet minimizers: spectrum shape and slice contrast") {
  // One full training pair (deterministic), then two qualitative checks from
  // the landscape study: most Hessian eigenvalues sit near zero at a trained
  // minimizer, and for this fixed slice realization the variational loss
  // shows more isoline crossings than the least-squares one.
  Scratch scratch;
  const std::string common =
      " --problem box1d_sine --network resnet --width 4 --blocks 1"
      " --quad simpson:200 --epochs 10000 --seed-init 2 --out ";
  REQUIRE(run("train --loss dgm" + common + (scratch / "g").string(),
              scratch / "g.log") == 0);
  REQUIRE(run("train --loss drm" + common + (scratch / "r").string(),
              scratch / "r.log") == 0);
  const std::string ck_g = (scratch / "g" / "epoch_10000.json").string();
  const std::string ck_r = (scratch / "r" / "epoch_10000.json").string();

  {
    // only a few eigenvalues significantly above zero
    const fs::path out = scratch / "eig";
    REQUIRE(run("eig --checkpoint " + ck_g +
                    " --problem box1d_sine --loss dgm --quad simpson:200"
                    " --k 53 --out " + out.string(),
                scratch / "eig.log") == 0);
    const auto rows = lines_of(slurp(out / "eigenvalues.csv"));
    REQUIRE(rows.size() == 54);
    std::vector<double> lambda;
    for (std::size_t i = 1; i < rows.size(); ++i)
      lambda.push_back(std::stod(rows[i].substr(rows[i].find(',') + 1)));
    int near_zero = 0;
    for (double l : lambda)
      if (std::abs(l) < 1e-2 * lambda.front()) ++near_zero;
    CHECK(static_cast<double>(near_zero) / lambda.size() > 0.5);
  }

  {
    // isoline crossings: DGM slice below DRM slice for this realization
    auto crossings = [&](const fs::path& csv) {
      const auto rows = lines_of(slurp(csv));
      std::vector<double> values;
      for (std::size_t i = 1; i < rows.size(); ++i)
        values.push_back(std::stod(rows[i].substr(rows[i].rfind(',') + 1)));
      const int n = 24;
      REQUIRE(values.size() == std::size_t(n + 1) * (n + 1));
      const double lo = *std::min_element(values.begin(), values.end());
      const double hi = *std::max_element(values.begin(), values.end());
      int total = 0;
      for (int level = 1; level <= 8; ++level) {
        const double t = lo + level * (hi - lo) / 9.0;
        for (int i = 0; i <= n; ++i)
          for (int j = 1; j <= n; ++j) {
            const bool a = values[i * (n + 1) + j - 1] > t;
            const bool b = values[i * (n + 1) + j] > t;
            if (a != b) ++total;
          }
      }
      return total;
    };
    const std::string flags = " --quad simpson:200 --l 0.01 --grid 24 --seed 5"
                              " --svg --out ";
    REQUIRE(run("slice2d --checkpoint " + ck_g +
                    " --problem box1d_sine --loss dgm" + flags +
                    (scratch / "sg").string(),
                scratch / "sg.log") == 0);
    REQUIRE(run("slice2d --checkpoint " + ck_r +
                    " --problem box1d_sine --loss drm" + flags +
                    (scratch / "sr").string(),
                scratch / "sr.log") == 0);
    const int c_g = crossings(scratch / "sg" / "slice2d.csv");
    const int c_r = crossings(scratch / "sr" / "slice2d.csv");
    CHECK(c_g < c_r);
    CHECK(fs::exists(scratch / "sg" / "slice2d.svg"));
  }

  {
    // roughness along the training path: the DRM series exceeds the DGM one
    // at late epochs (both start smooth at the shared initialization)
    auto series_of = [&](const std::string& run_dir, const std::string& loss,
                         const std::string& name) {
      const fs::path out = scratch / name;
      REQUIRE(run("traj-roughness --run " + run_dir +
                      " --problem box1d_sine --loss " + loss +
                      " --quad simpson:200 --M 50 --l 0.01 --m 10 --seed 9"
                      " --out " + out.string(),
                  scratch / (name + ".log")) == 0);
      const auto rows = lines_of(slurp(out / "traj_roughness.csv"));
      std::vector<double> indices;
      for (std::size_t i = 1; i < rows.size(); ++i)
        indices.push_back(std::stod(rows[i].substr(rows[i].find(',') + 1)));
      return indices;
    };
    const auto ig = series_of((scratch / "g").string(), "dgm", "tg");
    const auto ir = series_of((scratch / "r").string(), "drm", "tr");
    REQUIRE(ig.size() == ir.size());
    REQUIRE(ig.size() > 10);
    double late_g = 0.0, late_r = 0.0;
    for (std::size_t i = ig.size() - 5; i < ig.size(); ++i) {
      late_g += ig[i];
      late_r += ir[i];
    }
    CHECK(late_r > late_g);
    // near the initialization both landscapes look mild: indices well below
    // the mid-training peaks
    CHECK(ig[0] < 0.1);
    CHECK(ir[0] < 0.1);
  }
}

TEST_CASE("divergent training exits nonzero but keeps partial artifacts") {
  Scratch scratch;
  const fs::path out = scratch / "div";
  const int code =
      run("train --problem box1d_cubic --network linear1d --loss dgm"
          " --epochs 5 --quad simpson:51 --lr 1e200 --out " + out.string(),
          scratch / "div.log");
  CHECK(code == 3);
  CHECK(fs::exists(out / "config.echo"));
  CHECK(fs::exists(out / "trajectory.csv"));
  CHECK(slurp(scratch / "div.log.err").find("diverged") != std::string::npos);
}

TEST_CASE("all-degenerate probe reports a numerical error") {
  Scratch scratch;
  Checkpoint ck;
  ck.spec = {NetKind::ResNet, 1, 4, 1, Activation::Swish};
  ck.theta.assign(param_count(ck.spec), 0.0);  // every filter norm is zero
  const fs::path path = scratch / "zero.json";
  write_checkpoint(path, ck);
  const int code = run("roughness --checkpoint " + path.string() +
                           " --problem box1d_sine --loss dgm --quad simpson:51"
                           " --M 4 --m 4 --out " + (scratch / "x").string(),
                       scratch / "zz.log");
  CHECK(code == 3);
  CHECK(slurp(scratch / "zz.log.err").find("degenerate") != std::string::npos);
}

TEST_CASE("sigmoid activation trains through the CLI") {
  Scratch scratch;
  const fs::path out = scratch / "sig";
  CHECK(run("train --problem box1d_sine --network fcnet --width 3 --blocks 1"
            " --activation sigmoid --loss drm --epochs 100 --quad simpson:101"
            " --out " + out.string(),
            scratch / "sig.log") == 0);
  const Checkpoint ck = read_checkpoint(out / "epoch_100.json");
  CHECK(ck.spec.activation == Activation::Sigmoid);
}

TEST_CASE("checkpoint/problem mismatch is diagnosed") {
  Scratch scratch;
  Checkpoint ck;
  ck.spec = {NetKind::ResNet, 3, 4, 1, Activation::Swish};
  ck.theta.assign(param_count(ck.spec), 0.1);
  const fs::path path = scratch / "mismatch.json";
  write_checkpoint(path, ck);
  const int code = run("roughness --checkpoint " + path.string() +
                           " --problem box1d_sine --loss dgm --M 4 --m 4 "
                           "--out " + (scratch / "x").string(),
                       scratch / "mm.log");
  CHECK(code == 2);
  CHECK(slurp(scratch / "mm.log.err").find("mismatch") != std::string::npos);
}
