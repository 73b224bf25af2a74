#pragma once

// Flat key = value run configuration. One file per run, every seed explicit,
// and serialization is lossless: the echo written into a run directory
// parses back to an equal RunConfig.

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "lprobe/errors.hpp"
#include "lprobe/io.hpp"
#include "lprobe/loss.hpp"
#include "lprobe/network.hpp"
#include "lprobe/problem.hpp"
#include "lprobe/quadrature.hpp"

namespace lprobe {

struct RunConfig {
  std::string problem;  // box1d_cubic | box1d_sine | boxnd_sine | sphere3d
  int dim = 1;          // spatial dimension for boxnd_sine
  std::string network = "resnet";  // resnet | fcnet | linear1d
  int width = 4;
  int blocks = 1;
  std::string activation = "swish";
  std::string loss = "dgm";
  std::string quad;  // simpson:N | mc:N:seed; empty resolves by dimension
  long epochs = 10000;
  double lr = 1e-3;
  std::uint64_t seed_init = 1;
  std::uint64_t seed_quad = 2;
  std::uint64_t seed_directions = 3;
  int probe_directions = 100;  // M
  double probe_l = 0.01;
  int probe_grid = 100;  // m
  std::string out;

  std::set<std::string> provided;  // keys seen while parsing / set by flags

  bool operator==(const RunConfig& other) const {
    return problem == other.problem && dim == other.dim &&
           network == other.network && width == other.width &&
           blocks == other.blocks && activation == other.activation &&
           loss == other.loss && quad == other.quad && epochs == other.epochs &&
           lr == other.lr && seed_init == other.seed_init &&
           seed_quad == other.seed_quad &&
           seed_directions == other.seed_directions &&
           probe_directions == other.probe_directions &&
           probe_l == other.probe_l && probe_grid == other.probe_grid &&
           out == other.out;
  }

  Problem make_problem() const { return problem_from_key(problem, dim); }

  NetworkSpec make_spec() const {
    NetworkSpec spec;
    spec.kind = kind_from_key(network);
    spec.d = make_problem().d;
    spec.w = width;
    spec.blocks = blocks;
    spec.activation = activation_from_key(activation);
    if (spec.kind == NetKind::Linear1DToy && spec.d != 1)
      throw ConfigError("linear1d network requires a 1D problem");
    return spec;
  }

  LossKind make_loss() const { return loss_from_key(loss); }

  /// Quadrature spec with the by-dimension batch-size defaults: Simpson with
  /// 200 intervals in 1D, Monte Carlo 1000 in 3D and 10000 otherwise.
  QuadSpec make_quad() const {
    if (!quad.empty()) return parse_quad_spec(quad);
    const int d = make_problem().d;
    QuadSpec spec;
    if (d == 1) {
      spec.scheme = QuadScheme::SimpsonComposite;
      spec.n = 200;
    } else {
      spec.scheme = QuadScheme::MonteCarlo;
      spec.n = d == 3 ? 1000 : 10000;
      spec.seed = seed_quad;
    }
    return spec;
  }
};

inline std::string serialize(const RunConfig& config) {
  std::ostringstream out;
  out << "problem = " << config.problem << "\n";
  out << "dim = " << config.dim << "\n";
  out << "network = " << config.network << "\n";
  out << "width = " << config.width << "\n";
  out << "blocks = " << config.blocks << "\n";
  out << "activation = " << config.activation << "\n";
  out << "loss = " << config.loss << "\n";
  out << "quad = " << config.quad << "\n";
  out << "epochs = " << config.epochs << "\n";
  out << "lr = " << fmt_g17(config.lr) << "\n";
  out << "seed_init = " << config.seed_init << "\n";
  out << "seed_quad = " << config.seed_quad << "\n";
  out << "seed_directions = " << config.seed_directions << "\n";
  out << "probe_directions = " << config.probe_directions << "\n";
  out << "probe_l = " << fmt_g17(config.probe_l) << "\n";
  out << "probe_grid = " << config.probe_grid << "\n";
  out << "out = " << config.out << "\n";
  return out.str();
}

namespace detail {
inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}
}  // namespace detail

inline RunConfig parse_run_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    try {
      if (key == "problem") config.problem = value;
      else if (key == "dim") config.dim = std::stoi(value);
      else if (key == "network") config.network = value;
      else if (key == "width") config.width = std::stoi(value);
      else if (key == "blocks") config.blocks = std::stoi(value);
      else if (key == "activation") config.activation = value;
      else if (key == "loss") config.loss = value;
      else if (key == "quad") config.quad = value;
      else if (key == "epochs") config.epochs = std::stol(value);
      else if (key == "lr") config.lr = std::stod(value);
      else if (key == "seed_init") config.seed_init = std::stoull(value);
      else if (key == "seed_quad") config.seed_quad = std::stoull(value);
      else if (key == "seed_directions") config.seed_directions = std::stoull(value);
      else if (key == "probe_directions") config.probe_directions = std::stoi(value);
      else if (key == "probe_l") config.probe_l = std::stod(value);
      else if (key == "probe_grid") config.probe_grid = std::stoi(value);
      else if (key == "out") config.out = value;
      else throw ConfigError("unknown config key: " + key);
    } catch (const std::invalid_argument&) {
      throw ConfigError("config key '" + key + "': bad value '" + value + "'");
    } catch (const std::out_of_range&) {
      throw ConfigError("config key '" + key + "': value out of range");
    }
    config.provided.insert(key);
  }
  return config;
}

inline void require_keys(const RunConfig& config,
                         std::initializer_list<const char*> keys) {
  for (const char* key : keys)
    if (!config.provided.count(key))
      throw ConfigError(std::string("missing required config key: ") + key);
}

}  // namespace lprobe
