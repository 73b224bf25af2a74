#pragma once

// File formats. All floats are written with 17 significant digits so that
// every file round-trips to the exact double; writes go through a temp file
// plus rename so readers never observe a partial file.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lprobe/errors.hpp"
#include "lprobe/landscape.hpp"
#include "lprobe/network.hpp"

namespace lprobe {

inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void atomic_write(const std::filesystem::path& path,
                         const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// --- network spec <-> keys --------------------------------------------------

inline std::string kind_key(NetKind kind) {
  switch (kind) {
    case NetKind::ResNet: return "resnet";
    case NetKind::FCNet: return "fcnet";
    case NetKind::Linear1DToy: return "linear1d";
  }
  return "?";
}

inline NetKind kind_from_key(const std::string& key) {
  if (key == "resnet") return NetKind::ResNet;
  if (key == "fcnet") return NetKind::FCNet;
  if (key == "linear1d") return NetKind::Linear1DToy;
  throw ConfigError("unknown network kind: " + key);
}

inline std::string activation_key(Activation act) {
  return act == Activation::Swish ? "swish" : "sigmoid";
}

inline Activation activation_from_key(const std::string& key) {
  if (key == "swish") return Activation::Swish;
  if (key == "sigmoid") return Activation::Sigmoid;
  throw ConfigError("unknown activation: " + key);
}

// --- checkpoints -------------------------------------------------------------

struct Checkpoint {
  NetworkSpec spec;
  std::uint64_t seed = 0;
  long epoch = 0;
  std::vector<double> theta;
};

inline std::string checkpoint_to_json(const Checkpoint& ck) {
  std::string out;
  out.reserve(64 + 24 * ck.theta.size());
  out += "{\n  \"spec\": {\"kind\": \"" + kind_key(ck.spec.kind) + "\"";
  out += ", \"d\": " + std::to_string(ck.spec.d);
  out += ", \"w\": " + std::to_string(ck.spec.w);
  out += ", \"N\": " + std::to_string(ck.spec.blocks);
  out += ", \"activation\": \"" + activation_key(ck.spec.activation) + "\"},\n";
  out += "  \"seed\": " + std::to_string(ck.seed) + ",\n";
  out += "  \"epoch\": " + std::to_string(ck.epoch) + ",\n";
  out += "  \"theta\": [";
  for (std::size_t i = 0; i < ck.theta.size(); ++i) {
    if (i) out += ", ";
    out += fmt_g17(ck.theta[i]);
  }
  out += "]\n}\n";
  return out;
}

inline void write_checkpoint(const std::filesystem::path& path,
                             const Checkpoint& ck) {
  atomic_write(path, checkpoint_to_json(ck));
}

inline Checkpoint read_checkpoint(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& err) {
    throw ConfigError("bad checkpoint " + path.string() + ": " + err.what());
  }
  Checkpoint ck;
  try {
    const auto& spec = j.at("spec");
    ck.spec.kind = kind_from_key(spec.at("kind").get<std::string>());
    ck.spec.d = spec.at("d").get<int>();
    ck.spec.w = spec.at("w").get<int>();
    ck.spec.blocks = spec.at("N").get<int>();
    ck.spec.activation =
        activation_from_key(spec.at("activation").get<std::string>());
    ck.seed = j.at("seed").get<std::uint64_t>();
    ck.epoch = j.at("epoch").get<long>();
    ck.theta = j.at("theta").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& err) {
    throw ConfigError("bad checkpoint " + path.string() + ": " + err.what());
  }
  if (ck.theta.size() != param_count(ck.spec))
    throw ConfigError("checkpoint " + path.string() + ": theta has " +
                      std::to_string(ck.theta.size()) + " entries, spec needs " +
                      std::to_string(param_count(ck.spec)));
  return ck;
}

// --- reports -----------------------------------------------------------------

inline std::string roughness_report_json(const RoughnessReport& report) {
  std::string out = "{";
  out += "\"M\": " + std::to_string(report.config.num_directions);
  out += ", \"l\": " + fmt_g17(report.config.half_length);
  out += ", \"m\": " + std::to_string(report.config.grid);
  out += ", \"seed\": " + std::to_string(report.config.seed);
  out += ", \"mu\": " + fmt_g17(report.mean);
  out += ", \"sigma\": " + fmt_g17(report.stddev);
  out += ", \"index\": " + fmt_g17(report.index);
  out += ", \"excluded\": " + std::to_string(report.excluded);
  out += "}";
  return out;
}

/// CSV with '.' decimals and 17-significant-digit floats.
class CsvWriter {
 public:
  explicit CsvWriter(std::string header) { text_ = std::move(header) += "\n"; }

  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    (append_field(first, fields), ...);
    text_ += "\n";
  }

  const std::string& text() const { return text_; }
  void save(const std::filesystem::path& path) const { atomic_write(path, text_); }

 private:
  void append_field(bool& first, double v) {
    if (!first) text_ += ",";
    first = false;
    text_ += fmt_g17(v);
  }
  void append_field(bool& first, long v) {
    if (!first) text_ += ",";
    first = false;
    text_ += std::to_string(v);
  }
  void append_field(bool& first, int v) { append_field(first, static_cast<long>(v)); }
  void append_field(bool& first, const std::string& v) {
    if (!first) text_ += ",";
    first = false;
    text_ += v;
  }

  std::string text_;
};

}  // namespace lprobe
