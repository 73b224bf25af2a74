#pragma once

// Non-convexity probing around a reference point in parameter space:
//   1. draw M iid Gaussian directions,
//   2. rescale each filter block to the Frobenius norm of the matching
//      filter of the reference point (filter-wise normalization),
//   3. sample the loss on a uniform grid over [-l, l] along each direction,
//   4. compute the normalized total variation T of each 1D profile
//      (TV over interval length and value range: the graph scaled into a
//      unit square),
//   5. report the roughness index I = std(T) / mean(T).
// I vanishes for any quadratic landscape probed at its minimizer, so a
// positive index measures genuine non-quadratic oscillation. Also here: the
// eigenvalue flatness index V(k) = sum_{i<=k} log10(lambda_i), 2D slices for
// contour plots, and the roughness series along a training trajectory.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lprobe/errors.hpp"
#include "lprobe/network.hpp"
#include "lprobe/parallel.hpp"
#include "lprobe/rng.hpp"

namespace lprobe {

using LossFn = std::function<double(std::span<const double>)>;

struct Direction {
  std::vector<double> values;
  bool normalized = false;
};

struct ProbeConfig {
  int num_directions = 100;  // M
  double half_length = 0.01; // l
  int grid = 100;            // m; the grid has m+1 points
  std::uint64_t seed = 1;
};

inline void validate(const ProbeConfig& config) {
  if (config.num_directions < 2)
    throw UsageError("probe: need at least 2 directions");
  if (config.grid < 2) throw UsageError("probe: need grid >= 2");
  if (!(config.half_length > 0.0))
    throw UsageError("probe: interval half-length must be positive");
}

/// M iid standard-Gaussian directions, deterministic per seed.
inline std::vector<Direction> sample_directions(std::size_t length, int count,
                                                std::uint64_t seed) {
  if (count < 1) throw UsageError("sample_directions: count must be >= 1");
  Xoshiro256pp rng(seed);
  std::vector<Direction> directions(count);
  for (Direction& dir : directions) {
    dir.values.resize(length);
    for (double& v : dir.values) v = rng.gaussian();
  }
  return directions;
}

/// Filter-wise normalization: every filter block of the direction is scaled
/// to the Frobenius norm of the corresponding filter of theta. Blocks whose
/// reference filter has zero norm are zeroed (the scaling formula's limit);
/// zero direction blocks stay zero.
inline Direction filter_normalize(const Direction& direction,
                                  const ParamVector& theta) {
  if (direction.values.size() != theta.values.size())
    throw UsageError("filter_normalize: length mismatch");
  Direction out;
  out.values.assign(direction.values.size(), 0.0);
  out.normalized = true;
  for (const FilterRange& filter : theta.layout.filters) {
    double norm_d = 0.0, norm_t = 0.0;
    for (std::size_t i = filter.begin; i < filter.end; ++i) {
      norm_d += direction.values[i] * direction.values[i];
      norm_t += theta.values[i] * theta.values[i];
    }
    if (norm_t == 0.0 || norm_d == 0.0) continue;
    const double scale = std::sqrt(norm_t / norm_d);
    for (std::size_t i = filter.begin; i < filter.end; ++i)
      out.values[i] = direction.values[i] * scale;
  }
  return out;
}

/// Loss profile f(s_j) = J(theta + s_j d) on the uniform grid
/// s_j = l(2j/m - 1), j = 0..m. The midpoint hits theta exactly for even m.
inline std::vector<double> project_1d(const LossFn& loss,
                                      std::span<const double> theta,
                                      const Direction& direction, double l,
                                      int m) {
  if (!(l > 0.0)) throw UsageError("project_1d: l must be positive");
  if (m < 2) throw UsageError("project_1d: need m >= 2");
  if (direction.values.size() != theta.size())
    throw UsageError("project_1d: direction length mismatch");
  std::vector<double> samples(m + 1);
  std::vector<double> probe(theta.size());
  for (int j = 0; j <= m; ++j) {
    const double s = l * (2.0 * j / m - 1.0);
    for (std::size_t i = 0; i < theta.size(); ++i)
      probe[i] = theta[i] + s * direction.values[i];
    samples[j] = loss(probe);
    if (!std::isfinite(samples[j]))
      throw NumericalError("project_1d: non-finite loss at grid point j=" +
                           std::to_string(j));
  }
  return samples;
}

/// Normalized total variation of a sampled profile on [-l, l]:
///   T = (1/2l) * sum |f_{j+1} - f_j| / (f_max - f_min).
/// A flat profile (zero range) has no well-defined T; nullopt marks it so
/// callers can exclude and count it.
inline std::optional<double> normalized_tv(std::span<const double> samples,
                                           double l) {
  if (samples.size() < 3) throw UsageError("normalized_tv: need >= 3 samples");
  if (!(l > 0.0)) throw UsageError("normalized_tv: l must be positive");
  double lo = samples[0], hi = samples[0], tv = 0.0;
  for (std::size_t j = 1; j < samples.size(); ++j) {
    lo = std::min(lo, samples[j]);
    hi = std::max(hi, samples[j]);
    tv += std::abs(samples[j] - samples[j - 1]);
  }
  if (!(hi > lo)) return std::nullopt;
  return tv / (2.0 * l * (hi - lo));
}

struct RoughnessReport {
  std::vector<double> tvs;  // one per direction; NaN where excluded
  double mean = 0.0;
  double stddev = 0.0;  // population convention (divide by the valid count)
  double index = 0.0;   // I = stddev / mean
  int excluded = 0;
  ProbeConfig config;
};

/// Mean, population std and index over the finite entries of a TV list.
inline void summarize_tvs(std::span<const double> tvs, RoughnessReport& report) {
  double sum = 0.0;
  int valid = 0;
  for (double t : tvs)
    if (std::isfinite(t)) {
      sum += t;
      ++valid;
    }
  report.excluded = static_cast<int>(tvs.size()) - valid;
  if (valid == 0)
    throw NumericalError("roughness: all probe directions are degenerate-flat");
  report.mean = sum / valid;
  double ss = 0.0;
  for (double t : tvs)
    if (std::isfinite(t)) ss += (t - report.mean) * (t - report.mean);
  report.stddev = std::sqrt(ss / valid);
  report.index = report.stddev / report.mean;
}

/// The full probe pipeline: sample -> normalize -> project -> TV -> I.
inline RoughnessReport roughness_index(const LossFn& loss,
                                       const ParamVector& theta,
                                       const ProbeConfig& config) {
  validate(config);
  const auto raw =
      sample_directions(theta.values.size(), config.num_directions, config.seed);
  RoughnessReport report;
  report.config = config;
  report.tvs.assign(config.num_directions,
                    std::numeric_limits<double>::quiet_NaN());
  parallel_chunks(config.num_directions, 1,
                  [&](int, std::size_t i, std::size_t, std::size_t) {
    const Direction dir = filter_normalize(raw[i], theta);
    std::vector<double> samples;
    try {
      samples = project_1d(loss, theta.values, dir, config.half_length,
                           config.grid);
    } catch (const NumericalError& err) {
      throw NumericalError("direction " + std::to_string(i) + ": " + err.what());
    }
    const auto t = normalized_tv(samples, config.half_length);
    if (t) report.tvs[i] = *t;
  });
  summarize_tvs(report.tvs, report);
  return report;
}

/// V(k) = sum_{i=1..k} log10(lambda_i) over descending eigenvalues. When
/// lambda_k is not positive, k is truncated to the last positive eigenvalue;
/// effective_k reports the count actually used.
inline double eig_index(std::span<const double> eigenvalues_desc, int k,
                        int* effective_k = nullptr) {
  if (k < 1 || k > static_cast<int>(eigenvalues_desc.size()))
    throw UsageError("eig_index: k out of range");
  int used = 0;
  double v = 0.0;
  for (int i = 0; i < k; ++i) {
    if (!(eigenvalues_desc[i] > 0.0)) break;
    v += std::log10(eigenvalues_desc[i]);
    ++used;
  }
  if (effective_k) *effective_k = used;
  if (used == 0) throw UsageError("eig_index: no positive eigenvalues");
  return v;
}

struct Slice2D {
  int n = 0;        // grid has (n+1)^2 points
  double l = 0.0;
  std::vector<double> values;  // row-major, [i*(n+1)+j] at (alpha_i, beta_j)
  Direction dir_a, dir_b;

  double at(int i, int j) const { return values[i * (n + 1) + j]; }
  double coord(int i) const { return l * (2.0 * i / n - 1.0); }
};

/// Loss surface J(theta + alpha d1 + beta d2) over [-l, l]^2 along two
/// independent filter-normalized Gaussian directions. For even n the center
/// grid point evaluates the loss at theta itself.
inline Slice2D slice_2d(const LossFn& loss, const ParamVector& theta,
                        std::uint64_t seed, double l, int n) {
  if (n < 2) throw UsageError("slice_2d: need n >= 2");
  if (!(l > 0.0)) throw UsageError("slice_2d: l must be positive");
  const auto raw = sample_directions(theta.values.size(), 2, seed);
  Slice2D slice;
  slice.n = n;
  slice.l = l;
  slice.dir_a = filter_normalize(raw[0], theta);
  slice.dir_b = filter_normalize(raw[1], theta);
  slice.values.assign(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
  parallel_chunks(n + 1, 1, [&](int, std::size_t i, std::size_t, std::size_t) {
    std::vector<double> probe(theta.values.size());
    const double alpha = slice.coord(static_cast<int>(i));
    for (int j = 0; j <= n; ++j) {
      const double beta = slice.coord(j);
      for (std::size_t idx = 0; idx < probe.size(); ++idx)
        probe[idx] = theta.values[idx] + alpha * slice.dir_a.values[idx] +
                     beta * slice.dir_b.values[idx];
      const double value = loss(probe);
      if (!std::isfinite(value))
        throw NumericalError("slice_2d: non-finite loss at grid (" +
                             std::to_string(i) + "," + std::to_string(j) + ")");
      slice.values[i * (n + 1) + j] = value;
    }
  });
  return slice;
}

struct RoughnessSeriesPoint {
  long epoch = 0;
  double index = std::numeric_limits<double>::quiet_NaN();
  std::string error;  // non-empty when this point failed
};

struct Snapshot {
  long epoch = 0;
  std::vector<double> theta;
};

/// Roughness index at each trajectory snapshot, with the same raw direction
/// seed throughout (directions are re-normalized against each snapshot).
/// Failures are recorded and the series continues.
inline std::vector<RoughnessSeriesPoint> trajectory_roughness(
    const LossFn& loss, const FilterLayout& layout,
    std::span<const Snapshot> snapshots, const ProbeConfig& config) {
  if (snapshots.empty())
    throw UsageError("trajectory_roughness: no snapshots");
  std::vector<RoughnessSeriesPoint> series;
  series.reserve(snapshots.size());
  for (const Snapshot& snap : snapshots) {
    RoughnessSeriesPoint point;
    point.epoch = snap.epoch;
    try {
      ParamVector theta{snap.theta, layout};
      point.index = roughness_index(loss, theta, config).index;
    } catch (const std::exception& err) {
      point.error = err.what();
    }
    series.push_back(std::move(point));
  }
  return series;
}

}  // namespace lprobe
