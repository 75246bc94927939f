#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hebbdual/linalg.hpp"

namespace hebbdual {

struct DatasetMeta {
  std::string kind;  // "regression" | "classification" | "spiked"
  std::size_t n = 0;
  std::size_t t = 0;
  std::uint64_t seed = 0;
  std::optional<double> noise;      // regression
  std::optional<bool> positive_w;   // regression
  std::optional<double> margin;     // classification
  std::optional<std::size_t> m;     // spiked
  std::optional<double> gap;        // spiked
};

struct DatasetTruth {
  std::optional<Vec> w;       // generating weights (regression/classification)
  std::optional<double> margin;
  std::optional<Mat> basis;   // n x m orthonormal spike directions (spiked)
};

struct Dataset {
  DatasetMeta meta;
  std::vector<Vec> x;  // t samples, each of length n
  std::optional<Vec> y;
  std::optional<DatasetTruth> truth;

  std::size_t n() const { return x.empty() ? meta.n : x.front().size(); }
  std::size_t t() const { return x.size(); }
};

// All generators draw from Xoshiro256(seed) in a documented, fixed order so
// the same call reproduces the same bytes on any platform.

// y_t = w*.x_t + noise * eps_t with w* and x_t standard normal (w* drawn
// first, then per sample: n feature draws followed by one noise draw).
// positive_w maps w* through componentwise |.| + 0.1 so an entropy learner
// can represent it.
Dataset gen_regression(std::size_t n, std::size_t t, double noise,
                       std::uint64_t seed, bool positive_w = false);

// Unit w* (n normal draws, normalized); labels alternate +1/-1; per sample n
// normal draws, reflected across the w* hyperplane if on the wrong side, then
// pushed along y w* until the signed margin is at least `margin`.
Dataset gen_classification(std::size_t n, std::size_t t, double margin,
                           std::uint64_t seed);

// x_t = Q diag(sqrt(gap) I_m, I_{n-m}) g_t with g_t standard normal and Q the
// Gram-Schmidt orthonormalization of an n x n normal matrix (drawn row-major).
// Unlabeled; truth carries the first m columns of Q.
Dataset gen_spiked(std::size_t n, std::size_t t, std::size_t m, double gap,
                   std::uint64_t seed);

// Re-runs the generator recorded in `meta`.
Dataset regenerate(const DatasetMeta& meta);

}  // namespace hebbdual
