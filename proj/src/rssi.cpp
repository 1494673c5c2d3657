#include "sfw/rssi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "sfw/error.hpp"
#include "sfw/keyvalue.hpp"

namespace sfw {

std::vector<RssiSample> smooth_rssi(std::span<const RssiSample> trace,
                                    int window) {
  if (trace.empty()) throw Error(ErrorCode::kEmptyTrace, "empty RSSI trace");
  if (window < 1 || window % 2 == 0 ||
      static_cast<std::size_t>(window) > trace.size()) {
    throw Error(ErrorCode::kInvalidWindow,
                fmt::format("window {} invalid for trace of {} samples", window,
                            trace.size()));
  }
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(trace.size());
  const std::ptrdiff_t half = window / 2;
  std::vector<RssiSample> out(trace.begin(), trace.end());
  std::vector<double> buf;
  buf.reserve(static_cast<std::size_t>(window));
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t h = std::min({half, i, n - 1 - i});
    buf.clear();
    for (std::ptrdiff_t j = i - h; j <= i + h; ++j) buf.push_back(trace[j].rssi);
    auto mid = buf.begin() + h;
    std::nth_element(buf.begin(), mid, buf.end());
    out[i].rssi = *mid;
  }
  return out;
}

namespace {

// Sum of squared deviations of sorted[i, j) from their mean, via prefix sums.
struct SplitCost {
  std::vector<double> s, ss;

  explicit SplitCost(const std::vector<double>& sorted) : s{0.0}, ss{0.0} {
    // Centering keeps the prefix-sum differences well conditioned.
    double mean = 0.0;
    for (const double x : sorted) mean += x;
    mean /= static_cast<double>(sorted.size());
    for (const double x : sorted) {
      s.push_back(s.back() + (x - mean));
      ss.push_back(ss.back() + (x - mean) * (x - mean));
    }
  }
  double operator()(std::size_t i, std::size_t j) const {
    const double sum = s[j] - s[i];
    return std::max(0.0, ss[j] - ss[i] - sum * sum / static_cast<double>(j - i));
  }
};

// Globally optimal 1-D k-means on sorted data. Optimal clusters are
// contiguous runs, so a dynamic program over split points finds them; the
// best split index is monotone in the prefix length, which lets each layer
// be solved by divide and conquer in O(n log n). Returns ascending means.
std::vector<double> optimal_contiguous_means(const std::vector<double>& sorted,
                                             std::size_t kc) {
  const std::size_t n = sorted.size();
  const SplitCost cost(sorted);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // best[k][j]: cost of k + 1 clusters over the first j points.
  std::vector<std::vector<double>> best(kc, std::vector<double>(n + 1, kInf));
  std::vector<std::vector<std::size_t>> split(kc, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t j = 1; j <= n; ++j) best[0][j] = cost(0, j);

  for (std::size_t k = 1; k < kc; ++k) {
    auto solve = [&](auto&& self, std::size_t lo, std::size_t hi, std::size_t opt_lo,
                     std::size_t opt_hi) -> void {
      if (lo > hi) return;
      const std::size_t mid = lo + (hi - lo) / 2;
      double value = kInf;
      std::size_t arg = opt_lo;
      for (std::size_t i = std::max(opt_lo, k); i <= std::min(opt_hi, mid - 1); ++i) {
        const double v = best[k - 1][i] + cost(i, mid);
        if (v < value) {
          value = v;
          arg = i;
        }
      }
      best[k][mid] = value;
      split[k][mid] = arg;
      if (mid > lo) self(self, lo, mid - 1, opt_lo, arg);
      self(self, mid + 1, hi, arg, opt_hi);
    };
    solve(solve, k + 1, n, k, n - 1);
  }

  std::vector<double> means(kc);
  std::size_t j = n;
  for (std::size_t k = kc; k-- > 0;) {
    const std::size_t i = k == 0 ? 0 : split[k][j];
    double sum = 0.0;
    for (std::size_t p = i; p < j; ++p) sum += sorted[p];
    means[k] = sum / static_cast<double>(j - i);
    j = i;
  }
  return means;
}

}  // namespace

std::vector<double> fit_kmeans_1d(std::span<const double> samples,
                                  int clusters) {
  if (clusters < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least two clusters");
  }
  if (samples.size() < static_cast<std::size_t>(clusters)) {
    throw Error(ErrorCode::kTooFewSamples,
                fmt::format("{} samples for {} clusters", samples.size(),
                            clusters));
  }
  std::vector<double> data(samples.begin(), samples.end());
  std::sort(data.begin(), data.end());
  const std::size_t n = data.size();
  const std::size_t kc = static_cast<std::size_t>(clusters);

  std::vector<double> centroids = optimal_contiguous_means(data, kc);

  std::vector<std::size_t> assignment(n, kc);
  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_dist = std::abs(data[i] - centroids[0]);
      for (std::size_t j = 1; j < kc; ++j) {
        const double d = std::abs(data[i] - centroids[j]);
        if (d < best_dist) {
          best = j;
          best_dist = d;
        }
      }
      if (assignment[i] != best) {
        assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<double> sum(kc, 0.0);
    std::vector<std::size_t> count(kc, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[assignment[i]] += data[i];
      ++count[assignment[i]];
    }
    for (std::size_t j = 0; j < kc; ++j) {
      if (count[j] > 0) centroids[j] = sum[j] / static_cast<double>(count[j]);
    }
  }

  std::vector<std::size_t> count(kc, 0);
  for (const std::size_t a : assignment) ++count[a];
  std::sort(centroids.begin(), centroids.end(), std::greater<>());
  for (std::size_t j = 0; j < kc; ++j) {
    if (count[j] == 0 || (j > 0 && !(centroids[j] < centroids[j - 1]))) {
      throw Error(ErrorCode::kDegenerateClusters,
                  fmt::format("clusters collapse with {} centroids; lower the "
                              "maximum wall count",
                              clusters));
    }
  }
  return centroids;
}

std::vector<double> thresholds_from_centroids(
    std::span<const double> centroids) {
  if (centroids.size() < 2) {
    throw Error(ErrorCode::kNotDescending, "need at least two centroids");
  }
  std::vector<double> thresholds;
  thresholds.reserve(centroids.size() - 1);
  for (std::size_t k = 1; k < centroids.size(); ++k) {
    if (!(centroids[k] < centroids[k - 1])) {
      throw Error(ErrorCode::kNotDescending,
                  fmt::format("centroid {} ({}) not below centroid {} ({})", k,
                              centroids[k], k - 1, centroids[k - 1]));
    }
    thresholds.push_back((centroids[k - 1] + centroids[k]) / 2.0);
  }
  return thresholds;
}

RssiClassifier::RssiClassifier(std::vector<double> centroids)
    : centroids_(std::move(centroids)),
      thresholds_(thresholds_from_centroids(centroids_)) {}

RssiClassifier RssiClassifier::fit(std::span<const double> rssi,
                                   int max_walls) {
  for (const double p : rssi) {
    if (p < -100.0 || p > -20.0) {
      spdlog::debug("RSSI {} dBm outside the usual [-100, -20] range", p);
    }
  }
  return RssiClassifier(fit_kmeans_1d(rssi, max_walls + 1));
}

int RssiClassifier::classify(double rssi) const {
  // Thresholds descend; count how many lie at or above the measurement.
  int k = 0;
  for (const double t : thresholds_) {
    if (rssi > t) break;
    ++k;
  }
  return k;
}

void RssiClassifier::save(const std::filesystem::path& path) const {
  KeyValueFile kv;
  kv.set("K", max_walls());
  kv.set("centroids", centroids_);
  kv.set("thresholds", thresholds_);
  kv.save(path);
}

RssiClassifier RssiClassifier::load(const std::filesystem::path& path) {
  const auto kv = KeyValueFile::load(path);
  RssiClassifier c(kv.get_doubles("centroids"));
  if (kv.has("K") && kv.get_int("K") != c.max_walls()) {
    throw Error(ErrorCode::kMalformedFile,
                fmt::format("{}: K does not match centroid count",
                            path.string()));
  }
  return c;
}

}  // namespace sfw
