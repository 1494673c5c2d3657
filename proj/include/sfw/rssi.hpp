#ifndef SFW_RSSI_HPP_
#define SFW_RSSI_HPP_

#include <filesystem>
#include <span>
#include <vector>

namespace sfw {

struct RssiSample {
  double timestamp = 0.0;  // seconds
  double rssi = 0.0;       // dBm
};

inline constexpr int kDefaultSmoothingWindow = 11;
inline constexpr int kDefaultMaxWalls = 3;
inline constexpr int kMaxLloydIterations = 500;

// Centered running median. Near the ends the window shrinks symmetrically so
// it always has odd length. Throws kEmptyTrace, or kInvalidWindow when window
// is even, < 1 or longer than the trace.
std::vector<RssiSample> smooth_rssi(std::span<const RssiSample> trace,
                                    int window);

// One-dimensional Lloyd iteration started from the optimal contiguous
// partition of the sorted samples, so the result is the global optimum.
// Returns `clusters` centroids in strictly descending order.
// Throws kTooFewSamples or kDegenerateClusters.
std::vector<double> fit_kmeans_1d(std::span<const double> samples,
                                  int clusters);

// t_k = (C_{k-1} + C_k) / 2. Throws kNotDescending.
std::vector<double> thresholds_from_centroids(std::span<const double> centroids);

// Wall-count classifier: f(p) = 0 if p > t_1, k if t_k >= p > t_{k+1},
// K if p <= t_K.
class RssiClassifier {
 public:
  // Throws kNotDescending unless centroids are strictly descending and at
  // least two long.
  explicit RssiClassifier(std::vector<double> centroids);

  static RssiClassifier fit(std::span<const double> rssi, int max_walls);

  int max_walls() const { return static_cast<int>(thresholds_.size()); }
  const std::vector<double>& centroids() const { return centroids_; }
  const std::vector<double>& thresholds() const { return thresholds_; }

  int classify(double rssi) const;

  void save(const std::filesystem::path& path) const;
  static RssiClassifier load(const std::filesystem::path& path);

 private:
  std::vector<double> centroids_;
  std::vector<double> thresholds_;
};

}  // namespace sfw

#endif  // SFW_RSSI_HPP_
