#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sdd/distribution.hpp"

namespace sdd {

enum class Estimator { Mle, Js, Jspp };

std::string to_string(Estimator e);

using Vector3 = std::array<double, 3>;

/// MLE: x.  JS: (1 - 1/|x|^2) x.  JSPP: max(0, 1 - 1/|x|^2) x.
/// If |x|^2 is exactly zero the shrinkage estimators return x unchanged.
Vector3 estimate(const Vector3& x, Estimator kind);

/// Squared Euclidean distance between estimate and theta.
double loss(const Vector3& theta, const Vector3& est);

struct SteinConfig {
  Vector3 theta{0.0, 0.0, 0.0};
  std::uint64_t draws = 1'000'000;
  std::uint64_t seed = 0;
  std::vector<Estimator> estimators{Estimator::Mle, Estimator::Js, Estimator::Jspp};
  unsigned threads = 0;  // 0: SD_DECIDE_THREADS env, then hardware concurrency
};

/// Empirical CDF of loss draws.  Stores exact sorted samples up to
/// kExactStorageLimit draws, otherwise a fixed 4096-bin histogram over
/// [0, 50] plus an overflow bin.
class EmpiricalCdf {
 public:
  static constexpr std::uint64_t kExactStorageLimit = 1'000'000;
  static constexpr std::size_t kHistogramBins = 4096;
  static constexpr double kHistogramLo = 0.0;
  static constexpr double kHistogramHi = 50.0;

  EmpiricalCdf() = default;  // empty; populate via the factories

  static EmpiricalCdf from_samples(std::vector<double> values);
  static EmpiricalCdf from_histogram(std::vector<std::uint64_t> bin_counts,
                                     std::uint64_t overflow_count);

  std::uint64_t count() const { return count_; }
  bool exact() const { return exact_; }
  const std::vector<double>& samples() const;  // exact mode only

  /// P(loss <= t).  Histogram mode resolves t to the last full bin edge.
  double cdf(double t) const;

  /// Two-sided Kolmogorov distance to a reference CDF (exact over samples in
  /// exact mode, over bin edges in histogram mode).
  double ks_distance(const std::function<double(double)>& reference_cdf) const;

  /// Distribution binned onto the fixed histogram grid; each bin's mass sits
  /// at its right edge, overflow at kHistogramHi plus one bin width.
  DiscreteDistribution binned() const;

 private:
  bool exact_ = true;
  std::uint64_t count_ = 0;
  std::vector<double> samples_;             // exact mode, sorted
  std::vector<std::uint64_t> bins_;         // histogram mode
  std::uint64_t overflow_ = 0;
  std::vector<std::uint64_t> cum_bins_;     // prefix counts
};

struct EstimatorRun {
  Estimator kind = Estimator::Mle;
  EmpiricalCdf cdf;
  double mean_loss = 0.0;
  double variance = 0.0;  // unbiased sample variance of loss
  double std_error() const;
};

struct SimulationResult {
  SteinConfig config;
  std::vector<EstimatorRun> runs;

  const EstimatorRun& run(Estimator kind) const;
};

/// Seeded Monte Carlo of x ~ N(theta, I_3) in fixed-size chunks with
/// per-chunk derived seed streams; output is independent of thread count.
SimulationResult simulate(const SteinConfig& config);

/// chi^2_3 CDF in closed form via the error function.
double chi2_3_cdf(double u);

/// Exact loss CDF of each estimator at theta = 0, where |x|^2 ~ chi^2_3 and
/// the loss is a closed-form function of u = |x|^2.
double theta0_exact_cdf(Estimator kind, double t);

struct Crossing {
  double lo = 0.0;
  double hi = 0.0;
  int sign_before = 0;  // sign of cdf_a - cdf_b before the crossing
  int sign_after = 0;
};

struct CrossingReport {
  std::vector<Crossing> crossings;
  /// Sign of cdf_a - cdf_b when no crossing was found: -1, 0, +1 (0 means the
  /// difference never left the zero band).
  int uniform_sign = 0;
};

struct CrossingScanOptions {
  std::size_t scan_points = 4097;
  /// |difference| below this counts as sign zero; keep 0 for exact CDFs and
  /// set to a few Monte Carlo standard errors for empirical ones.
  double zero_band = 0.0;
  /// Bisection refinement iterations used when zero_band is 0.
  int refine_iterations = 60;
};

/// Locates sign changes of cdf_a - cdf_b on [t_lo, t_hi].
CrossingReport find_crossing(const std::function<double(double)>& cdf_a,
                             const std::function<double(double)>& cdf_b, double t_lo, double t_hi,
                             const CrossingScanOptions& options = {});

}  // namespace sdd
