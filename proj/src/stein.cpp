#include "sdd/stein.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace sdd {

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::Mle: return "mle";
    case Estimator::Js: return "js";
    case Estimator::Jspp: return "jspp";
  }
  return "unknown";
}

Vector3 estimate(const Vector3& x, Estimator kind) {
  if (kind == Estimator::Mle) return x;
  const double n2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  if (n2 == 0.0) return x;  // measure-zero guard: keep the observation
  double factor = 1.0 - 1.0 / n2;
  if (kind == Estimator::Jspp) factor = std::max(0.0, factor);
  return {factor * x[0], factor * x[1], factor * x[2]};
}

double loss(const Vector3& theta, const Vector3& est) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double d = est[i] - theta[i];
    acc += d * d;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Empirical CDF storage

EmpiricalCdf EmpiricalCdf::from_samples(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("EmpiricalCdf: no samples");
  EmpiricalCdf e;
  e.exact_ = true;
  e.count_ = values.size();
  e.samples_ = std::move(values);
  std::sort(e.samples_.begin(), e.samples_.end());
  return e;
}

EmpiricalCdf EmpiricalCdf::from_histogram(std::vector<std::uint64_t> bin_counts,
                                          std::uint64_t overflow_count) {
  if (bin_counts.size() != kHistogramBins)
    throw std::invalid_argument("EmpiricalCdf: expected " + std::to_string(kHistogramBins) +
                                " bins");
  EmpiricalCdf e;
  e.exact_ = false;
  e.bins_ = std::move(bin_counts);
  e.overflow_ = overflow_count;
  e.cum_bins_.resize(e.bins_.size());
  std::uint64_t cum = 0;
  for (std::size_t i = 0; i < e.bins_.size(); ++i) {
    cum += e.bins_[i];
    e.cum_bins_[i] = cum;
  }
  e.count_ = cum + overflow_count;
  if (e.count_ == 0) throw std::invalid_argument("EmpiricalCdf: no samples");
  return e;
}

const std::vector<double>& EmpiricalCdf::samples() const {
  if (!exact_) throw std::logic_error("EmpiricalCdf::samples: histogram mode");
  return samples_;
}

double EmpiricalCdf::cdf(double t) const {
  if (exact_) {
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), t);
    return static_cast<double>(it - samples_.begin()) / static_cast<double>(count_);
  }
  if (t < kHistogramLo) return 0.0;
  const double width = (kHistogramHi - kHistogramLo) / static_cast<double>(kHistogramBins);
  // Count bins whose upper edge does not exceed t.
  const auto full = static_cast<std::size_t>(
      std::min(static_cast<double>(kHistogramBins), std::floor((t - kHistogramLo) / width)));
  if (full == 0) return 0.0;
  return static_cast<double>(cum_bins_[full - 1]) / static_cast<double>(count_);
}

double EmpiricalCdf::ks_distance(const std::function<double(double)>& reference_cdf) const {
  double d = 0.0;
  if (exact_) {
    // Walk runs of tied values so references with atoms (the positive-part
    // estimator has one at zero loss) are compared jump-to-jump: the ECDF
    // value after the run against F(x), the value before the run against the
    // left limit F(x-).
    const double n = static_cast<double>(count_);
    std::size_t i = 0;
    while (i < samples_.size()) {
      const double x = samples_[i];
      std::size_t j = i;
      while (j < samples_.size() && samples_[j] == x) ++j;
      const double f_at = reference_cdf(x);
      const double f_before = reference_cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
      d = std::max(d, std::fabs(f_at - static_cast<double>(j) / n));
      d = std::max(d, std::fabs(f_before - static_cast<double>(i) / n));
      i = j;
    }
    return d;
  }
  const double width = (kHistogramHi - kHistogramLo) / static_cast<double>(kHistogramBins);
  for (std::size_t i = 0; i < kHistogramBins; ++i) {
    const double edge = kHistogramLo + width * static_cast<double>(i + 1);
    d = std::max(d, std::fabs(reference_cdf(edge) - cdf(edge)));
  }
  return d;
}

DiscreteDistribution EmpiricalCdf::binned() const {
  const double width = (kHistogramHi - kHistogramLo) / static_cast<double>(kHistogramBins);
  std::vector<std::uint64_t> counts(kHistogramBins, 0);
  std::uint64_t overflow = 0;
  if (exact_) {
    for (double v : samples_) {
      if (v >= kHistogramHi) {
        ++overflow;
        continue;
      }
      const auto bin = static_cast<std::size_t>(
          std::max(0.0, std::floor((v - kHistogramLo) / width)));
      ++counts[std::min(bin, kHistogramBins - 1)];
    }
  } else {
    counts = bins_;
    overflow = overflow_;
  }
  std::vector<DiscreteDistribution::Atom> atoms;
  atoms.reserve(kHistogramBins + 1);
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < kHistogramBins; ++i) {
    if (counts[i] == 0) continue;
    const double edge = kHistogramLo + width * static_cast<double>(i + 1);
    atoms.push_back({edge, static_cast<double>(counts[i]) / n});
  }
  if (overflow > 0) atoms.push_back({kHistogramHi + width, static_cast<double>(overflow) / n});
  return DiscreteDistribution::from_atoms(std::move(atoms));
}

double EstimatorRun::std_error() const {
  return std::sqrt(variance / static_cast<double>(cdf.count()));
}

const EstimatorRun& SimulationResult::run(Estimator kind) const {
  for (const EstimatorRun& r : runs) {
    if (r.kind == kind) return r;
  }
  throw std::out_of_range("SimulationResult: estimator not simulated");
}

// ---------------------------------------------------------------------------
// Seeded chunked Monte Carlo

namespace {

constexpr std::uint64_t kChunkDraws = 1 << 16;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) {
  return splitmix64(splitmix64(seed) + chunk + 1);
}

// Box-Muller pairs over a per-chunk mt19937_64 stream.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));  // 1-u1 in (0,1]
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;  // 53-bit uniform in [0,1)
  }

  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SD_DECIDE_THREADS")) {
    char* end = nullptr;
    const unsigned long parsed = std::strtoul(env, &end, 10);
    if (end != env && parsed > 0) return static_cast<unsigned>(parsed);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? hc : 1;
}

struct ChunkAccumulator {
  // One entry per configured estimator, chunk-local.
  std::vector<double> sum;
  std::vector<double> sumsq;
};

}  // namespace

SimulationResult simulate(const SteinConfig& config) {
  if (config.draws == 0) throw std::invalid_argument("simulate: draws must be >= 1");
  if (config.estimators.empty()) throw std::invalid_argument("simulate: no estimators selected");
  const std::size_t ne = config.estimators.size();
  const std::uint64_t num_chunks = (config.draws + kChunkDraws - 1) / kChunkDraws;
  const bool exact = config.draws <= EmpiricalCdf::kExactStorageLimit;

  // Exact mode writes samples into disjoint per-chunk slots; histogram mode
  // accumulates integer bins (order-independent).  Float moments are kept per
  // chunk and reduced in index order so results never depend on scheduling.
  std::vector<std::vector<double>> values(ne);
  if (exact) {
    for (auto& v : values) v.resize(config.draws);
  }
  constexpr std::size_t bins = EmpiricalCdf::kHistogramBins;
  const double bin_width =
      (EmpiricalCdf::kHistogramHi - EmpiricalCdf::kHistogramLo) / static_cast<double>(bins);
  std::vector<ChunkAccumulator> chunk_stats(num_chunks);

  const unsigned threads =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(config.threads), num_chunks));
  std::vector<std::vector<std::uint64_t>> thread_bins;
  std::vector<std::vector<std::uint64_t>> thread_overflow;
  if (!exact) {
    thread_bins.assign(threads, std::vector<std::uint64_t>(bins * ne, 0));
    thread_overflow.assign(threads, std::vector<std::uint64_t>(ne, 0));
  }

  auto worker = [&](unsigned tid) {
    for (std::uint64_t chunk = tid; chunk < num_chunks; chunk += threads) {
      NormalSource normals(chunk_seed(config.seed, chunk));
      const std::uint64_t begin = chunk * kChunkDraws;
      const std::uint64_t end = std::min(config.draws, begin + kChunkDraws);
      ChunkAccumulator& acc = chunk_stats[chunk];
      acc.sum.assign(ne, 0.0);
      acc.sumsq.assign(ne, 0.0);
      for (std::uint64_t d = begin; d < end; ++d) {
        Vector3 x;
        for (std::size_t i = 0; i < 3; ++i) x[i] = config.theta[i] + normals.next();
        for (std::size_t e = 0; e < ne; ++e) {
          const double l = loss(config.theta, estimate(x, config.estimators[e]));
          acc.sum[e] += l;
          acc.sumsq[e] += l * l;
          if (exact) {
            values[e][d] = l;
          } else if (l >= EmpiricalCdf::kHistogramHi) {
            ++thread_overflow[tid][e];
          } else {
            const auto bin = static_cast<std::size_t>(
                std::max(0.0, std::floor((l - EmpiricalCdf::kHistogramLo) / bin_width)));
            ++thread_bins[tid][e * bins + std::min(bin, bins - 1)];
          }
        }
      }
    }
  };

  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (std::thread& t : pool) t.join();
  }

  SimulationResult result;
  result.config = config;
  result.runs.reserve(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    long double sum = 0.0L;
    long double sumsq = 0.0L;
    for (std::uint64_t chunk = 0; chunk < num_chunks; ++chunk) {
      sum += chunk_stats[chunk].sum[e];
      sumsq += chunk_stats[chunk].sumsq[e];
    }
    const double n = static_cast<double>(config.draws);
    const double mean = static_cast<double>(sum / n);
    double variance = 0.0;
    if (config.draws > 1)
      variance = static_cast<double>((sumsq - sum * sum / n) / (n - 1.0));

    EstimatorRun run;
    run.kind = config.estimators[e];
    run.mean_loss = mean;
    run.variance = std::max(0.0, variance);
    if (exact) {
      run.cdf = EmpiricalCdf::from_samples(std::move(values[e]));
    } else {
      std::vector<std::uint64_t> merged(bins, 0);
      std::uint64_t overflow = 0;
      for (unsigned t = 0; t < threads; ++t) {
        overflow += thread_overflow[t][e];
        for (std::size_t i = 0; i < bins; ++i) merged[i] += thread_bins[t][e * bins + i];
      }
      run.cdf = EmpiricalCdf::from_histogram(std::move(merged), overflow);
    }
    result.runs.push_back(std::move(run));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Exact oracle at theta = 0

double chi2_3_cdf(double u) {
  if (u <= 0.0) return 0.0;
  return std::erf(std::sqrt(0.5 * u)) -
         std::sqrt(2.0 * u / std::numbers::pi) * std::exp(-0.5 * u);
}

double theta0_exact_cdf(Estimator kind, double t) {
  if (t < 0.0) return 0.0;
  if (kind == Estimator::Mle) return chi2_3_cdf(t);
  // With u = |x|^2 ~ chi^2_3, the shrinkage loss is u - 2 + 1/u for u above
  // the positive-part cutoff; it stays below t exactly for u in [u1, u2],
  // the roots of u^2 - (2+t)u + 1 = 0 (note u1*u2 = 1).
  const double u2 = 0.5 * ((2.0 + t) + std::sqrt(t * (t + 4.0)));
  const double u1 = 1.0 / u2;
  if (kind == Estimator::Js) return chi2_3_cdf(u2) - chi2_3_cdf(u1);
  return chi2_3_cdf(u2);  // JSPP: zero loss for u <= 1 folds into [0, u2]
}

// ---------------------------------------------------------------------------
// CDF crossing scan

CrossingReport find_crossing(const std::function<double(double)>& cdf_a,
                             const std::function<double(double)>& cdf_b, double t_lo, double t_hi,
                             const CrossingScanOptions& options) {
  if (!(t_hi > t_lo)) throw std::invalid_argument("find_crossing: empty range");
  if (options.scan_points < 2) throw std::invalid_argument("find_crossing: need >= 2 scan points");
  const auto diff = [&](double t) { return cdf_a(t) - cdf_b(t); };
  const auto sign_of = [&](double d) {
    if (d > options.zero_band) return 1;
    if (d < -options.zero_band) return -1;
    return 0;
  };

  CrossingReport report;
  const double step = (t_hi - t_lo) / static_cast<double>(options.scan_points - 1);
  int prev_sign = 0;
  double prev_sign_t = t_lo;
  for (std::size_t i = 0; i < options.scan_points; ++i) {
    const double t = t_lo + step * static_cast<double>(i);
    const int s = sign_of(diff(t));
    if (s == 0) continue;
    if (prev_sign == 0) {
      report.uniform_sign = s;
    } else if (s != prev_sign) {
      Crossing crossing;
      crossing.sign_before = prev_sign;
      crossing.sign_after = s;
      double lo = prev_sign_t;
      double hi = t;
      if (options.zero_band == 0.0) {
        for (int it = 0; it < options.refine_iterations; ++it) {
          const double mid = 0.5 * (lo + hi);
          const int ms = sign_of(diff(mid));
          if (ms == prev_sign || ms == 0) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
      }
      crossing.lo = lo;
      crossing.hi = hi;
      report.crossings.push_back(crossing);
    }
    prev_sign = s;
    prev_sign_t = t;
  }
  if (!report.crossings.empty()) report.uniform_sign = 0;
  return report;
}

}  // namespace sdd
