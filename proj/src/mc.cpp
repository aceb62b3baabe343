#include "liecramer/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "liecramer/random.hpp"

namespace liecramer {

namespace {

constexpr std::size_t kChunk = 4096;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct ChunkTally {
  std::size_t samples = 0;
  std::size_t hits = 0;
  double sum_w = 0.0;
  double sum_w2 = 0.0;
};

struct Sampler {
  std::vector<Matrix> steps;         // exp(X_i / n)
  std::vector<double> cumulative;
  std::vector<double> log_ratio;     // -<lambda, X_i> + Lambda(lambda), empty if untilted
};

Sampler make_sampler(const IncrementDistribution& dist, std::size_t n,
                     const std::optional<AlgebraVector>& lambda) {
  Sampler s;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (const auto& a : dist.atoms()) s.steps.push_back(expm(inv_n * a.vector.matrix()));
  if (!lambda) {
    s.cumulative = dist.cumulative_weights();
    return s;
  }
  const double lam = log_mgf(dist, *lambda);
  double acc = 0.0;
  for (const auto& a : dist.atoms()) {
    const double e = lambda->dot(a.vector);
    acc += a.weight * std::exp(e - lam);
    s.cumulative.push_back(acc);
    s.log_ratio.push_back(lam - e);
  }
  return s;
}

ChunkTally run_chunk(const Sampler& s, std::size_t n, const BallEvent& event, std::size_t count,
                     std::uint64_t seed, std::uint64_t stream) {
  RandomStream rng(seed, stream);
  const auto d = s.steps.front().rows();
  Matrix cur(d, d), next(d, d);
  ChunkTally t;
  const bool tilted = !s.log_ratio.empty();
  for (std::size_t k = 0; k < count; ++k) {
    cur.setIdentity();
    double log_w = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t i = IncrementDistribution::pick(s.cumulative, rng.uniform());
      next.noalias() = cur * s.steps[i];
      cur.swap(next);
      if (tilted) log_w += s.log_ratio[i];
    }
    ++t.samples;
    if (event.contains(cur)) {
      ++t.hits;
      const double w = tilted ? std::exp(log_w) : 1.0;
      t.sum_w += w;
      t.sum_w2 += w * w;
    }
  }
  return t;
}

ProbabilityEstimate run(const IncrementDistribution& dist, std::size_t n, const BallEvent& event,
                        std::size_t samples, std::uint64_t seed, std::size_t workers,
                        const std::optional<AlgebraVector>& lambda) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "estimate_probability: n must be positive");
  if (samples == 0) fail(ErrorKind::InvalidArgument, "estimate_probability: samples must be positive");
  if (event.center().dim() != dist.dim()) {
    fail(ErrorKind::InvalidArgument, "estimate_probability: event and distribution dimensions differ");
  }
  const Sampler sampler = make_sampler(dist, n, lambda);
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<ChunkTally> tallies(chunks);
  auto work = [&](std::size_t c) {
    const std::size_t count = std::min(kChunk, samples - c * kChunk);
    const std::uint64_t stream = (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(c);
    tallies[c] = run_chunk(sampler, n, event, count, seed, stream);
  };
  workers = std::max<std::size_t>(1, std::min(workers, chunks));
  if (workers == 1) {
    for (std::size_t c = 0; c < chunks; ++c) work(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          for (std::size_t c = next++; c < chunks; c = next++) work(c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  ChunkTally total;
  for (const auto& t : tallies) {
    total.samples += t.samples;
    total.hits += t.hits;
    total.sum_w += t.sum_w;
    total.sum_w2 += t.sum_w2;
  }
  ProbabilityEstimate e;
  e.samples = total.samples;
  e.hits = total.hits;
  const double nn = static_cast<double>(total.samples);
  if (!lambda) {
    e.p_hat = static_cast<double>(total.hits) / nn;
    const auto [lo, hi] = wilson_interval(total.hits, total.samples);
    e.lower = lo;
    e.upper = hi;
    e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / nn);
    e.ess = static_cast<double>(total.hits);
    return e;
  }
  e.tilted = true;
  e.p_hat = total.sum_w / nn;
  const double var = std::max(0.0, total.sum_w2 / nn - e.p_hat * e.p_hat);
  e.std_error = std::sqrt(var / nn);
  e.ess = total.sum_w2 > 0.0 ? total.sum_w * total.sum_w / total.sum_w2 : 0.0;
  e.degenerate = e.ess < 10.0;
  if (total.hits == 0) {
    e.lower = 0.0;
    e.upper = 1.0;
  } else {
    e.lower = std::max(0.0, e.p_hat - kWilsonZ * e.std_error);
    e.upper = std::min(1.0, e.p_hat + kWilsonZ * e.std_error);
  }
  return e;
}

double rate_of(double p, std::size_t n) {
  if (!(p > 0.0)) return kInf;
  return std::max(0.0, -std::log(std::min(p, 1.0)) / static_cast<double>(n));
}

}  // namespace

BallEvent::BallEvent(GroupElement center, double radius)
    : center_(std::move(center)), radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    fail(ErrorKind::InvalidArgument, "BallEvent: radius must be positive and finite");
  }
  center_inv_ = center_.inverse().matrix();
}

bool BallEvent::contains(const Matrix& h) const {
  const Matrix z = center_inv_ * h;
  const auto d = z.rows();
  // |log Z| <= r forces |Z - I| <= e^r - 1.
  if ((z - Matrix::Identity(d, d)).norm() > std::expm1(radius_) * (1.0 + 1e-9) + 1e-12) return false;
  try {
    return log_matrix(GroupElement(z)).norm() <= radius_;
  } catch (const Error&) {
    return false;
  }
}

bool BallEvent::contains(const GroupElement& h) const { return contains(h.matrix()); }

std::pair<double, double> wilson_interval(std::size_t hits, std::size_t samples) {
  if (samples == 0) fail(ErrorKind::InvalidArgument, "wilson_interval: no samples");
  const double nn = static_cast<double>(samples);
  if (hits == 0) {
    const double z2 = kOneSidedZ * kOneSidedZ;
    return {0.0, z2 / (nn + z2)};
  }
  const double p = static_cast<double>(hits) / nn;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

ProbabilityEstimate estimate_probability(const IncrementDistribution& dist, std::size_t n,
                                         const BallEvent& event, std::size_t samples,
                                         std::uint64_t seed, std::size_t workers) {
  return run(dist, n, event, samples, seed, workers, std::nullopt);
}

ProbabilityEstimate tilted_estimator(const IncrementDistribution& dist, std::size_t n,
                                     const BallEvent& event, std::size_t samples,
                                     const AlgebraVector& lambda, std::uint64_t seed,
                                     std::size_t workers) {
  if (lambda.dim() != dist.dim()) fail(ErrorKind::InvalidArgument, "tilted_estimator: tilt dimension mismatch");
  if (lambda.matrix().isZero(0.0)) return run(dist, n, event, samples, seed, workers, std::nullopt);
  return run(dist, n, event, samples, seed, workers, lambda);
}

const char* to_string(TiltPolicy p) noexcept {
  switch (p) {
    case TiltPolicy::None: return "none";
    case TiltPolicy::Fixed: return "fixed";
    case TiltPolicy::Auto: return "auto";
  }
  return "unknown";
}

TiltPolicy parse_tilt_policy(const std::string& s) {
  if (s == "none") return TiltPolicy::None;
  if (s == "fixed") return TiltPolicy::Fixed;
  if (s == "auto") return TiltPolicy::Auto;
  fail(ErrorKind::InvalidArgument, "unknown tilt policy '" + s + "' (expected none, fixed or auto)");
}

std::optional<AlgebraVector> auto_tilt(const IncrementDistribution& dist, const BallEvent& event) {
  try {
    const AlgebraVector x = log_matrix(event.center());
    const LegendreResult r = legendre(dist, x);
    if (r.domain == DomainClass::Inside && r.maximizer) return r.maximizer;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::OutOfDomain) throw;
  }
  return std::nullopt;
}

RateCurve empirical_rate_curve(const IncrementDistribution& dist, const BallEvent& event,
                               const std::vector<std::size_t>& ns, std::size_t samples,
                               std::uint64_t seed, const TiltSpec& tilt, std::size_t workers) {
  if (samples == 0) fail(ErrorKind::InvalidArgument, "empirical_rate_curve: samples must be positive");
  if (ns.empty()) fail(ErrorKind::InvalidArgument, "empirical_rate_curve: empty n list");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] == 0) fail(ErrorKind::InvalidArgument, "empirical_rate_curve: n must be positive");
    if (i > 0 && ns[i] <= ns[i - 1]) fail(ErrorKind::InvalidArgument, "empirical_rate_curve: ns must be increasing");
  }
  RateCurve curve;
  curve.policy = tilt.policy;
  if (tilt.policy == TiltPolicy::Fixed) {
    if (!tilt.lambda) fail(ErrorKind::InvalidArgument, "empirical_rate_curve: fixed tilt needs lambda");
    curve.tilt = tilt.lambda;
  } else if (tilt.policy == TiltPolicy::Auto) {
    curve.tilt = auto_tilt(dist, event);
  }
  for (std::size_t n : ns) {
    RateCurvePoint p;
    p.n = n;
    p.estimate = curve.tilt ? tilted_estimator(dist, n, event, samples, *curve.tilt, seed, workers)
                            : estimate_probability(dist, n, event, samples, seed, workers);
    p.rate = rate_of(p.estimate.p_hat, n);
    p.rate_lower = rate_of(p.estimate.upper, n);
    p.rate_upper = rate_of(p.estimate.lower, n);
    curve.points.push_back(p);
  }
  std::ostringstream os;
  os << "finite-n estimate of -(1/n) log P(sigma_n in ball); the large deviation limit is not reached "
        "at these n, and polynomial prefactors bias the rate by O(log n / n)";
  if (tilt.policy == TiltPolicy::Auto && !curve.tilt) os << "; auto tilt unavailable, plain sampling used";
  curve.disclaimer = os.str();
  return curve;
}

bool non_increasing_with_overlap(const RateCurve& curve) {
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    if (b.rate > a.rate && b.rate_lower > a.rate_upper) return false;
  }
  return true;
}

}  // namespace liecramer
