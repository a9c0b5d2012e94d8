#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace equiheat {

using complexd = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Compensated (Kahan-Neumaier) accumulator. Used wherever sums must be
/// schedule-independent across deterministic chunked reductions.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// One-dimensional quadrature rule: nodes and weights on some interval.
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule on [a, b], exact for polynomials of degree 2n-1.
QuadRule gauss_legendre(int n, double a, double b);

/// Gauss-Hermite rule for \int f(x) e^{-x^2} dx (weight included in weights).
QuadRule gauss_hermite(int n);

/// Cached Gauss-Hermite rule, node count rounded up to a multiple of 32 so
/// repeated oscillatory transforms reuse rules. Thread-safe.
const QuadRule& gauss_hermite_cached(int n);

/// Periodic trapezoid rule on [0, period): n equispaced nodes, weights period/n.
QuadRule periodic_trapezoid(int n, double period);

/// Number of worker threads, from EQUIHEAT_THREADS (default: min(hw, 8)).
int thread_count();

/// Deterministic parallel sum over i in [0, n): each thread accumulates a
/// contiguous index chunk with compensated summation and chunks are combined
/// in index order, so the result is independent of the schedule bit-for-bit.
double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term);

/// Complex variant of parallel_sum with the same determinism guarantee.
complexd parallel_sum_complex(std::size_t n, const std::function<complexd(std::size_t)>& term);

/// Central finite-difference second derivative matrix helper with one level
/// of Richardson extrapolation: D2[f](h) = (4 D(h/2) - D(h)) / 3.
double fd_second_derivative(const std::function<double(double)>& f, double h);

/// Mixed second partial d^2/(ds dt) f(s,t) at (0,0), Richardson-extrapolated.
double fd_mixed_second(const std::function<double(double, double)>& f, double h);

/// SplitMix64-seeded mt19937_64 stream: stream id folded into the seed so
/// fixed-seed MC can be partitioned deterministically across workers.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a > kPi) a -= kTwoPi;
  if (a <= -kPi) a += kTwoPi;
  return a;
}

}  // namespace equiheat
