#include "equiheat/numerics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <mutex>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace equiheat {

QuadRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  QuadRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  // Newton iteration on Legendre polynomials, nodes symmetric about 0.
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    r.nodes[i] = mid - half * x;
    r.nodes[n - 1 - i] = mid + half * x;
    r.weights[i] = w * half;
    r.weights[n - 1 - i] = w * half;
  }
  return r;
}

QuadRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n < 1");
  // Golub-Welsch from the Hermite three-term recurrence: the Jacobi matrix is
  // tridiagonal with zero diagonal and off-diagonals sqrt(k/2); eigenvalues
  // are the nodes, weights are sqrt(pi) times the squared first eigenvector
  // components. Stable for node counts in the thousands.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub = Eigen::VectorXd::Zero(std::max(n - 1, 1));
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub);
  QuadRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double mass = std::sqrt(kPi);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    r.weights[i] = mass * v0 * v0;
  }
  return r;
}

const QuadRule& gauss_hermite_cached(int n) {
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  int bucket = ((std::max(n, 8) + 31) / 32) * 32;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(bucket);
  if (it == cache.end()) it = cache.emplace(bucket, gauss_hermite(bucket)).first;
  return it->second;
}

QuadRule periodic_trapezoid(int n, double period) {
  if (n < 1) throw std::invalid_argument("periodic_trapezoid: n < 1");
  QuadRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = period * i / n;
    r.weights[i] = period / n;
  }
  return r;
}

int thread_count() {
  if (const char* env = std::getenv("EQUIHEAT_THREADS")) {
    int k = std::atoi(env);
    if (k >= 1) return k;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min<unsigned>(hw == 0 ? 1 : hw, 8));
}

namespace {

template <typename T, typename Acc>
T chunked_reduce(std::size_t n, const std::function<T(std::size_t)>& term) {
  const int nt = thread_count();
  if (nt <= 1 || n < 1024) {
    Acc acc;
    for (std::size_t i = 0; i < n; ++i) acc.add(term(i));
    return acc.value();
  }
  const std::size_t chunks = static_cast<std::size_t>(nt);
  std::vector<T> partial(chunks);
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    pool.emplace_back([&, c]() {
      std::size_t lo = n * c / chunks, hi = n * (c + 1) / chunks;
      Acc acc;
      for (std::size_t i = lo; i < hi; ++i) acc.add(term(i));
      partial[c] = acc.value();
    });
  }
  for (auto& th : pool) th.join();
  Acc total;
  for (std::size_t c = 0; c < chunks; ++c) total.add(partial[c]);
  return total.value();
}

struct ComplexKahan {
  KahanSum re, im;
  void add(complexd z) {
    re.add(z.real());
    im.add(z.imag());
  }
  complexd value() const { return {re.value(), im.value()}; }
};

}  // namespace

double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term) {
  return chunked_reduce<double, KahanSum>(n, term);
}

complexd parallel_sum_complex(std::size_t n, const std::function<complexd(std::size_t)>& term) {
  return chunked_reduce<complexd, ComplexKahan>(n, term);
}

double fd_second_derivative(const std::function<double(double)>& f, double h) {
  auto d2 = [&](double hh) { return (f(hh) - 2.0 * f(0.0) + f(-hh)) / (hh * hh); };
  return (4.0 * d2(h / 2) - d2(h)) / 3.0;
}

double fd_mixed_second(const std::function<double(double, double)>& f, double h) {
  auto dm = [&](double hh) {
    return (f(hh, hh) - f(hh, -hh) - f(-hh, hh) + f(-hh, -hh)) / (4.0 * hh * hh);
  };
  return (4.0 * dm(h / 2) - dm(h)) / 3.0;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  // SplitMix64 scramble of (seed, stream)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace equiheat
