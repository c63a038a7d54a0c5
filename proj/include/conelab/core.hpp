#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace conelab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Largest ambient dimension accepted by the dense cone representations.
inline constexpr int kMaxDenseDim = 16;
/// Largest dimension accepted by halfspace-to-generator conversion.
inline constexpr int kMaxDDDim = 10;
/// Largest generator (or halfspace) count accepted by subset enumeration.
inline constexpr int kMaxGenerators = 12;

enum class ErrorKind {
  DimensionMismatch,
  SingularBasis,
  CapExceeded,
  InvalidCone,
  InvalidArgument,
  NoCertificate,
  Unsupported,
  Config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Tolerances governing every approximate predicate in the library.
/// Membership and equality checks are relative: a residual r passes when
/// r <= eps * (1 + |x|).
struct ToleranceConfig {
  double eps_membership = 1e-8;
  double eps_equal = 1e-8;
  double eps_converge = 1e-12;

  void validate() const {
    if (!(eps_membership > 0) || !(eps_equal > 0) || !(eps_converge > 0)) {
      throw Error(ErrorKind::Config, "tolerances must be strictly positive");
    }
    if (eps_converge < 100 * DBL_EPSILON) {
      throw Error(ErrorKind::Config,
                  "eps_converge must be at least 100 machine epsilons");
    }
  }
};

inline bool all_finite(const Vec& x) { return x.allFinite(); }

inline void require_finite(const Vec& x, const char* what) {
  if (!all_finite(x)) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + " has non-finite coordinates");
  }
}

inline void require_dim(const Vec& x, int dim, const char* what) {
  if (x.size() != dim) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": expected dimension " +
                    std::to_string(dim) + ", got " + std::to_string(x.size()));
  }
}

inline Vec from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

/// Deterministic per-stream generator: the same (seed, stream, index) always
/// yields the same sequence, independent of evaluation order.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0,
                                std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

/// FNV-1a, used to derive a sampling stream from a property key.
inline std::uint64_t stream_id(std::string_view key) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Centered Gaussian vector with unit expected squared norm.
inline Vec gaussian_vec(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec z(dim);
  for (int i = 0; i < dim; ++i) z[i] = normal(rng);
  return z / std::sqrt(static_cast<double>(dim));
}

/// Thread cap from CONELAB_THREADS, or 1 when unset or malformed.
inline unsigned threads_from_env() {
  const char* s = std::getenv("CONELAB_THREADS");
  if (s == nullptr) return 1;
  char* end = nullptr;
  long n = std::strtol(s, &end, 10);
  if (end == s || n < 1) return 1;
  return static_cast<unsigned>(std::min<long>(n, 256));
}

/// Runs fn(i) for i in [0, n). Each index must write only its own output
/// slot; callers aggregate afterwards so results do not depend on schedule.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  unsigned t = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (unsigned k = 0; k < t; ++k) {
    pool.emplace_back([&, k] {
      for (std::size_t i = k; i < n; i += t) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// Visits every k-subset of {0..n-1} in lexicographic order, for k = 0..kmax.
/// The visitor returns true to stop the enumeration.
template <class Visit>
bool for_each_subset_by_size(int n, int kmax, Visit&& visit) {
  std::vector<int> idx;
  for (int k = 0; k <= std::min(n, kmax); ++k) {
    idx.resize(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      if (visit(static_cast<const std::vector<int>&>(idx))) return true;
      int i = k - 1;
      while (i >= 0 && idx[i] == n - k + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return false;
}

/// Numerical rank via singular values relative to the largest one.
inline int numerical_rank(const Mat& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > rel_tol * s[0]) ++r;
  }
  return r;
}

inline double condition_number(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  double smin = s[s.size() - 1];
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

}  // namespace conelab
