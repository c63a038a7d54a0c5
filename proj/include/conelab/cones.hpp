#pragma once

#include "conelab/core.hpp"
#include "conelab/oracle.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace conelab {

struct Orthant {
  int dim = 0;
  bool negated = false;
};

/// Cone generated by the columns of an invertible basis.
struct Simplicial {
  Mat basis;
  Mat inverse;
};

/// Second-order cone {(xbar, t) : |xbar| <= t}; the last coordinate is t.
struct Lorentz {
  int dim = 0;
  bool negated = false;
};

/// Nonnegative combinations of the columns of `vectors`.
struct Generators {
  Mat vectors;
};

/// {x : n_j . x >= 0} for every column n_j of `normals`. When the dimension
/// is within the conversion cap, the ray description is computed once.
struct Halfspaces {
  Mat normals;
  std::shared_ptr<const oracle::RayDescription> rays;
};

using ConeVariant =
    std::variant<Orthant, Simplicial, Lorentz, Generators, Halfspaces>;

/// A closed convex cone in R^m. Immutable after construction.
class Cone {
 public:
  static Cone orthant(int dim) {
    check_dim(dim);
    return Cone(Orthant{dim, false}, dim);
  }

  static Cone lorentz(int dim) {
    if (dim < 2) {
      throw Error(ErrorKind::InvalidCone, "lorentz cone needs dim >= 2");
    }
    check_dim(dim);
    return Cone(Lorentz{dim, false}, dim);
  }

  /// `basis` holds the generators as columns.
  static Cone simplicial(const Mat& basis, double rel_tol = 1e-12) {
    if (basis.rows() != basis.cols() || basis.rows() == 0) {
      throw Error(ErrorKind::InvalidCone, "simplicial basis must be square");
    }
    const int dim = static_cast<int>(basis.rows());
    check_dim(dim);
    if (!basis.allFinite()) {
      throw Error(ErrorKind::InvalidCone, "simplicial basis is not finite");
    }
    if (!(condition_number(basis) * rel_tol < 1.0)) {
      throw Error(ErrorKind::SingularBasis, "simplicial basis is singular");
    }
    return Cone(Simplicial{basis, basis.inverse()}, dim);
  }

  static Cone generators(const Mat& vectors) {
    const int dim = static_cast<int>(vectors.rows());
    check_dim(dim);
    check_columns(vectors, "generator");
    return Cone(Generators{vectors}, dim);
  }

  static Cone generators(const std::vector<Vec>& vs) {
    if (vs.empty()) {
      throw Error(ErrorKind::InvalidCone, "empty generator list");
    }
    return generators(oracle::columns_of(vs, static_cast<int>(vs[0].size())));
  }

  static Cone halfspaces(const Mat& normals) {
    const int dim = static_cast<int>(normals.rows());
    check_dim(dim);
    check_columns(normals, "normal");
    Halfspaces h{normals, nullptr};
    if (dim <= kMaxDDDim && normals.cols() <= kMaxGenerators) {
      h.rays = std::make_shared<const oracle::RayDescription>(
          oracle::double_description(normals, dim));
    }
    return Cone(std::move(h), dim);
  }

  static Cone halfspaces(const std::vector<Vec>& vs) {
    if (vs.empty()) {
      throw Error(ErrorKind::InvalidCone, "empty normal list");
    }
    return halfspaces(oracle::columns_of(vs, static_cast<int>(vs[0].size())));
  }

  int dim() const { return dim_; }
  const ConeVariant& variant() const { return v_; }

  std::string type_name() const {
    return std::visit(
        [](const auto& c) -> std::string {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, Orthant>) return "orthant";
          if constexpr (std::is_same_v<T, Simplicial>) return "simplicial";
          if constexpr (std::is_same_v<T, Lorentz>) return "lorentz";
          if constexpr (std::is_same_v<T, Generators>) return "generators";
          if constexpr (std::is_same_v<T, Halfspaces>) return "halfspaces";
        },
        v_);
  }

  /// The cone -K.
  Cone negated() const {
    return std::visit(
        [&](const auto& c) -> Cone {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, Orthant>) {
            return Cone(Orthant{c.dim, !c.negated}, dim_);
          } else if constexpr (std::is_same_v<T, Lorentz>) {
            return Cone(Lorentz{c.dim, !c.negated}, dim_);
          } else if constexpr (std::is_same_v<T, Simplicial>) {
            return Cone(Simplicial{-c.basis, -c.inverse}, dim_);
          } else if constexpr (std::is_same_v<T, Generators>) {
            return Cone(Generators{-c.vectors}, dim_);
          } else {
            return Cone::halfspaces(Mat(-c.normals));
          }
        },
        v_);
  }

  /// Finite generator matrix (columns). Lorentz cones have none.
  Mat finite_generators() const {
    return std::visit(
        [&](const auto& c) -> Mat {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, Orthant>) {
            Mat g = Mat::Identity(dim_, dim_);
            return c.negated ? Mat(-g) : g;
          } else if constexpr (std::is_same_v<T, Simplicial>) {
            return c.basis;
          } else if constexpr (std::is_same_v<T, Generators>) {
            return c.vectors;
          } else if constexpr (std::is_same_v<T, Halfspaces>) {
            if (!c.rays) {
              throw Error(ErrorKind::CapExceeded,
                          "halfspace conversion above dimension cap (10)");
            }
            return c.rays->generators();
          } else {
            throw Error(ErrorKind::Unsupported,
                        "lorentz cone has no finite generator set");
          }
        },
        v_);
  }

  bool is_polyhedral() const { return !std::holds_alternative<Lorentz>(v_); }

 private:
  Cone(ConeVariant v, int dim) : v_(std::move(v)), dim_(dim) {}

  static void check_dim(int dim) {
    if (dim < 1) throw Error(ErrorKind::InvalidCone, "dimension must be >= 1");
    if (dim > kMaxDenseDim) {
      throw Error(ErrorKind::CapExceeded, "dense dimension cap (16) exceeded");
    }
  }

  static void check_columns(const Mat& m, const char* what) {
    if (m.cols() == 0) {
      throw Error(ErrorKind::InvalidCone, std::string("empty ") + what +
                                              " list");
    }
    if (!m.allFinite()) {
      throw Error(ErrorKind::InvalidCone, std::string(what) + " not finite");
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m.col(j).norm() == 0.0) {
        throw Error(ErrorKind::InvalidCone, std::string("zero ") + what);
      }
    }
  }

  ConeVariant v_;
  int dim_;
};

/// Amount by which x fails the variant's exact membership test; zero for
/// members. For generator form this is the Euclidean distance to the cone.
inline double violation(const Cone& cone, const Vec& x) {
  require_dim(x, cone.dim(), "cone membership");
  return std::visit(
      [&](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Orthant>) {
          double worst = c.negated ? x.maxCoeff() : -x.minCoeff();
          return std::max(0.0, worst);
        } else if constexpr (std::is_same_v<T, Simplicial>) {
          const Vec coords = c.inverse * x;
          return std::max(0.0, -coords.minCoeff());
        } else if constexpr (std::is_same_v<T, Lorentz>) {
          const double s = c.negated ? -1.0 : 1.0;
          const int n = c.dim - 1;
          const double t = s * x[n];
          return std::max(0.0, x.head(n).norm() - t);
        } else if constexpr (std::is_same_v<T, Halfspaces>) {
          double worst = 0.0;
          for (Eigen::Index j = 0; j < c.normals.cols(); ++j) {
            const auto nj = c.normals.col(j);
            worst = std::max(worst, -nj.dot(x) / nj.norm());
          }
          return worst;
        } else {
          if (x.isZero(0.0)) return 0.0;
          const auto cert = oracle::brute_force_project(c.vectors, x);
          return (x - cert.point).norm();
        }
      },
      cone.variant());
}

inline bool contains(const Cone& cone, const Vec& x,
                     const ToleranceConfig& tol = {}) {
  return violation(cone, x) <= tol.eps_membership * (1.0 + x.norm());
}

/// x <= y in the order induced by the cone.
inline bool leq(const Cone& cone, const Vec& x, const Vec& y,
                const ToleranceConfig& tol = {}) {
  require_dim(x, cone.dim(), "leq");
  require_dim(y, cone.dim(), "leq");
  return contains(cone, y - x, tol);
}

/// Exact polar cone {y : <x, y> <= 0 for all x in K}.
inline Cone polar(const Cone& cone) {
  return std::visit(
      [&](const auto& c) -> Cone {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Orthant> || std::is_same_v<T, Lorentz>) {
          // Both are self-dual.
          return cone.negated();
        } else if constexpr (std::is_same_v<T, Simplicial>) {
          return Cone::simplicial(Mat(-c.inverse.transpose()));
        } else if constexpr (std::is_same_v<T, Generators>) {
          return Cone::halfspaces(Mat(-c.vectors));
        } else {
          // Farkas: {x : n_j . x >= 0}° = cone{-n_j}.
          return Cone::generators(Mat(-c.normals));
        }
      },
      cone.variant());
}

inline bool is_generating(const Cone& cone, const ToleranceConfig& tol = {}) {
  return std::visit(
      [&](const auto& c) -> bool {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Generators>) {
          return numerical_rank(c.vectors, tol.eps_membership) == cone.dim();
        } else if constexpr (std::is_same_v<T, Halfspaces>) {
          return numerical_rank(cone.finite_generators(), tol.eps_membership) ==
                 cone.dim();
        } else {
          return true;
        }
      },
      cone.variant());
}

inline bool is_pointed(const Cone& cone, const ToleranceConfig& tol = {}) {
  return std::visit(
      [&](const auto& c) -> bool {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Halfspaces>) {
          return numerical_rank(c.normals, tol.eps_membership) == cone.dim();
        } else if constexpr (std::is_same_v<T, Generators>) {
          // The lineality space is a face, so it contains a generator g with
          // -g in K whenever it is nonzero.
          for (Eigen::Index j = 0; j < c.vectors.cols(); ++j) {
            const Vec g = c.vectors.col(j).normalized();
            if (oracle::conic_feasibility(c.vectors, Vec(-g),
                                          tol.eps_membership)) {
              return false;
            }
          }
          return true;
        } else {
          return true;
        }
      },
      cone.variant());
}

/// Random simplicial cone with condition number at most cond_cap; the result
/// depends only on (dim, seed, cond_cap).
inline Cone sample_simplicial(int dim, std::uint64_t seed,
                              double cond_cap = 100.0) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "dim must be >= 1");
  if (!(cond_cap > 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "cond_cap must exceed 1");
  }
  auto rng = make_rng(seed, stream_id("sample_simplicial"));
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr int kRetries = 10000;
  for (int attempt = 0; attempt < kRetries; ++attempt) {
    Mat a(dim, dim);
    for (int j = 0; j < dim; ++j) {
      for (int i = 0; i < dim; ++i) a(i, j) = normal(rng);
    }
    if (condition_number(a) <= cond_cap) return Cone::simplicial(a);
  }
  throw Error(ErrorKind::InvalidArgument,
              "could not sample a basis under the condition cap");
}

/// Random cone member: a nonnegative combination of generators (some
/// coefficients zeroed to reach faces), or a random point on or inside the
/// second-order cone.
inline Vec sample_member(const Cone& cone, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution drop(0.25);
  if (const auto* l = std::get_if<Lorentz>(&cone.variant())) {
    const int n = l->dim - 1;
    Vec x(l->dim);
    x.head(n) = gaussian_vec(n, rng);
    const double lift = drop(rng) ? 0.0 : expo(rng);
    x[n] = x.head(n).norm() * (1.0 + lift);
    return l->negated ? Vec(-x) : x;
  }
  const Mat g = cone.finite_generators();
  Vec c(g.cols());
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    c[j] = drop(rng) ? 0.0 : expo(rng);
  }
  const double norm_scale = std::sqrt(static_cast<double>(std::max<Eigen::Index>(1, g.cols())));
  return g * c / norm_scale;
}

/// A point in the interior of a generating cone.
inline Vec interior_point(const Cone& cone, const ToleranceConfig& tol = {}) {
  if (!is_generating(cone, tol)) {
    throw Error(ErrorKind::InvalidArgument, "cone has empty interior");
  }
  if (const auto* l = std::get_if<Lorentz>(&cone.variant())) {
    Vec e = Vec::Zero(l->dim);
    e[l->dim - 1] = l->negated ? -1.0 : 1.0;
    return e;
  }
  const Mat g = cone.finite_generators();
  Vec sum = Vec::Zero(cone.dim());
  for (Eigen::Index j = 0; j < g.cols(); ++j) sum += g.col(j).normalized();
  return sum;
}

/// Structural test that cone_b equals -cone_a, via generator containment.
inline bool is_negation_of(const Cone& cone_a, const Cone& cone_b,
                           const ToleranceConfig& tol = {}) {
  if (cone_a.dim() != cone_b.dim()) return false;
  const auto* la = std::get_if<Lorentz>(&cone_a.variant());
  const auto* lb = std::get_if<Lorentz>(&cone_b.variant());
  if (la || lb) {
    return la && lb && la->negated != lb->negated;
  }
  const Mat ga = cone_a.finite_generators();
  const Mat gb = cone_b.finite_generators();
  for (Eigen::Index j = 0; j < ga.cols(); ++j) {
    if (!contains(cone_b, Vec(-ga.col(j).normalized()), tol)) return false;
  }
  for (Eigen::Index j = 0; j < gb.cols(); ++j) {
    if (!contains(cone_a, Vec(-gb.col(j).normalized()), tol)) return false;
  }
  return true;
}

/// Coordinates of x in the basis of a simplicial (or orthant) cone.
inline Vec basis_coordinates(const Cone& cone, const Vec& x) {
  require_dim(x, cone.dim(), "basis coordinates");
  if (const auto* o = std::get_if<Orthant>(&cone.variant())) {
    return o->negated ? Vec(-x) : x;
  }
  if (const auto* s = std::get_if<Simplicial>(&cone.variant())) {
    return s->inverse * x;
  }
  throw Error(ErrorKind::Unsupported, "cone is not simplicial");
}

/// Basis matrix of a simplicial (or orthant) cone.
inline Mat simplicial_basis(const Cone& cone) {
  if (const auto* o = std::get_if<Orthant>(&cone.variant())) {
    Mat id = Mat::Identity(o->dim, o->dim);
    return o->negated ? Mat(-id) : id;
  }
  if (const auto* s = std::get_if<Simplicial>(&cone.variant())) {
    return s->basis;
  }
  throw Error(ErrorKind::Unsupported, "cone is not simplicial");
}

inline bool is_simplicial(const Cone& cone) {
  return std::holds_alternative<Orthant>(cone.variant()) ||
         std::holds_alternative<Simplicial>(cone.variant());
}

}  // namespace conelab
