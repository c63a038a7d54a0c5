#pragma once

#include "conelab/cones.hpp"
#include "conelab/oracle.hpp"

#include <functional>
#include <memory>
#include <string>
#include <variant>

namespace conelab {

namespace detail {

inline Vec project_lorentz(const Vec& x) {
  const Eigen::Index n = x.size() - 1;
  const double t = x[n];
  const double a = x.head(n).norm();
  if (a <= t) return x;
  if (a <= -t) return Vec::Zero(x.size());
  const double c = 0.5 * (a + t);
  Vec p(x.size());
  p.head(n) = (c / a) * x.head(n);
  p[n] = c;
  return p;
}

}  // namespace detail

/// Metric projection onto one fixed cone. Generator data for the polyhedral
/// variants is resolved once at construction.
class Projector {
 public:
  explicit Projector(Cone cone) : cone_(std::move(cone)) {
    if (cone_.is_polyhedral() &&
        !std::holds_alternative<Orthant>(cone_.variant())) {
      generators_ = cone_.finite_generators();
      if (generators_.cols() > kMaxGenerators) {
        throw Error(ErrorKind::CapExceeded,
                    "projection generator cap (12) exceeded");
      }
    }
  }

  const Cone& cone() const { return cone_; }

  Vec operator()(const Vec& x) const {
    require_dim(x, cone_.dim(), "projection");
    if (const auto* o = std::get_if<Orthant>(&cone_.variant())) {
      return o->negated ? Vec(x.cwiseMin(0.0)) : Vec(x.cwiseMax(0.0));
    }
    if (const auto* l = std::get_if<Lorentz>(&cone_.variant())) {
      return l->negated ? Vec(-detail::project_lorentz(-x))
                        : detail::project_lorentz(x);
    }
    if (generators_.cols() == 0) return Vec::Zero(x.size());
    return oracle::brute_force_project(generators_, x).point;
  }

 private:
  Cone cone_;
  Mat generators_;
};

/// Euclidean projection onto a supported cone: closed form for the orthant
/// and the second-order cone, face enumeration otherwise.
inline Vec project_cone(const Cone& cone, const Vec& x) {
  return Projector(cone)(x);
}

enum class Family { Lattice, Moreau, Minkowski, Custom };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::Lattice: return "lattice";
    case Family::Moreau: return "moreau";
    case Family::Minkowski: return "minkowski";
    case Family::Custom: return "custom";
  }
  return "unknown";
}

enum class Which { M, N };

/// Two maps M, N on R^m claiming M + N = I, MN = NM = 0, with ranges
/// cone_m and cone_n. Immutable; evaluation is pure.
class RetractionPair {
 public:
  using Map = std::function<Vec(const Vec&)>;

  /// Positive part in the order of a simplicial cone:
  /// M x = A max(A^-1 x, 0), N x = x - M x.
  static RetractionPair lattice(const Cone& cone, ToleranceConfig tol = {}) {
    tol.validate();
    if (!is_simplicial(cone)) {
      throw Error(ErrorKind::Unsupported,
                  "lattice pair needs a simplicial or orthant cone");
    }
    RetractionPair p(Family::Lattice, cone, cone.negated(), tol);
    p.data_ = LatticeData{simplicial_basis(cone),
                          simplicial_basis(cone).inverse()};
    return p;
  }

  /// Metric projections onto K and its polar.
  static RetractionPair moreau(const Cone& cone, ToleranceConfig tol = {}) {
    tol.validate();
    Cone pol = polar(cone);
    RetractionPair p(Family::Moreau, cone, pol, tol);
    p.data_ = MoreauData{std::make_shared<const Projector>(cone),
                         std::make_shared<const Projector>(pol)};
    return p;
  }

  /// M x = phi(x) y, N x = x - phi(x) y with the order-unit gauge
  /// phi(x) = min{l : l y - x in K} = max_j (n_j . x) / (n_j . y).
  static RetractionPair minkowski(const Cone& cone, const Vec& interior,
                                  ToleranceConfig tol = {}) {
    tol.validate();
    require_dim(interior, cone.dim(), "minkowski interior point");
    require_finite(interior, "minkowski interior point");
    Mat normals;
    if (const auto* h = std::get_if<Halfspaces>(&cone.variant())) {
      normals = h->normals;
    } else if (is_simplicial(cone)) {
      // Rows of the inverse basis are the facet normals.
      normals = simplicial_basis(cone).inverse().transpose();
    } else {
      throw Error(ErrorKind::Unsupported,
                  "minkowski pair needs a cone in halfspace form");
    }
    Vec denom = normals.transpose() * interior;
    for (Eigen::Index j = 0; j < denom.size(); ++j) {
      if (!(denom[j] > tol.eps_membership * normals.col(j).norm() *
                           (1.0 + interior.norm()))) {
        throw Error(ErrorKind::InvalidArgument,
                    "interior point is not interior to the cone");
      }
    }
    Cone halfspace_form = std::holds_alternative<Halfspaces>(cone.variant())
                              ? cone
                              : Cone::halfspaces(normals);
    // phi takes both signs, so range(M) is the whole line through y.
    Mat line(interior.size(), 2);
    line << interior, -interior;
    RetractionPair p(Family::Minkowski, Cone::generators(line),
                     halfspace_form.negated(), tol);
    p.n_range_is_cone_ = false;
    p.data_ = MinkowskiData{normals, denom, interior, halfspace_form};
    return p;
  }

  /// Arbitrary maps, e.g. a deliberately inconsistent pair for testing.
  static RetractionPair custom(Map m, Map n, const Cone& cone_m,
                               const Cone& cone_n, ToleranceConfig tol = {}) {
    tol.validate();
    RetractionPair p(Family::Custom, cone_m, cone_n, tol);
    p.data_ = CustomData{std::move(m), std::move(n)};
    return p;
  }

  Vec M(const Vec& x) const {
    require_dim(x, dim(), "retraction argument");
    return std::visit(
        [&](const auto& d) -> Vec {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, LatticeData>) {
            return d.basis * (d.inverse * x).cwiseMax(0.0);
          } else if constexpr (std::is_same_v<T, MoreauData>) {
            return (*d.onto_cone)(x);
          } else if constexpr (std::is_same_v<T, MinkowskiData>) {
            return gauge(x) * d.interior;
          } else {
            return d.m(x);
          }
        },
        data_);
  }

  Vec N(const Vec& x) const {
    require_dim(x, dim(), "retraction argument");
    return std::visit(
        [&](const auto& d) -> Vec {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, LatticeData>) {
            return -(d.basis * (-(d.inverse * x)).cwiseMax(0.0));
          } else if constexpr (std::is_same_v<T, MoreauData>) {
            return (*d.onto_polar)(x);
          } else if constexpr (std::is_same_v<T, MinkowskiData>) {
            return x - gauge(x) * d.interior;
          } else {
            return d.n(x);
          }
        },
        data_);
  }

  Vec apply(Which w, const Vec& x) const { return w == Which::M ? M(x) : N(x); }

  /// Order-unit gauge of the Minkowski family.
  double gauge(const Vec& x) const {
    const auto* d = std::get_if<MinkowskiData>(&data_);
    if (!d) throw Error(ErrorKind::Unsupported, "gauge needs a minkowski pair");
    return ((d->normals.transpose() * x).array() / d->denom.array()).maxCoeff();
  }

  Family family() const { return family_; }
  const Cone& cone_m() const { return cone_m_; }
  const Cone& cone_n() const { return cone_n_; }
  const Cone& range(Which w) const { return w == Which::M ? cone_m_ : cone_n_; }
  const ToleranceConfig& tol() const { return tol_; }
  int dim() const { return cone_m_.dim(); }

  /// False when cone_n only encloses the actual range of N (Minkowski: the
  /// range is the boundary of -K while cone_n is -K itself).
  bool n_range_is_cone() const { return n_range_is_cone_; }

  /// The cone K the pair was built from (for Minkowski: K in halfspace form).
  const Cone& base_cone() const {
    if (const auto* d = std::get_if<MinkowskiData>(&data_)) return d->cone;
    return cone_m_;
  }

  /// Interior point y of a Minkowski pair.
  const Vec& interior_point() const {
    const auto* d = std::get_if<MinkowskiData>(&data_);
    if (!d) throw Error(ErrorKind::Unsupported, "not a minkowski pair");
    return d->interior;
  }

 private:
  struct LatticeData {
    Mat basis;
    Mat inverse;
  };
  struct MoreauData {
    std::shared_ptr<const Projector> onto_cone;
    std::shared_ptr<const Projector> onto_polar;
  };
  struct MinkowskiData {
    Mat normals;
    Vec denom;
    Vec interior;
    Cone cone;
  };
  struct CustomData {
    Map m;
    Map n;
  };

  RetractionPair(Family f, Cone cm, Cone cn, ToleranceConfig tol)
      : family_(f), cone_m_(std::move(cm)), cone_n_(std::move(cn)), tol_(tol) {
    if (cone_m_.dim() != cone_n_.dim()) {
      throw Error(ErrorKind::DimensionMismatch, "range cone dimensions differ");
    }
  }

  Family family_;
  Cone cone_m_;
  Cone cone_n_;
  ToleranceConfig tol_;
  bool n_range_is_cone_ = true;
  std::variant<LatticeData, MoreauData, MinkowskiData, CustomData> data_;
};

/// x -> anchor + M(x - anchor).
class ShiftedRetraction {
 public:
  ShiftedRetraction(const RetractionPair& base, Vec anchor)
      : base_(base), anchor_(std::move(anchor)) {
    require_dim(anchor_, base_.dim(), "shift anchor");
  }

  Vec apply(const Vec& x) const {
    require_dim(x, base_.dim(), "shifted retraction argument");
    return anchor_ + base_.M(x - anchor_);
  }
  Vec operator()(const Vec& x) const { return apply(x); }

  const Vec& anchor() const { return anchor_; }
  const RetractionPair& base() const { return base_; }

 private:
  RetractionPair base_;
  Vec anchor_;
};

inline ShiftedRetraction shifted(const RetractionPair& base, const Vec& anchor) {
  return ShiftedRetraction(base, anchor);
}

}  // namespace conelab
