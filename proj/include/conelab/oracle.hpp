#pragma once

// Brute-force reference routines. Everything here works by exhaustive
// enumeration of generator or constraint subsets, so it shares no code path
// with the closed-form projections it is used to validate.

#include "conelab/core.hpp"

#include <vector>

namespace conelab::oracle {

struct ProjectionCertificate {
  Vec point;
  std::vector<int> active_face;
  double residual_primal = 0.0;
  double residual_polar = 0.0;
  double residual_complementarity = 0.0;
};

/// Default certification tolerance of the oracle (relative to 1 + |x|).
inline constexpr double kOracleEps = 1e-10;

inline Mat columns_of(const std::vector<Vec>& vs, int dim) {
  Mat g(dim, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j) {
    require_dim(vs[j], dim, "generator");
    g.col(static_cast<Eigen::Index>(j)) = vs[j];
  }
  return g;
}

/// Euclidean projection of x onto cone(generators) by face enumeration.
///
/// Subsets are visited by increasing size, then lexicographically. For each
/// subset the least-squares conic combination is computed from the normal
/// equations; the first candidate satisfying the optimality conditions
/// p in K, x - p in polar(K), <x - p, p> = 0 is returned. Those conditions
/// are sufficient for the argmin, so the first certified candidate is the
/// projection and also the tie-break winner (smallest face, lowest indices).
inline ProjectionCertificate brute_force_project(const Mat& generators,
                                                 const Vec& x,
                                                 double eps = kOracleEps) {
  const int m = static_cast<int>(generators.rows());
  const int n = static_cast<int>(generators.cols());
  require_dim(x, m, "brute_force_project");
  if (m > kMaxDenseDim) {
    throw Error(ErrorKind::CapExceeded, "oracle dimension cap (16) exceeded");
  }
  if (n > kMaxGenerators) {
    throw Error(ErrorKind::CapExceeded, "oracle generator cap (12) exceeded");
  }
  Vec gnorm(n);
  for (int j = 0; j < n; ++j) {
    gnorm[j] = generators.col(j).norm();
    if (!(gnorm[j] > 0.0)) {
      throw Error(ErrorKind::InvalidCone, "zero generator");
    }
  }

  const double scale = 1.0 + x.norm();
  const double tol = eps * scale;
  const Vec gx = generators.transpose() * x;

  ProjectionCertificate best;
  bool found = for_each_subset_by_size(n, m, [&](const std::vector<int>& s) {
    const int k = static_cast<int>(s.size());
    Vec c(k);
    Vec p = Vec::Zero(m);
    double primal = 0.0;
    if (k > 0) {
      Mat gs(m, k);
      Vec rhs(k);
      for (int i = 0; i < k; ++i) {
        gs.col(i) = generators.col(s[i]);
        rhs[i] = gx[s[i]];
      }
      Mat gram = gs.transpose() * gs;
      Eigen::ColPivHouseholderQR<Mat> qr(gram);
      qr.setThreshold(1e-12);
      if (qr.rank() < k) return false;
      c = qr.solve(rhs);
      for (int i = 0; i < k; ++i) {
        double v = -c[i] * gnorm[s[i]];
        if (v > tol) return false;
        primal = std::max(primal, v);
        c[i] = std::max(c[i], 0.0);
      }
      p = gs * c;
    }
    const Vec r = x - p;
    double polar = 0.0;
    for (int j = 0; j < n; ++j) {
      polar = std::max(polar, r.dot(generators.col(j)) / gnorm[j]);
    }
    if (polar > tol) return false;
    double compl_res = std::abs(r.dot(p));
    if (compl_res > tol * scale) return false;
    best.point = p;
    best.active_face = s;
    best.residual_primal = primal;
    best.residual_polar = polar;
    best.residual_complementarity = compl_res;
    return true;
  });
  if (!found) {
    throw Error(ErrorKind::NoCertificate,
                "no face certifies the projection (inconsistent cone data)");
  }
  return best;
}

inline ProjectionCertificate brute_force_project(
    const std::vector<Vec>& generators, const Vec& x, double eps = kOracleEps) {
  return brute_force_project(columns_of(generators, static_cast<int>(x.size())),
                             x, eps);
}

/// True iff x lies within eps * (1 + |x|) of cone(generators).
inline bool conic_feasibility(const Mat& generators, const Vec& x,
                              double eps = 1e-8) {
  require_dim(x, static_cast<int>(generators.rows()), "conic_feasibility");
  if (x.isZero(0.0)) return true;
  const auto cert = brute_force_project(generators, x);
  return (x - cert.point).norm() <= eps * (1.0 + x.norm());
}

inline bool conic_feasibility(const std::vector<Vec>& generators, const Vec& x,
                              double eps = 1e-8) {
  return conic_feasibility(
      columns_of(generators, static_cast<int>(x.size())), x, eps);
}

/// Generators of {x : n_j . x >= 0 for all j}: unit extreme rays of the
/// pointed part plus an orthonormal basis of the lineality space.
struct RayDescription {
  Mat rays;   // dim x r, unit columns
  Mat lines;  // dim x d, orthonormal columns; each spans a two-sided line

  /// Flat generator list: rays followed by +l, -l for every line.
  Mat generators() const {
    Mat g(rays.rows(), rays.cols() + 2 * lines.cols());
    g.leftCols(rays.cols()) = rays;
    for (Eigen::Index i = 0; i < lines.cols(); ++i) {
      g.col(rays.cols() + 2 * i) = lines.col(i);
      g.col(rays.cols() + 2 * i + 1) = -lines.col(i);
    }
    return g;
  }
};

/// Halfspace-to-generator conversion by active-set enumeration.
///
/// The lineality space (null space of the normals) is split off first; in
/// its orthogonal complement the cone is pointed, and every extreme ray is
/// the one-dimensional null space of some (r-1)-subset of the reduced
/// normals, r being the rank of the normal matrix.
inline RayDescription double_description(const Mat& normals, int dim,
                                         double rel_tol = 1e-10) {
  if (normals.rows() != dim) {
    throw Error(ErrorKind::DimensionMismatch, "halfspace normal dimension");
  }
  if (dim > kMaxDDDim) {
    throw Error(ErrorKind::CapExceeded,
                "double description dimension cap (10) exceeded");
  }
  const int k = static_cast<int>(normals.cols());
  if (k > kMaxGenerators) {
    throw Error(ErrorKind::CapExceeded,
                "double description halfspace cap (12) exceeded");
  }

  RayDescription out;
  if (k == 0) {
    out.rays = Mat(dim, 0);
    out.lines = Mat::Identity(dim, dim);
    return out;
  }

  const Mat rows = normals.transpose();  // k x dim
  Eigen::JacobiSVD<Mat> svd(rows, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > rel_tol * sv[0]) ++r;
  }
  const Mat& v = svd.matrixV();
  const Mat q = v.leftCols(r);
  out.lines = v.rightCols(dim - r);

  std::vector<Vec> rays;
  if (r > 0) {
    const Mat reduced = rows * q;  // k x r
    Vec rnorm(k);
    for (int j = 0; j < k; ++j) rnorm[j] = normals.col(j).norm();
    for_each_subset_by_size(k, r - 1, [&](const std::vector<int>& s) {
      if (static_cast<int>(s.size()) != r - 1) return false;
      Vec z;
      if (r == 1) {
        z = Vec::Ones(1);
      } else {
        Mat sub(r - 1, r);
        for (int i = 0; i < r - 1; ++i) sub.row(i) = reduced.row(s[i]);
        Eigen::JacobiSVD<Mat> ssvd(sub, Eigen::ComputeFullV);
        const auto& ss = ssvd.singularValues();
        int srank = 0;
        for (Eigen::Index i = 0; i < ss.size(); ++i) {
          if (ss[i] > rel_tol * std::max(ss[0], 1e-300)) ++srank;
        }
        if (srank != r - 1) return false;
        z = ssvd.matrixV().col(r - 1);
      }
      for (double sign : {1.0, -1.0}) {
        const Vec cand = sign * z;
        const Vec vals = reduced * cand;
        bool feasible = true;
        for (int j = 0; j < k; ++j) {
          if (vals[j] < -rel_tol * rnorm[j] * 1e2) {
            feasible = false;
            break;
          }
        }
        if (!feasible) continue;
        Vec ray = q * cand;
        ray.normalize();
        bool dup = false;
        for (const auto& e : rays) {
          if ((e - ray).norm() <= 1e-9) {
            dup = true;
            break;
          }
        }
        if (!dup) rays.push_back(ray);
      }
      return false;
    });
  }
  out.rays = Mat(dim, static_cast<Eigen::Index>(rays.size()));
  for (std::size_t i = 0; i < rays.size(); ++i) {
    out.rays.col(static_cast<Eigen::Index>(i)) = rays[i];
  }
  return out;
}

}  // namespace conelab::oracle
