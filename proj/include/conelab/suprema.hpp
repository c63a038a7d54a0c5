#pragma once

#include "conelab/cones.hpp"
#include "conelab/report.hpp"
#include "conelab/retractions.hpp"

#include <optional>
#include <string>
#include <vector>

namespace conelab {

enum class SupStatus { Converged, MaxIter, Diverged };

inline std::string status_name(SupStatus s) {
  switch (s) {
    case SupStatus::Converged: return "converged";
    case SupStatus::MaxIter: return "max_iter";
    case SupStatus::Diverged: return "diverged";
  }
  return "unknown";
}

/// Iterates of the alternating shifted-retraction scheme.
///
/// u_iterates = [u_1, u_2, ...] and v_iterates = [v_1, v_2, ...] with
/// u_1 = M_u v, v_n = M_v u_n, u_{n+1} = M_u v_n. residuals[n-1] is
/// max(|u_{n+1} - v_n|, |u_{n+1} - u_n|) / (1 + |u_n|).
struct SupTrace {
  Vec u;
  Vec v;
  std::vector<Vec> u_iterates;
  std::vector<Vec> v_iterates;
  std::vector<double> residuals;
  SupStatus status = SupStatus::MaxIter;
  int iterations = 0;
  std::optional<Vec> result;
  std::optional<Vec> upper_bound_used;
  /// On convergence: result bounds u and v from above, is fixed by M_u and
  /// M_v, and lies below the upper bound when one is available.
  bool certified = false;
  std::string note;
};

/// Least upper bound of u and v in the order of a simplicial cone:
/// A max(A^-1 u, A^-1 v).
inline Vec closed_form_sup(const Cone& cone, const Vec& u, const Vec& v) {
  const Vec cu = basis_coordinates(cone, u);
  const Vec cv = basis_coordinates(cone, v);
  return simplicial_basis(cone) * cu.cwiseMax(cv);
}

/// Mu + Mv, an upper bound of {u, v} whenever cone_n = -cone_m.
inline Vec default_upper_bound(const RetractionPair& pair, const Vec& u,
                               const Vec& v) {
  require_dim(u, pair.dim(), "upper bound");
  require_dim(v, pair.dim(), "upper bound");
  if (!is_negation_of(pair.cone_m(), pair.cone_n(), pair.tol())) {
    throw Error(ErrorKind::InvalidArgument,
                "upper bound needs range(N) = -range(M)");
  }
  return pair.M(u) + pair.M(v);
}

inline SupTrace iterative_sup(const RetractionPair& pair, const Vec& u,
                              const Vec& v, int max_iter = 100) {
  require_dim(u, pair.dim(), "iterative_sup u");
  require_dim(v, pair.dim(), "iterative_sup v");
  require_finite(u, "iterative_sup u");
  require_finite(v, "iterative_sup v");
  if (max_iter < 1) {
    throw Error(ErrorKind::InvalidArgument, "max_iter must be >= 1");
  }
  const ToleranceConfig& tol = pair.tol();
  const Cone& order = pair.cone_m();

  SupTrace tr;
  tr.u = u;
  tr.v = v;
  if (is_negation_of(pair.cone_m(), pair.cone_n(), tol)) {
    tr.upper_bound_used = pair.M(u) + pair.M(v);
  }
  const auto shift_u = shifted(pair, u);
  const auto shift_v = shifted(pair, v);

  auto monotone = [&](const Vec& prev, const Vec& next, const char* label) {
    if (!leq(order, prev, next, tol)) {
      tr.status = SupStatus::Diverged;
      tr.note = std::string(label) + " sequence is not increasing";
      return false;
    }
    if (tr.upper_bound_used && !leq(order, next, *tr.upper_bound_used, tol)) {
      tr.status = SupStatus::Diverged;
      tr.note = std::string(label) + " iterate exceeds the upper bound";
      return false;
    }
    return true;
  };

  tr.u_iterates.push_back(shift_u(v));
  if (!monotone(u, tr.u_iterates.back(), "u")) return tr;

  for (int n = 1; n <= max_iter; ++n) {
    const Vec& un = tr.u_iterates.back();
    Vec vn = shift_v(un);
    const Vec& vprev = tr.v_iterates.empty() ? v : tr.v_iterates.back();
    if (!monotone(vprev, vn, "v")) {
      tr.v_iterates.push_back(std::move(vn));
      return tr;
    }
    tr.v_iterates.push_back(std::move(vn));
    Vec unext = shift_u(tr.v_iterates.back());
    const double gap =
        std::max((unext - tr.v_iterates.back()).norm(), (unext - un).norm()) /
        (1.0 + un.norm());
    tr.residuals.push_back(gap);
    const bool ok = monotone(un, unext, "u");
    tr.u_iterates.push_back(std::move(unext));
    tr.iterations = n;
    if (!ok) return tr;
    if (gap <= tol.eps_converge) {
      tr.status = SupStatus::Converged;
      tr.result = tr.u_iterates.back();
      break;
    }
  }
  if (tr.status != SupStatus::Converged) {
    tr.note = "no convergence within max_iter";
    return tr;
  }

  const Vec& r = *tr.result;
  const double fix_tol = tol.eps_equal * (1.0 + r.norm());
  const bool bounds = leq(order, u, r, tol) && leq(order, v, r, tol);
  const bool fixed = (shift_u(r) - r).norm() <= fix_tol &&
                     (shift_v(r) - r).norm() <= fix_tol;
  const bool below =
      !tr.upper_bound_used || leq(order, r, *tr.upper_bound_used, tol);
  tr.certified = bounds && fixed && below;
  if (!bounds) tr.note = "result is not an upper bound of {u, v}";
  else if (!fixed) tr.note = "result is not fixed by both shifted maps";
  else if (!below) tr.note = "result exceeds the upper bound";
  return tr;
}

/// Lexicographic order on R^2, compared bitwise with no tolerance.
struct LexPoint {
  double first = 0.0;
  double second = 0.0;

  friend bool operator==(const LexPoint&, const LexPoint&) = default;
};

inline bool lex_leq(const LexPoint& a, const LexPoint& b) {
  return b.first > a.first || (b.first == a.first && a.second <= b.second);
}

inline bool lex_less(const LexPoint& a, const LexPoint& b) {
  return lex_leq(a, b) && !(a == b);
}

struct LexCandidate {
  LexPoint bound;
  bool is_upper_bound = false;
  LexPoint smaller;
  bool smaller_is_upper_bound = false;
  bool strictly_smaller = false;
};

struct LexDemoReport {
  int n_terms = 0;
  bool chain_increasing = false;
  std::vector<LexCandidate> candidates;

  bool ok() const {
    if (!chain_increasing) return false;
    for (const auto& c : candidates) {
      if (!c.is_upper_bound || !c.smaller_is_upper_bound ||
          !c.strictly_smaller) {
        return false;
      }
    }
    return true;
  }
};

/// The chain a_n = (0, n) is lex-increasing and bounded by every w with
/// w.first > 0, yet each such bound has a strictly smaller bound
/// (w.first, w.second - 1), so no candidate is a least upper bound.
inline LexDemoReport lex_demo(int n_terms,
                              const std::vector<LexPoint>& candidates) {
  if (n_terms < 2) {
    throw Error(ErrorKind::InvalidArgument, "lex demo needs n_terms >= 2");
  }
  for (const auto& w : candidates) {
    if (!(w.first > 0.0)) {
      throw Error(ErrorKind::InvalidArgument,
                  "lex candidate bound needs a positive first coordinate");
    }
  }
  auto term = [](int n) { return LexPoint{0.0, static_cast<double>(n)}; };
  auto bounds_all = [&](const LexPoint& w) {
    for (int n = 1; n <= n_terms; ++n) {
      if (!lex_leq(term(n), w)) return false;
    }
    return true;
  };

  LexDemoReport rep;
  rep.n_terms = n_terms;
  rep.chain_increasing = true;
  for (int n = 1; n < n_terms; ++n) {
    if (!lex_less(term(n), term(n + 1))) rep.chain_increasing = false;
  }
  for (const auto& w : candidates) {
    LexCandidate c;
    c.bound = w;
    c.is_upper_bound = bounds_all(w);
    c.smaller = LexPoint{w.first, w.second - 1.0};
    c.smaller_is_upper_bound = bounds_all(c.smaller);
    c.strictly_smaller = lex_less(c.smaller, w);
    rep.candidates.push_back(c);
  }
  return rep;
}

/// |M(sup chain) - sup(M chain)| / (1 + max |a_i|) for an increasing chain
/// under a lattice pair, with suprema taken in closed form.
inline double sigma_chain_residual(const RetractionPair& pair,
                                   const std::vector<Vec>& chain) {
  if (chain.empty()) {
    throw Error(ErrorKind::InvalidArgument, "empty chain");
  }
  const Cone& k = pair.cone_m();
  Vec sup_chain = chain.front();
  Vec sup_images = pair.M(chain.front());
  double scale = chain.front().norm();
  for (std::size_t i = 1; i < chain.size(); ++i) {
    sup_chain = closed_form_sup(k, sup_chain, chain[i]);
    sup_images = closed_form_sup(k, sup_images, pair.M(chain[i]));
    scale = std::max(scale, chain[i].norm());
  }
  return (pair.M(sup_chain) - sup_images).norm() / (1.0 + scale);
}

namespace detail {

/// A chain probe stores a_1 in x and the stacked increments in y.
inline std::vector<Vec> unpack_chain(const Probe& p, int dim) {
  std::vector<Vec> chain{p.x};
  const Vec& inc = *p.y;
  for (Eigen::Index off = 0; off + dim <= inc.size(); off += dim) {
    chain.push_back(chain.back() + inc.segment(off, dim));
  }
  return chain;
}

}  // namespace detail

/// Finite shadow of monotone continuity of the positive part: along random
/// increasing chains, M commutes with taking suprema.
inline PropertyReport finite_sigma_continuity_check(const RetractionPair& pair,
                                                    int chain_length,
                                                    const SampleConfig& cfg) {
  if (pair.family() != Family::Lattice) {
    throw Error(ErrorKind::Unsupported, "sigma-chain check needs a lattice pair");
  }
  if (chain_length < 1) {
    throw Error(ErrorKind::InvalidArgument, "chain_length must be >= 1");
  }
  const int m = pair.dim();
  const ToleranceConfig& tol = pair.tol();
  auto gen = [&](std::mt19937_64& rng) {
    Probe p{"chain", gaussian_vec(m, rng), Vec(m * (chain_length - 1))};
    for (int i = 0; i + 1 < chain_length; ++i) {
      p.y->segment(i * m, m) = sample_member(pair.cone_m(), rng);
    }
    return std::vector<Probe>{p};
  };
  auto eval = [&](const Probe& p) {
    return classify(sigma_chain_residual(pair, detail::unpack_chain(p, m)),
                    tol.eps_equal);
  };
  return run_property("sigma-chain", cfg, tol, gen, eval);
}

}  // namespace conelab
