#pragma once

// Sampled checkers for the axioms and consequences of mutually polar
// retraction pairs. Each checker is a probe generator plus a probe evaluator;
// the evaluator is also exposed through replay() so a reported witness can be
// re-verified from its stored inputs.

#include "conelab/cones.hpp"
#include "conelab/report.hpp"
#include "conelab/retractions.hpp"
#include "conelab/suprema.hpp"

#include <string>
#include <vector>

namespace conelab {

/// Frozen property catalogue keys.
namespace property_key {
inline constexpr const char* kMutualPolarity = "mutual-polarity";
inline constexpr const char* kIdempotence = "idempotence";
inline constexpr const char* kRangeKernel = "range-kernel";
inline constexpr const char* kRangeNegation = "range-negation";
inline constexpr const char* kSubadditiveM = "subadditive.M";
inline constexpr const char* kSubadditiveN = "subadditive.N";
inline constexpr const char* kIsotoneM = "isotone.M";
inline constexpr const char* kIsotoneN = "isotone.N";
inline constexpr const char* kDefectSets = "defect-sets";
inline constexpr const char* kRieszIdentities = "riesz-identities";
inline constexpr const char* kMoreauOrthogonality = "moreau-orthogonality";
inline constexpr const char* kMinkowskiGauge = "minkowski-gauge";
inline constexpr const char* kSigmaChain = "sigma-chain";
}  // namespace property_key

/// One-line descriptions, in catalogue order, for help output.
inline const std::vector<std::pair<std::string, std::string>>&
property_catalogue() {
  static const std::vector<std::pair<std::string, std::string>> cat = {
      {"mutual-polarity", "M+N=I, MN=NM=0, Mx in range(M), Nx in range(N)"},
      {"idempotence", "M(Mx)=Mx and N(Nx)=Nx"},
      {"range-kernel", "range(M) = {x : Nx = 0} and range(N) = {x : Mx = 0}"},
      {"range-negation", "range(N) = -range(M)"},
      {"subadditive.M", "Mx + My - M(x+y) in range(M)"},
      {"subadditive.N", "Nx + Ny - N(x+y) in range(N)"},
      {"isotone.M", "x <=_M y implies Mx <=_M My"},
      {"isotone.N", "x <=_N y implies Nx <=_N Ny"},
      {"defect-sets", "M-defects lie in range(M), realize it, and negate N-defects"},
      {"riesz-identities", "positive/negative part identities of a lattice cone"},
      {"moreau-orthogonality", "<Mx,Nx>=0 and |x|^2=|Mx|^2+|Nx|^2"},
      {"minkowski-gauge", "gauge is subadditive and positively homogeneous"},
      {"sigma-chain", "M commutes with suprema of increasing chains"},
  };
  return cat;
}

namespace detail {

inline double probe_scale(const Probe& p) { return 1.0 + p.norm(); }

inline Outcome membership(const Cone& cone, const Vec& v, double scale,
                          const ToleranceConfig& tol) {
  return classify(violation(cone, v) / scale, tol.eps_membership);
}

inline Outcome equality(const Vec& a, const Vec& b, double scale,
                        const ToleranceConfig& tol) {
  return classify((a - b).norm() / scale, tol.eps_equal);
}

inline Outcome is_zero(const Vec& a, double scale, const ToleranceConfig& tol) {
  return classify(a.norm() / scale, tol.eps_equal);
}

inline Which which_of(const std::string& id) {
  return id.back() == 'N' ? Which::N : Which::M;
}

inline std::vector<Probe> probes_x(int m, std::mt19937_64& rng) {
  return {Probe{"x", gaussian_vec(m, rng), std::nullopt}};
}

inline std::vector<Probe> probes_xy(int m, std::mt19937_64& rng) {
  Vec x = gaussian_vec(m, rng);
  Vec y = gaussian_vec(m, rng);
  return {Probe{"xy", std::move(x), std::move(y)}};
}

inline Vec defect(const RetractionPair& pair, Which w, const Vec& x,
                  const Vec& y) {
  return pair.apply(w, x) + pair.apply(w, y) - pair.apply(w, x + y);
}

/// v in range(N) with m + v in range(N): v = 2 s e + k for an interior point
/// e of range(N), s the first power of two with m + s e in range(N), and a
/// random member k.
inline Vec realizing_partner(const RetractionPair& pair, const Vec& m,
                             std::mt19937_64& rng) {
  const Cone& cn = pair.cone_n();
  const Vec e = interior_point(cn, pair.tol());
  double s = 1.0;
  for (int i = 0; i < 64 && !contains(cn, Vec(m + s * e), pair.tol()); ++i) {
    s *= 2.0;
  }
  return 2.0 * s * e + sample_member(cn, rng);
}

inline bool realization_applicable(const RetractionPair& pair) {
  return pair.n_range_is_cone() && is_generating(pair.cone_m(), pair.tol()) &&
         is_generating(pair.cone_n(), pair.tol());
}

}  // namespace detail

/// Evaluates one probe of a property. Used by the checkers and for replaying
/// reported witnesses.
inline Outcome replay(const RetractionPair& pair, const std::string& id,
                      const Probe& p) {
  namespace k = property_key;
  const ToleranceConfig& tol = pair.tol();
  const double s = detail::probe_scale(p);
  const Vec& x = p.x;

  if (id == k::kMutualPolarity) {
    const Vec mx = pair.M(x);
    const Vec nx = pair.N(x);
    Outcome o = detail::equality(Vec(mx + nx), x, s, tol);
    o = worst(o, detail::is_zero(pair.M(nx), s, tol));
    o = worst(o, detail::is_zero(pair.N(mx), s, tol));
    o = worst(o, detail::membership(pair.cone_m(), mx, s, tol));
    o = worst(o, detail::membership(pair.cone_n(), nx, s, tol));
    return o;
  }
  if (id == k::kIdempotence) {
    const Vec mx = pair.M(x);
    const Vec nx = pair.N(x);
    return worst(detail::equality(pair.M(mx), mx, s, tol),
                 detail::equality(pair.N(nx), nx, s, tol));
  }
  if (id == k::kRangeKernel) {
    // kind is "M:..." or "N:...": membership in range(W) must agree with
    // the other map vanishing.
    const Which w = p.kind.front() == 'N' ? Which::N : Which::M;
    const Which other = w == Which::M ? Which::N : Which::M;
    const Outcome in = detail::membership(pair.range(w), x, s, tol);
    const Outcome ker = detail::is_zero(pair.apply(other, x), s, tol);
    if (in.verdict == Verdict::Inconclusive ||
        ker.verdict == Verdict::Inconclusive) {
      return worst(in, ker);
    }
    if (in.verdict == ker.verdict) return {Verdict::Pass, 0.0, tol.eps_equal};
    const Outcome bad = in.verdict == Verdict::Fail ? in : ker;
    return {Verdict::Fail, bad.residual, bad.eps};
  }
  if (id == k::kRangeNegation) {
    if (p.kind == "member-M") {
      return detail::membership(pair.cone_n(), Vec(-x), s, tol);
    }
    if (p.kind == "member-N") {
      return detail::membership(pair.cone_m(), Vec(-x), s, tol);
    }
    return worst(detail::membership(pair.cone_m(), Vec(-pair.N(x)), s, tol),
                 detail::membership(pair.cone_n(), Vec(-pair.M(x)), s, tol));
  }
  if (id == k::kSubadditiveM || id == k::kSubadditiveN) {
    const Which w = detail::which_of(id);
    return detail::membership(pair.range(w), detail::defect(pair, w, x, *p.y),
                              s, tol);
  }
  if (id == k::kIsotoneM || id == k::kIsotoneN) {
    const Which w = detail::which_of(id);
    const Vec d = pair.apply(w, *p.y) - pair.apply(w, x);
    return detail::membership(pair.range(w), d, s, tol);
  }
  if (id == k::kDefectSets) {
    const Vec& y = *p.y;
    if (p.kind == "realize") {
      return detail::equality(detail::defect(pair, Which::M, x, y), x, s, tol);
    }
    const Vec dm = detail::defect(pair, Which::M, x, y);
    const Vec dn = detail::defect(pair, Which::N, x, y);
    return worst(detail::membership(pair.cone_m(), dm, s, tol),
                 detail::is_zero(Vec(dm + dn), s, tol));
  }
  if (id == k::kRieszIdentities) {
    const Cone& cone = pair.cone_m();
    const Vec& y = *p.y;
    if (p.kind == "isotone") {
      return detail::membership(cone, Vec(pair.M(y) - pair.M(x)), s, tol);
    }
    const Vec pos = pair.M(x);
    const Vec neg = pair.M(Vec(-x));
    Outcome o = detail::equality(pair.M(pos), pos, s, tol);
    o = worst(o, detail::membership(cone, detail::defect(pair, Which::M, x, y),
                                    s, tol));
    if (pos.norm() <= tol.eps_equal * s && neg.norm() <= tol.eps_equal * s) {
      o = worst(o, detail::is_zero(x, s, tol));
    }
    o = worst(o, detail::equality(Vec(pos - neg), x, s, tol));
    o = worst(o, detail::equality(Vec(-pair.N(x)), neg, s, tol));
    o = worst(o, detail::is_zero(pair.M(pair.N(x)), s, tol));
    o = worst(o, detail::is_zero(pair.N(pos), s, tol));
    o = worst(o, detail::equality(pair.M(closed_form_sup(cone, x, y)),
                                  closed_form_sup(cone, pos, pair.M(y)), s,
                                  tol));
    return o;
  }
  if (id == k::kMoreauOrthogonality) {
    const Vec mx = pair.M(x);
    const Vec nx = pair.N(x);
    const double s2 = 1.0 + x.squaredNorm();
    return worst(
        classify(std::abs(mx.dot(nx)) / s2, tol.eps_equal),
        classify(std::abs(x.squaredNorm() - mx.squaredNorm() - nx.squaredNorm()) /
                     s2,
                 tol.eps_equal));
  }
  if (id == k::kMinkowskiGauge) {
    const Vec& y = *p.y;
    const double fx = pair.gauge(x);
    Outcome o = classify(
        std::max(0.0, pair.gauge(Vec(x + y)) - fx - pair.gauge(y)) / s,
        tol.eps_equal);
    for (double lambda : {0.0, 0.5, 2.0}) {
      o = worst(o, classify(std::abs(pair.gauge(Vec(lambda * x)) - lambda * fx) / s,
                            tol.eps_equal));
    }
    return o;
  }
  if (id == k::kSigmaChain) {
    return classify(
        sigma_chain_residual(pair, detail::unpack_chain(p, pair.dim())),
        tol.eps_equal);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown property: " + id);
}

namespace detail {

template <class Gen>
PropertyReport run_with_replay(const RetractionPair& pair, const std::string& id,
                               const SampleConfig& cfg, Gen&& gen) {
  return run_property(id, cfg, pair.tol(), std::forward<Gen>(gen),
                      [&](const Probe& p) { return replay(pair, id, p); });
}

}  // namespace detail

inline PropertyReport check_mutual_polarity(const RetractionPair& pair,
                                            const SampleConfig& cfg) {
  const int m = pair.dim();
  return detail::run_with_replay(
      pair, property_key::kMutualPolarity, cfg,
      [m](std::mt19937_64& rng) { return detail::probes_x(m, rng); });
}

inline PropertyReport check_idempotence(const RetractionPair& pair,
                                        const SampleConfig& cfg) {
  const int m = pair.dim();
  return detail::run_with_replay(
      pair, property_key::kIdempotence, cfg,
      [m](std::mt19937_64& rng) { return detail::probes_x(m, rng); });
}

/// Both inclusions of range(M) = ker N, plus range(N) = ker M when range(N)
/// is exactly a cone.
inline PropertyReport check_range_kernel(const RetractionPair& pair,
                                         const SampleConfig& cfg) {
  const int m = pair.dim();
  const bool n_side = pair.n_range_is_cone();
  return detail::run_with_replay(
      pair, property_key::kRangeKernel, cfg, [&, m](std::mt19937_64& rng) {
        std::vector<Probe> ps;
        const Vec x = gaussian_vec(m, rng);
        ps.push_back({"M:random", x, std::nullopt});
        ps.push_back({"M:member", sample_member(pair.cone_m(), rng),
                      std::nullopt});
        ps.push_back({"M:image", pair.M(x), std::nullopt});
        if (n_side) {
          ps.push_back({"N:random", x, std::nullopt});
          ps.push_back({"N:member", sample_member(pair.cone_n(), rng),
                        std::nullopt});
          ps.push_back({"N:image", pair.N(x), std::nullopt});
        }
        return ps;
      });
}

inline PropertyReport check_subadditive(const RetractionPair& pair, Which which,
                                        const SampleConfig& cfg) {
  if (which == Which::N && !pair.n_range_is_cone()) {
    throw Error(ErrorKind::Unsupported,
                "range(N) is not a convex cone for this pair");
  }
  const int m = pair.dim();
  return detail::run_with_replay(
      pair,
      which == Which::M ? property_key::kSubadditiveM
                        : property_key::kSubadditiveN,
      cfg, [m](std::mt19937_64& rng) { return detail::probes_xy(m, rng); });
}

/// Comparable pairs are drawn as y = x + k with k a random member of the
/// range cone, since independent pairs are almost never comparable.
inline PropertyReport check_isotone(const RetractionPair& pair, Which which,
                                    const SampleConfig& cfg) {
  if (which == Which::N && !pair.n_range_is_cone()) {
    throw Error(ErrorKind::Unsupported,
                "range(N) is not a convex cone for this pair");
  }
  const int m = pair.dim();
  const Cone& order = pair.range(which);
  return detail::run_with_replay(
      pair,
      which == Which::M ? property_key::kIsotoneM : property_key::kIsotoneN,
      cfg, [&, m](std::mt19937_64& rng) {
        Vec x = gaussian_vec(m, rng);
        Vec y = x + sample_member(order, rng);
        return std::vector<Probe>{{"comparable", std::move(x), std::move(y)}};
      });
}

inline PropertyReport check_range_negation(const RetractionPair& pair,
                                           const SampleConfig& cfg) {
  const int m = pair.dim();
  return detail::run_with_replay(
      pair, property_key::kRangeNegation, cfg, [&, m](std::mt19937_64& rng) {
        std::vector<Probe> ps;
        ps.push_back({"x", gaussian_vec(m, rng), std::nullopt});
        ps.push_back({"member-M", sample_member(pair.cone_m(), rng),
                      std::nullopt});
        ps.push_back({"member-N", sample_member(pair.cone_n(), rng),
                      std::nullopt});
        return ps;
      });
}

/// Defect sets {Mx + My - M(x+y)} lie in range(M) and negate the N-defects.
/// When both ranges are generating, each m in range(M) is also realized as
/// the defect of (m, v) with v and m + v in range(N).
inline PropertyReport check_subadditivity_defect_sets(const RetractionPair& pair,
                                                      const SampleConfig& cfg) {
  const int m = pair.dim();
  const bool realize = detail::realization_applicable(pair);
  return detail::run_with_replay(
      pair, property_key::kDefectSets, cfg, [&, m](std::mt19937_64& rng) {
        std::vector<Probe> ps = detail::probes_xy(m, rng);
        ps.front().kind = "defect";
        if (realize) {
          Vec mm = sample_member(pair.cone_m(), rng);
          Vec v = detail::realizing_partner(pair, mm, rng);
          ps.push_back({"realize", std::move(mm), std::move(v)});
        }
        return ps;
      });
}

inline PropertyReport check_riesz_identities(const RetractionPair& pair,
                                             const SampleConfig& cfg) {
  if (pair.family() != Family::Lattice) {
    throw Error(ErrorKind::Unsupported, "riesz identities need a lattice pair");
  }
  const int m = pair.dim();
  return detail::run_with_replay(
      pair, property_key::kRieszIdentities, cfg, [&, m](std::mt19937_64& rng) {
        std::vector<Probe> ps = detail::probes_xy(m, rng);
        Vec x = gaussian_vec(m, rng);
        Vec y = x + sample_member(pair.cone_m(), rng);
        ps.push_back({"isotone", std::move(x), std::move(y)});
        return ps;
      });
}

inline PropertyReport check_moreau_orthogonality(const RetractionPair& pair,
                                                 const SampleConfig& cfg) {
  const int m = pair.dim();
  return detail::run_with_replay(
      pair, property_key::kMoreauOrthogonality, cfg,
      [m](std::mt19937_64& rng) { return detail::probes_x(m, rng); });
}

inline PropertyReport check_minkowski_gauge(const RetractionPair& pair,
                                            const SampleConfig& cfg) {
  if (pair.family() != Family::Minkowski) {
    throw Error(ErrorKind::Unsupported, "gauge check needs a minkowski pair");
  }
  const int m = pair.dim();
  return detail::run_with_replay(
      pair, property_key::kMinkowskiGauge, cfg,
      [m](std::mt19937_64& rng) { return detail::probes_xy(m, rng); });
}

/// Chain length used by the catalogue's sigma-chain check.
inline constexpr int kCatalogueChainLength = 5;

/// Every property applicable to the pair's family, in catalogue order.
inline std::vector<PropertyReport> run_catalogue(const RetractionPair& pair,
                                                 const SampleConfig& cfg) {
  std::vector<PropertyReport> out;
  out.push_back(check_mutual_polarity(pair, cfg));
  out.push_back(check_idempotence(pair, cfg));
  out.push_back(check_range_kernel(pair, cfg));
  const bool full = pair.n_range_is_cone();
  if (full) out.push_back(check_range_negation(pair, cfg));
  out.push_back(check_subadditive(pair, Which::M, cfg));
  if (full) out.push_back(check_subadditive(pair, Which::N, cfg));
  out.push_back(check_isotone(pair, Which::M, cfg));
  if (full) out.push_back(check_isotone(pair, Which::N, cfg));
  out.push_back(check_subadditivity_defect_sets(pair, cfg));
  switch (pair.family()) {
    case Family::Lattice:
      out.push_back(check_riesz_identities(pair, cfg));
      out.push_back(
          finite_sigma_continuity_check(pair, kCatalogueChainLength, cfg));
      break;
    case Family::Moreau:
      out.push_back(check_moreau_orthogonality(pair, cfg));
      break;
    case Family::Minkowski:
      out.push_back(check_minkowski_gauge(pair, cfg));
      break;
    case Family::Custom:
      break;
  }
  return out;
}

}  // namespace conelab
