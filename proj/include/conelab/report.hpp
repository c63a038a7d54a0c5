#pragma once

#include "conelab/core.hpp"

#include <algorithm>
#include <exception>
#include <optional>
#include <string>
#include <vector>

namespace conelab {

enum class Verdict { Pass, Fail, Inconclusive };

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

/// One evaluation input of a property: a vector x, optionally a second
/// vector y, and a label naming which clause of the property it probes.
struct Probe {
  std::string kind;
  Vec x;
  std::optional<Vec> y;

  double norm() const {
    double s = x.squaredNorm();
    if (y) s += y->squaredNorm();
    return std::sqrt(s);
  }

  Probe scaled(double s) const {
    Probe p{kind, s * x, std::nullopt};
    if (y) p.y = s * *y;
    return p;
  }
};

/// Normalized residual of one probe and the tolerance it is judged against.
struct Outcome {
  Verdict verdict = Verdict::Pass;
  double residual = 0.0;
  double eps = 1.0;
};

/// Residuals at or below eps/10 pass; above 10 eps they fail. The band in
/// between is inconclusive.
inline Outcome classify(double residual, double eps) {
  Verdict v = Verdict::Pass;
  if (!(residual <= 10.0 * eps)) {
    v = Verdict::Fail;
  } else if (residual > 0.1 * eps) {
    v = Verdict::Inconclusive;
  }
  return {v, residual, eps};
}

inline int severity(Verdict v) {
  return v == Verdict::Fail ? 2 : (v == Verdict::Inconclusive ? 1 : 0);
}

/// The more damning of two outcomes.
inline Outcome worst(const Outcome& a, const Outcome& b) {
  if (severity(a.verdict) != severity(b.verdict)) {
    return severity(a.verdict) > severity(b.verdict) ? a : b;
  }
  return (a.residual / a.eps >= b.residual / b.eps) ? a : b;
}

struct Witness {
  Probe probe;
  double residual = 0.0;
};

struct PropertyReport {
  std::string property;
  Verdict verdict = Verdict::Pass;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<Witness> witnesses;
  ToleranceConfig tolerances;
  /// Largest normalized residual seen over all probes.
  double max_residual = 0.0;
  std::size_t inconclusive = 0;
  std::size_t failures = 0;

  bool passed() const { return verdict == Verdict::Pass; }
};

struct SampleConfig {
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Shrink factor search for readable witnesses: 20 bisection steps on a
/// uniform scale of the probe, keeping only scales at which the probe still
/// fails by at least this multiple of its tolerance.
inline constexpr double kWitnessMargin = 1e3;
inline constexpr int kWitnessBisections = 20;
inline constexpr std::size_t kWitnessCandidates = 32;
inline constexpr std::size_t kMaxWitnesses = 5;

template <class Eval>
Witness minimize_witness(const Probe& probe, const Outcome& outcome,
                         Eval&& eval) {
  Witness best{probe, outcome.residual};
  double lo = 0.0;
  double hi = 1.0;
  for (int step = 0; step < kWitnessBisections; ++step) {
    const double mid = 0.5 * (lo + hi);
    const Probe cand = probe.scaled(mid);
    const Outcome o = eval(cand);
    if (o.verdict == Verdict::Fail && o.residual >= kWitnessMargin * o.eps) {
      hi = mid;
      best = Witness{cand, o.residual};
    } else {
      lo = mid;
    }
  }
  return best;
}

inline bool witness_before(const Witness& a, const Witness& b) {
  const double na = a.probe.norm();
  const double nb = b.probe.norm();
  if (na != nb) return na < nb;
  auto flat = [](const Probe& p) {
    std::vector<double> v = to_std(p.x);
    if (p.y) {
      auto w = to_std(*p.y);
      v.insert(v.end(), w.begin(), w.end());
    }
    return v;
  };
  const auto fa = flat(a.probe);
  const auto fb = flat(b.probe);
  if (fa != fb) return fa < fb;
  return a.probe.kind < b.probe.kind;
}

/// Runs a sampled property. gen(rng) yields the probes of one sample and
/// eval(probe) judges a probe. Sample i draws from its own stream keyed by
/// (seed, id, i), and aggregation happens in sample order, so the report is
/// identical for any thread count.
template <class Gen, class Eval>
PropertyReport run_property(const std::string& id, const SampleConfig& cfg,
                            const ToleranceConfig& tol, Gen&& gen,
                            Eval&& eval) {
  struct Slot {
    double max_residual = 0.0;
    std::size_t inconclusive = 0;
    std::vector<std::pair<Probe, Outcome>> fails;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(cfg.samples);
  const std::uint64_t stream = stream_id(id);
  parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
    Slot& slot = slots[i];
    try {
      auto rng = make_rng(cfg.seed, stream, i);
      for (const Probe& probe : gen(rng)) {
        const Outcome o = eval(probe);
        slot.max_residual = std::max(slot.max_residual, o.residual);
        if (o.verdict == Verdict::Inconclusive) ++slot.inconclusive;
        if (o.verdict == Verdict::Fail) slot.fails.emplace_back(probe, o);
      }
    } catch (...) {
      slot.error = std::current_exception();
    }
  });

  PropertyReport rep;
  rep.property = id;
  rep.samples = cfg.samples;
  rep.seed = cfg.seed;
  rep.tolerances = tol;
  std::vector<std::pair<Probe, Outcome>> fails;
  for (auto& slot : slots) {
    if (slot.error) std::rethrow_exception(slot.error);
    rep.max_residual = std::max(rep.max_residual, slot.max_residual);
    rep.inconclusive += slot.inconclusive;
    rep.failures += slot.fails.size();
    for (auto& f : slot.fails) {
      if (fails.size() < kWitnessCandidates) fails.push_back(std::move(f));
    }
  }
  if (rep.failures > 0) {
    rep.verdict = Verdict::Fail;
    for (const auto& [probe, outcome] : fails) {
      rep.witnesses.push_back(minimize_witness(probe, outcome, eval));
    }
    std::sort(rep.witnesses.begin(), rep.witnesses.end(), witness_before);
    if (rep.witnesses.size() > kMaxWitnesses) {
      rep.witnesses.resize(kMaxWitnesses);
    }
  } else if (rep.inconclusive > 0) {
    rep.verdict = Verdict::Inconclusive;
  }
  return rep;
}

}  // namespace conelab
