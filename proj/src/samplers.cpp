#include "mcc/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mcc/error.hpp"

namespace mcc {

double ChainRun::sum(std::span<const double> f) const {
  double s = 0.0;
  for (std::size_t x : states) s += f[x];
  return s;
}

ChainRun run_limiting_chain(const MarkovKernel& k, std::size_t x0, std::size_t length, std::uint64_t seed,
                            std::uint64_t stream, std::uint64_t substream) {
  ChainRun run{k.grid(), {}, {}, seed, k.descriptor(), 0.0, 0};
  if (length == 0) return run;
  if (x0 >= k.grid().size()) throw RangeError("initial state outside the grid");
  if (length > 500'000'000) throw ResourceError("chain length exceeds the configured limit");
  RngStream rng(seed, stream, substream);
  run.states.reserve(length);
  run.states.push_back(x0);
  run.accepted.reserve(length);
  run.accepted.push_back(0);
  std::size_t x = x0, accepted = 0;
  StepInfo info;
  for (std::size_t s = 1; s < length; ++s) {
    x = k.step(x, rng, &info);
    accepted += info.accepted;
    run.truncation_events += info.truncated;
    run.states.push_back(x);
    run.accepted.push_back(info.accepted);
  }
  run.acceptance_rate = length > 1 ? static_cast<double>(accepted) / static_cast<double>(length - 1) : 0.0;
  return run;
}

std::vector<SmcmcLevel> run_smcmc(const HastingsFamily& family, const FeynmanKacModel& model, std::size_t p_levels,
                                  std::size_t n, std::uint64_t seed, const SamplerOptions& opt) {
  if (p_levels < 1 || p_levels > model.max_level())
    throw RangeError("model supports levels 1.." + std::to_string(model.max_level()));
  if (n < 1) throw InvalidInput("sMCMC needs n >= 1");
  std::vector<SmcmcLevel> out;
  for (std::size_t p = 1; p <= p_levels; ++p) {
    GridDensity target = model.eta1;
    std::size_t start = opt.x0;
    if (p > 1) {
      try {
        target = boltzmann_gibbs(out.back().empirical, model.G(p - 1), model.M(p - 1));
      } catch (const PreconditionError& e) {
        throw PreconditionError("level " + std::to_string(p) + ": " + e.what());
      }
      if (opt.level_start == LevelStart::previous_final) start = out.back().run.states.back();
    }
    const HastingsKernel k = family.at(target);
    auto run = run_limiting_chain(k, start, n + 1, seed, opt.replication, p);
    EmpiricalMeasure emp(model.grid, run.states);
    out.push_back(SmcmcLevel{std::move(run), std::move(emp), std::move(target)});
  }
  return out;
}

namespace {

std::vector<std::size_t> log_checkpoints(std::size_t n) {
  std::vector<std::size_t> c;
  for (int i = 0;; ++i) {
    const auto k = static_cast<std::size_t>(std::llround(std::pow(10.0, 1.0 + i / 4.0)));
    if (k >= n) break;
    if (c.empty() || k != c.back()) c.push_back(k);
  }
  if (n >= 2) c.push_back(n);
  return c;
}

// Unnormalized Phi(eta_k) for a running empirical measure.
struct RunningTarget {
  std::vector<double> A;
  double Z = 0.0;
  double Sf = 0.0;  // sum G(z) (M f)(z)

  void add(std::size_t z, const GridFunction& G, const MutationKernel& M, const std::vector<double>* mf) {
    const double gz = G[z];
    const double* r = M.row(z);
    for (std::size_t j = 0; j < A.size(); ++j) A[j] += gz * r[j];
    Z += gz;
    if (mf) Sf += gz * (*mf)[z];
  }
};

}  // namespace

std::vector<ImcmcLevel> run_imcmc(const HastingsFamily& family, const FeynmanKacModel& model, std::size_t p_levels,
                                  std::size_t n, std::uint64_t seed, const SamplerOptions& opt,
                                  const GridFunction* centering_f, const GridDensity* adaptation_reference) {
  if (p_levels < 1 || p_levels > model.max_level())
    throw RangeError("model supports levels 1.." + std::to_string(model.max_level()));
  if (n < 1) throw InvalidInput("iMCMC needs n >= 1");
  const Grid& g = model.grid;
  const std::size_t m = g.size();
  const auto& w = g.weights();
  const ProposalKernel& q = family.proposal();
  const BalancingFunction& bal = family.balancing();
  std::vector<ImcmcLevel> out;
  out.reserve(p_levels);
  for (std::size_t p = 0; p < p_levels; ++p) out.push_back(ImcmcLevel{ChainRun{g, {}, {}, seed, {}, 0.0, 0}, {}, {}});
  std::vector<RngStream> rng;
  for (std::size_t p = 1; p <= p_levels; ++p) rng.emplace_back(seed, opt.replication, p);
  std::vector<std::size_t> z(p_levels, opt.x0);
  std::vector<std::size_t> accepted(p_levels, 0);
  for (auto& l : out) l.run.states.reserve(n);
  // targets[p] holds Phi(eta_k^(p)) used by level p + 1 (0-based level p)
  std::vector<RunningTarget> targets(p_levels);
  for (auto& t : targets) t.A.assign(m, 0.0);
  std::vector<double> mf;
  const bool top_centering = centering_f != nullptr && p_levels >= 2;
  if (top_centering) {
    require_same_grid(g, centering_f->grid, "iMCMC centering function");
    mf = model.M(p_levels - 1).apply(centering_f->values);
  }
  const bool frozen = opt.frozen_level1.has_value();
  if (frozen) {
    if (p_levels < 2) throw InvalidInput("a frozen level 1 needs p_levels >= 2");
    const auto& c = opt.frozen_level1->counts();
    for (std::size_t i = 0; i < m; ++i)
      if (c[i] != 0.0) {
        RunningTarget one;
        one.A.assign(m, 0.0);
        one.add(i, model.G(1), model.M(1), p_levels == 2 && top_centering ? &mf : nullptr);
        for (std::size_t j = 0; j < m; ++j) targets[0].A[j] += c[i] * one.A[j];
        targets[0].Z += c[i] * one.Z;
        targets[0].Sf += c[i] * one.Sf;
      }
  }
  const HastingsKernel k1 = family.at(model.eta1);
  out[0].run.kernel_descriptor = k1.descriptor();
  for (std::size_t p = 1; p < p_levels; ++p) out[p].run.kernel_descriptor = "interacting " + family.at(model.eta1).descriptor();

  const bool track = opt.track_adaptation && p_levels >= 2;
  GridFunction vfun = GridFunction::constant(g, 1.0);
  if (track && opt.adaptation_weight) vfun = opt.adaptation_weight->on(g);
  AdaptationTrace trace;
  const auto checkpoints = log_checkpoints(n);
  std::size_t next_cp = 0;
  double sum_sup = 0.0, sum_v = 0.0;
  std::vector<double> prevA;
  double prevZ = 0.0;
  const std::size_t tracked = p_levels - 2;  // target of the top level

  StepInfo info;
  for (std::size_t k = 1; k <= n; ++k) {
    if (!frozen) {
      z[0] = k1.step(z[0], rng[0], &info);
      accepted[0] += info.accepted;
      out[0].run.truncation_events += info.truncated;
      out[0].run.states.push_back(z[0]);
      out[0].run.accepted.push_back(info.accepted);
      if (p_levels >= 2) {
        if (track && tracked == 0) {
          prevA = targets[0].A;
          prevZ = targets[0].Z;
        }
        targets[0].add(z[0], model.G(1), model.M(1), p_levels == 2 && top_centering ? &mf : nullptr);
      }
    }
    for (std::size_t p = 1; p < p_levels; ++p) {
      const RunningTarget& t = targets[p - 1];
      if (!(t.Z > 0.0)) throw PreconditionError("level " + std::to_string(p + 1) + ": degenerate weights");
      z[p] = hastings_move(q, bal, [&t](std::size_t i) { return t.A[i]; }, z[p], rng[p], &info);
      accepted[p] += info.accepted;
      out[p].run.truncation_events += info.truncated;
      out[p].run.states.push_back(z[p]);
      out[p].run.accepted.push_back(info.accepted);
      if (p + 1 == p_levels && top_centering) out[p].centering.push_back(t.Sf / t.Z);
      if (p + 1 < p_levels) {
        if (track && tracked == p) {
          prevA = targets[p].A;
          prevZ = targets[p].Z;
        }
        targets[p].add(z[p], model.G(p + 1), model.M(p + 1), p + 2 == p_levels && top_centering ? &mf : nullptr);
      }
    }
    if (track) {
      const RunningTarget& t = targets[tracked];
      if (k >= 2 && prevZ > 0.0 && !frozen) {
        double sup = 0.0, vn = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          const double d = std::abs(t.A[j] / t.Z - prevA[j] / prevZ);
          sup = std::max(sup, d);
          vn += w[j] * vfun[j] * d;
        }
        sum_sup += sup;
        sum_v += vn;
      }
      if (next_cp < checkpoints.size() && checkpoints[next_cp] == k) {
        const double rn = std::sqrt(static_cast<double>(k));
        trace.checkpoints.push_back(k);
        trace.d1_sup.push_back(sum_sup / rn);
        trace.d1_v.push_back(sum_v / rn);
        double gap = 0.0;
        if (adaptation_reference)
          for (std::size_t j = 0; j < m; ++j) gap = std::max(gap, std::abs(t.A[j] / t.Z - (*adaptation_reference)[j]));
        trace.c1_gap.push_back(gap);
        ++next_cp;
      }
    }
  }
  for (std::size_t p = 0; p < p_levels; ++p)
    out[p].run.acceptance_rate = static_cast<double>(accepted[p]) / static_cast<double>(n);
  if (frozen) out[0].run.acceptance_rate = 0.0;
  if (track) out[p_levels - 1].trace = std::move(trace);
  return out;
}

double batch_means_variance(const ChainRun& run, std::span<const double> f, std::size_t batch_count) {
  if (batch_count < 20) throw InvalidInput("batch means needs at least 20 batches");
  const std::size_t B = run.size() / batch_count;
  if (B < 1) throw InvalidInput("chain too short for the requested batch count");
  std::vector<double> means(batch_count, 0.0);
  double total = 0.0;
  for (std::size_t b = 0; b < batch_count; ++b) {
    double s = 0.0;
    for (std::size_t i = b * B; i < (b + 1) * B; ++i) s += f[run.states[i]];
    means[b] = s / static_cast<double>(B);
    total += means[b];
  }
  const double mean = total / static_cast<double>(batch_count);
  double ss = 0.0;
  for (double v : means) ss += (v - mean) * (v - mean);
  return static_cast<double>(B) * ss / static_cast<double>(batch_count - 1);
}

AdaptationTrace adaptation_trace(const std::vector<GridDensity>& targets, const WeightFunction& V,
                                 const GridDensity& reference) {
  if (targets.size() < 3) throw InvalidInput("adaptation trace needs at least three targets");
  const Grid& g = reference.grid();
  const auto v = V.on(g);
  const auto& w = g.weights();
  const std::size_t N = targets.size() - 1;
  const auto cps = log_checkpoints(N);
  AdaptationTrace t;
  double sum_sup = 0.0, sum_v = 0.0;
  std::size_t next = 0;
  for (std::size_t k = 1; k <= N; ++k) {
    require_same_grid(g, targets[k].grid(), "adaptation trace");
    double sup = 0.0, vn = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double d = std::abs(targets[k][j] - targets[k - 1][j]);
      sup = std::max(sup, d);
      vn += w[j] * v[j] * d;
    }
    sum_sup += sup;
    sum_v += vn;
    if (next < cps.size() && cps[next] == k) {
      const double rn = std::sqrt(static_cast<double>(k));
      t.checkpoints.push_back(k);
      t.d1_sup.push_back(sum_sup / rn);
      t.d1_v.push_back(sum_v / rn);
      double gap = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) gap = std::max(gap, std::abs(targets[k][j] - reference[j]));
      t.c1_gap.push_back(gap);
      ++next;
    }
  }
  return t;
}

namespace {

// Least-squares slope of log y against log n over positive entries; 0 when all vanish.
double loglog_slope(const std::vector<std::size_t>& n, const std::vector<double>& y, bool* vanishes) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] > 1e-300) pts.emplace_back(std::log(static_cast<double>(n[i])), std::log(y[i]));
  *vanishes = pts.empty();
  if (pts.size() < 2) return 0.0;
  double mx = 0, my = 0;
  for (auto [a, b] : pts) {
    mx += a;
    my += b;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0, sxx = 0;
  for (auto [a, b] : pts) {
    sxy += (a - mx) * (b - my);
    sxx += (a - mx) * (a - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

AdaptationReport check_adaptation_conditions(const AdaptationTrace& trace) {
  AdaptationReport rep;
  rep.trace = trace;
  bool z1 = false, z2 = false, z3 = false;
  rep.d1_sup_slope = loglog_slope(trace.checkpoints, trace.d1_sup, &z1);
  rep.d1_v_slope = loglog_slope(trace.checkpoints, trace.d1_v, &z2);
  rep.c1_slope = loglog_slope(trace.checkpoints, trace.c1_gap, &z3);
  rep.d1_pass = (z1 || rep.d1_sup_slope < 0.0) && (z2 || rep.d1_v_slope < 0.0);
  rep.c1_pass = z3 || rep.c1_slope < 0.0;
  rep.pass = rep.d1_pass && rep.c1_pass;
  return rep;
}

AdaptationReport check_adaptation_conditions(const AdaptationTrace& trace, const KernelFamily& family,
                                             const GridDensity& limit, const GridDensity& realized,
                                             const WeightFunction& V, const std::vector<std::size_t>& x_nodes) {
  auto rep = check_adaptation_conditions(trace);
  rep.d2 = uniform_boundedness_scan(family, limit, realized, V, x_nodes);
  rep.pass = rep.pass && rep.d2->finite;
  return rep;
}

}  // namespace mcc
