#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcc/ergodicity.hpp"
#include "mcc/error.hpp"
#include "mcc/samplers.hpp"

namespace mcc {

NormalityStats normality_stats(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 3) throw InvalidInput("normality statistics need at least three values");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  NormalityStats s;
  if (!(m2 > 0.0)) {
    s.ks_distance = 1.0;
    return s;
  }
  s.skewness = m3 / std::pow(m2, 1.5);
  s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  const double sd = std::sqrt(m2 * static_cast<double>(n) / static_cast<double>(n - 1));
  std::vector<double> z(x.begin(), x.end());
  std::sort(z.begin(), z.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double F = 0.5 * std::erfc(-(z[i] - mean) / (sd * std::sqrt(2.0)));
    d = std::max({d, static_cast<double>(i + 1) / static_cast<double>(n) - F,
                  F - static_cast<double>(i) / static_cast<double>(n)});
  }
  s.ks_distance = d;
  return s;
}

namespace {

double sample_variance(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

CltReport clt_experiment(const HastingsFamily& family, const FeynmanKacModel& model, const GridFunction& f,
                         const CltConfig& cfg) {
  const std::size_t p = cfg.p_levels;
  if (p < 1 || p > model.max_level()) throw RangeError("model supports levels 1.." + std::to_string(model.max_level()));
  if (cfg.scheme == Scheme::imcmc && p > 2) throw InvalidInput("the iMCMC variance formula covers p <= 2 only");
  if (cfg.replications < 3) throw InvalidInput("CLT experiment needs at least three replications");
  if (cfg.n < cfg.batch_count) throw InvalidInput("n must be at least the batch count");
  require_same_grid(model.grid, f.grid, "CLT test function");

  const auto flow = reference_flow(model, p);
  CltReport rep;
  rep.scheme = cfg.scheme;
  rep.replications = cfg.replications;
  rep.n = cfg.n;
  rep.target_value = integrate(f, flow[p - 1]);
  rep.asymptotic_variance_poisson = asymptotic_variance(family.at(flow[p - 1]), f).sigma2;
  if (p > 1) {
    std::vector<VarianceFunctional> sigma2;
    for (std::size_t j = 1; j <= p; ++j) {
      const GridDensity eta = flow[j - 1];
      sigma2.push_back([&family, eta](const GridFunction& h) { return asymptotic_variance(family.at(eta), h).sigma2; });
    }
    const double v2 = smcmc_variance_recursion(model, flow, p, f, sigma2, cfg.centering).fluctuation;
    rep.fluctuation_variance = cfg.scheme == Scheme::imcmc ? 2.0 * v2 : v2;
  }

  const std::size_t R = cfg.replications;
  std::vector<double> rc(R), dc(R), bm(R), acc(R), est(R);
  std::vector<std::string> errors(R);
  const bool track = cfg.scheme == Scheme::imcmc && p >= 2 && cfg.track_adaptation;
  std::vector<AdaptationTrace> traces(track ? R : 0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < R; ++r) {
    try {
      SamplerOptions opt;
      opt.x0 = cfg.x0;
      opt.level_start = cfg.level_start;
      opt.replication = r;
      opt.track_adaptation = track;
      opt.adaptation_weight = cfg.adaptation_weight;
      double sum = 0.0, centering = 0.0;
      std::size_t N = 0;
      const ChainRun* run = nullptr;
      std::vector<SmcmcLevel> s;
      std::vector<ImcmcLevel> im;
      if (cfg.scheme == Scheme::smcmc) {
        s = run_smcmc(family, model, p, cfg.n, cfg.seed, opt);
        run = &s.back().run;
        N = run->size();
        sum = run->sum(f.values);
        centering = integrate(f, s.back().target);
      } else {
        im = run_imcmc(family, model, p, cfg.n, cfg.seed, opt, &f, track ? &flow[p - 1] : nullptr);
        if (track) traces[r] = *im.back().trace;
        run = &im.back().run;
        N = run->size();
        sum = run->sum(f.values);
        if (p == 1) {
          centering = rep.target_value;
        } else {
          const auto& c = im.back().centering;
          centering = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
        }
      }
      const double avg = sum / static_cast<double>(N);
      const double rn = std::sqrt(static_cast<double>(N));
      est[r] = avg;
      rc[r] = rn * (avg - centering);
      dc[r] = rn * (avg - rep.target_value);
      bm[r] = batch_means_variance(*run, f.values, cfg.batch_count);
      acc[r] = run->acceptance_rate;
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  }
  for (std::size_t r = 0; r < R; ++r)
    if (!errors[r].empty()) throw PreconditionError("replication " + std::to_string(r) + ": " + errors[r]);

  const double Rd = static_cast<double>(R);
  rep.estimate = std::accumulate(est.begin(), est.end(), 0.0) / Rd;
  rep.asymptotic_variance_batchmeans = std::accumulate(bm.begin(), bm.end(), 0.0) / Rd;
  rep.mean_acceptance = std::accumulate(acc.begin(), acc.end(), 0.0) / Rd;
  rep.replication_variance = sample_variance(rc);
  rep.replication_variance_det = sample_variance(dc);
  rep.normality = normality_stats(rc);
  rep.normality_det = normality_stats(dc);
  if (track) {
    AdaptationTrace mean = traces[0];
    for (std::size_t r = 1; r < R; ++r)
      for (std::size_t i = 0; i < mean.checkpoints.size(); ++i) {
        mean.d1_sup[i] += traces[r].d1_sup[i];
        mean.d1_v[i] += traces[r].d1_v[i];
        mean.c1_gap[i] += traces[r].c1_gap[i];
      }
    for (std::size_t i = 0; i < mean.checkpoints.size(); ++i) {
      mean.d1_sup[i] /= Rd;
      mean.d1_v[i] /= Rd;
      mean.c1_gap[i] /= Rd;
    }
    rep.adaptation = check_adaptation_conditions(mean);
  }
  rep.random_centered = std::move(rc);
  rep.deterministic_centered = std::move(dc);
  return rep;
}

}  // namespace mcc
