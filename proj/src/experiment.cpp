#include "mcc/experiment.hpp"

#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "mcc/calculus.hpp"
#include "mcc/derivative.hpp"
#include "mcc/ergodicity.hpp"
#include "mcc/feynman_kac.hpp"
#include "mcc/io.hpp"
#include "mcc/samplers.hpp"

namespace mcc {

using nlohmann::json;

void apply_overrides(ExperimentConfig& c, const RunOverrides& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.replications) {
    if (*o.replications < 3) throw ConfigError({"--reps: must be at least 3"});
    c.sampler.replications = *o.replications;
  }
  if (o.output_dir) c.output_dir = *o.output_dir;
}

namespace {

std::string fmt(double v) { return format_double(v); }

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
  auto a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

class Run {
 public:
  Run(const ExperimentConfig& c) : c_(c), dir_(c.output_dir) {
    std::filesystem::create_directories(dir_);
    m_.experiment = experiment_name(c.kind);
    m_.seed = c.seed;
    m_.started_utc = utc_timestamp();
    if (!c.source.empty()) {
      m_.config_path = c.source.string();
      m_.config_sha256 = sha256_file(c.source);
      m_.inputs.push_back({c.source.string(), m_.config_sha256});
    }
    for (const auto& p : config_inputs(c))
      if (std::filesystem::exists(p)) m_.inputs.push_back({p.string(), sha256_file(p)});
  }

  const ExperimentConfig& config() const { return c_; }
  std::filesystem::path path(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }
  void report(const std::string& name, const json& j) { write_text(path(name), j.dump(2) + "\n"); }
  void check(const std::string& name, bool pass, const std::string& detail) { m_.checks.push_back({name, pass, detail}); }
  void stage(std::string s) { stage_ = std::move(s); }
  const std::string& stage() const { return stage_; }

  RunManifest finish(const std::string& error = {}) {
    m_.error = error;
    for (const auto& f : files_)
      if (std::filesystem::exists(dir_ / f)) m_.outputs.push_back({f, sha256_file(dir_ / f)});
    m_.finished_utc = utc_timestamp();
    write_manifest(dir_, m_);
    return m_;
  }

 private:
  const ExperimentConfig& c_;
  std::filesystem::path dir_;
  RunManifest m_;
  std::vector<std::string> files_;
  std::string stage_ = "setup";
};

std::string short_fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string compare(double value, const char* op, double limit) {
  return short_fmt(value) + " " + op + " " + short_fmt(limit);
}

// Relative gap |a / b - 1|.
double rel_gap(double a, double b) { return std::abs(a / b - 1.0); }

Start make_start(const ExperimentConfig& c, const Grid& g) {
  if (c.start.density) return Start::density(make_density(c, *c.start.density, g));
  const std::size_t i1 = g.axis(0).nearest(c.start.point[0]);
  if (g.dim() == 1) return Start::point(i1);
  return Start::point(g.index(i1, g.axis(1).nearest(c.start.point[1])));
}

GridFunction make_function(const ExperimentConfig& c, const Grid& g) {
  return GridFunction::evaluate(g, named_test_function(c.test_function));
}

void write_chain(const std::filesystem::path& p, const ChainRun& run) {
  CsvWriter w(p, {"step", "state", "x", "accepted"});
  for (std::size_t k = 0; k < run.size(); ++k)
    w.row_text({std::to_string(k), std::to_string(run.states[k]), fmt(run.coordinate(k)),
                std::to_string(run.accepted.empty() ? 0 : run.accepted[k])});
  w.close();
}

void invariance_check(Run& run, const MarkovKernel& k, const GridDensity& claimed) {
  const auto m = claimed.masses();
  const auto pushed = k.push(m);
  double tv = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) tv += std::abs(pushed[i] - m[i]);
  run.check("invariance", tv <= run.config().tol.invariance,
            "||pi P - pi||_TV = " + compare(tv, "<=", run.config().tol.invariance) + " for pi = " + claimed.description());
}

void derivative_check(Run& run) {
  const auto& c = run.config();
  const Grid g = c.grid.grid();
  const auto family = make_family(c, g);
  const auto mu = make_density(c, *c.target, g);
  const auto nu = make_density(c, *c.perturbation, g);
  const auto start = make_start(c, g);
  const auto f = make_function(c, g);
  run.stage("invariance");
  const auto k = make_kernel(family, mu);
  invariance_check(run, *k, c.claimed_invariant ? make_density(c, *c.claimed_invariant, g) : mu);
  run.stage("derivative");
  DerivativeOptions opt{c.tol.warm_start_ceiling};
  const auto kd = kernel_derivative(*k, start, f, opt);
  const double analytic = kd.action(difference(nu, mu));
  run.stage("oracle");
  const auto fd = fd_directional_derivative(family, mu, nu, start, f);
  const double err = std::abs(analytic - fd.value) / fd.scale;
  const double centering = kd.centering_residual();
  run.report("derivative_report.json", {{"family", family_tag(family)},
                                        {"start", start.describe()},
                                        {"analytic_action", num(analytic)},
                                        {"oracle_action", num(fd.value)},
                                        {"oracle_scale", num(fd.scale)},
                                        {"relative_error", num(err)},
                                        {"centering_residual", num(centering)},
                                        {"density_centering", num(kd.density_centering())}});
  write_function(run.path("derivative_density.csv"), kd.density_part, "density_part");
  if (kd.singular_part) write_function(run.path("derivative_singular.csv"), *kd.singular_part, "singular_part");
  run.check("oracle_agreement", err <= c.tol.oracle_relative, "relative error " + compare(err, "<=", c.tol.oracle_relative));
  run.check("centering", centering <= c.tol.centering, "|mu(D)| " + compare(centering, "<=", c.tol.centering));
}

void ftc_check(Run& run) {
  const auto& c = run.config();
  const Grid g = c.grid.grid();
  const auto family = make_family(c, g);
  const auto mu = make_density(c, *c.target, g);
  const auto nu = make_density(c, *c.perturbation, g);
  const auto start = make_start(c, g);
  const auto f = make_function(c, g);
  DerivativeOptions opt{c.tol.warm_start_ceiling};
  const double tol = start.is_point() ? c.tol.ftc_point : c.tol.ftc_density;
  run.stage("ftc");
  const auto rep = verify_ftc(family, mu, nu, start, f, c.t_nodes, tol, opt);
  run.stage("refinement");
  const auto ref = ftc_refinement(family, mu, nu, start, f, {5, 9, 17, 33}, opt);
  std::vector<double> tn(ref.t_nodes.begin(), ref.t_nodes.end());
  run.report("ftc_report.json", {{"family", family_tag(family)},
                                 {"start", start.describe()},
                                 {"lhs", num(rep.lhs)},
                                 {"rhs", num(rep.rhs)},
                                 {"residual", num(rep.residual)},
                                 {"tolerance", num(rep.tolerance)},
                                 {"refinement", {{"t_nodes", nums(tn)}, {"residuals", nums(ref.residuals)},
                                                 {"factor", num(ref.factor)}}}});
  CsvWriter w(run.path("ftc_trace.csv"), {"t", "action"});
  for (std::size_t i = 0; i < rep.t_nodes.size(); ++i) w.row({rep.t_nodes[i], rep.actions[i]});
  w.close();
  run.check("ftc_residual", rep.pass, "residual " + compare(rep.residual, "<=", tol));
  run.check("ftc_refinement", ref.shrinks && ref.factor >= c.tol.refinement_factor,
            "residual ratio " + compare(ref.factor, ">=", c.tol.refinement_factor));
}

void mvi_check(Run& run) {
  const auto& c = run.config();
  const Grid g = c.grid.grid();
  const auto family = make_family(c, g);
  const auto mu = make_density(c, *c.target, g);
  const auto nu = make_density(c, *c.perturbation, g);
  const auto start = make_start(c, g);
  const auto V = c.weight.make();
  MviOptions opt;
  opt.t_nodes = c.t_nodes;
  opt.derivative.warm_start_ceiling = c.tol.warm_start_ceiling;
  opt.perp_at_t0 = c.perp_at_t0;
  run.stage("mvi");
  const auto rep = check_mean_value_inequality(family, mu, nu, start, V, c.trials, c.seed, opt);
  const auto& k = rep.constants;
  run.report("mvi_report.json", {{"family", family_tag(family)},
                                 {"start", start.describe()},
                                 {"constants", {{"m", num(k.m_rho)}, {"m_perp", num(k.m_perp)}, {"formula", k.formula},
                                                {"v_tag", k.v_tag}, {"t_nodes", k.t_nodes}}},
                                 {"v_distance", num(rep.v_distance)},
                                 {"perp_distance", num(rep.perp_distance)},
                                 {"bound", num(rep.bound)},
                                 {"exact_lhs", num(rep.exact_lhs)},
                                 {"metric_bound", num(rep.metric_bound)},
                                 {"empirical_max", num(rep.empirical_max)},
                                 {"empirical_max_ratio", num(rep.empirical_max_ratio)},
                                 {"trials", rep.trials},
                                 {"violations", rep.violations}});
  // no derivative along the path for min-one balancing, hence no trace
  const auto* hf = std::get_if<HastingsFamily>(&family);
  if (!hf || hf->balancing().differentiable()) {
    run.stage("trace");
    const auto f = make_function(c, g);
    const auto ftc = verify_ftc(family, mu, nu, start, f, c.t_nodes, 1.0, opt.derivative);
    CsvWriter w(run.path("mvi_trace.csv"), {"t", "action"});
    for (std::size_t i = 0; i < ftc.t_nodes.size(); ++i) w.row({ftc.t_nodes[i], ftc.actions[i]});
    w.close();
  }
  run.check("mean_value_inequality", rep.pass,
            std::to_string(rep.violations) + " violations in " + std::to_string(rep.trials) +
                " trials; exact ||.||_V " + compare(rep.exact_lhs, "<=", rep.metric_bound));
}

std::vector<std::size_t> spread_nodes(std::size_t n) {
  return {0, n / 4, n / 2, (3 * n) / 4, n - 1};
}

void ergodicity_check(Run& run) {
  const auto& c = run.config();
  const auto V = c.weight.make();
  std::optional<SsmBootstrapModel> ssm;
  std::optional<FeynmanKacModel> model;
  std::vector<GridDensity> targets;
  run.stage("targets");
  if (c.ergodicity.sample_sets > 0) {
    ssm = make_model(c);
    model = ssm->model();
    const auto m1 = model->eta1.masses();
    std::vector<double> cdf(m1.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < m1.size(); ++i) cdf[i] = acc += m1[i];
    for (std::size_t s = 0; s < c.ergodicity.sample_sets; ++s) {
      RngStream rng(c.seed, 0x657267, s);
      std::vector<std::size_t> states(c.ergodicity.samples_per_set);
      for (auto& x : states) {
        const double u = rng.uniform() * acc;
        x = std::min<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(), m1.size() - 1);
      }
      targets.push_back(boltzmann_gibbs(EmpiricalMeasure(model->grid, states), model->G(1), model->M(1)));
    }
  } else {
    targets.push_back(make_density(c, *c.target, c.grid.grid()));
  }
  const Grid g = targets.front().grid();
  const auto family = make_family(c, g);
  std::vector<std::unique_ptr<MarkovKernel>> owned;
  std::vector<const MarkovKernel*> kernels;
  for (const auto& t : targets) {
    owned.push_back(make_kernel(family, t));
    kernels.push_back(owned.back().get());
  }
  run.stage("drift");
  auto cert = scan_drift(kernels, V, c.ergodicity.d_levels);
  run.check("drift", cert.pass,
            "lambda " + short_fmt(cert.drift_rate) + ", b " + short_fmt(cert.b) + ", d " + short_fmt(cert.d) +
                ", max violation " + short_fmt(cert.worst_violation) + (cert.pass ? "" : ": " + cert.diagnostic));
  run.stage("minorization");
  const auto in_C = level_set(g, V, cert.d);
  const auto mino = check_minorization(kernels, in_C, c.ergodicity.j, c.ergodicity.kappa_floor);
  cert.j = mino.j;
  cert.kappa = mino.inf_kappa;
  run.check("minorization", mino.pass, "inf kappa " + compare(mino.inf_kappa, ">=", c.ergodicity.kappa_floor));
  json extra;
  if (ssm) {
    run.stage("log-concave tails");
    const double gamma = c.ergodicity.log_concave_gamma.value_or(2.0 * ssm->phi_bar);
    const double z = c.ergodicity.log_concave_z.value_or(2.0 * ssm->phi_bar);
    const auto lc = check_log_concave_tails(targets, gamma, z);
    extra["log_concave"] = {{"gamma", gamma}, {"z", z}, {"worst_slack", num(lc.worst_slack)},
                            {"worst_density", lc.worst_density}, {"pass", lc.pass}};
    run.check("log_concave_tails", lc.pass, "worst slack " + short_fmt(lc.worst_slack));
  }
  run.stage("geometric rate");
  const auto& k0 = *kernels.front();
  const auto geo = estimate_geometric_rate(k0, spread_nodes(g.size()), c.ergodicity.k_max, V);
  run.check("geometric_rate", geo.pass, geo.diagnostic);
  run.stage("resolvent");
  const auto f = make_function(c, g);
  const auto R = poisson_resolvent(k0, f);
  const auto av = asymptotic_variance(k0, f);
  run.check("poisson_equation", R.poisson_residual <= c.tol.poisson,
            "residual " + compare(R.poisson_residual, "<=", c.tol.poisson));
  if (c.perturbation && !ssm) {
    const double id = check_resolvent_identity(family, targets.front(), make_density(c, *c.perturbation, g), f);
    extra["resolvent_identity_residual"] = num(id);
    run.check("resolvent_identity", id <= c.tol.resolvent_identity,
              "residual " + compare(id, "<=", c.tol.resolvent_identity));
  }
  json j = {{"V_tag", cert.v_tag},
            {"drift_rate", num(cert.drift_rate)},
            {"b", num(cert.b)},
            {"d", num(cert.d)},
            {"j", cert.j},
            {"kappa", num(cert.kappa)},
            {"beta_est", num(geo.beta)},
            {"C_est", num(geo.L)},
            {"c_fit", num(geo.c_fit)},
            {"r_squared", num(geo.r_squared)},
            {"kernels", kernels.size()},
            {"poisson_residual", num(R.poisson_residual)},
            {"truncation_k", R.truncation_k},
            {"sigma2", num(av.sigma2)},
            {"sigma2_generator", num(av.sigma2_generator)}};
  j.update(extra);
  run.report("certificate.json", j);
  CsvWriter w(run.path("resolvent.csv"), {"node", "x", "f", "Rf"});
  for (std::size_t i = 0; i < g.size(); ++i)
    w.row_text({std::to_string(i), fmt(g.coordinate(i)), fmt(f[i]), fmt(R.values[i])});
  w.close();
  CsvWriter a(run.path("geometric_rate.csv"), {"k", "a_k"});
  for (std::size_t i = 0; i < geo.a.size(); ++i) a.row_text({std::to_string(i + 1), fmt(geo.a[i])});
  a.close();
}

// Limiting sigma^2 per level and the level-p fluctuation term of the CLT.
struct LevelVariances {
  std::vector<double> sigma2;
  std::vector<double> fluctuation;
};

LevelVariances level_variances(const HastingsFamily& family, const FeynmanKacModel& model,
                               const std::vector<GridDensity>& flow, const GridFunction& f, FkCentering centering,
                               double fluctuation_factor) {
  LevelVariances lv;
  std::vector<VarianceFunctional> sigma2;
  for (std::size_t p = 1; p <= flow.size(); ++p) {
    const GridDensity eta = flow[p - 1];
    sigma2.push_back([&family, eta](const GridFunction& h) { return asymptotic_variance(family.at(eta), h).sigma2; });
    lv.sigma2.push_back(sigma2.back()(f));
    lv.fluctuation.push_back(
        p == 1 ? 0.0 : fluctuation_factor * smcmc_variance_recursion(model, flow, p, f, sigma2, centering).fluctuation);
  }
  return lv;
}

void sampler_run(Run& run, Scheme scheme) {
  const auto& c = run.config();
  run.stage("model");
  const auto ssm = make_model(c);
  const auto model = ssm.model();
  const Grid& g = model.grid;
  const auto family = make_hastings_family(c, g);
  const auto f = make_function(c, g);
  const std::size_t P = c.sampler.levels;
  const auto flow = reference_flow(model, P);
  for (std::size_t p = 1; p <= P; ++p) {
    const std::string name = "flow_level" + std::to_string(p) + ".csv";
    write_density(run.path(name), flow[p - 1]);
    run.path(header_path(name).string());
  }
  SamplerOptions opt;
  opt.x0 = g.axis(0).nearest(c.sampler.x0);
  opt.level_start = c.sampler.level_start;
  const auto V = c.weight.make();
  opt.adaptation_weight = &V;
  std::vector<const ChainRun*> runs;
  std::vector<SmcmcLevel> s;
  std::vector<ImcmcLevel> im;
  run.stage("sampling");
  if (scheme == Scheme::smcmc) {
    s = run_smcmc(family, model, P, c.sampler.n, c.seed, opt);
    for (const auto& l : s) runs.push_back(&l.run);
  } else {
    opt.track_adaptation = c.sampler.track_adaptation && P >= 2;
    im = run_imcmc(family, model, P, c.sampler.n, c.seed, opt, &f, &flow[P - 1]);
    for (const auto& l : im) runs.push_back(&l.run);
  }
  run.stage("variances");
  const std::size_t checked = scheme == Scheme::imcmc ? std::min<std::size_t>(P, 2) : P;
  const auto lv = level_variances(family, model, std::vector<GridDensity>(flow.begin(), flow.begin() + checked), f,
                                  c.sampler.centering, scheme == Scheme::imcmc ? 2.0 : 1.0);
  auto levels = json::array();
  for (std::size_t p = 1; p <= P; ++p) {
    const ChainRun& r = *runs[p - 1];
    write_chain(run.path("chain_level" + std::to_string(p) + ".csv"), r);
    const double N = static_cast<double>(r.size());
    const double avg = r.sum(f.values) / N;
    const double truth = integrate(f, flow[p - 1]);
    const double bm = r.size() >= 20 ? batch_means_variance(r, f.values, std::min<std::size_t>(c.sampler.batch_count, r.size())) : NAN;
    const double trunc_rate = static_cast<double>(r.truncation_events) / N;
    json lj = {{"level", p},
               {"states", r.size()},
               {"kernel", r.kernel_descriptor},
               {"acceptance_rate", num(r.acceptance_rate)},
               {"truncation_events", r.truncation_events},
               {"truncation_flagged", trunc_rate > 1e-4},
               {"average", num(avg)},
               {"target_value", num(truth)},
               {"batch_means_sigma2", num(bm)}};
    if (p <= checked) {
      const double var = bm + lv.fluctuation[p - 1];
      const double band = 3.0 * std::sqrt(var / N);
      lj["sigma2"] = num(lv.sigma2[p - 1]);
      lj["fluctuation"] = num(lv.fluctuation[p - 1]);
      lj["band"] = num(band);
      run.check("ergodic_average_level" + std::to_string(p), std::abs(avg - truth) <= band,
                "|avg - eta(f)| " + compare(std::abs(avg - truth), "<=", band));
    }
    levels.push_back(lj);
  }
  json j = {{"scheme", scheme == Scheme::smcmc ? "smcmc" : "imcmc"},
            {"n", c.sampler.n},
            {"seed", c.seed},
            {"test_function", c.test_function},
            {"levels", levels}};
  if (scheme == Scheme::imcmc && im.back().trace) {
    const auto& t = *im.back().trace;
    const auto ad = check_adaptation_conditions(t);
    CsvWriter w(run.path("adaptation.csv"), {"n", "d1_sup", "d1_v", "c1_gap"});
    for (std::size_t i = 0; i < t.checkpoints.size(); ++i)
      w.row_text({std::to_string(t.checkpoints[i]), fmt(t.d1_sup[i]), fmt(t.d1_v[i]), fmt(t.c1_gap[i])});
    w.close();
    j["adaptation"] = {{"d1_sup_slope", num(ad.d1_sup_slope)}, {"d1_v_slope", num(ad.d1_v_slope)},
                       {"c1_slope", num(ad.c1_slope)}};
    run.check("d1_trend", ad.d1_pass, "log-log slopes " + short_fmt(ad.d1_sup_slope) + ", " + short_fmt(ad.d1_v_slope) + " < 0");
    run.check("c1_trend", ad.c1_pass, "log-log slope " + short_fmt(ad.c1_slope) + " < 0");
  }
  run.report(scheme == Scheme::smcmc ? "smcmc_report.json" : "imcmc_report.json", j);
}

json normality_json(const NormalityStats& s) {
  return {{"skewness", num(s.skewness)}, {"excess_kurtosis", num(s.excess_kurtosis)}, {"ks_distance", num(s.ks_distance)}};
}

void clt_report(Run& run) {
  const auto& c = run.config();
  run.stage("model");
  const auto ssm = make_model(c);
  const auto model = ssm.model();
  const Grid& g = model.grid;
  const auto family = make_hastings_family(c, g);
  const auto f = make_function(c, g);
  const auto V = c.weight.make();
  CltConfig cfg;
  cfg.scheme = c.sampler.scheme;
  cfg.p_levels = c.sampler.levels;
  cfg.n = c.sampler.n;
  cfg.replications = c.sampler.replications;
  cfg.batch_count = c.sampler.batch_count;
  cfg.seed = c.seed;
  cfg.x0 = g.axis(0).nearest(c.sampler.x0);
  cfg.level_start = c.sampler.level_start;
  cfg.centering = c.sampler.centering;
  cfg.track_adaptation = c.sampler.track_adaptation;
  cfg.adaptation_weight = &V;
  run.stage("replications");
  const auto rep = clt_experiment(family, model, f, cfg);
  const double total = rep.asymptotic_variance_poisson + rep.fluctuation_variance;
  const auto& t = c.tol;
  json j = {{"scheme", cfg.scheme == Scheme::smcmc ? "smcmc" : "imcmc"},
            {"levels", cfg.p_levels},
            {"n", rep.n},
            {"replications", rep.replications},
            {"seed", c.seed},
            {"test_function", c.test_function},
            {"estimate", num(rep.estimate)},
            {"target_value", num(rep.target_value)},
            {"asymptotic_variance_poisson", num(rep.asymptotic_variance_poisson)},
            {"asymptotic_variance_batchmeans", num(rep.asymptotic_variance_batchmeans)},
            {"fluctuation_variance", num(rep.fluctuation_variance)},
            {"predicted_total_variance", num(total)},
            {"replication_variance", num(rep.replication_variance)},
            {"replication_variance_det", num(rep.replication_variance_det)},
            {"normality", normality_json(rep.normality)},
            {"normality_det", normality_json(rep.normality_det)},
            {"mean_acceptance", num(rep.mean_acceptance)}};
  if (rep.adaptation) {
    const auto& a = *rep.adaptation;
    j["adaptation"] = {{"checkpoints", a.trace.checkpoints},
                       {"d1_sup", nums(a.trace.d1_sup)},
                       {"d1_v", nums(a.trace.d1_v)},
                       {"c1_gap", nums(a.trace.c1_gap)},
                       {"d1_sup_slope", num(a.d1_sup_slope)},
                       {"d1_v_slope", num(a.d1_v_slope)},
                       {"c1_slope", num(a.c1_slope)}};
  }
  run.report("clt_report.json", j);
  CsvWriter w(run.path("replications.csv"), {"replication", "level", "random_centered", "deterministic_centered"});
  for (std::size_t r = 0; r < rep.random_centered.size(); ++r)
    w.row_text({std::to_string(r), std::to_string(cfg.p_levels), fmt(rep.random_centered[r]),
                fmt(rep.deterministic_centered[r])});
  w.close();
  const double g1 = rel_gap(rep.replication_variance, rep.asymptotic_variance_batchmeans);
  const double g2 = rel_gap(rep.replication_variance, rep.asymptotic_variance_poisson);
  const double g3 = rel_gap(rep.replication_variance_det, total);
  run.check("variance_vs_batchmeans", g1 <= t.variance_relative,
            "|var/sigma2_bm - 1| " + compare(g1, "<=", t.variance_relative));
  run.check("variance_vs_resolvent", g2 <= t.variance_relative,
            "|var/sigma2 - 1| " + compare(g2, "<=", t.variance_relative));
  run.check("deterministic_variance", g3 <= t.variance_relative,
            "|var_det/(sigma2 + fluctuation) - 1| " + compare(g3, "<=", t.variance_relative));
  const auto& n = rep.normality;
  run.check("skewness", std::abs(n.skewness) <= t.skewness, "|skew| " + compare(std::abs(n.skewness), "<=", t.skewness));
  run.check("excess_kurtosis", std::abs(n.excess_kurtosis) <= t.excess_kurtosis,
            "|excess kurtosis| " + compare(std::abs(n.excess_kurtosis), "<=", t.excess_kurtosis));
  run.check("ks", n.ks_distance < t.ks, "KS " + compare(n.ks_distance, "<", t.ks));
  if (rep.adaptation)
    run.check("d1_trend", rep.adaptation->d1_pass,
              "log-log slopes " + short_fmt(rep.adaptation->d1_sup_slope) + ", " + short_fmt(rep.adaptation->d1_v_slope) + " < 0");
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& c) {
  Run run(c);
  try {
    switch (c.kind) {
      case ExperimentKind::derivative_check:
        derivative_check(run);
        break;
      case ExperimentKind::ftc_check:
        ftc_check(run);
        break;
      case ExperimentKind::mvi_check:
        mvi_check(run);
        break;
      case ExperimentKind::ergodicity_check:
        ergodicity_check(run);
        break;
      case ExperimentKind::smcmc_run:
        sampler_run(run, Scheme::smcmc);
        break;
      case ExperimentKind::imcmc_run:
        sampler_run(run, Scheme::imcmc);
        break;
      case ExperimentKind::clt_report:
        clt_report(run);
        break;
    }
  } catch (const std::exception& e) {
    const std::string msg = experiment_name(c.kind) + " [" + run.stage() + "]: " + e.what();
    run.finish(msg);
    throw ExperimentError(msg);
  }
  return run.finish();
}

}  // namespace mcc
