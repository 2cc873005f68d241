#include "mcc/config.hpp"

#include <json.hpp>
#include <set>
#include <sstream>

#include "mcc/io.hpp"

namespace mcc {

using nlohmann::json;

namespace {

const std::vector<std::pair<ExperimentKind, std::string>> kKinds = {
    {ExperimentKind::derivative_check, "derivative-check"}, {ExperimentKind::ftc_check, "ftc-check"},
    {ExperimentKind::mvi_check, "mvi-check"},               {ExperimentKind::ergodicity_check, "ergodicity-check"},
    {ExperimentKind::smcmc_run, "smcmc-run"},               {ExperimentKind::imcmc_run, "imcmc-run"},
    {ExperimentKind::clt_report, "clt-report"}};

// Reads keys of one JSON object, records errors, and reports keys never asked for.
class Section {
 public:
  Section(const json& j, std::string path, std::vector<std::string>& errors)
      : j_(j), path_(std::move(path)), errors_(errors) {
    if (!j_.is_object()) error("", "must be an object");
  }
  ~Section() {
    if (!j_.is_object()) return;
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) error(k, "unknown key");
  }
  Section(const Section&) = delete;

  bool has(const std::string& k) {
    used_.insert(k);
    return j_.is_object() && j_.contains(k);
  }
  const json* get(const std::string& k) { return has(k) ? &j_.at(k) : nullptr; }

  void error(const std::string& key, const std::string& msg) {
    std::string where = path_;
    if (!key.empty()) where += (where.empty() ? "" : ".") + key;
    errors_.push_back((where.empty() ? std::string("config") : where) + ": " + msg);
  }
  std::string child(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  std::vector<std::string>& errors() { return errors_; }

  double number(const std::string& k, double def) {
    const json* v = get(k);
    if (!v) return def;
    if (!v->is_number()) {
      error(k, "must be a number");
      return def;
    }
    return v->get<double>();
  }
  double positive(const std::string& k, double def) {
    const double x = number(k, def);
    if (!(x > 0.0)) error(k, "must be positive");
    return x;
  }
  std::uint64_t unsigned_int(const std::string& k, std::uint64_t def) {
    const json* v = get(k);
    if (!v) return def;
    if (!v->is_number_unsigned()) {
      error(k, "must be a nonnegative integer");
      return def;
    }
    return v->get<std::uint64_t>();
  }
  std::string string(const std::string& k, const std::string& def, const std::vector<std::string>& allowed = {}) {
    const json* v = get(k);
    if (!v) return def;
    if (!v->is_string()) {
      error(k, "must be a string");
      return def;
    }
    auto s = v->get<std::string>();
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      error(k, "'" + s + "' is not one of " + list);
      return def;
    }
    return s;
  }
  bool boolean(const std::string& k, bool def) {
    const json* v = get(k);
    if (!v) return def;
    if (!v->is_boolean()) {
      error(k, "must be true or false");
      return def;
    }
    return v->get<bool>();
  }
  std::vector<double> numbers(const std::string& k, std::vector<double> def) {
    const json* v = get(k);
    if (!v) return def;
    if (!v->is_array()) {
      error(k, "must be an array of numbers");
      return def;
    }
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) {
        error(k, "must be an array of numbers");
        return def;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

Axis read_axis(const json& j, const std::string& path, std::vector<std::string>& errors, Axis def) {
  Section s(j, path, errors);
  Axis a = def;
  a.lower = s.number("lower", def.lower);
  a.upper = s.number("upper", def.upper);
  a.n_points = s.unsigned_int("n_points", def.n_points);
  try {
    validate_axis(a);
  } catch (const Error& e) {
    s.error("", e.what());
  }
  return a;
}

std::optional<DensitySpec> read_density_spec(const json& j, const std::string& path, std::vector<std::string>& errors) {
  Section s(j, path, errors);
  DensitySpec d;
  if (s.has("csv")) {
    d.csv = s.string("csv", "");
    if (d.csv.empty()) s.error("csv", "must name a file");
    return d;
  }
  const std::string fam = s.string("family", "", {"normal", "mixture", "student_t", "bivariate_normal"});
  try {
    if (fam == "normal") {
      d.analytic = AnalyticDensity::normal(s.number("mean", 0.0), s.number("sd", 1.0));
    } else if (fam == "mixture") {
      d.analytic = AnalyticDensity::mixture(s.numbers("weights", {}), s.numbers("means", {}), s.numbers("sds", {}));
    } else if (fam == "student_t") {
      d.analytic = AnalyticDensity::student_t(s.number("location", 0.0), s.number("scale", 1.0), s.number("dof", 3.0));
    } else if (fam == "bivariate_normal") {
      const auto m = s.numbers("means", {0.0, 0.0});
      const auto sd = s.numbers("sds", {1.0, 1.0});
      const double r = s.number("correlation", 0.0);
      if (m.size() != 2 || sd.size() != 2) {
        s.error("", "bivariate_normal needs two means and two sds");
        return std::nullopt;
      }
      d.analytic = AnalyticDensity::bivariate_normal(m[0], m[1], sd[0], sd[1], r);
    } else {
      if (!s.has("family")) s.error("", "needs 'family' or 'csv'");
      return std::nullopt;
    }
  } catch (const Error& e) {
    s.error("", e.what());
    return std::nullopt;
  }
  return d;
}

}  // namespace

std::string experiment_name(ExperimentKind k) {
  for (const auto& [kind, name] : kKinds)
    if (kind == k) return name;
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment(const std::string& name) {
  for (const auto& [kind, n] : kKinds)
    if (n == name) return kind;
  return std::nullopt;
}

ConfigError::ConfigError(std::vector<std::string> errors)
    : InvalidInput([&] {
        std::string m = "invalid config:";
        for (const auto& e : errors) m += "\n  " + e;
        return m;
      }()),
      errors_(std::move(errors)) {}

WeightFunction WeightSpec::make() const {
  if (kind == "one_plus_square") return WeightFunction::one_plus_square();
  if (kind == "exp_abs") return WeightFunction::exp_abs(gamma);
  return WeightFunction::constant();
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  std::vector<std::string> errors;
  ExperimentConfig c;
  c.source = source;
  bool needs_pair = false, needs_model = false, needs_start = false;
  {
    Section s(root, "", errors);
    const std::string kind = s.string("experiment", "");
    if (auto k = parse_experiment(kind)) {
      c.kind = *k;
    } else {
      s.error("experiment", kind.empty() ? "is required" : "unknown experiment '" + kind + "'");
    }
    c.seed = s.unsigned_int("seed", c.seed);
    c.output_dir = s.string("output_dir", c.output_dir.string());
    if (const json* g = s.get("grid")) {
      Section gs(*g, "grid", errors);
      if (const json* a = gs.get("first")) c.grid.first = read_axis(*a, "grid.first", errors, c.grid.first);
      if (const json* a = gs.get("second")) c.grid.second = read_axis(*a, "grid.second", errors, c.grid.first);
    }
    if (const json* f = s.get("family")) {
      Section fs(*f, "family", errors);
      c.family.kind = fs.string("kind", c.family.kind, {"hastings", "gibbs"});
      c.family.balancing = fs.string("balancing", c.family.balancing, {"barker", "min-one", "gj"});
      const auto j = fs.unsigned_int("gj", 2);
      if (j < 2 || j > 64) fs.error("gj", "must lie in [2, 64]");
      c.family.gj = static_cast<int>(j);
      c.family.proposal = fs.string("proposal", c.family.proposal, {"random_walk", "independence"});
      c.family.sigma = fs.positive("sigma", c.family.sigma);
      if (const json* b = fs.get("base")) c.family.proposal_base = read_density_spec(*b, "family.base", errors);
      if (c.family.proposal == "independence" && !c.family.proposal_base)
        fs.error("base", "independence proposals need a base density");
    }
    if (const json* t = s.get("target")) c.target = read_density_spec(*t, "target", errors);
    if (const json* t = s.get("perturbation")) c.perturbation = read_density_spec(*t, "perturbation", errors);
    if (const json* t = s.get("claimed_invariant")) c.claimed_invariant = read_density_spec(*t, "claimed_invariant", errors);
    if (const json* st = s.get("start")) {
      Section ss(*st, "start", errors);
      if (ss.has("point")) {
        c.start.point = ss.numbers("point", {});
        if (c.start.point.empty()) ss.error("point", "needs one coordinate per grid axis");
      } else if (const json* d = ss.get("density")) {
        c.start.density = read_density_spec(*d, "start.density", errors);
      } else {
        ss.error("", "needs 'point' or 'density'");
      }
    }
    c.test_function = s.string("test_function", c.test_function);
    try {
      (void)named_test_function(c.test_function);
    } catch (const Error& e) {
      s.error("test_function", e.what());
    }
    if (const json* w = s.get("weight")) {
      Section ws(*w, "weight", errors);
      c.weight.kind = ws.string("kind", c.weight.kind, {"constant", "one_plus_square", "exp_abs"});
      c.weight.gamma = ws.positive("gamma", c.weight.gamma);
    }
    c.t_nodes = s.unsigned_int("t_nodes", c.t_nodes);
    if (c.t_nodes < 3 || c.t_nodes % 2 == 0) s.error("t_nodes", "must be odd and at least 3");
    c.perp_at_t0 = s.boolean("perp_at_t0", c.perp_at_t0);
    c.trials = s.unsigned_int("trials", c.trials);
    if (c.trials < 1) s.error("trials", "must be at least 1");
    if (const json* m = s.get("model")) {
      Section ms(*m, "model", errors);
      ModelSpec md;
      md.phi = ms.string("phi", md.phi, {"tanh", "sin", "clip"});
      md.phi_bar = ms.positive("phi_bar", md.phi_bar);
      md.observations = ms.string("observations", "");
      if (md.observations.empty()) ms.error("observations", "is required");
      if (const json* a = ms.get("axis")) md.axis = read_axis(*a, "model.axis", errors, md.axis);
      c.model = md;
    }
    if (const json* e = s.get("ergodicity")) {
      Section es(*e, "ergodicity", errors);
      auto& g = c.ergodicity;
      g.d_levels = es.numbers("d_levels", g.d_levels);
      if (g.d_levels.empty()) es.error("d_levels", "must not be empty");
      const auto j = es.unsigned_int("j", 1);
      if (j != 1 && j != 2) es.error("j", "must be 1 or 2");
      g.j = static_cast<int>(j);
      g.kappa_floor = es.positive("kappa_floor", g.kappa_floor);
      g.k_max = es.unsigned_int("k_max", g.k_max);
      if (g.k_max < 5) es.error("k_max", "must be at least 5");
      g.sample_sets = es.unsigned_int("sample_sets", g.sample_sets);
      g.samples_per_set = es.unsigned_int("samples_per_set", g.samples_per_set);
      if (g.samples_per_set < 1) es.error("samples_per_set", "must be at least 1");
      if (es.has("log_concave_gamma")) g.log_concave_gamma = es.positive("log_concave_gamma", 1.0);
      if (es.has("log_concave_z")) g.log_concave_z = es.number("log_concave_z", 0.0);
    }
    if (const json* p = s.get("sampler")) {
      Section ps(*p, "sampler", errors);
      auto& sp = c.sampler;
      sp.scheme = ps.string("scheme", "smcmc", {"smcmc", "imcmc"}) == "imcmc" ? Scheme::imcmc : Scheme::smcmc;
      sp.levels = ps.unsigned_int("levels", sp.levels);
      if (sp.levels < 1) ps.error("levels", "must be at least 1");
      sp.n = ps.unsigned_int("n", sp.n);
      if (sp.n < 1) ps.error("n", "must be at least 1");
      sp.replications = ps.unsigned_int("replications", sp.replications);
      if (sp.replications < 3) ps.error("replications", "must be at least 3");
      sp.batch_count = ps.unsigned_int("batch_count", sp.batch_count);
      if (sp.batch_count < 20) ps.error("batch_count", "must be at least 20");
      sp.x0 = ps.number("x0", sp.x0);
      sp.level_start = ps.string("level_start", "previous_final", {"previous_final", "fixed"}) == "fixed"
                           ? LevelStart::fixed
                           : LevelStart::previous_final;
      sp.centering = ps.string("centering", "final_level", {"final_level", "per_level"}) == "per_level"
                         ? FkCentering::per_level
                         : FkCentering::final_level;
      sp.alpha = ps.number("alpha", sp.alpha);
      sp.track_adaptation = ps.boolean("track_adaptation", sp.track_adaptation);
    }
    if (const json* t = s.get("tolerances")) {
      Section ts(*t, "tolerances", errors);
      auto& o = c.tol;
      o.oracle_relative = ts.positive("oracle_relative", o.oracle_relative);
      o.centering = ts.positive("centering", o.centering);
      o.invariance = ts.positive("invariance", o.invariance);
      o.ftc_density = ts.positive("ftc_density", o.ftc_density);
      o.ftc_point = ts.positive("ftc_point", o.ftc_point);
      o.refinement_factor = ts.positive("refinement_factor", o.refinement_factor);
      o.poisson = ts.positive("poisson", o.poisson);
      o.resolvent_identity = ts.positive("resolvent_identity", o.resolvent_identity);
      o.variance_relative = ts.positive("variance_relative", o.variance_relative);
      o.skewness = ts.positive("skewness", o.skewness);
      o.excess_kurtosis = ts.positive("excess_kurtosis", o.excess_kurtosis);
      o.ks = ts.positive("ks", o.ks);
      o.warm_start_ceiling = ts.positive("warm_start_ceiling", o.warm_start_ceiling);
    }
  }

  switch (c.kind) {
    case ExperimentKind::derivative_check:
    case ExperimentKind::ftc_check:
    case ExperimentKind::mvi_check:
      needs_pair = needs_start = true;
      break;
    case ExperimentKind::ergodicity_check:
      if (c.ergodicity.sample_sets > 0) {
        needs_model = true;
      } else if (!c.target) {
        errors.push_back("target: required unless ergodicity.sample_sets > 0");
      }
      break;
    case ExperimentKind::imcmc_run:
      c.sampler.scheme = Scheme::imcmc;
      needs_model = true;
      break;
    case ExperimentKind::smcmc_run:
      c.sampler.scheme = Scheme::smcmc;
      needs_model = true;
      break;
    case ExperimentKind::clt_report:
      needs_model = true;
      break;
  }
  if (needs_pair) {
    if (!c.target) errors.push_back("target: is required for " + experiment_name(c.kind));
    if (!c.perturbation) errors.push_back("perturbation: is required for " + experiment_name(c.kind));
  }
  if (needs_start && c.start.point.empty() && !c.start.density)
    errors.push_back("start: is required for " + experiment_name(c.kind));
  if (needs_model && !c.model) errors.push_back("model: is required for " + experiment_name(c.kind));
  const bool gibbs = c.family.kind == "gibbs";
  if (!needs_model) {
    if (gibbs && !c.grid.second) errors.push_back("grid.second: Gibbs kernels need a 2-D grid");
    if (!gibbs && c.grid.second) errors.push_back("grid.second: Hastings kernels need a 1-D grid");
    if (!c.start.point.empty() && c.start.point.size() != (gibbs ? 2u : 1u))
      errors.push_back("start.point: needs one coordinate per grid axis");
  } else if (gibbs) {
    errors.push_back("family.kind: samplers use Hastings kernels");
  }
  if (c.kind == ExperimentKind::clt_report && c.sampler.scheme == Scheme::imcmc && c.sampler.levels > 2)
    errors.push_back("sampler.levels: the iMCMC variance formula covers levels <= 2");
  if (c.sampler.scheme == Scheme::imcmc && (c.kind == ExperimentKind::imcmc_run || c.kind == ExperimentKind::clt_report) &&
      !(c.sampler.alpha > 0.0 && c.sampler.alpha < 0.5))
    errors.push_back("sampler.alpha: α must lie in (0,1/2)");
  if (c.model) {
    const Axis& a = c.model->axis;
    if (c.sampler.x0 < a.lower || c.sampler.x0 > a.upper) errors.push_back("sampler.x0: outside the model axis");
  }
  if (c.kind == ExperimentKind::clt_report && c.sampler.n < c.sampler.batch_count)
    errors.push_back("sampler.n: must be at least batch_count");
  for (const auto& in : config_inputs(c))
    if (!std::filesystem::exists(in)) errors.push_back("input file not found: " + in.string());
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError({"config file not found: " + path.string()});
  return parse_config(read_text(path), path);
}

std::filesystem::path resolve_input(const ExperimentConfig& c, const std::filesystem::path& p) {
  if (p.is_absolute() || c.source.empty()) return p;
  return c.source.parent_path() / p;
}

GridDensity make_density(const ExperimentConfig& c, const DensitySpec& s, const Grid& g) {
  if (s.analytic) {
    if (s.analytic->dim() != g.dim())
      throw InvalidInput("density " + s.analytic->describe() + " does not match the grid dimension");
    const AnalyticDensity a = *s.analytic;
    return GridDensity::from_pdf(g, [a](const Point& p) { return a(p); }, a.describe());
  }
  auto d = read_density(resolve_input(c, s.csv));
  require_same_grid(g, d.grid(), "density file");
  return d;
}

namespace {

BalancingFunction make_balancing(const FamilySpec& f) {
  if (f.balancing == "min-one") return BalancingFunction::min_one();
  if (f.balancing == "gj") return BalancingFunction::gj(f.gj);
  return BalancingFunction::barker();
}

}  // namespace

HastingsFamily make_hastings_family(const ExperimentConfig& c, const Grid& g) {
  ProposalKernel q = c.family.proposal == "independence"
                         ? ProposalKernel::independence(make_density(c, *c.family.proposal_base, g))
                         : ProposalKernel::random_walk(g, c.family.sigma);
  return HastingsFamily(std::move(q), make_balancing(c.family));
}

KernelFamily make_family(const ExperimentConfig& c, const Grid& g) {
  if (c.family.kind == "gibbs") return GibbsFamily{};
  return make_hastings_family(c, g);
}

SsmBootstrapModel make_model(const ExperimentConfig& c) {
  if (!c.model) throw InvalidInput("config has no model section");
  SsmBootstrapModel m;
  m.phi_tag = c.model->phi;
  m.phi_bar = c.model->phi_bar;
  m.axis = c.model->axis;
  m.observations = read_observations(resolve_input(c, c.model->observations));
  return m;
}

std::vector<std::filesystem::path> config_inputs(const ExperimentConfig& c) {
  std::vector<std::filesystem::path> out;
  auto add = [&](const std::optional<DensitySpec>& d) {
    if (d && !d->analytic) out.push_back(resolve_input(c, d->csv));
  };
  add(c.target);
  add(c.perturbation);
  add(c.claimed_invariant);
  add(c.start.density);
  add(c.family.proposal_base);
  if (c.model) out.push_back(resolve_input(c, c.model->observations));
  return out;
}

}  // namespace mcc
