#include "eip/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "eip/errors.hpp"

namespace eip {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& section,
                const std::set<std::string>& allowed,
                const std::set<std::string>& required) {
  if (!obj.is_object()) throw ValidationError("config: '" + section + "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ValidationError("config: unknown key '" + section + "." + it.key() + "'");
  for (const std::string& k : required)
    if (!obj.contains(k))
      throw ValidationError("config: missing key '" + section + "." + k + "'");
}

double num(const json& obj, const std::string& key, double fallback) {
  return obj.contains(key) ? obj.at(key).get<double>() : fallback;
}

void require_range(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("config: " + what);
}

BranchFn lagrangian_from_json(const json& j, const std::string& where, bool& active,
                              json& normalized) {
  check_keys(j, where, {"kind", "value", "base", "slope", "amplitude", "x_wave",
                        "t_slope", "active"},
             {"kind"});
  const std::string kind = j.at("kind").get<std::string>();
  active = j.contains("active") ? j.at("active").get<bool>() : true;
  normalized["kind"] = kind;
  normalized["active"] = active;
  if (kind == "zero") {
    active = false;
    normalized["active"] = false;
    return zero_branch();
  }
  if (kind == "constant") {
    const double v = num(j, "value", 1.0);
    normalized["value"] = v;
    return constant_branch(v);
  }
  if (kind == "linear_t") {
    const double base = num(j, "base", 1.0), slope = num(j, "slope", 0.0);
    normalized["base"] = base;
    normalized["slope"] = slope;
    BranchFn b;
    b.value = [base, slope](double, double t) { return base + slope * t; };
    b.dt = [slope](double, double) { return slope; };
    b.dx = [](double, double) { return 0.0; };
    return b;
  }
  if (kind == "product") {
    const double amp = num(j, "amplitude", 1.0);
    const double xw = num(j, "x_wave", 0.0), ts = num(j, "t_slope", 0.0);
    normalized["amplitude"] = amp;
    normalized["x_wave"] = xw;
    normalized["t_slope"] = ts;
    require_range(std::abs(xw) < 1.0, "coefficient product x_wave must lie in (-1,1)");
    BranchFn b;
    b.value = [=](double x0, double t) {
      return amp * (1.0 + xw * std::sin(M_PI * x0)) * (1.0 + ts * t);
    };
    b.dt = [=](double x0, double) { return amp * (1.0 + xw * std::sin(M_PI * x0)) * ts; };
    b.dx = [=](double x0, double t) {
      return amp * xw * M_PI * std::cos(M_PI * x0) * (1.0 + ts * t);
    };
    return b;
  }
  throw ValidationError("config: unknown branch kind '" + kind + "' in " + where);
}

double min_active_sample(const BranchFn& b, double T) {
  double lo = 1e300;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; ++j)
      lo = std::fmin(lo, b.value(i / 100.0, T * j / 100.0));
  return lo;
}

Fn2 const2(double v) {
  return [v](double, double) { return v; };
}

} // namespace

NormContext Scenario::ctx() const {
  NormContext c;
  c.h_ref = 1.0 / disc.ref_cells;
  c.space = op.space();
  return c;
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

TimeDependentField field_by_name(const std::string& name) {
  if (name == "zero") return TimeDependentField(zero_branch());
  if (name == "one") return TimeDependentField(constant_branch(1.0));
  if (name == "sin_px") {
    BranchFn b;
    b.value = [](double x, double) { return std::sin(M_PI * x); };
    b.dt = [](double, double) { return 0.0; };
    b.dx = [](double x, double) { return M_PI * std::cos(M_PI * x); };
    return TimeDependentField(b);
  }
  if (name == "sinpx_1pt") {
    BranchFn b;
    b.value = [](double x, double t) { return std::sin(M_PI * x) * (1.0 + t); };
    b.dt = [](double x, double) { return std::sin(M_PI * x); };
    b.dx = [](double x, double t) { return M_PI * std::cos(M_PI * x) * (1.0 + t); };
    return TimeDependentField(b);
  }
  if (name == "x_1pt") {
    BranchFn b;
    b.value = [](double x, double t) { return x * (1.0 + t); };
    b.dt = [](double x, double) { return x; };
    b.dx = [](double, double t) { return 1.0 + t; };
    return TimeDependentField(b);
  }
  throw ValidationError("unknown field name '" + name + "'");
}

SpatialField spatial_by_name(const std::string& name, double amplitude) {
  if (name == "zero") return zero_spatial();
  if (name == "sin_px") return sine_mode(1, amplitude);
  if (name == "constant") {
    return SpatialField{[amplitude](double) { return amplitude; },
                        [](double) { return 0.0; }};
  }
  throw ValidationError("unknown spatial field name '" + name + "'");
}

namespace {

TimeDependentField g1_from_json(const json& j, json& normalized) {
  check_keys(j, "data.g1", {"kind", "value", "amplitude", "base", "slope"}, {"kind"});
  const std::string kind = j.at("kind").get<std::string>();
  normalized["kind"] = kind;
  if (kind == "zero") return TimeDependentField(zero_branch());
  if (kind == "constant") {
    const double v = num(j, "value", 1.0);
    normalized["value"] = v;
    return TimeDependentField(constant_branch(v));
  }
  if (kind == "sinpx_linear_t") {
    const double amp = num(j, "amplitude", 1.0);
    const double base = num(j, "base", 1.0), slope = num(j, "slope", 0.0);
    normalized["amplitude"] = amp;
    normalized["base"] = base;
    normalized["slope"] = slope;
    BranchFn b;
    b.value = [=](double x, double t) {
      return amp * std::sin(M_PI * x) * (base + slope * t);
    };
    b.dt = [=](double x, double) { return amp * std::sin(M_PI * x) * slope; };
    b.dx = [=](double x, double t) {
      return amp * M_PI * std::cos(M_PI * x) * (base + slope * t);
    };
    return TimeDependentField(b);
  }
  if (kind == "x_linear_t") {
    const double base = num(j, "base", 1.0), slope = num(j, "slope", 0.0);
    normalized["base"] = base;
    normalized["slope"] = slope;
    BranchFn b;
    b.value = [=](double x, double t) { return x * (base + slope * t); };
    b.dt = [=](double x, double) { return x * slope; };
    b.dx = [=](double, double t) { return base + slope * t; };
    return TimeDependentField(b);
  }
  throw ValidationError("config: unknown data.g1 kind '" + kind + "'");
}

} // namespace

Scenario scenario_from_json(const json& cfg) {
  check_keys(cfg, "<top>",
             {"name", "motion", "coefficient", "operator", "data", "discretization",
              "study", "seed"},
             {"data"});
  const json& data = cfg.at("data");
  check_keys(data, "data", {"manufactured", "g1", "g2"}, {});

  Scenario s;
  s.normalized = json::object();
  if (cfg.contains("name")) s.name = cfg.at("name").get<std::string>();

  if (data.contains("manufactured")) {
    for (const char* k : {"motion", "coefficient", "operator"})
      if (cfg.contains(k))
        throw ValidationError(std::string("config: manufactured data fixes the model; "
                                          "remove section '") + k + "'");
    const std::string mname = data.at("manufactured").get<std::string>();
    s = manufactured_scenario(mname);
    s.normalized["data"] = {{"manufactured", mname}};
    if (cfg.contains("name")) s.name = cfg.at("name").get<std::string>();
  } else {
    check_keys(cfg, "<top>",
               {"name", "motion", "coefficient", "operator", "data", "discretization",
                "study", "seed"},
               {"motion", "coefficient", "operator", "data"});

    // motion
    const json& jm = cfg.at("motion");
    check_keys(jm, "motion", {"family", "amplitude", "frequency", "gamma0", "horizon"},
               {"family"});
    const std::string family = jm.at("family").get<std::string>();
    const double gamma0 = num(jm, "gamma0", 0.5);
    const double horizon = num(jm, "horizon", 1.0);
    require_range(gamma0 > 0.02 && gamma0 < 0.98, "motion.gamma0 must lie in (0.02, 0.98)");
    require_range(horizon > 0.0 && horizon <= 100.0, "motion.horizon must lie in (0, 100]");
    json nm = {{"family", family}, {"gamma0", gamma0}, {"horizon", horizon}};
    if (family == "identity") {
      s.motion = MotionMap::identity(gamma0, horizon);
    } else if (family == "separable_flow") {
      const double amp = num(jm, "amplitude", 0.1);
      const double freq = num(jm, "frequency", 2.0 * M_PI);
      require_range(std::abs(amp) <= 0.5, "motion.amplitude must lie in [-0.5, 0.5]");
      require_range(freq > 0.0 && freq <= 1000.0, "motion.frequency must lie in (0, 1000]");
      s.motion = MotionMap::separable_flow(amp, freq, gamma0, horizon);
      nm["amplitude"] = amp;
      nm["frequency"] = freq;
    } else {
      throw ValidationError("config: unknown motion.family '" + family + "'");
    }
    s.normalized["motion"] = nm;

    // coefficient
    const json& jc = cfg.at("coefficient");
    check_keys(jc, "coefficient", {"branch1", "branch2", "alpha0"},
               {"branch1", "branch2"});
    json nc = json::object();
    bool act1 = true, act2 = true;
    json nb1 = json::object(), nb2 = json::object();
    BranchFn b1 = lagrangian_from_json(jc.at("branch1"), "coefficient.branch1", act1, nb1);
    BranchFn b2 = lagrangian_from_json(jc.at("branch2"), "coefficient.branch2", act2, nb2);
    double alpha0;
    if (jc.contains("alpha0")) {
      alpha0 = jc.at("alpha0").get<double>();
      require_range(alpha0 > 0.0, "coefficient.alpha0 must be positive");
    } else {
      double lo = 1e300;
      if (act1) lo = std::fmin(lo, min_active_sample(b1, s.motion.horizon()));
      if (act2) lo = std::fmin(lo, min_active_sample(b2, s.motion.horizon()));
      require_range(lo > 0.0, "coefficient: active branches must be strictly positive");
      alpha0 = 0.99 * lo;
    }
    nc["branch1"] = nb1;
    nc["branch2"] = nb2;
    nc["alpha0"] = alpha0;
    s.normalized["coefficient"] = nc;
    s.coefficient = PiecewiseCoefficient(s.motion, b1, act1, b2, act2, alpha0);

    // operator
    const json& jo = cfg.at("operator");
    check_keys(jo, "operator",
               {"space", "diffusion", "advection", "reaction", "constants"},
               {"diffusion"});
    const std::string space_s =
        jo.contains("space") ? jo.at("space").get<std::string>() : "dirichlet";
    SpaceKind space;
    if (space_s == "dirichlet") space = SpaceKind::Dirichlet;
    else if (space_s == "neumann") space = SpaceKind::Neumann;
    else throw ValidationError("config: operator.space must be dirichlet or neumann");
    auto pair_of = [&](const char* key, double fb1, double fb2) {
      double v1 = fb1, v2 = fb2;
      if (jo.contains(key)) {
        check_keys(jo.at(key), std::string("operator.") + key, {"branch1", "branch2"}, {});
        v1 = num(jo.at(key), "branch1", fb1);
        v2 = num(jo.at(key), "branch2", fb2);
      }
      return std::pair<double, double>{v1, v2};
    };
    const auto [k1, k2] = pair_of("diffusion", 1.0, 1.0);
    const auto [bb1, bb2] = pair_of("advection", 0.0, 0.0);
    const auto [cc1, cc2] = pair_of("reaction", 0.0, 0.0);
    require_range(k1 > 0.0 && k2 > 0.0, "operator.diffusion must be positive");
    s.op = SpatialOperator(const2(k1), const2(k2), const2(bb1), const2(bb2), const2(cc1),
                           const2(cc2), space);
    std::optional<OperatorConstants> declared;
    if (jo.contains("constants")) {
      const json& jk = jo.at("constants");
      check_keys(jk, "operator.constants", {"c_A", "C_A", "lambda0"},
                 {"c_A", "C_A", "lambda0"});
      declared = OperatorConstants{jk.at("c_A").get<double>(), jk.at("C_A").get<double>(),
                                   jk.at("lambda0").get<double>()};
      require_range(declared->c_A > 0.0 && declared->C_A >= declared->c_A,
                    "operator.constants requires 0 < c_A <= C_A");
    }
    s.op.certify(s.coefficient, declared, 0);
    json no = {{"space", space_s},
               {"diffusion", {{"branch1", k1}, {"branch2", k2}}},
               {"advection", {{"branch1", bb1}, {"branch2", bb2}}},
               {"reaction", {{"branch1", cc1}, {"branch2", cc2}}},
               {"constants",
                {{"c_A", s.op.constants().c_A},
                 {"C_A", s.op.constants().C_A},
                 {"lambda0", s.op.constants().lambda0}}}};
    s.normalized["operator"] = no;

    // data
    json nd = json::object();
    if (data.contains("g1")) {
      json ng1 = json::object();
      s.g1 = g1_from_json(data.at("g1"), ng1);
      nd["g1"] = ng1;
    } else {
      s.g1 = TimeDependentField(zero_branch());
      nd["g1"] = {{"kind", "zero"}};
    }
    if (data.contains("g2")) {
      const json& jg2 = data.at("g2");
      check_keys(jg2, "data.g2", {"kind", "amplitude"}, {"kind"});
      const double amp = num(jg2, "amplitude", 1.0);
      s.g2 = spatial_by_name(jg2.at("kind").get<std::string>(), amp);
      nd["g2"] = {{"kind", jg2.at("kind").get<std::string>()}, {"amplitude", amp}};
    } else {
      s.g2 = zero_spatial();
      nd["g2"] = {{"kind", "zero"}, {"amplitude", 0.0}};
    }
    s.normalized["data"] = nd;
  }

  // discretization
  DiscretizationParams d;
  if (cfg.contains("discretization")) {
    const json& jd = cfg.at("discretization");
    check_keys(jd, "discretization",
               {"cells", "slabs", "quad_space", "quad_time", "ref_cells", "jobs"}, {});
    d.cells = static_cast<int>(num(jd, "cells", d.cells));
    d.slabs = static_cast<int>(num(jd, "slabs", d.slabs));
    d.quad_space = static_cast<int>(num(jd, "quad_space", d.quad_space));
    d.quad_time = static_cast<int>(num(jd, "quad_time", d.quad_time));
    d.ref_cells = static_cast<int>(num(jd, "ref_cells", d.ref_cells));
    d.jobs = static_cast<int>(num(jd, "jobs", d.jobs));
  }
  require_range(d.cells >= 2 && d.cells <= 4096, "discretization.cells must lie in [2, 4096]");
  require_range(d.slabs >= 1 && d.slabs <= 8192, "discretization.slabs must lie in [1, 8192]");
  require_range(d.quad_space >= 2 && d.quad_space <= 16 && d.quad_time >= 2 &&
                    d.quad_time <= 16,
                "discretization quadrature orders must lie in [2, 16]");
  require_range(d.ref_cells >= 8 && d.ref_cells <= 8192,
                "discretization.ref_cells must lie in [8, 8192]");
  require_range(d.jobs >= 1 && d.jobs <= 64, "discretization.jobs must lie in [1, 64]");
  s.disc = d;
  s.normalized["discretization"] = {{"cells", d.cells},         {"slabs", d.slabs},
                                    {"quad_space", d.quad_space}, {"quad_time", d.quad_time},
                                    {"ref_cells", d.ref_cells},   {"jobs", d.jobs}};

  // study
  if (cfg.contains("study")) {
    const json& js = cfg.at("study");
    check_keys(js, "study", {"levels", "eps_list", "lambda0"}, {});
    if (js.contains("levels")) {
      s.levels.clear();
      for (const auto& lv : js.at("levels"))
        s.levels.emplace_back(lv.at(0).get<int>(), lv.at(1).get<int>());
      require_range(!s.levels.empty(), "study.levels must not be empty");
    }
    if (js.contains("eps_list")) {
      s.eps_list = js.at("eps_list").get<std::vector<double>>();
      for (double e : s.eps_list) require_range(e > 0.0, "study.eps_list must be positive");
    }
    if (js.contains("lambda0"))
      s.lambda0s = js.at("lambda0").get<std::vector<double>>();
  }
  json jl = json::array();
  for (auto& [a, b] : s.levels) jl.push_back({a, b});
  s.normalized["study"] = {{"levels", jl}, {"eps_list", s.eps_list}, {"lambda0", s.lambda0s}};

  if (cfg.contains("seed")) s.seed = cfg.at("seed").get<std::uint64_t>();
  s.normalized["seed"] = s.seed;
  s.normalized["name"] = s.name;

  return s;
}

Scenario parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return scenario_from_json(cfg);
}

std::string normalized_dump(const Scenario& s) { return s.normalized.dump(2); }

//------------------------------------------------------------------------------
// Built-in scenarios
//------------------------------------------------------------------------------

namespace {

// Per-branch exact solution with k-weighted flux continuity across the moving
// interface: u = c(t) * I(x,t) - P1(t)/S1(t) * S(x,t), where I integrates
// sin(pi s)/k and S integrates 1/k from 0 to x. Then k u' = c sin(pi x) - P1/S1
// is continuous and u(0) = u(1) = 0.
TimeDependentField jump_flux_field(const MotionMap& motion, double k1, double k2) {
  auto parts = [motion, k1, k2](double t) {
    struct Q {
      double g, gd, c, cd, I1, I1d, S1, S1d, R, Rd;
    } q;
    q.g = motion.interface_position(t);
    q.gd = motion.velocity(q.g, t);
    q.c = 1.0 + t;
    q.cd = 1.0;
    const double cg = std::cos(M_PI * q.g), sg = std::sin(M_PI * q.g);
    q.I1 = (1.0 - cg) / (M_PI * k1) + (1.0 + cg) / (M_PI * k2);
    q.I1d = q.gd * sg * (1.0 / k1 - 1.0 / k2);
    q.S1 = q.g / k1 + (1.0 - q.g) / k2;
    q.S1d = q.gd * (1.0 / k1 - 1.0 / k2);
    const double P1 = q.c * q.I1;
    const double P1d = q.cd * q.I1 + q.c * q.I1d;
    q.R = P1 / q.S1;
    q.Rd = (P1d * q.S1 - P1 * q.S1d) / (q.S1 * q.S1);
    return q;
  };

  BranchFn left;
  left.value = [parts, k1](double x, double t) {
    const auto q = parts(t);
    return q.c * (1.0 - std::cos(M_PI * x)) / (M_PI * k1) - q.R * x / k1;
  };
  left.dx = [parts, k1](double x, double t) {
    const auto q = parts(t);
    return (q.c * std::sin(M_PI * x) - q.R) / k1;
  };
  left.dt = [parts, k1](double x, double t) {
    const auto q = parts(t);
    return q.cd * (1.0 - std::cos(M_PI * x)) / (M_PI * k1) - q.Rd * x / k1;
  };

  BranchFn right;
  right.value = [parts, k1, k2](double x, double t) {
    const auto q = parts(t);
    const double cg = std::cos(M_PI * q.g);
    const double I2 = (1.0 - cg) / (M_PI * k1) + (cg - std::cos(M_PI * x)) / (M_PI * k2);
    const double S2 = q.g / k1 + (x - q.g) / k2;
    return q.c * I2 - q.R * S2;
  };
  right.dx = [parts, k2](double x, double t) {
    const auto q = parts(t);
    return (q.c * std::sin(M_PI * x) - q.R) / k2;
  };
  right.dt = [parts, k1, k2](double x, double t) {
    const auto q = parts(t);
    const double cg = std::cos(M_PI * q.g), sg = std::sin(M_PI * q.g);
    const double I2 = (1.0 - cg) / (M_PI * k1) + (cg - std::cos(M_PI * x)) / (M_PI * k2);
    const double I2t = q.gd * sg * (1.0 / k1 - 1.0 / k2);
    const double S2 = q.g / k1 + (x - q.g) / k2;
    const double S2t = q.gd * (1.0 / k1 - 1.0 / k2);
    return q.cd * I2 + q.c * I2t - q.Rd * S2 - q.R * S2t;
  };

  return TimeDependentField(left, right);
}

BranchFn m1_g1_branch(double alpha) {
  BranchFn b;
  b.value = [alpha](double x, double t) {
    return alpha * std::sin(M_PI * x) + M_PI * M_PI * std::sin(M_PI * x) * (1.0 + t);
  };
  b.dt = [](double x, double) { return M_PI * M_PI * std::sin(M_PI * x); };
  b.dx = [alpha](double x, double t) {
    return M_PI * std::cos(M_PI * x) * (alpha + M_PI * M_PI * (1.0 + t));
  };
  return b;
}

} // namespace

Scenario manufactured_scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "m1" || name == "m3") {
    const double a2 = (name == "m1") ? 2.0 : 0.0;
    s.motion = MotionMap::separable_flow(0.1, 2.0 * M_PI, 0.5, 1.0);
    s.coefficient = PiecewiseCoefficient::constants(s.motion, 1.0, a2);
    s.op = SpatialOperator::diffusion(1.0, 1.0, SpaceKind::Dirichlet);
    s.op.certify(s.coefficient);
    s.exact = field_by_name("sinpx_1pt");
    s.g1 = TimeDependentField(m1_g1_branch(1.0), m1_g1_branch(a2));
    s.g2 = sine_mode(1, 1.0);
  } else if (name == "m2") {
    const double k1 = 1.0, k2 = 2.0;
    s.motion = MotionMap::separable_flow(0.1, 2.0 * M_PI, 0.5, 1.0);
    s.coefficient = PiecewiseCoefficient::constants(s.motion, 1.0, 2.0);
    s.op = SpatialOperator::diffusion(k1, k2, SpaceKind::Dirichlet);
    s.op.certify(s.coefficient);
    const TimeDependentField u = jump_flux_field(s.motion, k1, k2);
    s.exact = u;
    auto g1_branch = [u](double alpha, int side) {
      BranchFn b = with_fd_derivatives([u, alpha, side](double x, double t) {
        return alpha * u.dt(x, t, side) - (1.0 + t) * M_PI * std::cos(M_PI * x);
      });
      return b;
    };
    s.g1 = TimeDependentField(g1_branch(1.0, 1), g1_branch(2.0, 2));
    const double g0 = 0.5;
    s.g2 = SpatialField{[u, g0](double x) { return u.value(x, 0.0, x < g0 ? 1 : 2); },
                        [u, g0](double x) { return u.dx(x, 0.0, x < g0 ? 1 : 2); }};
  } else if (name == "heat") {
    s.motion = MotionMap::identity(0.5, 1.0);
    s.coefficient = PiecewiseCoefficient::constants(s.motion, 1.0, 1.0);
    s.op = SpatialOperator::diffusion(1.0, 1.0, SpaceKind::Dirichlet);
    s.op.certify(s.coefficient);
    BranchFn b;
    b.value = [](double x, double t) { return std::sin(M_PI * x) * (1.0 + 0.5 * t); };
    b.dt = [](double x, double) { return 0.5 * std::sin(M_PI * x); };
    b.dx = [](double x, double t) { return M_PI * std::cos(M_PI * x) * (1.0 + 0.5 * t); };
    s.g1 = TimeDependentField(b);
    s.g2 = sine_mode(1, 1.0);
  } else if (name == "heat_neumann_exact") {
    // u = 2 + t: in the trial space exactly, and compatible with the natural
    // boundary condition (flux-free). With alpha = k = c = 1, g1 = 3 + t.
    s.motion = MotionMap::identity(0.5, 1.0);
    s.coefficient = PiecewiseCoefficient::constants(s.motion, 1.0, 1.0);
    s.op = SpatialOperator(const2(1.0), const2(1.0), const2(0.0), const2(0.0),
                           const2(1.0), const2(1.0), SpaceKind::Neumann);
    s.op.certify(s.coefficient);
    BranchFn u;
    u.value = [](double, double t) { return 2.0 + t; };
    u.dt = [](double, double) { return 1.0; };
    u.dx = [](double, double) { return 0.0; };
    s.exact = TimeDependentField(u);
    BranchFn g;
    g.value = [](double, double t) { return 3.0 + t; };
    g.dt = [](double, double) { return 1.0; };
    g.dx = [](double, double) { return 0.0; };
    s.g1 = TimeDependentField(g);
    s.g2 = SpatialField{[](double) { return 2.0; }, [](double) { return 0.0; }};
  } else {
    throw ValidationError("unknown manufactured scenario '" + name + "'");
  }

  s.normalized = nlohmann::json{{"name", s.name},
                                {"data", {{"manufactured", s.name}}},
                                {"discretization",
                                 {{"cells", s.disc.cells},
                                  {"slabs", s.disc.slabs},
                                  {"quad_space", s.disc.quad_space},
                                  {"quad_time", s.disc.quad_time},
                                  {"ref_cells", s.disc.ref_cells},
                                  {"jobs", s.disc.jobs}}},
                                {"seed", s.seed}};
  return s;
}

} // namespace eip
