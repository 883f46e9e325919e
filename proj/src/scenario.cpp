#include "swingsim/scenario.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "swingsim/errors.hpp"

namespace swingsim {

namespace {

constexpr double kPi = std::numbers::pi;
const double kNominalSpeed = 2.0 * kPi * 60.0;

double hz_to_rad(double hz) { return hz * 2.0 * kPi; }
double rad_to_hz(double rad) { return rad / (2.0 * kPi); }

GeneratorParams base_machine() {
  return GeneratorParams::from_momentum(0.2, 0.04, kNominalSpeed);
}

std::string fmt_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void append_field(std::string& line, const std::optional<double>& v) {
  if (v) line += fmt_double(*v);
}

ModelKind parse_model(const std::string& name) {
  for (ModelKind k :
       {ModelKind::ConventionalLoad, ModelKind::ImprovedLoad,
        ModelKind::ImprovedLoadWithLosses, ModelKind::ImprovedClosedLoop,
        ModelKind::SmibImproved, ModelKind::SmibConventional}) {
    if (name == model_name(k)) return k;
  }
  throw InvalidConfig("unknown model '" + name + "'");
}

std::optional<RoaKind> parse_roa_kind(const std::string& name) {
  for (RoaKind k :
       {RoaKind::OmegaS, RoaKind::OmegaK, RoaKind::OvalO, RoaKind::SmibLevelSet,
        RoaKind::SmibConventionalLevelSet}) {
    if (name == roa_kind_name(k)) return k;
  }
  return std::nullopt;
}

OutputKind parse_output(const std::string& name) {
  if (name == "trajectory") return OutputKind::Trajectory;
  if (name == "verdict-grid") return OutputKind::VerdictGrid;
  if (name == "level-set") return OutputKind::LevelSet;
  if (name == "constants") return OutputKind::Constants;
  throw InvalidConfig("unknown output '" + name + "'");
}

bool wants(const ScenarioSpec& spec, OutputKind kind) {
  for (OutputKind k : spec.outputs)
    if (k == kind) return true;
  return false;
}

/// Instrumentation set kind a model defaults to, when it is defined for the
/// given parameters.
std::optional<RoaKind> default_lyap(ModelKind model,
                                    const GeneratorParams& p) {
  try {
    switch (model) {
      case ModelKind::ConventionalLoad:
        return std::nullopt;
      case ModelKind::ImprovedLoad:
      case ModelKind::ImprovedLoadWithLosses:
        if (!load_equilibria(reduce_losses(p)).exists) return std::nullopt;
        return RoaKind::OmegaS;
      case ModelKind::ImprovedClosedLoop:
        return RoaKind::OvalO;
      case ModelKind::SmibImproved:
        smib_constants(p);
        return RoaKind::SmibLevelSet;
      case ModelKind::SmibConventional:
        make_roa_set(RoaKind::SmibConventionalLevelSet, p);
        return RoaKind::SmibConventionalLevelSet;
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  return std::nullopt;
}

std::optional<RoaKind> resolve_lyap(const ScenarioSpec& spec,
                                    ModelKind model) {
  switch (spec.lyap_policy) {
    case LyapPolicy::None:
      return std::nullopt;
    case LyapPolicy::Fixed:
      return spec.lyap_fixed;
    case LyapPolicy::Auto:
      return default_lyap(model, spec.params);
  }
  return std::nullopt;
}

}  // namespace

double AxisSpec::at(int i) const {
  if (n <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / (n - 1);
}

int worker_count() {
  if (const char* env = std::getenv("SWINGSIM_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return std::min(v, 256);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// ---- Presets ----------------------------------------------------------------

std::vector<std::string> preset_names() {
  return {"example1", "example2", "example3", "smib-compare", "smib-roa"};
}

ScenarioSpec scenario_preset(const std::string& name) {
  ScenarioSpec spec;
  spec.name = name;
  spec.integration.dt = 1e-4;
  spec.integration.t_max = 300.0;
  spec.integration.conv_tol = 1e-6;
  spec.integration.record_stride = 1000;

  if (name == "example1") {
    spec.models = {ModelKind::ConventionalLoad, ModelKind::ImprovedLoad};
    spec.params = base_machine().with_power(1.0, 2.0);
    spec.initials = {SimState{hz_to_rad(60.0), {}, {}}};
    spec.outputs = {OutputKind::Trajectory, OutputKind::Constants};
  } else if (name == "example2") {
    spec.models = {ModelKind::ConventionalLoad, ModelKind::ImprovedLoad};
    spec.params = base_machine().with_power(1.0, 4.65);
    spec.initials = {SimState{hz_to_rad(24.0), {}, {}}};
    spec.outputs = {OutputKind::Trajectory, OutputKind::Constants};
  } else if (name == "example3") {
    spec.models = {ModelKind::ConventionalLoad, ModelKind::ImprovedLoad};
    spec.params = base_machine().with_power(1.0, 4.90);
    spec.initials = {SimState{hz_to_rad(60.0), {}, {}}};
    spec.outputs = {OutputKind::Trajectory, OutputKind::Constants};
  } else if (name == "smib-compare") {
    spec.models = {ModelKind::SmibImproved, ModelKind::SmibConventional};
    spec.params = base_machine().with_mech_power(1.0).with_coupling(2.0);
    // The initial state is deliberately not preset; configs must supply it.
    spec.integration.dt = 1e-3;
    spec.integration.t_max = 200.0;
    spec.integration.record_stride = 100;
    spec.outputs = {OutputKind::Trajectory, OutputKind::Constants};
  } else if (name == "smib-roa") {
    spec.models = {ModelKind::SmibImproved};
    spec.params = base_machine().with_mech_power(1.0).with_coupling(2.0);
    GridSpec grid;
    grid.delta = AxisSpec{-kPi, kPi, 50};
    grid.omega = AxisSpec{hz_to_rad(55.0), hz_to_rad(65.0), 50};
    spec.grid = grid;
    spec.integration.dt = 5e-3;
    spec.integration.t_max = 150.0;
    spec.integration.conv_tol = 1e-4;
    spec.outputs = {OutputKind::VerdictGrid, OutputKind::LevelSet,
                    OutputKind::Constants};
  } else {
    throw InvalidConfig("unknown scenario preset '" + name + "'");
  }
  return spec;
}

// ---- Config parsing ----------------------------------------------------------

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
  throw InvalidConfig("config field '" + path + "': " + why);
}

double num_at(const json& j, const std::string& path) {
  if (!j.is_number()) bad_field(path, "expected a number");
  return j.get<double>();
}

int int_at(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad_field(path, "expected an integer");
  return j.get<int>();
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed)
      if (it.key() == key) ok = true;
    if (!ok) bad_field(path + "." + it.key(), "unknown field");
  }
}

GeneratorParams merge_params(const GeneratorParams& base, const json& j) {
  check_keys(j, "params",
             {"J", "M", "D_d", "A", "D_m", "omega_star", "P_m", "P_e",
              "gamma"});
  const double ws =
      j.contains("omega_star") ? num_at(j["omega_star"], "params.omega_star")
                               : base.omega_star();
  if (j.contains("J") && j.contains("M"))
    bad_field("params", "give J or M, not both");
  if (j.contains("D_d") && j.contains("A"))
    bad_field("params", "give D_d or A, not both");

  GeneratorParams p = base;
  try {
    if (j.contains("M") && j.contains("A") && !j.contains("J") &&
        !j.contains("D_d")) {
      p = GeneratorParams::from_momentum(num_at(j["M"], "params.M"),
                                         num_at(j["A"], "params.A"), ws);
    } else {
      double inertia = base.inertia();
      double damping = base.damping();
      if (j.contains("J")) inertia = num_at(j["J"], "params.J");
      if (j.contains("M")) inertia = num_at(j["M"], "params.M") / ws;
      if (j.contains("D_d")) damping = num_at(j["D_d"], "params.D_d");
      if (j.contains("A")) damping = num_at(j["A"], "params.A") / ws;
      p = GeneratorParams::from_inertia(inertia, damping, ws);
    }
    p = p.with_power(
        j.contains("P_m") ? num_at(j["P_m"], "params.P_m") : base.p_mech(),
        j.contains("P_e") ? num_at(j["P_e"], "params.P_e") : base.p_load());
    p = p.with_viscous_loss(j.contains("D_m")
                                ? num_at(j["D_m"], "params.D_m")
                                : base.viscous_loss());
    if (j.contains("gamma"))
      p = p.with_coupling(num_at(j["gamma"], "params.gamma"));
    else if (base.coupling())
      p = p.with_coupling(*base.coupling());
  } catch (const InvalidParams& e) {
    bad_field("params", e.what());
  }
  return p;
}

SimState parse_state(const json& j, const std::string& path) {
  check_keys(j, path, {"f", "omega", "delta", "xi"});
  if (j.contains("f") && j.contains("omega"))
    bad_field(path, "give f or omega, not both");
  SimState s;
  if (j.contains("f"))
    s.omega = hz_to_rad(num_at(j["f"], path + ".f"));
  else if (j.contains("omega"))
    s.omega = num_at(j["omega"], path + ".omega");
  else
    bad_field(path, "needs f or omega");
  if (j.contains("delta")) s.delta = num_at(j["delta"], path + ".delta");
  if (j.contains("xi")) s.xi = num_at(j["xi"], path + ".xi");
  return s;
}

AxisSpec parse_axis(const json& j, const std::string& path, bool hz) {
  check_keys(j, path, {"min", "max", "n"});
  for (const char* key : {"min", "max", "n"})
    if (!j.contains(key)) bad_field(path, std::string("needs ") + key);
  AxisSpec axis;
  axis.lo = num_at(j["min"], path + ".min");
  axis.hi = num_at(j["max"], path + ".max");
  axis.n = int_at(j["n"], path + ".n");
  if (hz) {
    axis.lo = hz_to_rad(axis.lo);
    axis.hi = hz_to_rad(axis.hi);
  }
  if (axis.n < 1) bad_field(path + ".n", "must be at least 1");
  if (!(axis.hi >= axis.lo)) bad_field(path, "max must be >= min");
  return axis;
}

void parse_initial(const json& j, ScenarioSpec& spec) {
  spec.initials.clear();
  spec.grid.reset();
  if (j.is_array()) {
    int i = 0;
    for (const auto& item : j)
      spec.initials.push_back(
          parse_state(item, "initial[" + std::to_string(i++) + "]"));
    if (spec.initials.empty()) bad_field("initial", "empty list");
    return;
  }
  if (!j.is_object()) bad_field("initial", "expected object or list");
  if (j.contains("grid")) {
    check_keys(j, "initial", {"grid"});
    const json& g = j["grid"];
    check_keys(g, "initial.grid", {"delta", "omega", "f"});
    if (g.contains("omega") && g.contains("f"))
      bad_field("initial.grid", "give f or omega axis, not both");
    GridSpec grid;
    if (g.contains("delta"))
      grid.delta = parse_axis(g["delta"], "initial.grid.delta", false);
    if (g.contains("omega"))
      grid.omega = parse_axis(g["omega"], "initial.grid.omega", false);
    else if (g.contains("f"))
      grid.omega = parse_axis(g["f"], "initial.grid.f", true);
    else
      bad_field("initial.grid", "needs an omega or f axis");
    spec.grid = grid;
    return;
  }
  spec.initials.push_back(parse_state(j, "initial"));
}

void parse_integration(const json& j, ScenarioSpec& spec) {
  check_keys(j, "integration",
             {"dt", "t_max", "conv_tol", "div_bound", "lyapunov",
              "record_stride"});
  IntegrationConfig& cfg = spec.integration;
  if (j.contains("dt")) cfg.dt = num_at(j["dt"], "integration.dt");
  if (j.contains("t_max")) cfg.t_max = num_at(j["t_max"], "integration.t_max");
  if (j.contains("conv_tol"))
    cfg.conv_tol = num_at(j["conv_tol"], "integration.conv_tol");
  if (j.contains("div_bound"))
    cfg.div_bound = num_at(j["div_bound"], "integration.div_bound");
  if (j.contains("record_stride"))
    cfg.record_stride = int_at(j["record_stride"], "integration.record_stride");
  if (j.contains("lyapunov")) {
    if (!j["lyapunov"].is_string())
      bad_field("integration.lyapunov", "expected a string");
    const std::string name = j["lyapunov"].get<std::string>();
    if (name == "auto") {
      spec.lyap_policy = LyapPolicy::Auto;
    } else if (name == "none") {
      spec.lyap_policy = LyapPolicy::None;
    } else if (auto kind = parse_roa_kind(name)) {
      spec.lyap_policy = LyapPolicy::Fixed;
      spec.lyap_fixed = *kind;
    } else {
      bad_field("integration.lyapunov", "unknown set kind '" + name + "'");
    }
  }
}

}  // namespace

ScenarioSpec parse_scenario(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InvalidConfig("config root must be an object");
  check_keys(doc, "$",
             {"scenario", "model", "models", "params", "initial",
              "integration", "outputs", "levelset_resolution"});

  ScenarioSpec spec;
  if (doc.contains("scenario")) {
    if (!doc["scenario"].is_string()) bad_field("scenario", "expected a name");
    spec = scenario_preset(doc["scenario"].get<std::string>());
  } else {
    spec.models = {ModelKind::ImprovedLoad};
    spec.outputs = {OutputKind::Trajectory};
  }

  if (doc.contains("model") && doc.contains("models"))
    bad_field("$", "give model or models, not both");
  if (doc.contains("model")) {
    if (!doc["model"].is_string()) bad_field("model", "expected a name");
    spec.models = {parse_model(doc["model"].get<std::string>())};
  } else if (doc.contains("models")) {
    if (!doc["models"].is_array()) bad_field("models", "expected a list");
    spec.models.clear();
    for (const auto& m : doc["models"]) {
      if (!m.is_string()) bad_field("models", "expected names");
      spec.models.push_back(parse_model(m.get<std::string>()));
    }
    if (spec.models.empty()) bad_field("models", "empty list");
  }

  if (doc.contains("params")) spec.params = merge_params(spec.params, doc["params"]);
  if (doc.contains("initial")) parse_initial(doc["initial"], spec);
  if (doc.contains("integration")) parse_integration(doc["integration"], spec);
  if (doc.contains("outputs")) {
    if (!doc["outputs"].is_array()) bad_field("outputs", "expected a list");
    spec.outputs.clear();
    for (const auto& o : doc["outputs"]) {
      if (!o.is_string()) bad_field("outputs", "expected names");
      spec.outputs.push_back(parse_output(o.get<std::string>()));
    }
  }
  if (doc.contains("levelset_resolution")) {
    spec.levelset_resolution =
        int_at(doc["levelset_resolution"], "levelset_resolution");
    if (spec.levelset_resolution < 8)
      bad_field("levelset_resolution", "must be at least 8");
  }

  // Shape coherence: comparison pairs must share one state layout.
  if (spec.models.empty()) throw InvalidConfig("no model selected");
  for (const ModelKind m : spec.models) {
    if (model_has_delta(m) != model_has_delta(spec.models.front()) ||
        model_has_xi(m) != model_has_xi(spec.models.front()))
      throw InvalidConfig("models in one scenario must share a state shape");
  }
  return spec;
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < e.byte; ++i)
      if (text[i] == '\n') ++line;
    throw InvalidConfig("config parse error in '" + path + "' at line " +
                        std::to_string(line) + ": " + e.what());
  }
  return parse_scenario(doc);
}

// ---- Sweep -------------------------------------------------------------------

SweepResult basin_sweep(const ScenarioSpec& spec) {
  if (!spec.grid) throw InvalidConfig("sweep needs an initial-state grid");
  if (spec.models.size() != 1)
    throw InvalidConfig("sweep runs exactly one model");
  const ModelKind model = spec.models.front();
  if (model_has_xi(model))
    throw InvalidConfig("sweep grids cover (delta, omega) or omega states");
  if (model_has_delta(model) != spec.grid->delta.has_value())
    throw InvalidConfig(model_has_delta(model)
                            ? "this model's grid needs a delta axis"
                            : "this model's grid takes no delta axis");
  if (model_is_singular(model) && !(spec.grid->omega.lo > kSpeedFloor))
    throw InvalidConfig("grid omega range must stay above the speed floor");

  std::optional<RoaKind> kind = resolve_lyap(spec, model);
  if (!kind)
    throw InvalidConfig(
        "sweep needs a level set; none is defined for these parameters");

  SweepResult result;
  result.grid = *spec.grid;
  result.set_kind = *kind;
  result.set = make_roa_set(*kind, model == ModelKind::ImprovedLoadWithLosses
                                       ? reduce_losses(spec.params)
                                       : spec.params);

  IntegrationConfig cfg = spec.integration;
  cfg.lyap_kind.reset();
  cfg.record_stride = std::numeric_limits<int>::max();

  const int total = result.grid.cells();
  result.cells.resize(total);

  std::atomic<int> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&]() {
    try {
      for (;;) {
        const int idx = cursor.fetch_add(1);
        if (idx >= total) return;
        const int i = idx / result.grid.cols();
        const int j = idx % result.grid.cols();
        SimState s0;
        s0.omega = result.grid.omega.at(j);
        if (result.grid.delta) s0.delta = result.grid.delta->at(i);

        CellResult cell;
        cell.initial = s0;
        cell.in_set = roa_contains(result.set, s0);
        cell.exceptional = is_exceptional(result.set, s0);
        const Trajectory traj = integrate(model, spec.params, s0, cfg);
        cell.verdict = traj.verdict;
        cell.final_state = traj.final_state;
        cell.t_end = traj.t_end;
        result.cells[idx] = cell;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  const int workers = std::min(worker_count(), total);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  for (const CellResult& cell : result.cells) {
    if (cell.in_set && !cell.exceptional &&
        cell.verdict != Verdict::Converged) {
      result.all_in_set_converged = false;
      break;
    }
  }
  return result;
}

// ---- Level-set sampling -------------------------------------------------------

namespace {

double ray_crossing(const RoaSet& set, double cx, double cy, double dir_x,
                    double dir_y) {
  auto energy_at = [&](double r) {
    SimState s;
    if (set.kind == RoaKind::OvalO) {
      s.omega = cy + r * dir_y;
      s.xi = cx + r * dir_x;
    } else {
      s.omega = cy + r * dir_y;
      s.delta = cx + r * dir_x;
    }
    return roa_energy(set, s);
  };
  double lo = 0.0;
  double hi = 1e-6;
  int guard = 0;
  while (energy_at(hi) <= set.level && guard++ < 200) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 120; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (energy_at(mid) <= set.level)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

LevelSetPolyline level_set_sample(const RoaSet& set, int resolution) {
  const int n = std::max(resolution, 4);
  LevelSetPolyline poly;

  if (set.kind == RoaKind::OmegaS || set.kind == RoaKind::OmegaK) {
    poly.one_dimensional = true;
    poly.columns = {"omega"};
    auto energy_at = [&](double omega) {
      SimState s;
      s.omega = omega;
      return roa_energy(set, s);
    };
    for (double sign : {-1.0, 1.0}) {
      double lo = 0.0, hi = 1e-6;
      int guard = 0;
      while (energy_at(set.omega_stable + sign * hi) <= set.level &&
             guard++ < 200)
        lo = hi, hi *= 2.0;
      for (int i = 0; i < 120; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (energy_at(set.omega_stable + sign * mid) <= set.level)
          lo = mid;
        else
          hi = mid;
      }
      poly.points.push_back({set.omega_stable + sign * 0.5 * (lo + hi), 0.0});
    }
    return poly;
  }

  double cx = 0.0;
  const double cy = set.kind == RoaKind::OvalO ? set.params.omega_star()
                                               : set.omega_stable;
  if (set.kind == RoaKind::OvalO) {
    poly.columns = {"xi", "omega"};
    cx = set.xi_bar;
  } else {
    poly.columns = {"delta", "omega"};
    cx = set.delta_bar;
  }

  // The two state axes live on very different scales; shaping the rays to the
  // set's extents keeps the boundary samples evenly spread.
  const double scale_y =
      std::sqrt(2.0 * set.level / (set.kind == RoaKind::SmibConventionalLevelSet
                                       ? set.params.momentum()
                                       : set.params.inertia()));
  const double scale_x =
      set.kind == RoaKind::OvalO
          ? std::sqrt(set.params.inertia()) * set.params.omega_star()
          : 1.0;

  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * kPi * k / n;
    const double dir_x = std::cos(theta) * scale_x;
    const double dir_y = std::sin(theta) * scale_y;
    const double r = ray_crossing(set, cx, cy, dir_x, dir_y);
    poly.points.push_back({cx + r * dir_x, cy + r * dir_y});
  }
  return poly;
}

// ---- Constants report ---------------------------------------------------------

nlohmann::ordered_json constants_report(const GeneratorParams& p) {
  nlohmann::ordered_json out;
  out["omega_star"] = p.omega_star();
  out["J"] = p.inertia();
  out["D_d"] = p.damping();
  out["D_m"] = p.viscous_loss();
  out["M"] = p.momentum();
  out["A"] = p.damping_coeff();
  out["P_m"] = p.p_mech();
  out["P_e"] = p.p_load();
  out["gamma"] = p.coupling() ? nlohmann::ordered_json(*p.coupling())
                              : nlohmann::ordered_json(nullptr);

  const EquilibriumPair pair = load_equilibria(reduce_losses(p));
  out["Delta"] = pair.discriminant;
  out["exists"] = pair.exists;
  out["omega_s"] = pair.omega_stable ? nlohmann::ordered_json(*pair.omega_stable)
                                     : nlohmann::ordered_json(nullptr);
  out["omega_u"] = pair.omega_unstable
                       ? nlohmann::ordered_json(*pair.omega_unstable)
                       : nlohmann::ordered_json(nullptr);

  out["delta_bar"] = nullptr;
  out["c_k"] = nullptr;
  out["c_p"] = nullptr;
  out["c"] = nullptr;
  out["delta_minus"] = nullptr;
  out["speed_condition"] = nullptr;
  out["angle_condition"] = nullptr;
  if (p.coupling()) {
    const double gamma = *p.coupling();
    const double ws = p.omega_star();
    out["speed_condition"] = ws * ws > gamma / p.damping();
    const double ratio = p.p_mech() / gamma;
    out["angle_condition"] = ratio >= 0.0 && ratio < 2.0 / kPi;
    if (std::abs(ratio) <= 1.0)
      out["delta_bar"] = smib_equilibrium(p).delta_bar;
    try {
      const SmibConstants c = smib_constants(p);
      out["c_k"] = c.c_k;
      out["c_p"] = c.c_p;
      out["c"] = c.c;
      out["delta_minus"] = c.delta_minus;
    } catch (const Error&) {
      // Conditions fail; the flags above say which.
    }
  }
  return out;
}

// ---- Scenario execution --------------------------------------------------------

ScenarioResult run_scenario(const ScenarioSpec& spec) {
  ScenarioResult result;

  if (wants(spec, OutputKind::Constants))
    result.constants = constants_report(spec.params);

  if (wants(spec, OutputKind::Trajectory)) {
    if (spec.grid)
      throw InvalidConfig(
          "trajectory output takes explicit initial states, not a grid");
    if (spec.initials.empty())
      throw InvalidConfig("scenario '" + spec.name +
                          "' requires an initial state; add one via --config");
    for (const ModelKind model : spec.models) {
      for (std::size_t i = 0; i < spec.initials.size(); ++i) {
        IntegrationConfig cfg = spec.integration;
        cfg.lyap_kind = resolve_lyap(spec, model);
        ModelRun run;
        run.model = model;
        run.initial_index = static_cast<int>(i);
        run.trajectory = integrate(model, spec.params, spec.initials[i], cfg);
        result.runs.push_back(std::move(run));
      }
    }
  }

  if (wants(spec, OutputKind::VerdictGrid)) result.sweep = basin_sweep(spec);

  if (wants(spec, OutputKind::LevelSet)) {
    for (const ModelKind model : spec.models) {
      const std::optional<RoaKind> kind = resolve_lyap(spec, model);
      if (!kind)
        throw InvalidConfig(
            "level-set output needs a set; none is defined for model " +
            std::string(model_name(model)));
      const GeneratorParams effective =
          model == ModelKind::ImprovedLoadWithLosses ? reduce_losses(spec.params)
                                                     : spec.params;
      result.level_sets.emplace_back(
          *kind, level_set_sample(make_roa_set(*kind, effective),
                                  spec.levelset_resolution));
    }
  }
  return result;
}

// ---- Output files ---------------------------------------------------------------

namespace {

nlohmann::ordered_json state_json(const SimState& s) {
  nlohmann::ordered_json j;
  j["omega"] = s.omega;
  j["delta"] = s.delta ? nlohmann::ordered_json(*s.delta)
                       : nlohmann::ordered_json(nullptr);
  j["xi"] =
      s.xi ? nlohmann::ordered_json(*s.xi) : nlohmann::ordered_json(nullptr);
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string text = "t,omega,delta,xi,V,Vdot\n";
  for (const TrajectorySample& s : traj.samples) {
    text += fmt_double(s.t);
    text += ',';
    text += fmt_double(s.state.omega);
    text += ',';
    append_field(text, s.state.delta);
    text += ',';
    append_field(text, s.state.xi);
    text += ',';
    append_field(text, s.energy);
    text += ',';
    append_field(text, s.energy_rate);
    text += '\n';
  }
  return text;
}

nlohmann::ordered_json trajectory_json(const Trajectory& traj) {
  nlohmann::ordered_json j;
  j["columns"] = {"t", "omega", "delta", "xi", "V", "Vdot"};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  auto cell = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  for (const TrajectorySample& s : traj.samples)
    rows.push_back({s.t, s.state.omega, cell(s.state.delta), cell(s.state.xi),
                    cell(s.energy), cell(s.energy_rate)});
  j["rows"] = std::move(rows);
  j["verdict"] = verdict_name(traj.verdict);
  j["t_end"] = traj.t_end;
  j["final"] = state_json(traj.final_state);
  return j;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string text =
      "delta0,omega0,in_set,exceptional,verdict,t_end,delta_end,omega_end\n";
  for (const CellResult& cell : sweep.cells) {
    append_field(text, cell.initial.delta);
    text += ',';
    text += fmt_double(cell.initial.omega);
    text += ',';
    text += cell.in_set ? '1' : '0';
    text += ',';
    text += cell.exceptional ? '1' : '0';
    text += ',';
    text += verdict_name(cell.verdict);
    text += ',';
    text += fmt_double(cell.t_end);
    text += ',';
    append_field(text, cell.final_state.delta);
    text += ',';
    text += fmt_double(cell.final_state.omega);
    text += '\n';
  }
  return text;
}

nlohmann::ordered_json sweep_json(const SweepResult& sweep) {
  nlohmann::ordered_json j;
  j["set"] = roa_kind_name(sweep.set_kind);
  j["level"] = sweep.set.level;
  j["all_in_set_converged"] = sweep.all_in_set_converged;
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const CellResult& cell : sweep.cells) {
    nlohmann::ordered_json c;
    c["initial"] = state_json(cell.initial);
    c["in_set"] = cell.in_set;
    c["exceptional"] = cell.exceptional;
    c["verdict"] = verdict_name(cell.verdict);
    c["t_end"] = cell.t_end;
    c["final"] = state_json(cell.final_state);
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  return j;
}

std::string levelset_csv(const LevelSetPolyline& poly) {
  std::string text;
  for (std::size_t i = 0; i < poly.columns.size(); ++i) {
    if (i) text += ',';
    text += poly.columns[i];
  }
  text += '\n';
  for (const auto& pt : poly.points) {
    text += fmt_double(pt[0]);
    if (!poly.one_dimensional) {
      text += ',';
      text += fmt_double(pt[1]);
    }
    text += '\n';
  }
  return text;
}

}  // namespace

void write_outputs(const ScenarioSpec& spec, const ScenarioResult& result,
                   const std::string& out_dir, FileFormat format,
                   std::ostream& summary) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  const bool csv = format == FileFormat::Csv;

  summary << "scenario " << spec.name << "\n";

  for (const ModelRun& run : result.runs) {
    std::string stem = std::string("trajectory_") + model_name(run.model);
    if (spec.initials.size() > 1)
      stem += "_ic" + std::to_string(run.initial_index);
    const std::filesystem::path path = dir / (stem + (csv ? ".csv" : ".json"));
    write_file(path, csv ? trajectory_csv(run.trajectory)
                         : trajectory_json(run.trajectory).dump(2) + "\n");

    const Trajectory& traj = run.trajectory;
    summary << "  " << model_name(run.model) << ": "
            << verdict_name(traj.verdict) << " at t = " << traj.t_end
            << " s, f_final = " << rad_to_hz(traj.final_state.omega)
            << " Hz -> " << path.string() << "\n";
  }

  if (result.sweep) {
    const SweepResult& sweep = *result.sweep;
    const std::filesystem::path path = dir / (csv ? "sweep.csv" : "sweep.json");
    write_file(path,
               csv ? sweep_csv(sweep) : sweep_json(sweep).dump(2) + "\n");
    int in_set = 0, converged = 0, violations = 0;
    for (const CellResult& cell : sweep.cells) {
      if (cell.in_set && !cell.exceptional) {
        ++in_set;
        if (cell.verdict == Verdict::Converged)
          ++converged;
        else
          ++violations;
      }
    }
    summary << "  sweep over " << sweep.grid.rows() << "x" << sweep.grid.cols()
            << " cells (" << roa_kind_name(sweep.set_kind)
            << " level set): " << in_set << " in-set cells, " << converged
            << " converged, " << violations << " violations -> "
            << path.string() << "\n";
    if (!sweep.all_in_set_converged)
      summary << "  WARNING: in-set cells failed to converge\n";
  }

  for (const auto& [kind, poly] : result.level_sets) {
    const std::filesystem::path path =
        dir / (std::string("levelset_") + roa_kind_name(kind) +
               (csv ? ".csv" : ".json"));
    if (csv) {
      write_file(path, levelset_csv(poly));
    } else {
      nlohmann::ordered_json j;
      j["columns"] = poly.columns;
      nlohmann::ordered_json pts = nlohmann::ordered_json::array();
      for (const auto& pt : poly.points) {
        if (poly.one_dimensional)
          pts.push_back(pt[0]);
        else
          pts.push_back({pt[0], pt[1]});
      }
      j["points"] = std::move(pts);
      write_file(path, j.dump(2) + "\n");
    }
    summary << "  level set " << roa_kind_name(kind) << ": "
            << poly.points.size() << " points -> " << path.string() << "\n";
  }

  if (!result.constants.is_null()) {
    const std::filesystem::path path = dir / "constants.json";
    write_file(path, result.constants.dump(2) + "\n");
    summary << "  constants -> " << path.string() << "\n";
  }
}

}  // namespace swingsim
