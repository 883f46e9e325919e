#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "swingsim/scenario.hpp"

using namespace swingsim;
using namespace swingtest;
using nlohmann::json;

namespace {

std::filesystem::path fresh_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("swingsim_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("presets carry the shared machine constants exactly") {
  for (const std::string& name : preset_names()) {
    const ScenarioSpec spec = scenario_preset(name);
    CHECK(spec.params.momentum() == 0.2);
    CHECK(spec.params.damping_coeff() == 0.04);
    CHECK(spec.params.omega_star() == kNominal);
    CHECK(spec.params.inertia() == 0.2 / kNominal);
    CHECK(spec.params.damping() == 0.04 / kNominal);
  }
  CHECK(*scenario_preset("smib-roa").params.coupling() == 2.0);
  CHECK(scenario_preset("example1").initials.at(0).omega == kNominal);
  CHECK(scenario_preset("example2").initials.at(0).omega ==
        2.0 * kPi * 24.0);
  CHECK(scenario_preset("example2").params.p_load() == 4.65);
  CHECK(scenario_preset("example3").params.p_load() == 4.90);
  CHECK_THROWS_AS(scenario_preset("example9"), InvalidConfig);
}

TEST_CASE("config: overlay onto a preset") {
  const json doc = {{"scenario", "example1"},
                    {"params", {{"P_e", 3.0}}},
                    {"integration", {{"t_max", 50.0}}}};
  const ScenarioSpec spec = parse_scenario(doc);
  CHECK(spec.params.p_load() == 3.0);
  CHECK(spec.params.p_mech() == 1.0);
  CHECK(spec.params.momentum() == 0.2);
  CHECK(spec.integration.t_max == 50.0);
  CHECK(spec.integration.dt == 1e-4);
  CHECK(spec.models.size() == 2);
}

TEST_CASE("config: standalone document") {
  const json doc = {
      {"model", "smib-improved"},
      {"params",
       {{"M", 0.2}, {"A", 0.04}, {"omega_star", kNominal}, {"P_m", 1.0},
        {"gamma", 2.0}}},
      {"initial", {{"f", 60.0}, {"delta", 0.4}}},
      {"integration",
       {{"dt", 1e-3}, {"t_max", 30.0}, {"lyapunov", "smib"}}},
      {"outputs", {"trajectory", "constants"}}};
  const ScenarioSpec spec = parse_scenario(doc);
  CHECK(spec.models.size() == 1);
  CHECK(spec.models[0] == ModelKind::SmibImproved);
  CHECK(spec.params.momentum() == 0.2);
  CHECK(*spec.params.coupling() == 2.0);
  REQUIRE(spec.initials.size() == 1);
  CHECK(spec.initials[0].omega == kNominal);
  CHECK(*spec.initials[0].delta == 0.4);
  CHECK(spec.lyap_policy == LyapPolicy::Fixed);
  CHECK(spec.lyap_fixed == RoaKind::SmibLevelSet);
}

TEST_CASE("config: diagnostics name the offending field") {
  auto message_of = [](const json& doc) {
    try {
      parse_scenario(doc);
    } catch (const InvalidConfig& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };

  CHECK(message_of({{"modle", "improved-load"}}).find("modle") !=
        std::string::npos);
  CHECK(message_of({{"model", "swingy"}}).find("swingy") !=
        std::string::npos);
  CHECK(message_of({{"initial", {{"f", 60.0}, {"omega", 1.0}}}})
            .find("initial") != std::string::npos);
  CHECK(message_of({{"params", {{"J", 1.0}, {"M", 1.0}}}}).find("not both") !=
        std::string::npos);
  CHECK(message_of({{"params", {{"banana", 1.0}}}}).find("banana") !=
        std::string::npos);
  CHECK(message_of({{"levelset_resolution", 4}}).find("at least 8") !=
        std::string::npos);
  CHECK(message_of({{"models", {"improved-load", "smib-improved"}}})
            .find("share a state shape") != std::string::npos);
  CHECK(message_of({{"initial",
                     {{"grid", {{"f", {{"min", 60.0}, {"max", 59.0},
                                       {"n", 3}}}}}}}})
            .find("max must be >= min") != std::string::npos);
}

TEST_CASE("config files: line numbers in parse errors") {
  const auto dir = fresh_dir("cfg");
  const auto path = dir / "broken.json";
  std::ofstream(path) << "{\n  \"model\": \"improved-load\",\n  oops\n}\n";
  try {
    load_scenario_file(path.string());
    FAIL("expected a parse failure");
  } catch (const InvalidConfig& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_scenario_file((dir / "missing.json").string()),
                  InvalidConfig);
}

TEST_CASE("running the preset family reproduces the published verdicts") {
  SUBCASE("example2: the improved model escapes, the conventional one holds") {
    const ScenarioResult result = run_scenario(scenario_preset("example2"));
    REQUIRE(result.runs.size() == 2);
    CHECK(result.runs[0].model == ModelKind::ConventionalLoad);
    CHECK(result.runs[0].trajectory.verdict == Verdict::Converged);
    const Verdict improved = result.runs[1].trajectory.verdict;
    CHECK((improved == Verdict::Diverged ||
           improved == Verdict::HitSingularity));
  }

  SUBCASE("example3: no steady state reported, improved run fails") {
    const ScenarioResult result = run_scenario(scenario_preset("example3"));
    CHECK(result.constants["Delta"].get<double>() < 0.0);
    CHECK(result.constants["exists"].get<bool>() == false);
    CHECK(result.constants["omega_s"].is_null());
    CHECK(result.runs[1].trajectory.verdict != Verdict::Converged);
  }
}

TEST_CASE("smib-compare demands an initial state") {
  CHECK_THROWS_WITH_AS(run_scenario(scenario_preset("smib-compare")),
                       doctest::Contains("initial state"), InvalidConfig);
  // With one supplied it runs both models from the same point.
  json doc = {{"scenario", "smib-compare"},
              {"initial", {{"f", 59.5}, {"delta", 0.2}}},
              {"integration", {{"t_max", 60.0}}}};
  const ScenarioResult result = run_scenario(parse_scenario(doc));
  CHECK(result.runs.size() == 2);
}

TEST_CASE("trajectory files: canonical columns, rad/s only, determinism") {
  json doc = {{"scenario", "example1"},
              {"integration", {{"t_max", 30.0}, {"record_stride", 5000}}}};
  const ScenarioSpec spec = parse_scenario(doc);
  const ScenarioResult result = run_scenario(spec);

  const auto dir_a = fresh_dir("outA");
  const auto dir_b = fresh_dir("outB");
  std::ostringstream summary_a, summary_b;
  write_outputs(spec, result, dir_a.string(), FileFormat::Csv, summary_a);
  write_outputs(spec, result, dir_b.string(), FileFormat::Csv, summary_b);

  const std::string csv = slurp(dir_a / "trajectory_improved-load.csv");
  CHECK(csv.rfind("t,omega,delta,xi,V,Vdot\n", 0) == 0);
  // A load-model run has empty delta and xi fields.
  const auto line_end = csv.find('\n', csv.find('\n') + 1);
  const std::string first_row =
      csv.substr(csv.find('\n') + 1, line_end - csv.find('\n') - 1);
  CHECK(first_row.find(",,,") != std::string::npos);
  // Hz never enters the data files; 60 Hz appears only as 376.99... rad/s.
  CHECK(csv.find(",60,") == std::string::npos);
  CHECK(summary_a.str().find("Hz") != std::string::npos);

  CHECK(slurp(dir_a / "trajectory_improved-load.csv") ==
        slurp(dir_b / "trajectory_improved-load.csv"));
  CHECK(slurp(dir_a / "trajectory_conventional-load.csv") ==
        slurp(dir_b / "trajectory_conventional-load.csv"));
  CHECK(slurp(dir_a / "constants.json") == slurp(dir_b / "constants.json"));

  // JSON flavor carries the same rows.
  const auto dir_c = fresh_dir("outC");
  std::ostringstream summary_c;
  write_outputs(spec, result, dir_c.string(), FileFormat::Json, summary_c);
  const json traj = json::parse(slurp(dir_c / "trajectory_improved-load.json"));
  CHECK(traj["columns"].size() == 6);
  CHECK(traj["verdict"] == "MaxTime");
  CHECK(traj["rows"].size() ==
        result.runs[1].trajectory.samples.size());
}

TEST_CASE("basin sweep: trivial grid and acceptance flag") {
  SUBCASE("degenerate one-cell grid at the equilibrium") {
    ScenarioSpec spec = scenario_preset("smib-roa");
    GridSpec grid;
    grid.delta = AxisSpec{std::asin(0.5), std::asin(0.5), 1};
    grid.omega = AxisSpec{kNominal, kNominal, 1};
    spec.grid = grid;
    spec.integration.t_max = 5.0;
    const SweepResult sweep = basin_sweep(spec);
    REQUIRE(sweep.cells.size() == 1);
    CHECK(sweep.cells[0].in_set);
    CHECK(sweep.cells[0].verdict == Verdict::Converged);
    CHECK(sweep.all_in_set_converged);
  }

  SUBCASE("a small in-set patch converges to the equilibrium") {
    ScenarioSpec spec = scenario_preset("smib-roa");
    GridSpec grid;
    grid.delta = AxisSpec{0.40, 0.70, 3};
    grid.omega = AxisSpec{2.0 * kPi * 59.9, 2.0 * kPi * 60.1, 3};
    spec.grid = grid;
    const SweepResult sweep = basin_sweep(spec);
    CHECK(sweep.cells.size() == 9);
    for (const CellResult& cell : sweep.cells) {
      CHECK(cell.in_set);
      CHECK(cell.verdict == Verdict::Converged);
      CHECK(std::abs(*cell.final_state.delta - std::asin(0.5)) < 1e-3);
      CHECK(std::abs(cell.final_state.omega - kNominal) < 2.0 * kPi * 1e-3);
    }
    CHECK(sweep.all_in_set_converged);
  }

  SUBCASE("a horizon too short trips the acceptance flag") {
    ScenarioSpec spec = scenario_preset("smib-roa");
    GridSpec grid;
    grid.delta = AxisSpec{0.45, 0.60, 2};
    grid.omega = AxisSpec{2.0 * kPi * 59.95, 2.0 * kPi * 60.05, 2};
    spec.grid = grid;
    spec.integration.t_max = 1.0;
    const SweepResult sweep = basin_sweep(spec);
    CHECK_FALSE(sweep.all_in_set_converged);
  }

  SUBCASE("sweep demands a grid and one model") {
    ScenarioSpec spec = scenario_preset("example1");
    CHECK_THROWS_AS(basin_sweep(spec), InvalidConfig);
    spec = scenario_preset("smib-roa");
    spec.models = {ModelKind::SmibImproved, ModelKind::SmibConventional};
    CHECK_THROWS_AS(basin_sweep(spec), InvalidConfig);
  }
}

TEST_CASE("level sets: closed-form anchors") {
  auto p1 = example1();

  SUBCASE("oval: axis intercepts of the normalized ellipse") {
    const RoaSet oval = make_roa_set(RoaKind::OvalO, p1);
    const LevelSetPolyline poly = level_set_sample(oval, 8);
    REQUIRE(poly.points.size() == 8);
    CHECK(poly.columns == std::vector<std::string>{"xi", "omega"});
    const double xi_bar = p1.p_mech() - p1.p_load();
    const double a_xi = std::sqrt(p1.inertia()) * kNominal;
    // Rays 0, 2, 4, 6 point along +xi, +omega, -xi, -omega.
    CHECK(poly.points[0][0] == doctest::Approx(xi_bar + a_xi).epsilon(1e-8));
    CHECK(poly.points[0][1] == doctest::Approx(kNominal));
    CHECK(poly.points[2][1] == doctest::Approx(2.0 * kNominal).epsilon(1e-8));
    CHECK(poly.points[4][0] == doctest::Approx(xi_bar - a_xi).epsilon(1e-8));
    CHECK(std::abs(poly.points[6][1]) < 1e-6);
    // Every sample satisfies the ellipse equation.
    for (const auto& pt : poly.points) {
      const double ellipse =
          std::pow((pt[1] - kNominal) / kNominal, 2) +
          std::pow((pt[0] - xi_bar) / a_xi, 2);
      CHECK(std::abs(ellipse - 1.0) < 1e-8);
    }
  }

  SUBCASE("speed interval endpoints") {
    const RoaSet set = make_roa_set(RoaKind::OmegaS, p1);
    const LevelSetPolyline poly = level_set_sample(set, 16);
    REQUIRE(poly.points.size() == 2);
    CHECK(poly.one_dimensional);
    CHECK(std::abs(poly.points[0][0] - set.omega_unstable) < 1e-8);
    CHECK(std::abs(poly.points[1][0] -
                   (2.0 * set.omega_stable - set.omega_unstable)) < 1e-8);
    // The storage flavor bounds the same interval.
    const LevelSetPolyline polyk =
        level_set_sample(make_roa_set(RoaKind::OmegaK, p1), 16);
    CHECK(std::abs(polyk.points[0][0] - poly.points[0][0]) < 1e-7);
    CHECK(std::abs(polyk.points[1][0] - poly.points[1][0]) < 1e-7);
  }

  SUBCASE("one implicit curve at any resolution") {
    const RoaSet set = make_roa_set(RoaKind::SmibLevelSet, smib_machine());
    for (int resolution : {4, 1024}) {
      const LevelSetPolyline poly = level_set_sample(set, resolution);
      CHECK(static_cast<int>(poly.points.size()) == resolution);
      for (const auto& pt : poly.points) {
        SimState s;
        s.delta = pt[0];
        s.omega = pt[1];
        CHECK(std::abs(roa_energy(set, s) - set.level) < 1e-8 * set.level);
      }
    }
  }
}

TEST_CASE("constants report for the infinite-bus machine") {
  const auto report = constants_report(smib_machine());
  CHECK(report["c"].get<double>() == report["c_p"].get<double>());
  CHECK(report["c_p"].get<double>() < report["c_k"].get<double>());
  CHECK(report["speed_condition"].get<bool>());
  CHECK(report["angle_condition"].get<bool>());
  CHECK(report["delta_bar"].get<double>() ==
        doctest::Approx(kPi / 6.0).epsilon(1e-12));
  CHECK(report["gamma"].get<double>() == 2.0);

  const auto plain = constants_report(example1());
  CHECK(plain["gamma"].is_null());
  CHECK(plain["c_k"].is_null());
  CHECK(plain["omega_s"].get<double>() ==
        doctest::Approx(350.0684464308864).epsilon(1e-12));
}

TEST_CASE("worker count honors the environment override") {
  setenv("SWINGSIM_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  setenv("SWINGSIM_THREADS", "0", 1);
  CHECK(worker_count() >= 1);
  unsetenv("SWINGSIM_THREADS");
  CHECK(worker_count() >= 1);
}
