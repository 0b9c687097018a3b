// rwrt: experiment runner.  One JSON config (schema_version 1) drives every
// subcommand; --seed / --replicates / --out override it.
//
// exit codes: 0 pass, 1 check failure, 2 usage or parameter error,
//             3 numeric or resource error

#include "rwrt/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace rwrt;

namespace {

constexpr int kSchemaVersion = 1;

// Reads one config object and rejects keys nobody asked for.
class Reader {
 public:
  Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ParameterError("cli", where_ + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ParameterError("cli", where_ + "." + key + " has the wrong type");
    }
  }

  Json object(const std::string& key) {
    if (!has(key)) return Json::object();
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ParameterError("cli", "unknown key " + where_ + "." + key);
    }
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

struct Common {
  Json config = Json::object();
  std::uint64_t seed = 20240611;
  std::optional<Index> replicates;
  fs::path out = "out";
};

Json section(const Common& c, const std::string& name) {
  return c.config.contains(name) ? c.config.at(name) : Json::object();
}

Index replicates(const Common& c, Index fallback) { return c.replicates.value_or(fallback); }

TimeGrid read_grid(Reader& r, Index steps, double horizon) {
  Json g = r.object("grid");
  Reader gr(g, "grid");
  const TimeGrid grid = TimeGrid::span(gr.get<double>("horizon", horizon), gr.get<Index>("steps", steps));
  gr.finish();
  grid.validate();
  return grid;
}

CollectingSpec read_walk(Reader& r) {
  Json w = r.object("walk");
  Reader wr(w, "walk");
  CollectingSpec spec;
  spec.kind = walk_kind_from_string(wr.get<std::string>("kind", "simple"));
  spec.beta = wr.get<double>("beta", 2.0);
  spec.hurst = wr.get<double>("hurst", spec.kind == WalkKind::beta_stable ? 1.0 / spec.beta : 0.5);
  if (spec.kind == WalkKind::beta_stable) spec.hurst = 1.0 / spec.beta;
  wr.finish();
  spec.validate();
  return spec;
}

DriverSpec read_driver(Reader& r) {
  Json d = r.object("driver");
  Reader dr(d, "driver");
  const std::string kind = dr.get<std::string>("kind", "fbm");
  DriverSpec spec;
  if (kind == "fbm") {
    spec = DriverSpec::fbm(dr.get<double>("hurst", 0.5));
  } else if (kind == "levy") {
    spec = DriverSpec::levy(dr.get<double>("beta", 2.0));
  } else {
    throw ParameterError("cli", "driver.kind must be fbm or levy");
  }
  dr.finish();
  spec.validate();
  return spec;
}

Json verdict_head(const Common& c, const std::string& command, const Json& effective) {
  const Json hashed{{"command", command}, {"seed", c.seed}, {"parameters", effective}};
  return Json{{"schema_version", kSchemaVersion},
              {"command", command},
              {"seed", c.seed},
              {"config_hash", hex64(content_hash(hashed))},
              {"parameters", effective}};
}

void emit(const Common& c, const std::string& command, const Json& verdict) {
  const fs::path file = c.out / (command + ".json");
  write_json(file, verdict);
  std::cout << command << ": " << (verdict.value("passed", true) ? "pass" : "FAIL") << " -> " << file.string() << "\n";
}

std::string tag(Index r) {
  std::ostringstream s;
  s << std::setw(4) << std::setfill('0') << r;
  return s.str();
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Common& c) {
  const Json sec = section(c, "simulate");
  Reader r(sec, "simulate");
  const std::string model = r.get<std::string>("model", "limit");
  const Index reps = replicates(c, r.get<Index>("replicates", 4));
  if (reps < 1) throw ParameterError("cli", "replicates must be positive");
  const RandomStream root = RandomStream(c.seed).child("simulate");
  Json eff{{"model", model}, {"replicates", reps}};
  const fs::path dir = c.out / "simulate";

  if (model == "walk" || model == "rwrs" || model == "rwrt") {
    const CollectingSpec walk = read_walk(r);
    const Index n = r.get<Index>("n", 1000);
    const SceneryKind scenery = scenery_kind_from_string(r.get<std::string>("scenery", "gaussian"));
    const double alpha = r.get<double>("alpha", 2.0);
    const std::string definition = r.get<std::string>("definition", "signed");
    r.finish();
    if (n < 1) throw ParameterError("cli", "n must be positive");
    validate_scenery_law(scenery, alpha);
    if (definition != "signed" && definition != "indicator") {
      throw ParameterError("cli", "definition must be signed or indicator");
    }
    eff.update({{"walk", {{"kind", to_string(walk.kind)}, {"beta", walk.beta}, {"hurst", walk.hurst}}},
                {"n", n}, {"scenery", to_string(scenery)}, {"alpha", alpha}, {"definition", definition}});
    for (Index i = 0; i < reps; ++i) {
      RandomStream ws = root.child("walk", static_cast<std::uint64_t>(i));
      const LatticePath path = gen_walk(walk, n, ws);
      if (model == "walk") {
        write_lattice_csv(dir / ("walk_" + tag(i) + ".csv"), path);
        continue;
      }
      const Site site = model == "rwrs" ? Site::vertex : Site::edge;
      const SceneryField eta(scenery, alpha, site, root.child("scenery", static_cast<std::uint64_t>(i)));
      const Vector v = model == "rwrs" ? rwrs(eta, path)
                       : definition == "signed" ? rwrt_signed(eta, path)
                                                : rwrt_indicator(eta, path);
      write_reward_csv(dir / (model + "_" + tag(i) + ".csv"), v);
    }
  } else if (model == "schema") {
    SchemaSpec spec;
    spec.mode = schema_mode_from_string(r.get<std::string>("mode", "independent"));
    spec.alpha = r.get<double>("alpha", 2.0);
    spec.scenery = scenery_kind_from_string(r.get<std::string>("scenery", "gaussian"));
    spec.walk = read_walk(r);
    spec.n = r.get<Index>("n", 1024);
    spec.copies = r.get<Index>("copies", 16);
    const TimeGrid grid = read_grid(r, 16, 1.0);
    r.finish();
    spec.validate();
    eff.update({{"mode", to_string(spec.mode)}, {"alpha", spec.alpha}, {"scenery", to_string(spec.scenery)},
                {"n", spec.n}, {"copies", spec.copies}, {"grid", {{"steps", grid.steps}, {"horizon", grid.horizon()}}}});
    Matrix ens(reps, grid.points());
    for (Index i = 0; i < reps; ++i) {
      RandomStream s = root.child("replicate", static_cast<std::uint64_t>(i));
      ens.row(i) = schema(spec, grid, s).values.transpose();
    }
    write_ensemble_csv(dir / "schema.csv", grid.times(), ens);
  } else if (model == "limit" || model == "driver") {
    LimitSpec spec;
    spec.flavor = flavor_from_string(r.get<std::string>("flavor", "delta"));
    spec.kernel = kernel_from_string(r.get<std::string>("kernel", "indicator"));
    spec.alpha = r.get<double>("alpha", 2.0);
    spec.driver = read_driver(r);
    spec.copies = r.get<Index>("copies", 64);
    spec.cell_width = r.get<double>("cell_width", 1.0 / 256.0);
    spec.driver_steps = r.get<Index>("driver_steps", 4096);
    spec.exact_mean_kernel = r.get<bool>("exact_mean_kernel", false);
    const TimeGrid grid = read_grid(r, 256, 1.0);
    r.finish();
    spec.validate();
    eff.update({{"flavor", to_string(spec.flavor)}, {"kernel", to_string(spec.kernel)}, {"alpha", spec.alpha},
                {"driver", {{"hurst_prime", spec.driver.hurst_prime()}, {"beta", spec.driver.beta}}},
                {"copies", spec.copies}, {"cell_width", spec.cell_width}, {"driver_steps", spec.driver_steps},
                {"exact_mean_kernel", spec.exact_mean_kernel},
                {"grid", {{"steps", grid.steps}, {"horizon", grid.horizon()}}}});
    Matrix ens(reps, grid.points());
    for (Index i = 0; i < reps; ++i) {
      RandomStream s = root.child("replicate", static_cast<std::uint64_t>(i));
      ens.row(i) = (model == "limit" ? simulate_limit(spec, grid, s) : spec.driver.sample(grid, s)).values.transpose();
    }
    write_ensemble_csv(dir / (model + ".csv"), grid.times(), ens);
  } else if (model == "measure") {
    const double alpha = r.get<double>("alpha", 2.0);
    const double h = r.get<double>("cell_width", 1.0 / 64.0);
    const double half_width = r.get<double>("half_width", 4.0);
    r.finish();
    StableParams{alpha, 1.0}.validate();
    eff.update({{"alpha", alpha}, {"cell_width", h}, {"half_width", half_width}});
    for (Index i = 0; i < reps; ++i) {
      const MeasureGrid1D m(alpha, h, half_width, root.child("measure", static_cast<std::uint64_t>(i)));
      write_draws_csv(dir / ("measure_" + tag(i) + ".csv"), m);
    }
  } else {
    throw ParameterError("cli", "simulate.model must be walk, rwrs, rwrt, schema, limit, driver or measure");
  }
  Json v = verdict_head(c, "simulate", eff);
  v["outputs"] = (dir).string();
  v["passed"] = true;
  emit(c, "simulate", v);
  return 0;
}

int cmd_rant(const Common& c) {
  const Json sec = section(c, "rant");
  Reader r(sec, "rant");
  const std::vector<int> orders = r.get<std::vector<int>>("p", {1, 2, 3, 4});
  const Index n = r.get<Index>("n", 10000);
  const Index paths = replicates(c, r.get<Index>("paths", 100));
  const SceneryKind scenery = scenery_kind_from_string(r.get<std::string>("scenery", "gaussian"));
  const CollectingSpec walk = read_walk(r);
  const double tolerance = r.get<double>("tolerance", 1e-9);
  r.finish();
  if (n < 1 || paths < 1) throw ParameterError("cli", "n and paths must be positive");
  validate_scenery_law(scenery, 2.0);

  const RandomStream root = RandomStream(c.seed).child("rant");
  Json per = Json::array();
  bool ok = true;
  for (const int p : orders) {
    double worst = 0.0;
    bool all = true;
    double moment = 0.0;
    for (Index i = 0; i < paths; ++i) {
      RandomStream ws = root.child("walk", static_cast<std::uint64_t>(i));
      const LatticePath path = gen_walk(walk, n, ws);
      const SceneryField eta(scenery, 2.0, Site::edge, root.child("scenery", static_cast<std::uint64_t>(i)));
      const RantReport rep = rant_check(eta, path, p, tolerance);
      worst = std::max(worst, rep.max_deviation);
      all = all && rep.passed;
      moment = rep.moment;
    }
    ok = ok && all;
    per.push_back({{"p", p}, {"moment", moment}, {"max_deviation", worst}, {"passed", all}});
  }
  Json v = verdict_head(c, "rant", {{"p", orders}, {"n", n}, {"paths", paths}, {"scenery", to_string(scenery)},
                                    {"walk", to_string(walk.kind)}, {"tolerance", tolerance}});
  v["orders"] = per;
  v["passed"] = ok;
  emit(c, "rant", v);
  return ok ? 0 : 1;
}

int cmd_recurse(const Common& c) {
  const Json sec = section(c, "recurse");
  Reader r(sec, "recurse");
  const double alpha = r.get<double>("alpha", 2.0);
  const double hurst = r.get<double>("hurst", 0.5);
  const RecursionWord word = RecursionWord::parse(r.get<std::string>("word", "x"));
  const Index copies = r.get<Index>("copies", 64);
  const double cell_width = r.get<double>("cell_width", 1.0 / 64.0);
  const Index reps = replicates(c, r.get<Index>("replicates", 200));
  const bool pp = r.get<bool>("pp_check", true);
  const bool csv = r.get<bool>("write_ensembles", true);
  const TimeGrid grid = read_grid(r, 16, 1.0);
  r.finish();
  compose_hurst(word, hurst, alpha);  // validates every level's argument

  const RandomStream root = RandomStream(c.seed).child("recurse");
  RecursionState state = RecursionState::fbm(alpha, hurst, grid);
  Json levels = Json::array();
  bool ok = true;
  for (std::size_t level = 0; level <= word.size(); ++level) {
    if (level > 0) state = recurse_step(state, word.symbols[level - 1], copies, cell_width);
    const RandomStream ls = root.child("level", level);
    Json rep{{"level", level}, {"word", state.word.str()}, {"hurst", state.hurst}};
    const Matrix ens = state.ensemble(reps, ls.child("ensemble"));
    if (csv) write_ensemble_csv(c.out / "recurse" / ("level_" + std::to_string(level) + ".csv"), grid.times(), ens);
    try {
      rep["hurst_estimate"] = to_json(estimate_hurst(ens, grid, 1));
    } catch (const Error& e) {
      rep["hurst_estimate"] = {{"error", e.what()}};
    }
    if (pp && level > 0) {
      const PpReport pr = check_pp_conditions(state, std::max<Index>(reps, 50), ls.child("pp"));
      rep["pp"] = to_json(pr);
      ok = ok && pr.all_passed();
    }
    levels.push_back(rep);
  }
  Json v = verdict_head(c, "recurse", {{"alpha", alpha}, {"hurst", hurst}, {"word", word.str()}, {"copies", copies},
                                       {"cell_width", cell_width}, {"replicates", reps}, {"pp_check", pp},
                                       {"grid", {{"steps", grid.steps}, {"horizon", grid.horizon()}}}});
  v["levels"] = levels;
  v["passed"] = ok;
  emit(c, "recurse", v);
  return ok ? 0 : 1;
}

int cmd_extract(const Common& c) {
  const Json sec = section(c, "extract");
  Reader r(sec, "extract");
  const std::string mode = r.get<std::string>("mode", "both");
  ExtractSpec minus;
  minus.hurst = r.get<double>("hurst", 0.75);
  minus.replicates = replicates(c, r.get<Index>("replicates", 10000));
  minus.cell_width = r.get<double>("cell_width", 1.0 / 256.0);
  minus.t_min = r.get<double>("t_min", 1e-4);
  minus.t_max = r.get<double>("t_max", 1e14);
  minus.log_step = r.get<double>("log_step", 0.1);
  const auto lm = r.get<std::vector<double>>("minus_levels", {0.5, 1.0, 1.5, 2.0});
  const auto lt = r.get<std::vector<double>>("times_levels", {1.0, 2.0});
  ExtractSpec times = minus;
  times.copies = r.get<Index>("copies", 16);
  r.finish();
  if (mode != "minus" && mode != "times" && mode != "both") throw ParameterError("cli", "extract.mode must be minus, times or both");
  minus.levels = Eigen::Map<const Vector>(lm.data(), static_cast<Index>(lm.size()));
  times.levels = Eigen::Map<const Vector>(lt.data(), static_cast<Index>(lt.size()));
  minus.validate();
  times.validate();

  const RandomStream root = RandomStream(c.seed).child("extract");
  Json v = verdict_head(c, "extract", {{"mode", mode}, {"hurst", minus.hurst}, {"replicates", minus.replicates},
                                       {"cell_width", minus.cell_width}, {"t_min", minus.t_min}, {"t_max", minus.t_max},
                                       {"log_step", minus.log_step}, {"minus_levels", lm}, {"times_levels", lt},
                                       {"copies", times.copies}});
  bool ok = true;
  const auto max_z = [](const ExtractReport& rep) {
    double worst = 0.0;
    for (Index i = 0; i < rep.cov.cov.rows(); ++i)
      for (Index j = 0; j < rep.cov.cov.cols(); ++j)
        worst = std::max(worst, std::abs(rep.cov.cov(i, j) - rep.target_cov(i, j)) / rep.cov.stderr_(i, j));
    return worst;
  };
  if (mode != "times") {
    const ExtractReport rep = extract_bm_minus(minus, root.child("minus"));
    const double z = max_z(rep);
    const bool pass = z <= 3.0 && rep.drop_rate < 0.01;
    ok = ok && pass;
    v["minus"] = {{"report", to_json(rep)}, {"max_abs_z", z}, {"passed", pass}};
    write_ensemble_csv(c.out / "extract" / "minus.csv", rep.levels, rep.samples);
  }
  if (mode != "minus") {
    const ExtractReport rep = extract_bm_times(times, root.child("times"));
    bool pass = rep.drop_rate < 0.01;
    if (rep.levels.size() >= 2) {
      pass = pass && std::abs(rep.pair_second_moment - rep.pair_second_moment_target) <= 3.0 * rep.pair_second_moment_stderr;
    }
    ok = ok && pass;
    v["times"] = {{"report", to_json(rep)}, {"passed", pass}};
    write_ensemble_csv(c.out / "extract" / "times.csv", rep.levels, rep.samples);
  }
  v["passed"] = ok;
  emit(c, "extract", v);
  return ok ? 0 : 1;
}

int cmd_verify(const Common& c) {
  const Json sec = section(c, "verify");
  Reader r(sec, "verify");
  VerifyConfig vc;
  vc.seed = c.seed;
  vc.criteria = r.get<std::vector<int>>("criteria", vc.criteria);
  vc.replicates = c.replicates;
  if (!vc.replicates && r.has("replicates")) vc.replicates = r.get<Index>("replicates", 0);
  r.finish();
  vc.validate();
  const auto results = run_suite(vc, [](const CriterionResult& res) {
    std::cout << (res.passed() ? "PASS " : "FAIL ") << std::setw(2) << res.id << "  " << res.name;
    if (!res.error.empty()) std::cout << "  " << res.error;
    std::cout << "\n" << std::flush;
  });
  Json v = suite_json(vc, results);
  emit(c, "verify", v);
  return exit_code(results);
}

int cmd_report(const Common& c, std::vector<std::string> inputs) {
  const Json sec = section(c, "report");
  Reader r(sec, "report");
  if (inputs.empty()) inputs = r.get<std::vector<std::string>>("inputs", {});
  r.finish();
  if (inputs.empty() && fs::is_directory(c.out)) {
    for (const auto& e : fs::directory_iterator(c.out)) {
      if (e.path().extension() == ".json" && e.path().filename() != "report.json") inputs.push_back(e.path().string());
    }
  }
  std::sort(inputs.begin(), inputs.end());
  if (inputs.empty()) throw ParameterError("cli", "report: no verdict files found");
  Json rows = Json::array();
  bool ok = true;
  for (const auto& file : inputs) {
    std::ifstream in(file);
    if (!in) throw ResourceError("cli", "cannot read " + file);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParameterError("cli", file + ": " + e.what());
    }
    const bool passed = j.value("passed", false);
    ok = ok && passed;
    Json row{{"file", fs::path(file).filename().string()},
             {"command", j.value("command", "")},
             {"seed", j.value("seed", Json(nullptr))},
             {"config_hash", j.value("config_hash", "")},
             {"passed", passed}};
    if (j.contains("criteria")) {
      Json crit = Json::array();
      for (const auto& cr : j["criteria"]) crit.push_back({{"id", cr["id"]}, {"name", cr["name"]}, {"passed", cr["passed"]}});
      row["criteria"] = crit;
    }
    rows.push_back(row);
  }
  Json names = Json::array();
  for (const auto& row : rows) names.push_back(row["file"]);
  Json v = verdict_head(c, "report", {{"inputs", names}});
  v["verdicts"] = rows;
  v["passed"] = ok;
  emit(c, "report", v);
  return ok ? 0 : 1;
}

Json load_config(const std::string& file) {
  if (file.empty()) return Json{{"schema_version", kSchemaVersion}};
  std::ifstream in(file);
  if (!in) throw ParameterError("cli", "cannot open config " + file);
  Json j;
  try {
    j = Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("cli", "config " + file + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("schema_version")) throw ParameterError("cli", "config lacks schema_version");
  if (j["schema_version"] != kSchemaVersion) {
    throw ParameterError("cli", "unsupported schema_version " + j["schema_version"].dump());
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walks at random time: simulation and verification"};
  app.require_subcommand(1);
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<Index> reps;
  std::optional<std::string> out;
  std::vector<std::string> report_inputs;

  const auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_file, "JSON config file");
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--replicates", reps, "replicate count (overrides config)")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory (overrides config)");
    return sub;
  };
  add("simulate", "write sample paths as CSV");
  add("verify", "run the acceptance checks");
  add("rant", "per-path power-variation identity");
  add("recurse", "recursive construction, level by level");
  add("extract", "undo the time change of the time-changed Levy motions");
  add("report", "aggregate JSON verdicts")->add_option("inputs", report_inputs, "verdict files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    Common c;
    c.config = load_config(config_file);
    {
      Reader top(c.config, "config");
      top.get<int>("schema_version", kSchemaVersion);
      c.seed = top.get<std::uint64_t>("seed", c.seed);
      if (top.has("replicates")) c.replicates = top.get<Index>("replicates", 0);
      c.out = top.get<std::string>("out", c.out.string());
      for (const char* s : {"simulate", "verify", "rant", "recurse", "extract", "report"}) top.has(s);
      top.finish();
    }
    if (seed) c.seed = *seed;
    if (reps) c.replicates = *reps;
    if (out) c.out = *out;
    if (c.replicates && *c.replicates < 1) throw ParameterError("cli", "replicates must be positive");

    if (command == "simulate") return cmd_simulate(c);
    if (command == "verify") return cmd_verify(c);
    if (command == "rant") return cmd_rant(c);
    if (command == "recurse") return cmd_recurse(c);
    if (command == "extract") return cmd_extract(c);
    return cmd_report(c, report_inputs);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const RangeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: [cli] out of memory\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: [cli] " << e.what() << "\n";
    return 3;
  }
}
