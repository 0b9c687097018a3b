#include "rwrt/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rwrt {

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const Matrix& m) {
  Json a = Json::array();
  for (Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vector(m.row(i).transpose())));
  return a;
}

Json to_json(const HurstReport& r) {
  return Json{{"estimate", r.estimate}, {"stderr", r.stderr_}, {"method", r.method}, {"scales", to_json(r.scales)}};
}

Json to_json(const EcfReport& r) {
  return Json{{"theta", to_json(r.theta)}, {"value", to_json(r.value)}, {"stderr", to_json(r.stderr_)}};
}

Json to_json(const KsResult& r) {
  return Json{{"statistic", r.statistic}, {"p_value", r.p_value}, {"n1", r.n1}, {"n2", r.n2}};
}

Json to_json(const CovarianceReport& r) { return Json{{"cov", to_json(r.cov)}, {"stderr", to_json(r.stderr_)}}; }

Json to_json(const RantReport& r) {
  return Json{{"p", r.p}, {"passed", r.passed}, {"max_deviation", r.max_deviation}, {"moment", r.moment}};
}

Json to_json(const ScalingReport& r) {
  return Json{{"c", r.c},
              {"target_ratio", r.target},
              {"ratio", r.ratio},
              {"ratio_stderr", r.ratio_stderr},
              {"mean_scaled", r.mean_scaled},
              {"stderr_scaled", r.stderr_scaled},
              {"mean_unit", r.mean_unit},
              {"stderr_unit", r.stderr_unit},
              {"passed", r.passed}};
}

namespace {
Json pp_json(const PpCheck& c) {
  return Json{{"proxy", c.name}, {"value", c.value}, {"reference", c.reference}, {"passed", c.passed}};
}
}  // namespace

Json to_json(const PpReport& r) {
  return Json{{"a", pp_json(r.a)}, {"b", pp_json(r.b)}, {"c", pp_json(r.c)}, {"d", pp_json(r.d)},
              {"all_passed", r.all_passed()}};
}

Json to_json(const ExtractReport& r) {
  Json j{{"mode", r.mode},
         {"levels", to_json(r.levels)},
         {"replicates", r.replicates},
         {"dropped", r.dropped},
         {"drop_rate", r.drop_rate},
         {"convention_factor", r.convention_factor},
         {"median_overshoot", r.median_overshoot},
         {"covariance", to_json(r.cov)},
         {"target_covariance", to_json(r.target_cov)}};
  if (r.mode == "times") {
    j["pair_second_moment"] = {{"value", r.pair_second_moment},
                               {"stderr", r.pair_second_moment_stderr},
                               {"target", r.pair_second_moment_target}};
  }
  return j;
}

Json to_json(const DiagonalReport& r) {
  return Json{{"h", to_json(r.h)}, {"distance", to_json(r.distance)}, {"decreasing", r.decreasing}};
}

std::uint64_t content_hash(const Json& j) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

// ---------------------------------------------------------------------------

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ResourceError("cli", "cannot open " + file.string() + " for writing");
  out << std::setprecision(17);
  return out;
}

}  // namespace

void write_text(const std::filesystem::path& file, const std::string& text) {
  auto out = open_out(file);
  out << text;
}

void write_json(const std::filesystem::path& file, const Json& j) { write_text(file, j.dump(2) + "\n"); }

void write_path_csv(const std::filesystem::path& file, const RealPath& path) {
  auto out = open_out(file);
  out << "t,value\n";
  for (Index k = 0; k < path.values.size(); ++k) out << path.dt * static_cast<double>(k) << ',' << path.values[k] << '\n';
}

void write_lattice_csv(const std::filesystem::path& file, const LatticePath& path) {
  auto out = open_out(file);
  out << "index,position\n";
  for (Index k = 0; k < path.positions.size(); ++k) out << k << ',' << path.positions[k] << '\n';
}

void write_reward_csv(const std::filesystem::path& file, const Vector& values) {
  auto out = open_out(file);
  out << "index,value\n";
  for (Index k = 0; k < values.size(); ++k) out << k << ',' << values[k] << '\n';
}

void write_ensemble_csv(const std::filesystem::path& file, const Vector& times, const Matrix& ensemble) {
  auto out = open_out(file);
  for (Index k = 0; k < times.size(); ++k) out << (k ? "," : "") << times[k];
  out << '\n';
  for (Index r = 0; r < ensemble.rows(); ++r) {
    for (Index k = 0; k < ensemble.cols(); ++k) out << (k ? "," : "") << ensemble(r, k);
    out << '\n';
  }
}

void write_draws_csv(const std::filesystem::path& file, const MeasureGrid1D& grid) {
  auto out = open_out(file);
  out << "cell,draw\n";
  const Vector d = grid.draws();
  for (Index k = 0; k < d.size(); ++k) out << grid.first_cell() + k << ',' << d[k] << '\n';
}

}  // namespace rwrt
