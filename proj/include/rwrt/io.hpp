#pragma once

#include "rwrt/core.hpp"
#include "rwrt/limits.hpp"
#include "rwrt/recursion.hpp"
#include "rwrt/scenery.hpp"
#include "rwrt/stable_measure.hpp"
#include "rwrt/stats.hpp"
#include "rwrt/time_change.hpp"
#include "rwrt/walks.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace rwrt {

using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Json to_json(const HurstReport& r);
Json to_json(const EcfReport& r);
Json to_json(const KsResult& r);
Json to_json(const CovarianceReport& r);
Json to_json(const RantReport& r);
Json to_json(const ScalingReport& r);
Json to_json(const PpReport& r);
Json to_json(const ExtractReport& r);
Json to_json(const DiagonalReport& r);

/// FNV-1a of the compact dump; used as the config hash in verdicts.
std::uint64_t content_hash(const Json& j);
std::string hex64(std::uint64_t x);

void write_text(const std::filesystem::path& file, const std::string& text);
void write_json(const std::filesystem::path& file, const Json& j);

/// (t,value)
void write_path_csv(const std::filesystem::path& file, const RealPath& path);
/// (index,position)
void write_lattice_csv(const std::filesystem::path& file, const LatticePath& path);
/// (index,value)
void write_reward_csv(const std::filesystem::path& file, const Vector& values);
/// header row of times, one replicate per row
void write_ensemble_csv(const std::filesystem::path& file, const Vector& times, const Matrix& ensemble);
/// (cell,draw)
void write_draws_csv(const std::filesystem::path& file, const MeasureGrid1D& grid);

}  // namespace rwrt
