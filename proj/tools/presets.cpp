#include "presets.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#ifndef SIV_DEFAULT_PRESETS
#define SIV_DEFAULT_PRESETS ""
#endif

namespace sivcli {

namespace {

std::filesystem::path executable_dir() {
  std::error_code ec;
  const auto self = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (ec) return {};
  return self.parent_path();
}

std::string resolve_path(const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  if (const char* env = std::getenv("SIV_PRESETS"); env && *env) return env;

  std::vector<std::filesystem::path> candidates;
  const auto exe_dir = executable_dir();
  if (!exe_dir.empty()) {
    candidates.push_back(exe_dir / "presets.json");
    candidates.push_back(exe_dir / ".." / "data" / "presets.json");
  }
  candidates.push_back(SIV_DEFAULT_PRESETS);
  for (const auto& c : candidates) {
    if (!c.empty() && std::filesystem::exists(c)) return c.string();
  }
  throw std::runtime_error("presets: no preset file found (use --preset-file or SIV_PRESETS)");
}

}  // namespace

std::map<std::string, Preset> load_presets(const std::string& explicit_path) {
  const std::string path = resolve_path(explicit_path);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("presets: cannot open " + path);

  nlohmann::json doc;
  in >> doc;
  if (!doc.contains("version") || doc["version"].get<int>() != 1)
    throw std::runtime_error("presets: unsupported file version in " + path);

  std::map<std::string, Preset> out;
  for (const auto& [name, j] : doc.at("presets").items()) {
    Preset p;
    p.name = name;
    p.description = j.value("description", "");
    p.G = j.at("G").get<double>();
    p.M0 = j.at("M0").get<double>();
    p.omega_m = j.at("omega_m").get<double>();
    p.tau0 = j.at("tau0").get<double>();
    p.r0 = j.at("r0").get<double>();
    p.speed_of_light = j.value("speed_of_light", 0.0);
    p.length_unit = j.value("length_unit", "L");
    p.time_unit = j.value("time_unit", "T");
    p.cm_per_length_unit = j.value("cm_per_length_unit", 0.0);
    out.emplace(name, std::move(p));
  }
  return out;
}

}  // namespace sivcli
