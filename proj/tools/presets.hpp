#pragma once

#include <map>
#include <string>

namespace sivcli {

/// One named parameter set from the versioned preset file.
struct Preset {
  std::string name;
  std::string description;
  double G = 1.0;
  double M0 = 1.0;
  double omega_m = 0.3;
  double tau0 = 13.8;
  double r0 = 1.0;
  double speed_of_light = 0.0;  // 0: unbounded
  std::string length_unit = "L";
  std::string time_unit = "T";
  double cm_per_length_unit = 0.0;  // 0: unknown conversion
};

/// Loads the preset file.  Resolution order: explicit path argument, the
/// SIV_PRESETS environment variable, presets.json next to the executable,
/// ../data/presets.json relative to it, then the build-time default path.
/// Throws std::runtime_error with a diagnostic if nothing can be read or the
/// file version is unsupported.
std::map<std::string, Preset> load_presets(const std::string& explicit_path = "");

}  // namespace sivcli
