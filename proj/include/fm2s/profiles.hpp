#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fm2s/noise.hpp"
#include "fm2s/pipeline.hpp"

namespace fm2s {

// A named bundle of injection and training hyperparameters. Shipped
// profiles cover the FMD microscopes at every noise level, the
// SRDTrans calcium-imaging subset, and a synthetic-benchmark profile.
struct ProfileConfig {
  std::string name = "custom";
  NoiseConfig noise;
  TrainConfig train;

  bool operator==(const ProfileConfig&) const = default;
};

std::vector<std::string> profile_names();
bool has_profile(const std::string& name);

// Throws InvalidArgument("unknown profile ...") for unknown names.
ProfileConfig get_profile(const std::string& name);

// Flat `key = value` text with `#` comments. serialize emits every key;
// parse starts from defaults, so partial files are valid. Unknown keys
// are errors.
std::string serialize_profile(const ProfileConfig& p);
ProfileConfig parse_profile(const std::string& text, const std::string& name = "custom");

ProfileConfig load_profile_file(const std::filesystem::path& path);
void save_profile_file(const ProfileConfig& p, const std::filesystem::path& path);

// Applies one `key=value` override (the CLI --set flag).
void apply_override(ProfileConfig& p, const std::string& key_eq_value);

}  // namespace fm2s
