#include "fm2s/profiles.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "fm2s/errors.hpp"

namespace fm2s {
namespace {

ProfileConfig make(const std::string& name, int lambda_amp, int stride, int filter_window,
                   double k_g, double k_p, double lambda_p) {
  ProfileConfig p;
  p.name = name;
  p.noise.lambda_amp = lambda_amp;
  p.noise.stride = stride;
  p.noise.k_g = k_g;
  p.noise.k_p = k_p;
  p.noise.lambda_p_overall = lambda_p;
  p.noise.filter.kind = FilterSpec::Kind::median;
  p.noise.filter.window = filter_window;
  return p;
}

// Per-microscope tables, one profile per noise level (avgN: ground
// truth averaged from N captures; higher N = less noise).
const std::vector<ProfileConfig>& builtin_profiles() {
  static const std::vector<ProfileConfig> profiles = [] {
    std::vector<ProfileConfig> v;
    v.push_back(make("confocal_avg1", 2, 75, 3, 200, 30, 70));
    v.push_back(make("confocal_avg2", 2, 75, 3, 125, 95, 285));
    v.push_back(make("confocal_avg4", 2, 75, 3, 70, 195, 485));
    v.push_back(make("confocal_avg8", 2, 75, 3, 10, 240, 650));
    v.push_back(make("confocal_avg16", 2, 75, 3, 5, 650, 1400));
    v.push_back(make("twophoton_avg1", 2, 75, 3, 175, 30, 60));
    v.push_back(make("twophoton_avg2", 2, 75, 3, 150, 85, 300));
    v.push_back(make("twophoton_avg4", 2, 75, 3, 90, 300, 480));
    v.push_back(make("twophoton_avg8", 2, 75, 3, 20, 185, 600));
    v.push_back(make("twophoton_avg16", 2, 75, 3, 15, 850, 3800));
    v.push_back(make("widefield_avg1", 1, 75, 11, 220, 45, 2000));
    v.push_back(make("widefield_avg2", 1, 75, 11, 220, 100, 2500));
    v.push_back(make("widefield_avg4", 1, 75, 11, 60, 650, 3500));
    v.push_back(make("widefield_avg8", 1, 75, 11, 20, 600, 4000));
    v.push_back(make("widefield_avg16", 1, 75, 11, 1, 1500, 4800));
    v.push_back(make("srdtrans", 5, 5, 3, 60, 30, 150));
    // Matched to the synthetic MPG benchmark (overall Poisson 60 plus
    // Gaussian sigma 0.05 on mid-gray scenes).
    v.push_back(make("phantom", 2, 75, 3, 40, 30, 60));
    return v;
  }();
  return profiles;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw InvalidArgument("bad numeric value for " + key + ": '" + v + "'");
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw InvalidArgument("bad integer value for " + key + ": '" + v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw InvalidArgument("bad seed value for " + key + ": '" + v + "'");
  return out;
}

void set_key(ProfileConfig& p, const std::string& key, const std::string& value) {
  if (key == "lambda_amp")
    p.noise.lambda_amp = static_cast<int>(parse_int(key, value));
  else if (key == "stride")
    p.noise.stride = static_cast<int>(parse_int(key, value));
  else if (key == "k_g")
    p.noise.k_g = parse_double(key, value);
  else if (key == "k_p")
    p.noise.k_p = parse_double(key, value);
  else if (key == "lambda_p")
    p.noise.lambda_p_overall = parse_double(key, value);
  else if (key == "filter_kind") {
    if (value == "median")
      p.noise.filter.kind = FilterSpec::Kind::median;
    else if (value == "gaussian")
      p.noise.filter.kind = FilterSpec::Kind::gaussian;
    else
      throw InvalidArgument("bad filter_kind '" + value + "' (median or gaussian)");
  } else if (key == "filter_window")
    p.noise.filter.window = static_cast<int>(parse_int(key, value));
  else if (key == "filter_sigma")
    p.noise.filter.gaussian_sigma = parse_double(key, value);
  else if (key == "lr")
    p.train.lr = parse_double(key, value);
  else if (key == "beta1")
    p.train.beta1 = parse_double(key, value);
  else if (key == "beta2")
    p.train.beta2 = parse_double(key, value);
  else if (key == "stage1_steps")
    p.train.stage1_steps = static_cast<int>(parse_int(key, value));
  else if (key == "epochs")
    p.train.epochs = static_cast<int>(parse_int(key, value));
  else if (key == "sample_size")
    p.train.sample_size = static_cast<int>(parse_int(key, value));
  else if (key == "seed")
    p.train.seed = parse_u64(key, value);
  else if (key == "net_c1")
    p.train.net_c1 = static_cast<int>(parse_int(key, value));
  else if (key == "net_c2")
    p.train.net_c2 = static_cast<int>(parse_int(key, value));
  else if (key == "leaky_slope")
    p.train.leaky_slope = parse_double(key, value);
  else
    throw InvalidArgument("unknown config key '" + key + "'");
}

}  // namespace

std::vector<std::string> profile_names() {
  std::vector<std::string> names;
  for (const auto& p : builtin_profiles()) names.push_back(p.name);
  return names;
}

bool has_profile(const std::string& name) {
  for (const auto& p : builtin_profiles())
    if (p.name == name) return true;
  return false;
}

ProfileConfig get_profile(const std::string& name) {
  for (const auto& p : builtin_profiles())
    if (p.name == name) return p;
  throw InvalidArgument("unknown profile '" + name + "' (see `fm2s profiles`)");
}

std::string serialize_profile(const ProfileConfig& p) {
  std::ostringstream os;
  os << "# fm2s profile: " << p.name << "\n";
  os << "lambda_amp = " << p.noise.lambda_amp << "\n";
  os << "stride = " << p.noise.stride << "\n";
  os << "k_g = " << format_double(p.noise.k_g) << "\n";
  os << "k_p = " << format_double(p.noise.k_p) << "\n";
  os << "lambda_p = " << format_double(p.noise.lambda_p_overall) << "\n";
  os << "filter_kind = "
     << (p.noise.filter.kind == FilterSpec::Kind::median ? "median" : "gaussian") << "\n";
  os << "filter_window = " << p.noise.filter.window << "\n";
  os << "filter_sigma = " << format_double(p.noise.filter.gaussian_sigma) << "\n";
  os << "lr = " << format_double(p.train.lr) << "\n";
  os << "beta1 = " << format_double(p.train.beta1) << "\n";
  os << "beta2 = " << format_double(p.train.beta2) << "\n";
  os << "stage1_steps = " << p.train.stage1_steps << "\n";
  os << "epochs = " << p.train.epochs << "\n";
  os << "sample_size = " << p.train.sample_size << "\n";
  os << "seed = " << p.train.seed << "\n";
  os << "net_c1 = " << p.train.net_c1 << "\n";
  os << "net_c2 = " << p.train.net_c2 << "\n";
  os << "leaky_slope = " << format_double(p.train.leaky_slope) << "\n";
  return os.str();
}

ProfileConfig parse_profile(const std::string& text, const std::string& name) {
  ProfileConfig p;
  p.name = name;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(lineno) +
                            ": expected `key = value`, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key or value");
    set_key(p, key, value);
  }
  return p;
}

ProfileConfig load_profile_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_profile(ss.str(), path.stem().string());
}

void save_profile_file(const ProfileConfig& p, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write config " + path.string());
  os << serialize_profile(p);
  if (!os) throw IoError("write failed: " + path.string());
}

void apply_override(ProfileConfig& p, const std::string& key_eq_value) {
  const auto eq = key_eq_value.find('=');
  if (eq == std::string::npos)
    throw InvalidArgument("override must be key=value, got '" + key_eq_value + "'");
  const std::string key = trim(key_eq_value.substr(0, eq));
  const std::string value = trim(key_eq_value.substr(eq + 1));
  if (key.empty() || value.empty())
    throw InvalidArgument("override must be key=value, got '" + key_eq_value + "'");
  set_key(p, key, value);
}

}  // namespace fm2s
