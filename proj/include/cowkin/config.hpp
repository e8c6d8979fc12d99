#pragma once

// Flat "key = value" run configuration. Values are in human units (angstrom,
// centimetre, degree); resolve() converts everything to SI.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cowkin/loop.hpp"

namespace cowkin {

inline constexpr double kAngstrom = 1e-10;
inline constexpr double kCentimetre = 1e-2;

struct ConfigKey {
  std::string_view name;
  bool numeric;
  std::string_view unit;
};

inline constexpr std::array<ConfigKey, 15> kConfigKeys{{
    {"geometry.lambda_angstrom", true, "angstrom"},
    {"geometry.theta_deg", true, "degree"},
    {"crystal.d_angstrom", true, "angstrom"},
    {"crystal.sigma_ky_rel", true, "1"},
    {"setup.span_cm", true, "cm"},
    {"physics.g", true, "m/s^2"},
    {"physics.mass_kg", true, "kg"},
    {"physics.hbar", true, "J s"},
    {"engine.mode", false, ""},
    {"atom.k_transfer", true, "1/m"},
    {"atom.span_time", true, "s"},
    {"atom.mass_kg", true, "kg"},
    {"atom.lambda_angstrom", true, "angstrom"},
    {"atom.initial_ky", true, "1/m"},
    {"atom.label", false, ""},
}};

inline const ConfigKey* find_key(std::string_view name) {
  for (const auto& key : kConfigKeys)
    if (key.name == name) return &key;
  return nullptr;
}

inline bool is_numeric_key(std::string_view name) {
  const auto* key = find_key(name);
  return key && key->numeric;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_number(std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace detail

// Raw document: validated key names and value syntax, values kept as text.
class ConfigDoc {
 public:
  static ConfigDoc parse(std::string_view text) {
    ConfigDoc doc;
    std::size_t line_no = 0;
    while (!text.empty()) {
      ++line_no;
      const auto nl = text.find('\n');
      std::string_view line = text.substr(0, nl);
      text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;

      const auto eq = line.find('=');
      auto where = [&](std::string_view key) {
        return "line " + std::to_string(line_no) + (key.empty() ? "" : ", key '" + std::string(key) + "'");
      };
      if (eq == std::string_view::npos)
        throw Error(ErrorKind::ConfigInvalid, "parse_config", where("") + ": expected 'key = value'");
      const auto key = detail::trim(line.substr(0, eq));
      const auto value = detail::trim(line.substr(eq + 1));
      const auto* spec = find_key(key);
      if (!spec) throw Error(ErrorKind::ConfigInvalid, "parse_config", where(key) + ": unknown key");
      if (doc.values_.count(std::string(key)))
        throw Error(ErrorKind::ConfigInvalid, "parse_config", where(key) + ": duplicate key");
      if (spec->numeric && !detail::parse_number(value))
        throw Error(ErrorKind::ConfigInvalid, "parse_config", where(key) + ": not a finite number");
      if (value.empty())
        throw Error(ErrorKind::ConfigInvalid, "parse_config", where(key) + ": empty value");
      doc.values_.emplace(std::string(key), std::string(value));
    }
    return doc;
  }

  bool has(std::string_view key) const { return values_.count(std::string(key)) > 0; }

  std::optional<double> number(std::string_view key) const {
    auto it = values_.find(std::string(key));
    if (it == values_.end()) return std::nullopt;
    return detail::parse_number(it->second);
  }

  std::optional<std::string> text(std::string_view key) const {
    auto it = values_.find(std::string(key));
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  void set_number(std::string_view key, double value) {
    if (!is_numeric_key(key))
      throw Error(ErrorKind::ConfigInvalid, "set_number", "'" + std::string(key) + "' is not a numeric key");
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    values_[std::string(key)] = std::string(buf.data(), ptr);
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Resolved SI configuration.
struct RunConfig {
  CowConfig cow;
  std::optional<AtomConfig> atom;
};

inline RunConfig resolve(const ConfigDoc& doc) {
  auto require = [&](std::string_view key) {
    auto v = doc.number(key);
    if (!v)
      throw Error(ErrorKind::ConfigInvalid, "resolve_config", "missing required key '" + std::string(key) + "'");
    return *v;
  };
  auto positive = [&](std::string_view key, double v) {
    if (!(v > 0.0))
      throw Error(ErrorKind::ConfigInvalid, "resolve_config", "key '" + std::string(key) + "' must be positive");
    return v;
  };

  RunConfig rc;
  PhysicalConstants constants;
  constants.g = doc.number("physics.g").value_or(constants.g);
  constants.hbar = positive("physics.hbar", doc.number("physics.hbar").value_or(constants.hbar));
  if (constants.g < 0.0)
    throw Error(ErrorKind::ConfigInvalid, "resolve_config", "key 'physics.g' must be non-negative");

  auto& cow = rc.cow;
  cow.lambda = positive("geometry.lambda_angstrom", require("geometry.lambda_angstrom")) * kAngstrom;
  const double d = positive("crystal.d_angstrom", require("crystal.d_angstrom")) * kAngstrom;
  const double sigma = positive("crystal.sigma_ky_rel", doc.number("crystal.sigma_ky_rel").value_or(5e-6));
  cow.slab = CrystalSlab::from_spacing(d, sigma);
  cow.span_x = positive("setup.span_cm", require("setup.span_cm")) * kCentimetre;
  cow.constants = constants;
  if (auto m = doc.number("physics.mass_kg")) cow.species = {positive("physics.mass_kg", *m), SpeciesKind::neutron, "custom"};
  if (auto th = doc.number("geometry.theta_deg")) {
    if (!(*th > 0.0 && *th < 90.0))
      throw Error(ErrorKind::ConfigInvalid, "resolve_config", "key 'geometry.theta_deg' must lie in (0, 90)");
    cow.theta = *th * std::numbers::pi / 180.0;
  }
  const auto mode = doc.text("engine.mode").value_or("exact");
  if (mode == "exact") cow.mode = EngineMode::exact;
  else if (mode == "first_order") cow.mode = EngineMode::first_order;
  else throw Error(ErrorKind::ConfigInvalid, "resolve_config", "key 'engine.mode' must be 'exact' or 'first_order'");

  const bool has_atom = doc.has("atom.k_transfer") || doc.has("atom.span_time") || doc.has("atom.mass_kg") ||
                        doc.has("atom.lambda_angstrom") || doc.has("atom.initial_ky") || doc.has("atom.label");
  if (has_atom) {
    AtomConfig atom;
    atom.k_transfer = positive("atom.k_transfer", require("atom.k_transfer"));
    atom.span_time = positive("atom.span_time", require("atom.span_time"));
    atom.lambda_dB = positive("atom.lambda_angstrom", doc.number("atom.lambda_angstrom").value_or(cow.lambda / kAngstrom)) * kAngstrom;
    atom.initial_ky = doc.number("atom.initial_ky").value_or(0.0);
    const auto label = doc.text("atom.label").value_or("Cs-133");
    if (auto m = doc.number("atom.mass_kg")) atom.species = ParticleSpecies::atom(positive("atom.mass_kg", *m), label);
    else atom.species.label = label;
    atom.constants = constants;
    rc.atom = atom;
  }
  return rc;
}

// Built-in preset: Si 220 at theta_B = 30 deg (lambda = 2 d sin 30 = d),
// l = 5 cm, paired with a Cs Raman-pulse interferometer.
inline constexpr std::string_view kPaper2013Preset = R"(# Si 220 neutron interferometer, theta_B = 30 deg
geometry.lambda_angstrom = 1.9201557160456642
crystal.d_angstrom = 1.9201557160456642
crystal.sigma_ky_rel = 5e-6
setup.span_cm = 5
physics.g = 9.81
engine.mode = exact
# Cs-133 Raman-pulse interferometer, two 852 nm photons per kick
atom.k_transfer = 14743251.924246142
atom.span_time = 0.1
atom.mass_kg = 2.2069469541e-25
atom.label = Cs-133
)";

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::ConfigInvalid, "load_config", "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ConfigDoc load_preset(std::string_view name) {
  if (name == "paper-2013") return ConfigDoc::parse(kPaper2013Preset);
  if (const char* dir = std::getenv("COWKIN_PRESET_DIR"); dir && *dir) {
    const auto path = std::filesystem::path(dir) / (std::string(name) + ".cfg");
    if (std::filesystem::exists(path)) return ConfigDoc::parse(read_file(path));
  }
  throw Error(ErrorKind::ConfigInvalid, "load_preset", "unknown preset '" + std::string(name) + "'");
}

inline ConfigDoc load_config_file(const std::filesystem::path& path) {
  return ConfigDoc::parse(read_file(path));
}

}  // namespace cowkin
