#pragma once

// Subcommand bodies shared by the cowkin binary and the test suites.
// Exit codes: 0 ok, 2 configuration error, 3 physics error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

#include "cowkin/report.hpp"

namespace cowkin {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPhysics = 3;

struct ConfigSource {
  std::optional<std::filesystem::path> config_path;
  std::optional<std::string> preset;

  ConfigDoc load() const {
    if (config_path && preset)
      throw Error(ErrorKind::ConfigInvalid, "load_config", "give either --config or --preset, not both");
    if (config_path) return load_config_file(*config_path);
    if (preset) return load_preset(*preset);
    throw Error(ErrorKind::ConfigInvalid, "load_config", "one of --config or --preset is required");
  }
};

// Runs `body`, mapping errors onto the exit-code contract.
inline int guarded(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ConfigInvalid ? kExitConfig : kExitPhysics;
  }
}

// Writes via a sibling temp file and rename, so readers never see a partial file.
inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::ConfigInvalid, "write_output", "cannot write '" + tmp.string() + "'");
    out << content;
    out.close();
    if (!out) {
      std::filesystem::remove(tmp);
      throw Error(ErrorKind::ConfigInvalid, "write_output", "failed writing '" + tmp.string() + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

namespace detail {

inline std::string sci(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.*e", digits - 1, v);
  return buf;
}

}  // namespace detail

inline std::string format_paper_table(const CowConfig& config, const LoopResult& r) {
  const double theta_B_deg = bragg_angle(kTwoPi / config.lambda, config.slab) * 180.0 / std::numbers::pi;
  struct Row {
    std::string label, computed, published;
  };
  const Row rows[] = {
      {"theta_B [deg]", detail::sci(theta_B_deg), "30"},
      {"T [s]", detail::sci(r.T), "28 ms (printed; 2.8e-5 s is consistent)"},
      {"dk_y/k_y", detail::sci(r.dky_per_leg_rel), "2.7e-7"},
      {"acceptance margin", detail::sci(r.mirror_acceptance_margin()), "0.054 (2.7e-7 / 5e-6)"},
      {"dk_x/k_x", detail::sci(r.dkx_rel()), "1.8e-7"},
      {"(T3-T)/T", detail::sci(r.defocus_rel_upper), "+1.8e-7"},
      {"(T4-T)/T", detail::sci(r.defocus_rel_lower), "-1.8e-7"},
      {"(k_y3-k_y4)/k_y", detail::sci(r.closure_rel), "9.5e-14"},
  };
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-20s | %-12s | %s\n", "quantity", "computed", "published");
  out += line;
  out += std::string(20, '-') + "-+-" + std::string(12, '-') + "-+-" + std::string(40, '-') + "\n";
  for (const auto& row : rows) {
    std::snprintf(line, sizeof line, "%-20s | %-12s | %s\n", row.label.c_str(), row.computed.c_str(),
                  row.published.c_str());
    out += line;
  }
  return out;
}

inline int cmd_paper_table(const ConfigSource& source, bool with_trace,
                           const std::optional<std::filesystem::path>& out_path, std::ostream& out,
                           std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = resolve(source.load());
    const LoopResult r = run_cow_loop(rc.cow);
    const std::string doc = dump_document(cow_document(rc, r, with_trace));
    if (out_path) write_atomically(*out_path, doc);
    out << format_paper_table(rc.cow, r);
  });
}

inline std::string sweep_csv(const ConfigDoc& base, const std::string& key, double from, double to, int steps) {
  if (!is_numeric_key(key))
    throw Error(ErrorKind::ConfigInvalid, "sweep", "'" + key + "' is not a numeric config key");
  if (steps < 2) throw Error(ErrorKind::ConfigInvalid, "sweep", "steps must be >= 2");
  if (!std::isfinite(from) || !std::isfinite(to))
    throw Error(ErrorKind::ConfigInvalid, "sweep", "range bounds must be finite");

  std::string csv;
  for (int i = 0; i < steps; ++i) {
    const double value = i == steps - 1 ? to : from + (to - from) * i / (steps - 1);
    ConfigDoc doc = base;
    doc.set_number(key, value);
    const RunConfig rc = resolve(doc);
    const auto diag = cow_diagnostics(rc.cow, run_cow_loop(rc.cow));
    if (i == 0) {
      csv += csv_field(key);
      for (const auto& [name, v] : diag) csv += "," + csv_field(name);
      csv += "\n";
    }
    csv += format_double(value);
    for (const auto& [name, v] : diag) csv += "," + format_double(v);
    csv += "\n";
  }
  return csv;
}

inline int cmd_sweep(const ConfigSource& source, const std::string& key, double from, double to, int steps,
                     const std::filesystem::path& out_path, std::ostream& err) {
  return guarded(err, [&] { write_atomically(out_path, sweep_csv(source.load(), key, from, to, steps)); });
}

inline int cmd_compare(const ConfigSource& source, bool with_trace, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = resolve(source.load());
    if (!rc.atom)
      throw Error(ErrorKind::ConfigInvalid, "compare", "config has no atom.* section");
    const auto report = compare_modes(rc.cow, *rc.atom);
    out << dump_document(comparison_document(rc, report, with_trace));
  });
}

}  // namespace cowkin
