#pragma once

// Machine-readable output: named diagnostic sets, JSON result documents and
// CSV rows. Floats are written in shortest round-trip form (at most 17
// significant digits) so documents are byte-reproducible.

#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cowkin/config.hpp"

namespace cowkin {

inline constexpr std::string_view kSchemaVersion = "cowkin-result/1";

using Diagnostics = std::vector<std::pair<std::string, double>>;

inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

// Documented diagnostic set of a COW loop, in CSV column order.
inline Diagnostics cow_diagnostics(const CowConfig& config, const LoopResult& r) {
  const double theta_B = bragg_angle(kTwoPi / config.lambda, config.slab);
  const auto& m = r.acceptance_margins;
  return {
      {"theta_bragg_rad", theta_B},
      {"T_seconds", r.T},
      {"T_upper_seconds", r.T_upper},
      {"T_lower_seconds", r.T_lower},
      {"dky_per_leg_rel", r.dky_per_leg_rel},
      {"dkx_rel", r.dkx_rel()},
      {"dkx_rel_upper", r.dkx_rel_upper},
      {"dkx_rel_lower", r.dkx_rel_lower},
      {"defocus_rel_upper", r.defocus_rel_upper},
      {"defocus_rel_lower", r.defocus_rel_lower},
      {"time_mismatch_seconds", r.time_mismatch},
      {"closure_rel", r.closure_rel},
      {"closure_rel_other", r.closure_rel_other},
      {"mirror_acceptance_margin", r.mirror_acceptance_margin()},
      {"margin_splitter", m.at(0)},
      {"margin_mirror_upper", m.at(1)},
      {"margin_mirror_lower", m.at(2)},
      {"margin_analyzer_upper", m.at(3)},
      {"margin_analyzer_lower", m.at(4)},
      {"mean_drop_m", r.mean_drop},
  };
}

inline Diagnostics atom_diagnostics(const LoopResult& r) {
  return {
      {"T_seconds", r.T},
      {"dky_per_leg_rel", r.dky_per_leg_rel},
      {"dkx_rel", r.dkx_rel()},
      {"defocus_rel_upper", r.defocus_rel_upper},
      {"defocus_rel_lower", r.defocus_rel_lower},
      {"closure_rel", r.closure_rel},
      {"closure_rel_other", r.closure_rel_other},
      {"mean_drop_m", r.mean_drop},
  };
}

namespace detail {

inline void require_finite(const nlohmann::json& j) {
  if (j.is_number_float() && !std::isfinite(j.get<double>()))
    throw Error(ErrorKind::InvalidInput, "serialize", "non-finite value in result document");
  if (j.is_structured())
    for (const auto& item : j) require_finite(item);
}

inline nlohmann::json wave_json(const WaveVector2& k) { return {{"kx", k.kx}, {"ky", k.ky}}; }

inline nlohmann::json path_json(const PathTrace& path) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& ev : path.events) {
    if (const auto* slab = std::get_if<SlabEvent>(&ev)) {
      events.push_back({{"type", "slab"},
                        {"role", to_string(slab->role)},
                        {"branch", to_string(slab->branch)},
                        {"k_in", wave_json(slab->k_in)},
                        {"k_out", wave_json(slab->k_out)},
                        {"deviation", slab->deviation},
                        {"delta_kx", slab->delta_kx},
                        {"acceptance_margin", slab->acceptance_margin}});
    } else {
      const auto& leg = std::get<FlightLeg>(ev);
      events.push_back({{"type", "leg"},
                        {"k_in", wave_json(leg.k_in)},
                        {"k_out", wave_json(leg.k_out)},
                        {"span_x", leg.span_x},
                        {"time", leg.time},
                        {"dky_gravity", leg.dky_gravity},
                        {"drop", leg.drop}});
    }
  }
  return {{"events", events},
          {"k_final", wave_json(path.k_final)},
          {"k_final_other", wave_json(path.k_final_other)},
          {"total_time", path.total_time}};
}

}  // namespace detail

inline nlohmann::json diagnostics_json(const Diagnostics& d) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, value] : d) j[name] = value;
  return j;
}

inline nlohmann::json trace_json(const LoopResult& r) {
  return {{"upper", detail::path_json(r.path_upper)}, {"lower", detail::path_json(r.path_lower)}};
}

inline nlohmann::json config_echo(const RunConfig& rc) {
  const auto& c = rc.cow;
  nlohmann::json j = {
      {"lambda_m", c.lambda},
      {"theta_rad", c.theta > 0.0 ? nlohmann::json(c.theta) : nlohmann::json(nullptr)},  // null: Bragg
      {"d_m", c.slab.d()},
      {"H_per_m", c.slab.H()},
      {"sigma_ky_rel", c.slab.sigma_ky_rel()},
      {"span_m", c.span_x},
      {"mass_kg", c.species.mass},
      {"hbar_Js", c.constants.hbar},
      {"g_m_per_s2", c.constants.g},
      {"mode", to_string(c.mode)},
  };
  if (rc.atom) {
    const auto& a = *rc.atom;
    j["atom"] = {{"lambda_dB_m", a.lambda_dB},   {"k_transfer_per_m", a.k_transfer},
                 {"span_time_s", a.span_time},   {"mass_kg", a.species.mass},
                 {"label", a.species.label},     {"initial_ky_per_m", a.initial_ky}};
  }
  return j;
}

// JSON object keys are kept sorted, so the dump is deterministic.
inline std::string dump_document(const nlohmann::json& doc) {
  detail::require_finite(doc);
  return doc.dump(2) + "\n";
}

inline nlohmann::json cow_document(const RunConfig& rc, const LoopResult& r, bool with_trace) {
  nlohmann::json doc = {{"schema_version", kSchemaVersion},
                        {"config_echo", config_echo(rc)},
                        {"diagnostics", diagnostics_json(cow_diagnostics(rc.cow, r))}};
  if (with_trace) doc["traces"] = trace_json(r);
  return doc;
}

inline nlohmann::json comparison_document(const RunConfig& rc, const ComparisonReport& report, bool with_trace) {
  nlohmann::json diag = {
      {"first_order_equivalent", report.first_order_equivalent},
      {"neutron", diagnostics_json(cow_diagnostics(rc.cow, report.neutron))},
      {"neutron_first_order", diagnostics_json(cow_diagnostics(rc.cow, report.neutron_first_order))},
      {"atom", diagnostics_json(atom_diagnostics(report.atom))},
  };
  auto residuals = [](const ComparisonReport::Residuals& r) {
    return nlohmann::json{{"dkx_rel", r.dkx_rel},
                          {"defocus_rel_upper", r.defocus_rel_upper},
                          {"defocus_rel_lower", r.defocus_rel_lower},
                          {"closure_rel", r.closure_rel}};
  };
  diag["neutron_residuals"] = residuals(report.neutron_residuals());
  diag["atom_residuals"] = residuals(report.atom_residuals());
  nlohmann::json doc = {{"schema_version", kSchemaVersion},
                        {"config_echo", config_echo(rc)},
                        {"diagnostics", diag}};
  if (with_trace) doc["traces"] = {{"neutron", trace_json(report.neutron)}, {"atom", trace_json(report.atom)}};
  return doc;
}

// RFC-4180 field quoting; only needed for the header, values are plain numbers.
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace cowkin
