#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "distortion.hpp"
#include "finite_metric.hpp"
#include "hgroup.hpp"
#include "hlie.hpp"
#include "inversion.hpp"

namespace hlab {

using nlohmann::json;

inline std::string hex64(std::uint64_t x) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

inline json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json point_json(const GroupPoint& p) { return {{"v", vector_json(p.v)}, {"z", vector_json(p.z)}}; }

inline json algebra_summary(const HTypeAlgebra& alg) {
  return {{"label", alg.label()},
          {"dim_v", alg.dim_v()},
          {"dim_z", alg.dim_z()},
          {"fingerprint", hex64(alg.fingerprint())}};
}

inline json to_json(const HTypeReport& r) {
  return {{"is_h_type", r.is_h_type},
          {"max_residual", r.max_residual},
          {"square_residual", r.square_residual},
          {"samples", r.samples},
          {"seed", r.seed},
          {"tolerance", r.tolerance}};
}

inline json to_json(const J2Report& r) {
  json j{{"satisfies_j2", r.satisfies_j2},
         {"max_residual", r.max_residual},
         {"samples", r.samples},
         {"seed", r.seed},
         {"tolerance", r.tolerance},
         {"witness", nullptr}};
  if (r.witness)
    j["witness"] = {{"x", vector_json(r.witness->x)},
                    {"z", vector_json(r.witness->z)},
                    {"z_prime", vector_json(r.witness->z_prime)},
                    {"residual", r.witness->residual}};
  return j;
}

inline json to_json(const InversionReport& r) {
  return {{"algebra_label", r.algebra_label},
          {"algebra_fingerprint", hex64(r.algebra_fingerprint)},
          {"samples", r.samples},
          {"seed", r.seed},
          {"tolerance", r.tolerance},
          {"max_relative_deviation", r.max_relative_deviation},
          {"is_exact_inversion", r.is_exact_inversion},
          {"worst_pair", {{"index", r.worst_index}, {"p", point_json(r.worst_p)}, {"q", point_json(r.worst_q)}}}};
}

inline json to_json(const SandwichReport& r) {
  return {{"lower_excess", r.lower_excess}, {"upper_excess", r.upper_excess}, {"holds", r.holds}};
}

inline json to_json(const QuasimobiusReport& r) {
  json env = json::array();
  for (const auto& b : r.envelope) env.push_back({{"bin", b.bin}, {"t_max", b.t_max}, {"t_prime_max", b.t_prime_max}});
  return {{"kind", "quasimobius"},
          {"samples", r.samples},
          {"seed", r.seed},
          {"evaluated", r.evaluated},
          {"degenerate", r.degenerate},
          {"strong_constant", r.strong_constant},
          {"min_ratio", r.min_ratio},
          {"envelope_bins_per_decade", envelope_bins_per_decade},
          {"envelope", env}};
}

inline json to_json(const QcReport& r) {
  json scales = json::array();
  for (const auto& s : r.scales) {
    scales.push_back({{"radius", s.radius},
                      {"ratio", s.insufficient ? json(nullptr) : json(s.ratio)},
                      {"sup", s.sup},
                      {"inf", s.insufficient ? json(nullptr) : json(s.inf)},
                      {"inner", s.inner},
                      {"outer", s.outer},
                      {"insufficient_sampling", s.insufficient}});
  }
  return {{"kind", "quasiconformal"},
          {"heuristic", "finite-scale surrogate of the limsup; a decreasing ratio suggests the limit"},
          {"samples", r.samples},
          {"seed", r.seed},
          {"annulus_width", r.annulus_width},
          {"scales", scales}};
}

inline json to_json(const RegularityReport& r) {
  json scales = json::array();
  for (const auto& s : r.scales) scales.push_back({{"radius", s.radius}, {"hits", s.hits}, {"volume", s.volume}});
  return {{"kind", "regularity"},
          {"samples", r.samples},
          {"seed", r.seed},
          {"homogeneous_dimension", r.homogeneous_dimension},
          {"fitted_q", r.fitted_q},
          {"intercept", r.intercept},
          {"residual", r.residual},
          {"scales", scales}};
}

}  // namespace hlab
