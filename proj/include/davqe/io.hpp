// Copyright 2026 The davqe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "davqe/errors.hpp"
#include "davqe/measurement.hpp"
#include "davqe/register.hpp"
#include "davqe/state.hpp"
#include "davqe/version.hpp"
#include "davqe/vqe.hpp"

namespace davqe::io {

// File formats for registers, pulses, measurement plans, run configurations,
// and result tables, plus the checksummed reproducibility header written next
// to every command's outputs. JSON documents carry a schema_version field and
// reject keys they do not define, so stale or misspelled configurations fail
// loudly instead of silently falling back to defaults.

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Checksums and files

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    hash ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

inline std::string fnv1a64_hex(std::string_view text) {
  std::ostringstream out;
  out << std::hex << std::setfill('0') << std::setw(16) << fnv1a64(text);
  return out.str();
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw ParseError("cannot read file: " + path.string());
  }
  return buffer.str();
}

// Writes via a sibling temporary file and renames it over the target, so a
// crash mid-write never leaves a truncated file at the final path.
inline void atomic_write_text(const std::filesystem::path& path,
                              std::string_view text) {
  const std::filesystem::path parent = path.parent_path();
  if (!parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  const std::filesystem::path temp = path.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open for writing: " + temp.string());
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out.good()) {
      std::filesystem::remove(temp);
      throw std::runtime_error("write failed: " + temp.string());
    }
  }
  std::filesystem::rename(temp, path);
}

inline std::string file_checksum_hex(const std::filesystem::path& path) {
  return fnv1a64_hex(read_text_file(path));
}

// ---------------------------------------------------------------------------
// JSON plumbing

inline Json parse_json(const std::string& text, const std::string& context) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(context + ": " + e.what());
  }
}

inline Json load_json_file(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

namespace detail {

inline void require_object(const Json& j, const std::string& context) {
  if (!j.is_object()) {
    throw ParseError(context + ": expected a JSON object");
  }
}

inline void reject_unknown_keys(const Json& j,
                                std::initializer_list<std::string_view> allowed,
                                const std::string& context) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const std::string_view candidate : allowed) {
      if (key == candidate) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParseError(context + ": unknown key \"" + key + "\"");
    }
  }
}

inline void check_schema_version(const Json& j, const std::string& context) {
  if (!j.contains("schema_version")) {
    throw ParseError(context + ": missing schema_version");
  }
  const Json& v = j.at("schema_version");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
    throw ParseError(context + ": schema_version must be " +
                     std::to_string(kSchemaVersion));
  }
}

inline double number_at(const Json& j, const char* key,
                        const std::string& context) {
  const Json& v = j.at(key);
  if (!v.is_number()) {
    throw ParseError(context + ": \"" + key + "\" must be a number");
  }
  return v.get<double>();
}

inline long integer_at(const Json& j, const char* key,
                       const std::string& context) {
  const Json& v = j.at(key);
  if (!v.is_number_integer()) {
    throw ParseError(context + ": \"" + key + "\" must be an integer");
  }
  return v.get<long>();
}

inline bool boolean_at(const Json& j, const char* key,
                       const std::string& context) {
  const Json& v = j.at(key);
  if (!v.is_boolean()) {
    throw ParseError(context + ": \"" + key + "\" must be a boolean");
  }
  return v.get<bool>();
}

inline std::string string_at(const Json& j, const char* key,
                             const std::string& context) {
  const Json& v = j.at(key);
  if (!v.is_string()) {
    throw ParseError(context + ": \"" + key + "\" must be a string");
  }
  return v.get<std::string>();
}

inline std::vector<double> number_array_at(const Json& j, const char* key,
                                           const std::string& context) {
  const Json& v = j.at(key);
  if (!v.is_array()) {
    throw ParseError(context + ": \"" + key + "\" must be an array");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const Json& element : v) {
    if (!element.is_number()) {
      throw ParseError(context + ": \"" + key + "\" must contain numbers");
    }
    out.push_back(element.get<double>());
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Protocol name tables

inline std::string ansatz_name(Ansatz ansatz) {
  switch (ansatz) {
    case Ansatz::UccXY:
      return "ucc-xy";
    case Ansatz::AlternatingAB:
      return "alternating";
    case Ansatz::PhaseSegments:
      return "phase";
    case Ansatz::IterativeSplit:
      return "iterative";
  }
  throw ConstraintError("unknown ansatz tag");
}

inline Ansatz ansatz_from_name(const std::string& name) {
  if (name == "ucc-xy") return Ansatz::UccXY;
  if (name == "alternating") return Ansatz::AlternatingAB;
  if (name == "phase") return Ansatz::PhaseSegments;
  if (name == "iterative") return Ansatz::IterativeSplit;
  throw ParseError("unknown ansatz \"" + name +
                   "\"; expected ucc-xy, alternating, phase, or iterative");
}

inline OptimizerKind optimizer_from_name(const std::string& name) {
  if (name == "nelder-mead") return OptimizerKind::NelderMead;
  if (name == "powell") return OptimizerKind::Powell;
  if (name == "differential-evolution") {
    return OptimizerKind::DifferentialEvolution;
  }
  throw ParseError("unknown optimizer \"" + name +
                   "\"; expected nelder-mead, powell, or "
                   "differential-evolution");
}

// ---------------------------------------------------------------------------
// Register files

inline Json register_to_json(const Register& reg) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = reg.model().kind == InteractionKind::Ising ? "ising" : "xy";
  j["strength"] = reg.model().strength();
  j["min_spacing"] = reg.min_spacing();
  Json positions = Json::array();
  for (const auto& p : reg.positions()) {
    positions.push_back(Json::array({p.x(), p.y()}));
  }
  j["positions"] = std::move(positions);
  return j;
}

inline Register register_from_json(const Json& j) {
  const std::string context = "register";
  detail::require_object(j, context);
  detail::check_schema_version(j, context);
  detail::reject_unknown_keys(
      j, {"schema_version", "kind", "strength", "min_spacing", "positions"},
      context);
  for (const char* key : {"kind", "strength", "min_spacing", "positions"}) {
    if (!j.contains(key)) {
      throw ParseError(context + ": missing \"" + key + "\"");
    }
  }
  const std::string kind = detail::string_at(j, "kind", context);
  InteractionModel model;
  if (kind == "ising") {
    model = InteractionModel::ising(detail::number_at(j, "strength", context));
  } else if (kind == "xy") {
    model = InteractionModel::xy(detail::number_at(j, "strength", context));
  } else {
    throw ParseError(context + ": kind must be \"ising\" or \"xy\"");
  }
  const double min_spacing = detail::number_at(j, "min_spacing", context);
  const Json& positions = j.at("positions");
  if (!positions.is_array()) {
    throw ParseError(context + ": \"positions\" must be an array");
  }
  std::vector<Eigen::Vector2d> points;
  points.reserve(positions.size());
  for (const Json& element : positions) {
    if (!element.is_array() || element.size() != 2 ||
        !element.at(0).is_number() || !element.at(1).is_number()) {
      throw ParseError(context +
                       ": each position must be a two-number array");
    }
    points.emplace_back(element.at(0).get<double>(),
                        element.at(1).get<double>());
  }
  return Register(std::move(points), model, min_spacing);
}

inline Register load_register_file(const std::filesystem::path& path) {
  return register_from_json(load_json_file(path));
}

// ---------------------------------------------------------------------------
// Pulse files

inline Json pulse_params_to_json(const PulseParams& params) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["time_labels"] = params.time_labels;
  j["omegas"] = params.omegas;
  j["deltas"] = params.deltas;
  return j;
}

inline PulseParams pulse_params_from_json(const Json& j) {
  const std::string context = "pulse";
  detail::require_object(j, context);
  detail::check_schema_version(j, context);
  detail::reject_unknown_keys(
      j, {"schema_version", "time_labels", "omegas", "deltas"}, context);
  for (const char* key : {"time_labels", "omegas", "deltas"}) {
    if (!j.contains(key)) {
      throw ParseError(context + ": missing \"" + key + "\"");
    }
  }
  PulseParams params;
  params.time_labels = detail::number_array_at(j, "time_labels", context);
  params.omegas = detail::number_array_at(j, "omegas", context);
  params.deltas = detail::number_array_at(j, "deltas", context);
  return params;
}

inline PulseParams load_pulse_file(const std::filesystem::path& path) {
  return pulse_params_from_json(load_json_file(path));
}

// ---------------------------------------------------------------------------
// Measurement-plan files

inline Json plan_to_json(const DerandomizedPlan& plan) {
  plan.validate();
  if (plan.bases.empty()) {
    throw ConstraintError("cannot serialize an empty measurement plan");
  }
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["epsilon"] = plan.epsilon;
  j["n_qubits"] = plan.bases.front().n_qubits();
  Json bases = Json::array();
  for (const auto& basis : plan.bases) bases.push_back(basis.str());
  j["bases"] = std::move(bases);
  j["repetitions"] = plan.repetitions;
  return j;
}

inline DerandomizedPlan plan_from_json(const Json& j) {
  const std::string context = "plan";
  detail::require_object(j, context);
  detail::check_schema_version(j, context);
  detail::reject_unknown_keys(
      j, {"schema_version", "epsilon", "n_qubits", "bases", "repetitions"},
      context);
  for (const char* key : {"epsilon", "n_qubits", "bases", "repetitions"}) {
    if (!j.contains(key)) {
      throw ParseError(context + ": missing \"" + key + "\"");
    }
  }
  DerandomizedPlan plan;
  plan.epsilon = detail::number_at(j, "epsilon", context);
  const long n_qubits = detail::integer_at(j, "n_qubits", context);
  const Json& bases = j.at("bases");
  if (!bases.is_array() || bases.empty()) {
    throw ParseError(context + ": \"bases\" must be a non-empty array");
  }
  for (const Json& element : bases) {
    if (!element.is_string()) {
      throw ParseError(context + ": \"bases\" must contain strings");
    }
    MeasurementBasis basis = [&] {
      try {
        return MeasurementBasis::parse(element.get<std::string>());
      } catch (const ConstraintError& e) {
        throw ParseError(context + ": " + e.what());
      }
    }();
    if (basis.n_qubits() != n_qubits) {
      throw ParseError(context + ": basis \"" + element.get<std::string>() +
                       "\" does not act on " + std::to_string(n_qubits) +
                       " qubits");
    }
    plan.bases.push_back(std::move(basis));
  }
  const Json& repetitions = j.at("repetitions");
  if (!repetitions.is_array()) {
    throw ParseError(context + ": \"repetitions\" must be an array");
  }
  for (const Json& element : repetitions) {
    if (!element.is_number_integer()) {
      throw ParseError(context + ": \"repetitions\" must contain integers");
    }
    plan.repetitions.push_back(element.get<long>());
  }
  plan.validate();
  return plan;
}

inline DerandomizedPlan load_plan_file(const std::filesystem::path& path) {
  return plan_from_json(load_json_file(path));
}

// ---------------------------------------------------------------------------
// Run configuration

// Settings shared by every command: the optimizer/sampling knobs forwarded to
// the protocol runners plus the physical constants used when constructing
// registers from geometry files that omit them.
struct RunConfig {
  VqeConfig vqe;
  double c6 = kDefaultC6;
  double c3 = kDefaultC3;
  double min_spacing = kDefaultMinSpacing;

  void validate() const {
    auto positive = [](double v, const char* label) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConstraintError(std::string(label) +
                              " must be positive and finite");
      }
    };
    positive(c6, "c6");
    positive(c3, "c3");
    positive(min_spacing, "min_spacing");
    vqe.validate();
  }
};

inline Json param_bounds_to_json(const ParamBounds& bounds) {
  Json j;
  j["omega_min"] = bounds.omega_min;
  j["omega_max"] = bounds.omega_max;
  j["delta_min"] = bounds.delta_min;
  j["delta_max"] = bounds.delta_max;
  j["phase_min"] = bounds.phase_min;
  j["phase_max"] = bounds.phase_max;
  j["duration_min"] = bounds.duration_min;
  j["duration_max"] = bounds.duration_max;
  return j;
}

inline Json run_config_to_json(const RunConfig& cfg) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["ansatz"] = ansatz_name(cfg.vqe.ansatz);
  j["optimizer"] = optimizer_name(cfg.vqe.optimizer);
  j["shot_budget_total"] = cfg.vqe.shot_budget_total;
  j["shots_per_energy"] = cfg.vqe.shots_per_energy;
  j["shots_per_term"] = cfg.vqe.shots_per_term;
  j["evals_per_iteration"] = cfg.vqe.evals_per_iteration;
  j["max_iterations"] = cfg.vqe.max_iterations;
  j["max_optim_evals"] = cfg.vqe.max_optim_evals;
  j["plan_bases"] = cfg.vqe.plan_bases;
  j["epsilon"] = cfg.vqe.epsilon;
  j["t_tot"] = cfg.vqe.t_tot;
  j["min_segment"] = cfg.vqe.min_segment;
  j["fixed_omega"] = cfg.vqe.fixed_omega;
  j["fixed_delta"] = cfg.vqe.fixed_delta;
  j["bounds"] = param_bounds_to_json(cfg.vqe.bounds);
  j["seed"] = cfg.vqe.seed;
  j["exact_mode"] = cfg.vqe.exact_mode;
  j["frozen_noise"] = cfg.vqe.frozen_noise;
  j["n_repeats"] = cfg.vqe.n_repeats;
  j["c6"] = cfg.c6;
  j["c3"] = cfg.c3;
  j["min_spacing"] = cfg.min_spacing;
  return j;
}

inline RunConfig run_config_from_json(const Json& j) {
  const std::string context = "config";
  detail::require_object(j, context);
  detail::check_schema_version(j, context);
  detail::reject_unknown_keys(
      j,
      {"schema_version", "ansatz",        "optimizer",
       "shot_budget_total", "shots_per_energy", "shots_per_term",
       "evals_per_iteration", "max_iterations", "max_optim_evals",
       "plan_bases", "epsilon",       "t_tot",
       "min_segment", "fixed_omega",  "fixed_delta",
       "bounds",      "seed",         "exact_mode",
       "frozen_noise", "n_repeats",   "c6",
       "c3",          "min_spacing"},
      context);
  RunConfig cfg;
  if (j.contains("ansatz")) {
    cfg.vqe.ansatz = ansatz_from_name(detail::string_at(j, "ansatz", context));
  }
  if (j.contains("optimizer")) {
    cfg.vqe.optimizer =
        optimizer_from_name(detail::string_at(j, "optimizer", context));
  }
  if (j.contains("shot_budget_total")) {
    cfg.vqe.shot_budget_total =
        detail::integer_at(j, "shot_budget_total", context);
  }
  if (j.contains("shots_per_energy")) {
    cfg.vqe.shots_per_energy =
        detail::integer_at(j, "shots_per_energy", context);
  }
  if (j.contains("shots_per_term")) {
    cfg.vqe.shots_per_term = detail::integer_at(j, "shots_per_term", context);
  }
  if (j.contains("evals_per_iteration")) {
    cfg.vqe.evals_per_iteration =
        static_cast<int>(detail::integer_at(j, "evals_per_iteration", context));
  }
  if (j.contains("max_iterations")) {
    cfg.vqe.max_iterations =
        static_cast<int>(detail::integer_at(j, "max_iterations", context));
  }
  if (j.contains("max_optim_evals")) {
    cfg.vqe.max_optim_evals = detail::integer_at(j, "max_optim_evals", context);
  }
  if (j.contains("plan_bases")) {
    cfg.vqe.plan_bases =
        static_cast<int>(detail::integer_at(j, "plan_bases", context));
  }
  if (j.contains("epsilon")) {
    cfg.vqe.epsilon = detail::number_at(j, "epsilon", context);
  }
  if (j.contains("t_tot")) {
    cfg.vqe.t_tot = detail::number_at(j, "t_tot", context);
  }
  if (j.contains("min_segment")) {
    cfg.vqe.min_segment = detail::number_at(j, "min_segment", context);
  }
  if (j.contains("fixed_omega")) {
    cfg.vqe.fixed_omega = detail::number_at(j, "fixed_omega", context);
  }
  if (j.contains("fixed_delta")) {
    cfg.vqe.fixed_delta = detail::number_at(j, "fixed_delta", context);
  }
  if (j.contains("bounds")) {
    const Json& b = j.at("bounds");
    const std::string bounds_context = "config.bounds";
    detail::require_object(b, bounds_context);
    detail::reject_unknown_keys(
        b,
        {"omega_min", "omega_max", "delta_min", "delta_max", "phase_min",
         "phase_max", "duration_min", "duration_max"},
        bounds_context);
    ParamBounds& bounds = cfg.vqe.bounds;
    if (b.contains("omega_min")) {
      bounds.omega_min = detail::number_at(b, "omega_min", bounds_context);
    }
    if (b.contains("omega_max")) {
      bounds.omega_max = detail::number_at(b, "omega_max", bounds_context);
    }
    if (b.contains("delta_min")) {
      bounds.delta_min = detail::number_at(b, "delta_min", bounds_context);
    }
    if (b.contains("delta_max")) {
      bounds.delta_max = detail::number_at(b, "delta_max", bounds_context);
    }
    if (b.contains("phase_min")) {
      bounds.phase_min = detail::number_at(b, "phase_min", bounds_context);
    }
    if (b.contains("phase_max")) {
      bounds.phase_max = detail::number_at(b, "phase_max", bounds_context);
    }
    if (b.contains("duration_min")) {
      bounds.duration_min =
          detail::number_at(b, "duration_min", bounds_context);
    }
    if (b.contains("duration_max")) {
      bounds.duration_max =
          detail::number_at(b, "duration_max", bounds_context);
    }
  }
  if (j.contains("seed")) {
    const long seed = detail::integer_at(j, "seed", context);
    if (seed < 0) {
      throw ParseError(context + ": \"seed\" must be non-negative");
    }
    cfg.vqe.seed = static_cast<std::uint64_t>(seed);
  }
  if (j.contains("exact_mode")) {
    cfg.vqe.exact_mode = detail::boolean_at(j, "exact_mode", context);
  }
  if (j.contains("frozen_noise")) {
    cfg.vqe.frozen_noise = detail::boolean_at(j, "frozen_noise", context);
  }
  if (j.contains("n_repeats")) {
    cfg.vqe.n_repeats =
        static_cast<int>(detail::integer_at(j, "n_repeats", context));
  }
  if (j.contains("c6")) cfg.c6 = detail::number_at(j, "c6", context);
  if (j.contains("c3")) cfg.c3 = detail::number_at(j, "c3", context);
  if (j.contains("min_spacing")) {
    cfg.min_spacing = detail::number_at(j, "min_spacing", context);
  }
  cfg.validate();
  return cfg;
}

inline RunConfig load_config_file(const std::filesystem::path& path) {
  return run_config_from_json(load_json_file(path));
}

// ---------------------------------------------------------------------------
// Result tables

inline std::string format_number(double value) {
  std::ostringstream out;
  out << std::setprecision(17) << value;
  return out.str();
}

inline std::string trace_to_csv(const VqeTrace& trace) {
  std::ostringstream out;
  out << "iteration,energy_estimate,cumulative_shots,wall_time,parameters\n";
  for (const auto& record : trace.records) {
    out << record.iteration << ',' << format_number(record.energy_estimate)
        << ',' << record.cumulative_shots << ','
        << format_number(record.wall_time) << ',';
    for (std::size_t k = 0; k < record.parameters.size(); ++k) {
      if (k > 0) out << ';';
      out << format_number(record.parameters[k]);
    }
    out << '\n';
  }
  return out.str();
}

inline std::string scan_to_csv(const std::vector<ScanEntry>& entries) {
  std::ostringstream out;
  out << "rank,bitstring,error,mean_energy\n";
  for (std::size_t k = 0; k < entries.size(); ++k) {
    out << (k + 1) << ',' << entries[k].bitstring << ','
        << format_number(entries[k].error) << ','
        << format_number(entries[k].mean_energy) << '\n';
  }
  return out.str();
}

inline std::string objective_trace_to_csv(const std::vector<double>& values) {
  std::ostringstream out;
  out << "eval,objective\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    out << (k + 1) << ',' << format_number(values[k]) << '\n';
  }
  return out.str();
}

// One row per basis index; the bitstring column is ket style, qubit 0
// rightmost.
inline std::string state_to_csv(const QuantumState& state) {
  const int n = state.n_qubits();
  std::ostringstream out;
  out << "index,bitstring,amplitude_re,amplitude_im,probability\n";
  for (Eigen::Index b = 0; b < state.dim(); ++b) {
    std::string bits(static_cast<std::size_t>(n), '0');
    for (int qubit = 0; qubit < n; ++qubit) {
      if ((static_cast<std::uint64_t>(b) >> qubit) & 1ULL) {
        bits[static_cast<std::size_t>(n - 1 - qubit)] = '1';
      }
    }
    const std::complex<double> amplitude = state.amplitudes()(b);
    out << b << ',' << bits << ',' << format_number(amplitude.real()) << ','
        << format_number(amplitude.imag()) << ','
        << format_number(std::norm(amplitude)) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Reproducibility header

// Every command writes this next to its outputs: code version, the exact
// command line, the fully resolved configuration, and a checksum of every
// input file, which together pin down the run.
inline Json run_header(const std::string& command_line, const RunConfig& cfg,
                       const std::vector<std::pair<std::string, std::string>>&
                           input_checksums) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["code_version"] = kVersionString;
  j["command"] = command_line;
  j["config"] = run_config_to_json(cfg);
  Json inputs = Json::object();
  for (const auto& [path, checksum] : input_checksums) {
    inputs[path] = checksum;
  }
  j["inputs"] = std::move(inputs);
  return j;
}

// ---------------------------------------------------------------------------
// Fixture manifest

struct FixtureEntry {
  std::string name;
  std::string file;  // relative to the manifest's directory
  int qubits = 0;
  long terms = 0;
  std::string units;
  std::string checksum_fnv1a64;
  std::string description;
  double bond_length_angstrom = 0.0;  // 0 when not recorded
};

inline std::vector<FixtureEntry> load_fixture_manifest(
    const std::filesystem::path& manifest_path) {
  const Json j = load_json_file(manifest_path);
  const std::string context = "manifest";
  detail::require_object(j, context);
  detail::check_schema_version(j, context);
  detail::reject_unknown_keys(j, {"schema_version", "fixtures"}, context);
  if (!j.contains("fixtures") || !j.at("fixtures").is_array()) {
    throw ParseError(context + ": missing \"fixtures\" array");
  }
  std::vector<FixtureEntry> entries;
  for (const Json& f : j.at("fixtures")) {
    detail::require_object(f, context);
    detail::reject_unknown_keys(
        f,
        {"name", "file", "qubits", "terms", "units", "checksum_fnv1a64",
         "description", "bond_length_angstrom"},
        context);
    for (const char* key :
         {"name", "file", "qubits", "terms", "units", "checksum_fnv1a64",
          "description"}) {
      if (!f.contains(key)) {
        throw ParseError(context + ": fixture missing \"" + key + "\"");
      }
    }
    FixtureEntry entry;
    entry.name = detail::string_at(f, "name", context);
    entry.file = detail::string_at(f, "file", context);
    entry.qubits = static_cast<int>(detail::integer_at(f, "qubits", context));
    entry.terms = detail::integer_at(f, "terms", context);
    entry.units = detail::string_at(f, "units", context);
    entry.checksum_fnv1a64 =
        detail::string_at(f, "checksum_fnv1a64", context);
    entry.description = detail::string_at(f, "description", context);
    if (f.contains("bond_length_angstrom")) {
      entry.bond_length_angstrom =
          detail::number_at(f, "bond_length_angstrom", context);
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

// Checks the checksum, qubit count, and term count of one manifest entry
// against the fixture file on disk.
inline void verify_fixture(const FixtureEntry& entry,
                           const std::filesystem::path& base_dir) {
  const std::filesystem::path path = base_dir / entry.file;
  const std::string text = read_text_file(path);
  const std::string checksum = fnv1a64_hex(text);
  if (checksum != entry.checksum_fnv1a64) {
    throw ParseError("fixture " + entry.name + ": checksum " + checksum +
                     " does not match manifest value " +
                     entry.checksum_fnv1a64);
  }
  const PauliHamiltonian h = parse_hamiltonian(text);
  if (h.n_qubits() != entry.qubits) {
    throw ParseError("fixture " + entry.name + ": qubit count " +
                     std::to_string(h.n_qubits()) +
                     " does not match manifest value " +
                     std::to_string(entry.qubits));
  }
  if (static_cast<long>(h.size()) != entry.terms) {
    throw ParseError("fixture " + entry.name + ": term count " +
                     std::to_string(h.size()) +
                     " does not match manifest value " +
                     std::to_string(entry.terms));
  }
}

}  // namespace davqe::io
