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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "davqe/dense.hpp"
#include "davqe/errors.hpp"
#include "davqe/io.hpp"
#include "davqe/measurement.hpp"
#include "davqe/pauli.hpp"
#include "davqe/register.hpp"
#include "davqe/rng.hpp"
#include "davqe/state.hpp"
#include "davqe/version.hpp"
#include "davqe/vqe.hpp"

namespace {

namespace fs = std::filesystem;
using davqe::io::Json;

std::string quote_arg(const std::string& arg) {
  if (arg.find_first_of(" \t\"'") == std::string::npos) return arg;
  std::string quoted = "'";
  for (const char c : arg) {
    if (c == '\'') {
      quoted += "'\\''";
    } else {
      quoted += c;
    }
  }
  quoted += "'";
  return quoted;
}

std::string join_command(int argc, char** argv) {
  std::string line;
  for (int k = 0; k < argc; ++k) {
    if (k > 0) line += ' ';
    line += quote_arg(argv[k]);
  }
  return line;
}

// Reads input files while recording a checksum of each one for the
// reproducibility header.
struct InputLog {
  std::vector<std::pair<std::string, std::string>> checksums;

  std::string load(const std::string& path) {
    std::string text = davqe::io::read_text_file(path);
    checksums.emplace_back(path, davqe::io::fnv1a64_hex(text));
    return text;
  }
};

struct CommonState {
  std::string config_path;
  long long seed = -1;
  int jobs = 1;
  std::string out_dir = "davqe-out";
  std::string command_line;

  davqe::io::RunConfig config(InputLog& inputs) const {
    davqe::io::RunConfig cfg;
    if (!config_path.empty()) {
      cfg = davqe::io::run_config_from_json(
          davqe::io::parse_json(inputs.load(config_path), config_path));
    }
    if (seed >= 0) {
      cfg.vqe.seed = static_cast<std::uint64_t>(seed);
    }
    return cfg;
  }

  fs::path out(const std::string& name) const {
    return fs::path(out_dir) / name;
  }
};

void write_header(const CommonState& common, const davqe::io::RunConfig& cfg,
                  const InputLog& inputs) {
  const Json header =
      davqe::io::run_header(common.command_line, cfg, inputs.checksums);
  davqe::io::atomic_write_text(common.out("run_header.json"),
                               header.dump(2) + "\n");
}

davqe::PauliHamiltonian load_hamiltonian(InputLog& inputs,
                                         const std::string& path) {
  return davqe::parse_hamiltonian(inputs.load(path));
}

davqe::Register load_register(InputLog& inputs, const std::string& path) {
  return davqe::io::register_from_json(
      davqe::io::parse_json(inputs.load(path), path));
}

davqe::Register line_register(int n_atoms, double spacing,
                              const davqe::io::RunConfig& cfg) {
  std::vector<Eigen::Vector2d> positions;
  positions.reserve(static_cast<std::size_t>(n_atoms));
  for (int k = 0; k < n_atoms; ++k) {
    positions.emplace_back(spacing * k, 0.0);
  }
  return davqe::Register(std::move(positions),
                         davqe::InteractionModel::ising(cfg.c6),
                         cfg.min_spacing);
}

std::string default_bits(int n_qubits, const std::string& given) {
  if (given.empty()) {
    return std::string(static_cast<std::size_t>(n_qubits), '0');
  }
  if (static_cast<int>(given.size()) != n_qubits) {
    throw davqe::ConstraintError("initial bitstring has " +
                                 std::to_string(given.size()) +
                                 " bits, expected " +
                                 std::to_string(n_qubits));
  }
  return given;
}

std::vector<std::pair<davqe::PauliString, double>> weighted_observables(
    const davqe::PauliHamiltonian& h) {
  std::vector<std::pair<davqe::PauliString, double>> observables;
  for (const auto& term : h.non_identity_terms()) {
    observables.emplace_back(term.string, std::abs(term.coefficient));
  }
  return observables;
}

// ---------------------------------------------------------------------------
// embed

struct EmbedOpts {
  std::string ham_path;
  std::string init_register_path;
  double spacing = 12.0;
  int n_starts = 10;
  double box = 60.0;
  long long max_evals = 20000;
};

void cmd_embed(const CommonState& common, const EmbedOpts& opts) {
  InputLog inputs;
  const davqe::io::RunConfig cfg = common.config(inputs);
  const davqe::PauliHamiltonian h = load_hamiltonian(inputs, opts.ham_path);

  const davqe::TargetMatrix target = davqe::target_matrix(h, h.n_qubits());
  if (target.selected_terms == 0) {
    std::cerr << "warning: no embeddable two-body couplings in "
              << opts.ham_path
              << "; optimizing a repulsion-only geometry\n";
  }

  const davqe::Register init =
      opts.init_register_path.empty()
          ? line_register(h.n_qubits(), opts.spacing, cfg)
          : load_register(inputs, opts.init_register_path);
  if (init.n_atoms() != h.n_qubits()) {
    throw davqe::ConstraintError(
        "embed: initial register has " + std::to_string(init.n_atoms()) +
        " atoms for a " + std::to_string(h.n_qubits()) +
        "-qubit Hamiltonian");
  }

  davqe::EmbedOptions embed_opts;
  embed_opts.box_halfwidth = opts.box;
  embed_opts.n_starts = opts.n_starts;
  embed_opts.max_evals = static_cast<long>(opts.max_evals);
  embed_opts.seed = cfg.vqe.seed;

  const davqe::EmbedResult result =
      davqe::optimize_register(target.values, init, embed_opts);
  const davqe::Register final_register(result.positions, init.model(),
                                       init.min_spacing());

  davqe::io::atomic_write_text(
      common.out("register.json"),
      davqe::io::register_to_json(final_register).dump(2) + "\n");
  davqe::io::atomic_write_text(
      common.out("embed_trace.csv"),
      davqe::io::objective_trace_to_csv(result.objective_trace));
  Json summary;
  summary["schema_version"] = davqe::kSchemaVersion;
  summary["score"] = result.score;
  summary["selected_terms"] = target.selected_terms;
  summary["winning_start"] = result.winning_start;
  summary["search_feasible"] = result.search_feasible;
  summary["n_atoms"] = final_register.n_atoms();
  davqe::io::atomic_write_text(common.out("embed_summary.json"),
                               summary.dump(2) + "\n");
  write_header(common, cfg, inputs);

  std::cout << "embedded " << h.n_qubits() << " qubits: score "
            << davqe::io::format_number(result.score) << ", "
            << target.selected_terms << " coupling terms, feasible "
            << (result.search_feasible ? "yes" : "no") << "\n"
            << "wrote " << common.out("register.json").string() << "\n";
}

// ---------------------------------------------------------------------------
// evolve

struct EvolveOpts {
  std::string register_path;
  std::string pulse_path;
  std::string init_bits;
};

void cmd_evolve(const CommonState& common, const EvolveOpts& opts) {
  InputLog inputs;
  const davqe::io::RunConfig cfg = common.config(inputs);
  const davqe::Register reg = load_register(inputs, opts.register_path);
  davqe::PulseParams pulse = davqe::io::pulse_params_from_json(
      davqe::io::parse_json(inputs.load(opts.pulse_path), opts.pulse_path));
  if (pulse.time_labels.empty()) {
    throw davqe::ConstraintError("evolve: pulse has no segments");
  }
  pulse.validate(cfg.vqe.min_segment, pulse.time_labels.back());

  const std::string bits = default_bits(reg.n_atoms(), opts.init_bits);
  const davqe::QuantumState state =
      davqe::pulse_state(reg, pulse, bits, cfg.vqe.min_segment);

  davqe::io::atomic_write_text(common.out("state.csv"),
                               davqe::io::state_to_csv(state));
  write_header(common, cfg, inputs);

  Eigen::Index peak = 0;
  state.amplitudes().cwiseAbs2().maxCoeff(&peak);
  std::cout << "evolved " << reg.n_atoms() << " qubits over "
            << pulse.n_intervals() << " segments to t = "
            << pulse.time_labels.back() << " us; peak basis index " << peak
            << " with probability "
            << davqe::io::format_number(
                   std::norm(state.amplitudes()(peak)))
            << "\n"
            << "wrote " << common.out("state.csv").string() << "\n";
}

// ---------------------------------------------------------------------------
// derandomize

struct DerandomizeOpts {
  std::string ham_path;
  long long bases = -1;
  double epsilon = -1.0;
  long long shots = -1;
};

void cmd_derandomize(const CommonState& common, const DerandomizeOpts& opts) {
  InputLog inputs;
  const davqe::io::RunConfig cfg = common.config(inputs);
  const davqe::PauliHamiltonian h = load_hamiltonian(inputs, opts.ham_path);

  const int bases =
      opts.bases >= 0 ? static_cast<int>(opts.bases) : cfg.vqe.plan_bases;
  const double epsilon = opts.epsilon >= 0.0 ? opts.epsilon : cfg.vqe.epsilon;
  davqe::DerandomizedPlan plan = davqe::derandomize_for(h, bases, epsilon);
  if (opts.shots >= 0) {
    plan = davqe::allocate_shots(plan, static_cast<long>(opts.shots),
                                 weighted_observables(h));
  }

  davqe::io::atomic_write_text(common.out("plan.json"),
                               davqe::io::plan_to_json(plan).dump(2) + "\n");
  write_header(common, cfg, inputs);

  std::cout << "plan for " << h.non_identity_terms().size() << " terms: "
            << plan.bases.size() << " distinct bases from " << bases
            << " requested, " << plan.total_shots() << " total shots\n"
            << "wrote " << common.out("plan.json").string() << "\n";
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOpts {
  std::string ham_path;
  std::string register_path;
  std::string pulse_path;
  std::string plan_path;
  std::string init_bits;
  long long shots = -1;
  bool exact = false;
};

void cmd_estimate(const CommonState& common, const EstimateOpts& opts) {
  InputLog inputs;
  const davqe::io::RunConfig cfg = common.config(inputs);
  const davqe::PauliHamiltonian h = load_hamiltonian(inputs, opts.ham_path);

  davqe::QuantumState state = davqe::QuantumState::zero_state(h.n_qubits());
  if (!opts.register_path.empty()) {
    const davqe::Register reg = load_register(inputs, opts.register_path);
    if (reg.n_atoms() != h.n_qubits()) {
      throw davqe::ConstraintError(
          "estimate: register has " + std::to_string(reg.n_atoms()) +
          " atoms for a " + std::to_string(h.n_qubits()) +
          "-qubit Hamiltonian");
    }
    const std::string bits = default_bits(reg.n_atoms(), opts.init_bits);
    if (!opts.pulse_path.empty()) {
      davqe::PulseParams pulse = davqe::io::pulse_params_from_json(
          davqe::io::parse_json(inputs.load(opts.pulse_path),
                                opts.pulse_path));
      if (pulse.time_labels.empty()) {
        throw davqe::ConstraintError("estimate: pulse has no segments");
      }
      pulse.validate(cfg.vqe.min_segment, pulse.time_labels.back());
      state = davqe::pulse_state(reg, pulse, bits, cfg.vqe.min_segment);
    } else {
      state = davqe::prepare_product_state(bits);
    }
  } else {
    if (!opts.pulse_path.empty()) {
      throw davqe::ConstraintError("estimate: --pulse requires --register");
    }
    state = davqe::prepare_product_state(
        default_bits(h.n_qubits(), opts.init_bits));
  }

  const double state_expectation = davqe::expectation(h, state);
  Json summary;
  summary["schema_version"] = davqe::kSchemaVersion;
  summary["state_expectation"] = state_expectation;

  double energy = state_expectation;
  if (opts.exact) {
    summary["mode"] = "exact";
    summary["energy"] = energy;
    summary["total_shots"] = 0;
  } else {
    davqe::DerandomizedPlan plan;
    bool reallocate = opts.shots >= 0;
    if (!opts.plan_path.empty()) {
      plan = davqe::io::plan_from_json(davqe::io::parse_json(
          inputs.load(opts.plan_path), opts.plan_path));
      if (plan.bases.front().n_qubits() != h.n_qubits()) {
        throw davqe::ConstraintError(
            "estimate: plan and Hamiltonian qubit counts differ");
      }
    } else {
      plan = davqe::derandomize_for(h, cfg.vqe.plan_bases, cfg.vqe.epsilon);
      reallocate = true;
    }
    if (reallocate) {
      const long budget = opts.shots >= 0 ? static_cast<long>(opts.shots)
                                          : cfg.vqe.shots_per_energy;
      plan = davqe::allocate_shots(plan, budget, weighted_observables(h));
    }
    const davqe::EnergyEstimate estimate = davqe::estimate_with_plan(
        h, state, plan, davqe::mix_seed(cfg.vqe.seed, 0));
    energy = estimate.energy;
    summary["mode"] = "sampled";
    summary["energy"] = energy;
    summary["total_shots"] = plan.total_shots();
    summary["n_bases"] = plan.bases.size();
    summary["uncovered_terms"] = estimate.uncovered.size();

    const auto terms = h.non_identity_terms();
    std::ostringstream per_term;
    per_term << "term,coefficient,average\n";
    for (std::size_t s = 0; s < terms.size(); ++s) {
      per_term << terms[s].string.str() << ','
               << davqe::io::format_number(terms[s].coefficient) << ','
               << davqe::io::format_number(estimate.per_term[s]) << '\n';
    }
    davqe::io::atomic_write_text(common.out("per_term.csv"), per_term.str());
  }
  summary["absolute_error_vs_expectation"] =
      std::abs(energy - state_expectation);

  davqe::io::atomic_write_text(common.out("estimate.json"),
                               summary.dump(2) + "\n");
  write_header(common, cfg, inputs);

  std::cout << "energy " << davqe::io::format_number(energy)
            << " (state expectation "
            << davqe::io::format_number(state_expectation) << ", difference "
            << davqe::io::format_number(std::abs(energy - state_expectation))
            << ")\n"
            << "wrote " << common.out("estimate.json").string() << "\n";
}

// ---------------------------------------------------------------------------
// vqe

struct VqeOpts {
  std::string ham_path;
  std::string register_path;
  std::string ansatz;
  std::string optimizer;
  std::string init_bits;
  int layers = 3;
  int seeds = 1;
  long long budget = -1;
  long long shots_per_energy = -1;
  long long max_optim_evals = -1;
  int epi = -1;
  int max_iterations = -1;
  bool exact = false;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  davqe::VqeTrace trace;
};

void cmd_vqe(const CommonState& common, const VqeOpts& opts) {
  InputLog inputs;
  davqe::io::RunConfig cfg = common.config(inputs);
  const davqe::PauliHamiltonian h = load_hamiltonian(inputs, opts.ham_path);
  const davqe::Register reg = load_register(inputs, opts.register_path);

  if (!opts.ansatz.empty()) {
    cfg.vqe.ansatz = davqe::io::ansatz_from_name(opts.ansatz);
  }
  if (!opts.optimizer.empty()) {
    cfg.vqe.optimizer = davqe::io::optimizer_from_name(opts.optimizer);
  }
  if (opts.budget >= 0) cfg.vqe.shot_budget_total = opts.budget;
  if (opts.shots_per_energy >= 0) {
    cfg.vqe.shots_per_energy = opts.shots_per_energy;
  }
  if (opts.max_optim_evals >= 0) cfg.vqe.max_optim_evals = opts.max_optim_evals;
  if (opts.epi >= 0) cfg.vqe.evals_per_iteration = opts.epi;
  if (opts.max_iterations >= 0) cfg.vqe.max_iterations = opts.max_iterations;
  if (opts.exact) cfg.vqe.exact_mode = true;
  if (opts.seeds < 1) {
    throw davqe::ConstraintError("vqe: --seeds must be at least 1");
  }

  const std::string bits = default_bits(reg.n_atoms(), opts.init_bits);
  const bool exact_known = h.n_qubits() <= davqe::kDefaultMatrixQubitCap;
  const double e_exact =
      exact_known ? davqe::ground_energy_exact(h) : 0.0;

  const int n_seeds = opts.seeds;
  const std::uint64_t base_seed = cfg.vqe.seed;
  std::vector<SeedOutcome> outcomes(static_cast<std::size_t>(n_seeds));
  const int n_threads = std::max(1, std::min(common.jobs, n_seeds));

  auto run_one = [&](int index) {
    davqe::VqeConfig run_cfg = cfg.vqe;
    run_cfg.seed = base_seed + static_cast<std::uint64_t>(index);
    SeedOutcome outcome;
    outcome.seed = run_cfg.seed;
    switch (run_cfg.ansatz) {
      case davqe::Ansatz::UccXY:
        outcome.trace = davqe::run_ucc_xy(h, reg, run_cfg);
        break;
      case davqe::Ansatz::AlternatingAB:
        outcome.trace = davqe::run_alternating(h, reg, opts.layers, run_cfg);
        break;
      case davqe::Ansatz::PhaseSegments:
        outcome.trace = davqe::run_phase_ansatz(h, reg, opts.layers, run_cfg);
        break;
      case davqe::Ansatz::IterativeSplit:
        outcome.trace = davqe::run_iterative_pulse(h, reg, run_cfg, bits);
        break;
    }
    outcomes[static_cast<std::size_t>(index)] = std::move(outcome);
  };

  if (n_threads == 1) {
    for (int index = 0; index < n_seeds; ++index) run_one(index);
  } else {
    std::vector<std::exception_ptr> failures(
        static_cast<std::size_t>(n_threads));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t]() {
        try {
          for (int index = t; index < n_seeds; index += n_threads) {
            run_one(index);
          }
        } catch (...) {
          failures[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
    for (auto& worker : pool) worker.join();
    for (const auto& failure : failures) {
      if (failure) std::rethrow_exception(failure);
    }
  }

  std::ostringstream table;
  table << "seed,best_energy,relative_error,total_shots,records\n";
  Json rows = Json::array();
  for (const auto& outcome : outcomes) {
    const double best = outcome.trace.best_energy;
    Json row;
    row["seed"] = outcome.seed;
    row["best_energy"] = best;
    row["total_shots"] = outcome.trace.total_shots();
    row["records"] = outcome.trace.records.size();
    table << outcome.seed << ',' << davqe::io::format_number(best) << ',';
    if (exact_known) {
      const double rel = davqe::relative_error(e_exact, best);
      row["relative_error"] = rel;
      table << davqe::io::format_number(rel);
    } else {
      row["relative_error"] = nullptr;
      table << "nan";
    }
    table << ',' << outcome.trace.total_shots() << ','
          << outcome.trace.records.size() << '\n';
    davqe::io::atomic_write_text(
        common.out("trace_seed_" + std::to_string(outcome.seed) + ".csv"),
        davqe::io::trace_to_csv(outcome.trace));
  }
  davqe::io::atomic_write_text(common.out("summary.csv"), table.str());

  Json summary;
  summary["schema_version"] = davqe::kSchemaVersion;
  summary["ansatz"] = davqe::io::ansatz_name(cfg.vqe.ansatz);
  summary["optimizer"] = davqe::optimizer_name(cfg.vqe.optimizer);
  if (exact_known) {
    summary["ground_energy_exact"] = e_exact;
  } else {
    summary["ground_energy_exact"] = nullptr;
  }
  summary["seeds"] = std::move(rows);
  davqe::io::atomic_write_text(common.out("summary.json"),
                               summary.dump(2) + "\n");
  write_header(common, cfg, inputs);

  for (const auto& outcome : outcomes) {
    std::cout << "seed " << outcome.seed << ": best "
              << davqe::io::format_number(outcome.trace.best_energy);
    if (exact_known) {
      std::cout << " (relative error "
                << davqe::io::format_number(davqe::relative_error(
                       e_exact, outcome.trace.best_energy))
                << ")";
    }
    std::cout << ", " << outcome.trace.total_shots() << " shots, "
              << outcome.trace.records.size() << " records\n";
  }
  std::cout << "wrote " << common.out("summary.csv").string() << "\n";
}

// ---------------------------------------------------------------------------
// scan-init

struct ScanOpts {
  std::string ham_path;
  std::string register_path;
  int repeats = -1;
  int epi = -1;
  bool exact = false;
};

void cmd_scan_init(const CommonState& common, const ScanOpts& opts) {
  InputLog inputs;
  davqe::io::RunConfig cfg = common.config(inputs);
  const davqe::PauliHamiltonian h = load_hamiltonian(inputs, opts.ham_path);
  const davqe::Register reg = load_register(inputs, opts.register_path);

  if (opts.repeats >= 0) cfg.vqe.n_repeats = opts.repeats;
  if (opts.epi >= 0) cfg.vqe.evals_per_iteration = opts.epi;
  if (opts.exact) cfg.vqe.exact_mode = true;

  const std::vector<davqe::ScanEntry> entries =
      davqe::scan_product_states(h, reg, cfg.vqe);

  davqe::io::atomic_write_text(common.out("scan.csv"),
                               davqe::io::scan_to_csv(entries));
  write_header(common, cfg, inputs);

  const std::size_t shown = std::min<std::size_t>(entries.size(), 5);
  std::cout << "ranked " << entries.size() << " product states:\n";
  for (std::size_t k = 0; k < shown; ++k) {
    std::cout << "  " << (k + 1) << ". |" << entries[k].bitstring
              << "> error " << davqe::io::format_number(entries[k].error)
              << " mean energy "
              << davqe::io::format_number(entries[k].mean_energy) << "\n";
  }
  std::cout << "wrote " << common.out("scan.csv").string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"digital-analog variational eigensolver for neutral-atom "
               "arrays"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(davqe::kVersionString));
  app.footer("exit codes: 0 success, 1 unexpected error, 2 parse error, "
             "3 constraint violation, 4 budget exhausted, 5 numeric failure");

  CommonState common;
  common.command_line = join_command(argc, argv);
  app.add_option("--config", common.config_path,
                 "JSON run configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "master seed override");
  app.add_option("--jobs", common.jobs,
                 "worker threads for independent seeds")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", common.out_dir, "output directory");

  EmbedOpts embed_opts;
  CLI::App* embed = app.add_subcommand(
      "embed", "optimize atom positions to mirror a Hamiltonian's couplings");
  embed->fallthrough();
  embed->add_option("--ham", embed_opts.ham_path, "Hamiltonian file")
      ->required()
      ->check(CLI::ExistingFile);
  embed->add_option("--init-register", embed_opts.init_register_path,
                    "starting register JSON (default: a line)")
      ->check(CLI::ExistingFile);
  embed->add_option("--spacing", embed_opts.spacing,
                    "line spacing in um for the default start");
  embed->add_option("--n-starts", embed_opts.n_starts,
                    "random restarts")
      ->check(CLI::PositiveNumber);
  embed->add_option("--box", embed_opts.box,
                    "coordinate half-width in um");
  embed->add_option("--max-evals", embed_opts.max_evals,
                    "total objective evaluations")
      ->check(CLI::PositiveNumber);
  embed->callback([&]() { cmd_embed(common, embed_opts); });

  EvolveOpts evolve_opts;
  CLI::App* evolve = app.add_subcommand(
      "evolve", "evolve a product state under a piecewise-constant pulse");
  evolve->fallthrough();
  evolve->add_option("--register", evolve_opts.register_path,
                     "register JSON")
      ->required()
      ->check(CLI::ExistingFile);
  evolve->add_option("--pulse", evolve_opts.pulse_path, "pulse JSON")
      ->required()
      ->check(CLI::ExistingFile);
  evolve->add_option("--init", evolve_opts.init_bits,
                     "initial bitstring, qubit 0 rightmost (default zeros)");
  evolve->callback([&]() { cmd_evolve(common, evolve_opts); });

  DerandomizeOpts derand_opts;
  CLI::App* derand = app.add_subcommand(
      "derandomize", "build a greedy measurement plan for a Hamiltonian");
  derand->fallthrough();
  derand->add_option("--ham", derand_opts.ham_path, "Hamiltonian file")
      ->required()
      ->check(CLI::ExistingFile);
  derand->add_option("--bases", derand_opts.bases,
                     "greedy construction length")
      ->check(CLI::PositiveNumber);
  derand->add_option("--epsilon", derand_opts.epsilon,
                     "per-term accuracy target in (0, 1)");
  derand->add_option("--shots", derand_opts.shots,
                     "also distribute this shot budget over the plan")
      ->check(CLI::PositiveNumber);
  derand->callback([&]() { cmd_derandomize(common, derand_opts); });

  EstimateOpts estimate_opts;
  CLI::App* estimate = app.add_subcommand(
      "estimate", "estimate a state's energy under a Hamiltonian");
  estimate->fallthrough();
  estimate->add_option("--ham", estimate_opts.ham_path, "Hamiltonian file")
      ->required()
      ->check(CLI::ExistingFile);
  estimate->add_option("--register", estimate_opts.register_path,
                       "register JSON for pulse preparation")
      ->check(CLI::ExistingFile);
  estimate->add_option("--pulse", estimate_opts.pulse_path,
                       "pulse JSON applied to the initial bitstring")
      ->check(CLI::ExistingFile);
  estimate->add_option("--plan", estimate_opts.plan_path,
                       "measurement plan JSON (default: derandomize)")
      ->check(CLI::ExistingFile);
  estimate->add_option("--init", estimate_opts.init_bits,
                       "initial bitstring (default zeros)");
  estimate->add_option("--shots", estimate_opts.shots,
                       "shot budget for the sampled estimate")
      ->check(CLI::PositiveNumber);
  estimate->add_flag("--exact", estimate_opts.exact,
                     "report the exact expectation, no sampling");
  estimate->callback([&]() { cmd_estimate(common, estimate_opts); });

  VqeOpts vqe_opts;
  CLI::App* vqe = app.add_subcommand(
      "vqe", "run a variational ground-state search");
  vqe->fallthrough();
  vqe->add_option("--ham", vqe_opts.ham_path, "Hamiltonian file")
      ->required()
      ->check(CLI::ExistingFile);
  vqe->add_option("--register", vqe_opts.register_path, "register JSON")
      ->required()
      ->check(CLI::ExistingFile);
  vqe->add_option("--ansatz", vqe_opts.ansatz,
                  "ucc-xy, alternating, phase, or iterative");
  vqe->add_option("--optimizer", vqe_opts.optimizer,
                  "nelder-mead, powell, or differential-evolution");
  vqe->add_option("--layers", vqe_opts.layers,
                  "layers (alternating) or segments (phase)")
      ->check(CLI::PositiveNumber);
  vqe->add_option("--init", vqe_opts.init_bits,
                  "starting bitstring for the iterative protocol");
  vqe->add_option("--seeds", vqe_opts.seeds,
                  "number of consecutive seeds to run")
      ->check(CLI::PositiveNumber);
  vqe->add_option("--budget", vqe_opts.budget, "total shot budget");
  vqe->add_option("--shots-per-energy", vqe_opts.shots_per_energy,
                  "shots per energy evaluation");
  vqe->add_option("--max-optim-evals", vqe_opts.max_optim_evals,
                  "evaluation cap for single-pass protocols");
  vqe->add_option("--epi", vqe_opts.epi,
                  "optimizer evaluations per splitting iteration");
  vqe->add_option("--max-iterations", vqe_opts.max_iterations,
                  "splitting iterations");
  vqe->add_flag("--exact", vqe_opts.exact,
                "noiseless expectation values instead of sampling");
  vqe->callback([&]() { cmd_vqe(common, vqe_opts); });

  ScanOpts scan_opts;
  CLI::App* scan = app.add_subcommand(
      "scan-init", "rank computational basis states as starting points");
  scan->fallthrough();
  scan->add_option("--ham", scan_opts.ham_path, "Hamiltonian file")
      ->required()
      ->check(CLI::ExistingFile);
  scan->add_option("--register", scan_opts.register_path, "register JSON")
      ->required()
      ->check(CLI::ExistingFile);
  scan->add_option("--repeats", scan_opts.repeats,
                   "averaging repeats per state");
  scan->add_option("--epi", scan_opts.epi,
                   "optimizer evaluations in the refinement pass");
  scan->add_flag("--exact", scan_opts.exact,
                 "noiseless expectation values instead of sampling");
  scan->callback([&]() { cmd_scan_init(common, scan_opts); });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const davqe::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const davqe::ConstraintError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const davqe::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const davqe::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
