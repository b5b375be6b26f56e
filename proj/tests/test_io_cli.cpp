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

#include <sys/wait.h>
#include <unistd.h>

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "davqe/dense.hpp"
#include "davqe/errors.hpp"
#include "davqe/io.hpp"
#include "davqe/measurement.hpp"
#include "davqe/pauli.hpp"
#include "davqe/register.hpp"
#include "davqe/state.hpp"
#include "davqe/vqe.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using Catch::Approx;
using davqe::io::Json;

namespace {

struct TempDir {
  fs::path path;

  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("davqe_io_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string read_or_empty(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path out_file = scratch / "_stdout.txt";
  const fs::path err_file = scratch / "_stderr.txt";
  const std::string command = std::string(DAVQE_CLI_PATH) + " " + args +
                              " > " + out_file.string() + " 2> " +
                              err_file.string();
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_or_empty(out_file);
  result.err = read_or_empty(err_file);
  return result;
}

std::size_t count_lines(const std::string& text) {
  std::size_t lines = 0;
  for (const char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  for (const char c : line) {
    if (c == sep) {
      fields.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      continue;
    }
    if (!line.empty()) rows.push_back(line);
  }
  return rows;
}

davqe::PauliHamiltonian load_fixture(const std::string& name) {
  return davqe::parse_hamiltonian(
      davqe::testutil::read_file(davqe::testutil::data_path(name)));
}

fs::path write_register_file(const TempDir& dir, const std::string& name,
                             const davqe::Register& reg) {
  const fs::path path = dir.path / name;
  davqe::io::atomic_write_text(path,
                               davqe::io::register_to_json(reg).dump(2));
  return path;
}

fs::path write_pulse_file(const TempDir& dir, const std::string& name,
                          const davqe::PulseParams& pulse) {
  const fs::path path = dir.path / name;
  davqe::io::atomic_write_text(
      path, davqe::io::pulse_params_to_json(pulse).dump(2));
  return path;
}

davqe::Register ising_pair(double spacing) {
  return davqe::Register({{0.0, 0.0}, {spacing, 0.0}},
                         davqe::InteractionModel::ising());
}

davqe::Register xy_pair(double spacing) {
  return davqe::Register({{0.0, 0.0}, {spacing, 0.0}},
                         davqe::InteractionModel::xy());
}

}  // namespace

TEST_CASE("fnv1a64 matches the reference vectors", "[io]") {
  CHECK(davqe::io::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(davqe::io::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(davqe::io::fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(davqe::io::fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(davqe::io::fnv1a64_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("atomic writes replace files without leaving temporaries", "[io]") {
  TempDir dir;
  const fs::path target = dir.path / "value.txt";

  davqe::io::atomic_write_text(target, "one\n");
  CHECK(davqe::io::read_text_file(target) == "one\n");

  davqe::io::atomic_write_text(target, "two\n");
  CHECK(davqe::io::read_text_file(target) == "two\n");

  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir.path)) {
    ++entries;
  }
  CHECK(entries == 1);

  const fs::path nested = dir.path / "a" / "b" / "value.txt";
  davqe::io::atomic_write_text(nested, "three\n");
  CHECK(davqe::io::read_text_file(nested) == "three\n");

  CHECK_THROWS_AS(davqe::io::read_text_file(dir.path / "missing.txt"),
                  davqe::ParseError);
}

TEST_CASE("register files round trip exactly", "[io]") {
  SECTION("ising register") {
    const davqe::Register reg({{0.0, 0.0}, {7.0, 0.0}, {3.5, 5.0}},
                              davqe::InteractionModel::ising(1000.0), 2.0);
    const davqe::Register back =
        davqe::io::register_from_json(davqe::io::register_to_json(reg));
    REQUIRE(back.n_atoms() == 3);
    CHECK(back.model().kind == davqe::InteractionKind::Ising);
    CHECK(back.model().strength() == 1000.0);
    CHECK(back.min_spacing() == 2.0);
    for (int k = 0; k < 3; ++k) {
      CHECK(back.positions()[k].x() == reg.positions()[k].x());
      CHECK(back.positions()[k].y() == reg.positions()[k].y());
    }
  }

  SECTION("xy register") {
    const davqe::Register reg = xy_pair(15.0);
    const davqe::Register back =
        davqe::io::register_from_json(davqe::io::register_to_json(reg));
    CHECK(back.model().kind == davqe::InteractionKind::XY);
    CHECK(back.model().strength() == davqe::kDefaultC3);
  }

  SECTION("malformed documents are parse errors") {
    Json good = davqe::io::register_to_json(ising_pair(9.0));

    Json no_version = good;
    no_version.erase("schema_version");
    CHECK_THROWS_AS(davqe::io::register_from_json(no_version),
                    davqe::ParseError);

    Json wrong_version = good;
    wrong_version["schema_version"] = 7;
    CHECK_THROWS_AS(davqe::io::register_from_json(wrong_version),
                    davqe::ParseError);

    Json extra = good;
    extra["colour"] = "red";
    CHECK_THROWS_AS(davqe::io::register_from_json(extra), davqe::ParseError);

    Json bad_kind = good;
    bad_kind["kind"] = "dipole";
    CHECK_THROWS_AS(davqe::io::register_from_json(bad_kind),
                    davqe::ParseError);

    Json bad_position = good;
    bad_position["positions"] = Json::array({Json::array({0.0})});
    CHECK_THROWS_AS(davqe::io::register_from_json(bad_position),
                    davqe::ParseError);

    CHECK_THROWS_AS(davqe::io::register_from_json(Json::array()),
                    davqe::ParseError);
  }

  SECTION("physical violations are constraint errors") {
    Json good = davqe::io::register_to_json(ising_pair(9.0));
    good["positions"] = Json::array(
        {Json::array({0.0, 0.0}), Json::array({0.5, 0.0})});
    CHECK_THROWS_AS(davqe::io::register_from_json(good),
                    davqe::ConstraintError);
  }
}

TEST_CASE("pulse files round trip exactly", "[io]") {
  davqe::PulseParams pulse;
  pulse.time_labels = {0.5, 1.25, 4.0};
  pulse.omegas = {1.0, 2.5, 0.25};
  pulse.deltas = {-3.0, 0.0, 6.283};

  const davqe::PulseParams back =
      davqe::io::pulse_params_from_json(davqe::io::pulse_params_to_json(pulse));
  CHECK(back.time_labels == pulse.time_labels);
  CHECK(back.omegas == pulse.omegas);
  CHECK(back.deltas == pulse.deltas);

  Json good = davqe::io::pulse_params_to_json(pulse);

  Json missing = good;
  missing.erase("omegas");
  CHECK_THROWS_AS(davqe::io::pulse_params_from_json(missing),
                  davqe::ParseError);

  Json non_number = good;
  non_number["deltas"] = Json::array({"zero"});
  CHECK_THROWS_AS(davqe::io::pulse_params_from_json(non_number),
                  davqe::ParseError);

  Json extra = good;
  extra["phases"] = Json::array({0.0});
  CHECK_THROWS_AS(davqe::io::pulse_params_from_json(extra),
                  davqe::ParseError);
}

TEST_CASE("measurement plans round trip exactly", "[io]") {
  const davqe::PauliHamiltonian h = load_fixture("lih_6q.ham");
  const davqe::DerandomizedPlan plan = davqe::derandomize_for(h, 40);
  REQUIRE(!plan.bases.empty());

  const davqe::DerandomizedPlan back =
      davqe::io::plan_from_json(davqe::io::plan_to_json(plan));
  REQUIRE(back.bases.size() == plan.bases.size());
  CHECK(back.epsilon == plan.epsilon);
  CHECK(back.repetitions == plan.repetitions);
  for (std::size_t b = 0; b < plan.bases.size(); ++b) {
    CHECK(back.bases[b].str() == plan.bases[b].str());
  }

  Json good = davqe::io::plan_to_json(plan);

  Json bad_letter = good;
  bad_letter["bases"][0] = "QZZZZZ";
  CHECK_THROWS_AS(davqe::io::plan_from_json(bad_letter), davqe::ParseError);

  Json short_basis = good;
  short_basis["bases"][0] = "XY";
  CHECK_THROWS_AS(davqe::io::plan_from_json(short_basis), davqe::ParseError);

  Json zero_reps = good;
  zero_reps["repetitions"][0] = 0;
  CHECK_THROWS_AS(davqe::io::plan_from_json(zero_reps),
                  davqe::ConstraintError);

  CHECK_THROWS_AS(davqe::io::plan_to_json(davqe::DerandomizedPlan{}),
                  davqe::ConstraintError);
}

TEST_CASE("run configurations parse overrides and reject unknown keys",
          "[io]") {
  SECTION("defaults from the empty document") {
    const davqe::io::RunConfig cfg =
        davqe::io::run_config_from_json(Json{{"schema_version", 1}});
    CHECK(cfg.vqe.ansatz == davqe::Ansatz::IterativeSplit);
    CHECK(cfg.vqe.optimizer == davqe::OptimizerKind::Powell);
    CHECK(cfg.vqe.shot_budget_total == 350000);
    CHECK(cfg.c6 == davqe::kDefaultC6);
    CHECK(cfg.min_spacing == davqe::kDefaultMinSpacing);
  }

  SECTION("explicit fields land in the right places") {
    Json j;
    j["schema_version"] = 1;
    j["ansatz"] = "alternating";
    j["optimizer"] = "differential-evolution";
    j["shot_budget_total"] = 12345;
    j["epsilon"] = 0.5;
    j["seed"] = 9;
    j["exact_mode"] = true;
    j["bounds"] = Json{{"omega_max", 3.0}, {"delta_min", -1.0}};
    j["c6"] = 123.0;
    const davqe::io::RunConfig cfg = davqe::io::run_config_from_json(j);
    CHECK(cfg.vqe.ansatz == davqe::Ansatz::AlternatingAB);
    CHECK(cfg.vqe.optimizer == davqe::OptimizerKind::DifferentialEvolution);
    CHECK(cfg.vqe.shot_budget_total == 12345);
    CHECK(cfg.vqe.epsilon == 0.5);
    CHECK(cfg.vqe.seed == 9);
    CHECK(cfg.vqe.exact_mode);
    CHECK(cfg.vqe.bounds.omega_max == 3.0);
    CHECK(cfg.vqe.bounds.delta_min == -1.0);
    CHECK(cfg.vqe.bounds.delta_max == davqe::ParamBounds{}.delta_max);
    CHECK(cfg.c6 == 123.0);

    const davqe::io::RunConfig echoed =
        davqe::io::run_config_from_json(davqe::io::run_config_to_json(cfg));
    CHECK(echoed.vqe.ansatz == cfg.vqe.ansatz);
    CHECK(echoed.vqe.bounds.omega_max == cfg.vqe.bounds.omega_max);
    CHECK(echoed.c6 == cfg.c6);
  }

  SECTION("rejections") {
    CHECK_THROWS_AS(davqe::io::run_config_from_json(Json::object()),
                    davqe::ParseError);
    CHECK_THROWS_AS(davqe::io::run_config_from_json(
                        Json{{"schema_version", 1}, {"shots", 10}}),
                    davqe::ParseError);
    CHECK_THROWS_AS(
        davqe::io::run_config_from_json(
            Json{{"schema_version", 1},
                 {"bounds", Json{{"omega_peak", 1.0}}}}),
        davqe::ParseError);
    CHECK_THROWS_AS(davqe::io::run_config_from_json(
                        Json{{"schema_version", 1}, {"seed", -4}}),
                    davqe::ParseError);
    CHECK_THROWS_AS(davqe::io::run_config_from_json(
                        Json{{"schema_version", 1}, {"ansatz", "qaoa"}}),
                    davqe::ParseError);
    CHECK_THROWS_AS(davqe::io::run_config_from_json(
                        Json{{"schema_version", 1}, {"c6", -2.0}}),
                    davqe::ConstraintError);
    CHECK_THROWS_AS(davqe::io::run_config_from_json(
                        Json{{"schema_version", 1}, {"epsilon", 2.0}}),
                    davqe::ConstraintError);
  }
}

TEST_CASE("result tables format one row per entry", "[io]") {
  SECTION("optimization traces") {
    davqe::VqeTrace trace;
    trace.records.push_back({0, {1.5, 2.5}, -1.25, 1000, 0.125});
    trace.records.push_back({1, {}, -1.5, 2000, 0.25});
    const std::string csv = davqe::io::trace_to_csv(trace);
    const auto rows = data_rows(csv);
    REQUIRE(rows.size() == 2);
    CHECK(csv.rfind("iteration,energy_estimate,cumulative_shots,wall_time,"
                    "parameters\n",
                    0) == 0);
    CHECK(rows[0] == "0,-1.25,1000,0.125,1.5;2.5");
    CHECK(rows[1] == "1,-1.5,2000,0.25,");
  }

  SECTION("scan tables rank from one") {
    const std::vector<davqe::ScanEntry> entries = {
        {"01", 0.0, -1.0}, {"10", 0.25, -0.5}};
    const auto rows = data_rows(davqe::io::scan_to_csv(entries));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "1,01,0,-1");
    CHECK(rows[1] == "2,10,0.25,-0.5");
  }

  SECTION("state tables carry ket-style bitstrings") {
    const std::string csv =
        davqe::io::state_to_csv(davqe::prepare_product_state("01"));
    const auto rows = data_rows(csv);
    REQUIRE(rows.size() == 4);
    double total_probability = 0.0;
    const std::vector<std::string> expected_bits = {"00", "01", "10", "11"};
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto fields = split(rows[r], ',');
      REQUIRE(fields.size() == 5);
      CHECK(fields[0] == std::to_string(r));
      CHECK(fields[1] == expected_bits[r]);
      total_probability += std::stod(fields[4]);
    }
    CHECK(total_probability == Approx(1.0).margin(1e-12));
    CHECK(split(rows[1], ',')[4] == "1");
  }
}

TEST_CASE("fixture manifest matches the bundled files", "[io]") {
  const fs::path manifest_path = davqe::testutil::data_path("fixtures.json");
  const fs::path base_dir = manifest_path.parent_path();
  const std::vector<davqe::io::FixtureEntry> entries =
      davqe::io::load_fixture_manifest(manifest_path);
  REQUIRE(entries.size() == 5);

  std::set<std::string> names;
  for (const auto& entry : entries) {
    names.insert(entry.name);
    CHECK_NOTHROW(davqe::io::verify_fixture(entry, base_dir));
    CHECK(entry.units == "hartree");
    CHECK(!entry.description.empty());
  }
  CHECK(names == std::set<std::string>{"h2_bkeff_2q", "h2_bkeff_2q_far",
                                       "h2_jw_4q", "lih_6q", "beh2_6q"});

  for (const auto& entry : entries) {
    if (entry.name == "lih_6q") CHECK(entry.bond_length_angstrom == 1.5);
    if (entry.name == "beh2_6q") CHECK(entry.bond_length_angstrom == 1.17);
  }

  davqe::io::FixtureEntry tampered = entries.front();
  tampered.checksum_fnv1a64 = "0000000000000000";
  CHECK_THROWS_AS(davqe::io::verify_fixture(tampered, base_dir),
                  davqe::ParseError);

  davqe::io::FixtureEntry miscounted = entries.front();
  miscounted.terms += 1;
  CHECK_THROWS_AS(davqe::io::verify_fixture(miscounted, base_dir),
                  davqe::ParseError);
}

TEST_CASE("cli reports version and usage", "[io]") {
  TempDir dir;
  const CliResult version = run_cli("--version", dir.path);
  CHECK(version.exit_code == 0);
  CHECK(version.out.find("0.1.0") != std::string::npos);

  const CliResult help = run_cli("--help", dir.path);
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("scan-init") != std::string::npos);

  const CliResult bare = run_cli("", dir.path);
  CHECK(bare.exit_code == 2);

  const CliResult unknown = run_cli("transmogrify", dir.path);
  CHECK(unknown.exit_code == 2);
}

TEST_CASE("cli embed writes a register and an objective trace", "[io]") {
  TempDir dir;
  const fs::path out = dir.path / "out";
  const std::string ham = davqe::testutil::data_path("lih_6q.ham");
  const CliResult result = run_cli(
      "embed --ham " + ham + " --n-starts 2 --max-evals 400 --seed 3 --out " +
          out.string(),
      dir.path);
  INFO(result.err);
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("score") != std::string::npos);

  const davqe::Register reg =
      davqe::io::load_register_file(out / "register.json");
  CHECK(reg.n_atoms() == 6);
  CHECK(reg.model().kind == davqe::InteractionKind::Ising);
  for (int i = 0; i < reg.n_atoms(); ++i) {
    for (int j = i + 1; j < reg.n_atoms(); ++j) {
      CHECK((reg.positions()[i] - reg.positions()[j]).norm() >=
            reg.min_spacing());
    }
  }

  const std::string trace =
      davqe::io::read_text_file(out / "embed_trace.csv");
  CHECK(count_lines(trace) >= 2);

  const Json summary = davqe::io::load_json_file(out / "embed_summary.json");
  CHECK(summary.at("selected_terms").get<int>() > 0);
  CHECK(summary.at("score").get<double>() >= 0.0);

  const Json header = davqe::io::load_json_file(out / "run_header.json");
  CHECK(header.at("command").get<std::string>().find("embed") !=
        std::string::npos);
  CHECK(header.at("inputs").at(ham).get<std::string>() ==
        davqe::io::file_checksum_hex(ham));
}

TEST_CASE("cli embed warns when nothing is embeddable", "[io]") {
  TempDir dir;
  const fs::path ham = dir.path / "flipflop.ham";
  davqe::io::atomic_write_text(ham, "qubits: 2\n1.0 X0 X1\n");
  const fs::path out = dir.path / "out";
  const CliResult result = run_cli(
      "embed --ham " + ham.string() +
          " --n-starts 1 --max-evals 50 --out " + out.string(),
      dir.path);
  CHECK(result.exit_code == 0);
  CHECK(result.err.find("repulsion-only") != std::string::npos);
  CHECK(davqe::io::load_register_file(out / "register.json").n_atoms() == 2);
}

TEST_CASE("cli embed scales to a fourteen-qubit input", "[io]") {
  TempDir dir;
  std::ostringstream ham;
  ham << "qubits: 14\n";
  for (int i = 0; i < 14; ++i) ham << "0.1 Z" << i << "\n";
  for (int i = 0; i < 14; ++i) {
    for (int j = i + 1; j < 14; ++j) {
      if ((i + j) % 3 == 0) ham << "0.25 Z" << i << " Z" << j << "\n";
    }
  }
  const fs::path ham_path = dir.path / "wide.ham";
  davqe::io::atomic_write_text(ham_path, ham.str());
  const fs::path out = dir.path / "out";
  const CliResult result = run_cli(
      "embed --ham " + ham_path.string() +
          " --n-starts 1 --max-evals 60 --spacing 8 --out " + out.string(),
      dir.path);
  INFO(result.err);
  REQUIRE(result.exit_code == 0);
  const davqe::Register reg =
      davqe::io::load_register_file(out / "register.json");
  CHECK(reg.n_atoms() == 14);
}

TEST_CASE("cli evolve reproduces the library propagator", "[io]") {
  TempDir dir;
  const fs::path reg_path =
      write_register_file(dir, "register.json", ising_pair(9.0));
  davqe::PulseParams pulse;
  pulse.time_labels = {0.5, 1.0};
  pulse.omegas = {davqe::kPi, davqe::kPi / 2.0};
  pulse.deltas = {0.0, 1.0};
  const fs::path pulse_path = write_pulse_file(dir, "pulse.json", pulse);
  const fs::path out = dir.path / "out";

  const CliResult result = run_cli(
      "evolve --register " + reg_path.string() + " --pulse " +
          pulse_path.string() + " --init 01 --out " + out.string(),
      dir.path);
  INFO(result.err);
  REQUIRE(result.exit_code == 0);

  const davqe::QuantumState expected =
      davqe::pulse_state(ising_pair(9.0), pulse, "01");
  const auto rows = data_rows(davqe::io::read_text_file(out / "state.csv"));
  REQUIRE(rows.size() == 4);
  double total_probability = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto fields = split(rows[r], ',');
    REQUIRE(fields.size() == 5);
    const std::complex<double> amplitude(std::stod(fields[2]),
                                         std::stod(fields[3]));
    const std::complex<double> reference =
        expected.amplitudes()(static_cast<Eigen::Index>(r));
    CHECK(std::abs(amplitude - reference) < 1e-12);
    total_probability += std::stod(fields[4]);
  }
  CHECK(total_probability == Approx(1.0).margin(1e-9));
}

TEST_CASE("cli derandomize writes a loadable plan", "[io]") {
  TempDir dir;
  const fs::path out = dir.path / "out";
  const std::string ham = davqe::testutil::data_path("lih_6q.ham");
  const CliResult result = run_cli(
      "derandomize --ham " + ham + " --bases 260 --shots 5200 --out " +
          out.string(),
      dir.path);
  INFO(result.err);
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("distinct bases") != std::string::npos);

  const davqe::DerandomizedPlan plan =
      davqe::io::load_plan_file(out / "plan.json");
  CHECK(plan.bases.size() <= 260);
  CHECK(plan.total_shots() == 5200);
  CHECK(plan.bases.front().n_qubits() == 6);
}

TEST_CASE("cli estimate matches the exact expectation when asked", "[io]") {
  TempDir dir;
  const std::string ham_path = davqe::testutil::data_path("h2_bkeff_2q.ham");
  const davqe::PauliHamiltonian h = load_fixture("h2_bkeff_2q.ham");
  const double expected =
      davqe::expectation(h, davqe::prepare_product_state("01"));

  SECTION("exact mode") {
    const fs::path out = dir.path / "exact";
    const CliResult result = run_cli(
        "estimate --ham " + ham_path + " --init 01 --exact --out " +
            out.string(),
        dir.path);
    INFO(result.err);
    REQUIRE(result.exit_code == 0);
    const Json summary = davqe::io::load_json_file(out / "estimate.json");
    CHECK(summary.at("mode").get<std::string>() == "exact");
    CHECK(summary.at("energy").get<double>() ==
          Approx(expected).margin(1e-12));
    CHECK(summary.at("absolute_error_vs_expectation").get<double>() == 0.0);
  }

  SECTION("sampled mode stays near the expectation") {
    const fs::path out = dir.path / "sampled";
    const CliResult result = run_cli(
        "estimate --ham " + ham_path +
            " --init 01 --shots 4000 --seed 5 --out " + out.string(),
        dir.path);
    INFO(result.err);
    REQUIRE(result.exit_code == 0);
    const Json summary = davqe::io::load_json_file(out / "estimate.json");
    CHECK(summary.at("mode").get<std::string>() == "sampled");
    CHECK(summary.at("total_shots").get<long>() == 4000);
    CHECK(std::abs(summary.at("energy").get<double>() - expected) < 0.5);

    const auto rows =
        data_rows(davqe::io::read_text_file(out / "per_term.csv"));
    CHECK(rows.size() == h.non_identity_terms().size());
  }

  SECTION("a tiny budget is a budget error") {
    const fs::path plan_out = dir.path / "plan_out";
    REQUIRE(run_cli("derandomize --ham " + ham_path + " --bases 20 --out " +
                        plan_out.string(),
                    dir.path)
                .exit_code == 0);
    const fs::path out = dir.path / "starved";
    const CliResult result = run_cli(
        "estimate --ham " + ham_path + " --plan " +
            (plan_out / "plan.json").string() + " --shots 1 --out " +
            out.string(),
        dir.path);
    CHECK(result.exit_code == 4);
  }
}

TEST_CASE("cli maps failures onto documented exit codes", "[io]") {
  TempDir dir;
  const fs::path out = dir.path / "out";

  const fs::path bad_ham = dir.path / "bad.ham";
  davqe::io::atomic_write_text(bad_ham, "qubits: x\n1.0 Z0\n");
  CHECK(run_cli("derandomize --ham " + bad_ham.string() + " --out " +
                    out.string(),
                dir.path)
            .exit_code == 2);

  const fs::path unknown_key = dir.path / "unknown.json";
  Json reg_doc = davqe::io::register_to_json(ising_pair(9.0));
  reg_doc["colour"] = "red";
  davqe::io::atomic_write_text(unknown_key, reg_doc.dump(2));
  davqe::PulseParams pulse;
  pulse.time_labels = {4.0};
  pulse.omegas = {1.0};
  pulse.deltas = {0.0};
  const fs::path pulse_path = write_pulse_file(dir, "pulse.json", pulse);
  CHECK(run_cli("evolve --register " + unknown_key.string() + " --pulse " +
                    pulse_path.string() + " --out " + out.string(),
                dir.path)
            .exit_code == 2);

  const fs::path crowded = dir.path / "crowded.json";
  Json close_doc = davqe::io::register_to_json(ising_pair(9.0));
  close_doc["positions"] =
      Json::array({Json::array({0.0, 0.0}), Json::array({0.5, 0.0})});
  davqe::io::atomic_write_text(crowded, close_doc.dump(2));
  CHECK(run_cli("evolve --register " + crowded.string() + " --pulse " +
                    pulse_path.string() + " --out " + out.string(),
                dir.path)
            .exit_code == 3);

  CHECK(run_cli("evolve --register /nonexistent/register.json --pulse " +
                    pulse_path.string() + " --out " + out.string(),
                dir.path)
            .exit_code == 2);

  const std::string ham = davqe::testutil::data_path("h2_bkeff_2q.ham");
  CHECK(run_cli("estimate --ham " + ham + " --plan " + pulse_path.string() +
                    " --out " + out.string(),
                dir.path)
            .exit_code == 2);

  CHECK(run_cli("estimate --ham " + ham + " --init 0101 --exact --out " +
                    out.string(),
                dir.path)
            .exit_code == 3);
}

TEST_CASE("cli vqe writes traces and a deterministic summary", "[io]") {
  TempDir dir;
  const std::string ham_path = davqe::testutil::data_path("h2_bkeff_2q.ham");
  const fs::path reg_path =
      write_register_file(dir, "xy_pair.json", xy_pair(15.0));
  const double e_exact =
      davqe::ground_energy_exact(load_fixture("h2_bkeff_2q.ham"));

  const std::string args =
      "vqe --ham " + ham_path + " --register " + reg_path.string() +
      " --ansatz ucc-xy --optimizer differential-evolution --exact"
      " --max-optim-evals 300 --seeds 2 --seed 7";

  const fs::path out_threaded = dir.path / "threaded";
  const CliResult threaded = run_cli(
      args + " --jobs 2 --out " + out_threaded.string(), dir.path);
  INFO(threaded.err);
  REQUIRE(threaded.exit_code == 0);

  const std::string summary_csv =
      davqe::io::read_text_file(out_threaded / "summary.csv");
  const auto rows = data_rows(summary_csv);
  REQUIRE(rows.size() == 2);
  CHECK(split(rows[0], ',')[0] == "7");
  CHECK(split(rows[1], ',')[0] == "8");
  CHECK(fs::exists(out_threaded / "trace_seed_7.csv"));
  CHECK(fs::exists(out_threaded / "trace_seed_8.csv"));

  const Json summary =
      davqe::io::load_json_file(out_threaded / "summary.json");
  CHECK(summary.at("ground_energy_exact").get<double>() ==
        Approx(e_exact).margin(1e-12));
  CHECK(summary.at("ansatz").get<std::string>() == "ucc-xy");
  for (const Json& row : summary.at("seeds")) {
    const double rel = row.at("relative_error").get<double>();
    CHECK(rel >= 0.0);
    CHECK(rel < 0.1);
    CHECK(row.at("total_shots").get<long>() == 0);
  }

  const fs::path out_serial = dir.path / "serial";
  const CliResult serial =
      run_cli(args + " --jobs 1 --out " + out_serial.string(), dir.path);
  REQUIRE(serial.exit_code == 0);
  CHECK(davqe::io::read_text_file(out_serial / "summary.csv") == summary_csv);
}

TEST_CASE("cli scan-init ranks basis states", "[io]") {
  TempDir dir;
  const std::string ham_path = davqe::testutil::data_path("h2_bkeff_2q.ham");
  const fs::path reg_path =
      write_register_file(dir, "pair.json", ising_pair(9.0));
  const fs::path out = dir.path / "out";

  const CliResult result = run_cli(
      "scan-init --ham " + ham_path + " --register " + reg_path.string() +
          " --exact --repeats 1 --epi 0 --out " + out.string(),
      dir.path);
  INFO(result.err);
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("ranked 4 product states") != std::string::npos);

  const auto rows = data_rows(davqe::io::read_text_file(out / "scan.csv"));
  REQUIRE(rows.size() == 4);
  double previous = -1.0;
  for (const auto& row : rows) {
    const auto fields = split(row, ',');
    REQUIRE(fields.size() == 4);
    const double error = std::stod(fields[2]);
    CHECK(error >= previous);
    previous = error;
  }
}

TEST_CASE("cli honors the run configuration file", "[io]") {
  TempDir dir;
  const fs::path config = dir.path / "config.json";
  davqe::io::atomic_write_text(
      config, Json{{"schema_version", 1}, {"seed", 11}, {"plan_bases", 17}}
                  .dump(2));
  const std::string ham = davqe::testutil::data_path("h2_jw_4q.ham");
  const fs::path out = dir.path / "out";

  const CliResult result = run_cli(
      "--config " + config.string() + " derandomize --ham " + ham +
          " --out " + out.string(),
      dir.path);
  INFO(result.err);
  REQUIRE(result.exit_code == 0);

  const Json header = davqe::io::load_json_file(out / "run_header.json");
  CHECK(header.at("config").at("plan_bases").get<int>() == 17);
  CHECK(header.at("config").at("seed").get<long>() == 11);
  CHECK(header.at("code_version").get<std::string>() == "0.1.0");
  CHECK(header.at("inputs").size() == 2);
  CHECK(header.at("inputs").at(ham).get<std::string>() ==
        davqe::io::file_checksum_hex(ham));

  const davqe::DerandomizedPlan plan =
      davqe::io::load_plan_file(out / "plan.json");
  CHECK(plan.bases.size() <= 17);

  const fs::path bad_config = dir.path / "bad_config.json";
  davqe::io::atomic_write_text(
      bad_config,
      Json{{"schema_version", 1}, {"budget", 10}}.dump(2));
  CHECK(run_cli("--config " + bad_config.string() + " derandomize --ham " +
                    ham + " --out " + out.string(),
                dir.path)
            .exit_code == 2);
}
