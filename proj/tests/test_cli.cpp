// End-to-end checks of the command-line runner: artifacts, refusals, exit
// codes, config handling, and byte determinism of emitted CSVs.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "optodicke/dynamics.hpp"

using namespace optodicke;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  fs::path dir;
};

int exit_code_of(int system_status) {
#ifdef WEXITSTATUS
  return WEXITSTATUS(system_status);
#else
  return system_status;
#endif
}

RunResult run_cli(const std::string& args, const std::string& tag) {
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() / ("optodicke_cli_" + tag + "_" + std::to_string(counter++));
  fs::remove_all(dir);
  const std::string cmd = std::string(OPTODICKE_CLI_PATH) + " " + args + " --out-dir " +
                          dir.string() + " > " + (dir.string() + ".log") + " 2>&1";
  fs::create_directories(dir.parent_path());
  const int status = std::system(cmd.c_str());
  return RunResult{exit_code_of(status), dir};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::map<std::string, std::string> read_manifest(const fs::path& dir) {
  std::map<std::string, std::string> kv;
  std::ifstream in(dir / "manifest.txt");
  REQUIRE(in.good());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

// small, fast, fully validated figure run: barely super-radiant, weak drive
const std::string kTinyFigArgs =
    "--lambda 0.52 --g0 0.05 --J-list 0.5 --cutoff-field 12 --cutoff-mirror 10 --steps 17";

}  // namespace

TEST_CASE("cli fig2 tiny run") {
  const auto r = run_cli("fig2 " + kTinyFigArgs, "fig2");
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(r.dir / "occupation_J0.5.csv"));
  CHECK(fs::exists(r.dir / "occupation_TL.csv"));
  CHECK(fs::exists(r.dir / "convergence.csv"));

  const auto m = read_manifest(r.dir);
  CHECK(m.at("status") == "ok");
  CHECK(m.at("command") == "fig2");
  CHECK(m.at("lambda") == "0.52");
  CHECK(m.at("parity_sector") == "even");
  CHECK(m.count("Omega") == 1);
  CHECK(m.count("top_field_population.J0.5") == 1);
  CHECK(std::stod(m.at("top_field_population.J0.5")) < 1e-6);

  const std::string tl = slurp(r.dir / "occupation_TL.csv");
  CHECK(tl.starts_with("t,value,label\n"));
  CHECK(tl.find(",TL\n") != std::string::npos);
}

TEST_CASE("cli csv output is byte deterministic") {
  const auto a = run_cli("fig2 " + kTinyFigArgs + " --seed 9", "det_a");
  const auto b = run_cli("fig2 " + kTinyFigArgs + " --seed 9", "det_b");
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  for (const char* name : {"occupation_J0.5.csv", "occupation_TL.csv", "convergence.csv"})
    CHECK(slurp(a.dir / name) == slurp(b.dir / name));
}

TEST_CASE("cli fig2 refuses the normal phase with the computed lambda_c") {
  const auto r = run_cli("fig2 --lambda 0.4 --J-list 0.5", "refuse");
  CHECK(r.exit_code == 2);
  const auto m = read_manifest(r.dir);  // manifest is emitted even on failure
  CHECK(m.at("status") == "refused");
  CHECK(m.at("lambda_c") == "0.5");
  CHECK(m.at("error").find("0.5") != std::string::npos);
  CHECK_FALSE(fs::exists(r.dir / "occupation_TL.csv"));
}

TEST_CASE("cli fig2 tl-only emits just the limit curve") {
  const auto r = run_cli("fig2 --tl-only --steps 9", "tlonly");
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(r.dir / "occupation_TL.csv"));
  CHECK_FALSE(fs::exists(r.dir / "occupation_J1.csv"));
}

TEST_CASE("cli fig3 entropy series start at zero") {
  const auto r = run_cli("fig3 " + kTinyFigArgs, "fig3");
  CHECK(r.exit_code == 0);
  REQUIRE(fs::exists(r.dir / "entropy_J0.5.csv"));
  std::ifstream in(r.dir / "entropy_J0.5.csv");
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "t,value,label");
  CHECK(std::stod(first.substr(first.find(',') + 1)) < 1e-10);
  CHECK(fs::exists(r.dir / "entropy_max.csv"));
  const auto m = read_manifest(r.dir);
  CHECK(m.count("max_entropy_decreasing_in_J") == 1);
}

TEST_CASE("cli plot script is emitted on request") {
  const auto r = run_cli("fig2 " + kTinyFigArgs + " --plot-script", "plot");
  CHECK(r.exit_code == 0);
  const std::string script = slurp(r.dir / "plot_fig2.py");
  CHECK(script.find("matplotlib") != std::string::npos);
  const auto m = read_manifest(r.dir);
  bool listed = false;
  for (const auto& [k, v] : m)
    if (k.rfind("artifact.", 0) == 0 && v == "plot_fig2.py") listed = true;
  CHECK(listed);
}

TEST_CASE("cli phase scan marks both sides of the transition") {
  const auto r = run_cli(
      "phase-scan --lambdas 0.4 0.6 --J 0.5 --g0 0.05 --cutoff-field 14 --cutoff-mirror 25 "
      "--steps 13",
      "scan");
  CHECK(r.exit_code == 0);
  std::ifstream in(r.dir / "phase_scan.csv");
  std::string header, row_np, row_srp;
  std::getline(in, header);
  std::getline(in, row_np);
  std::getline(in, row_srp);
  CHECK(header ==
        "lambda,lambda_c,mu,Omega,peak_finite_J,peak_TL,ground_field_occupation_per_J,validated");

  auto field = [](const std::string& row, int idx) {
    std::stringstream ss(row);
    std::string item;
    for (int i = 0; i <= idx; ++i) std::getline(ss, item, ',');
    return item;
  };
  CHECK(field(row_np, 0) == "0.4");
  CHECK(field(row_np, 3) == "nan");   // no drive below the transition
  CHECK(field(row_np, 5) == "0");     // TL peak exactly zero
  CHECK(field(row_srp, 0) == "0.6");
  // TL peak = 4 Omega^2/omega_m^2 with Omega = -(0.05)(0.36)(1 - (25/36)^2)
  const double omega_drive = -0.05 * 0.36 * (1 - std::pow(25.0 / 36.0, 2));
  CHECK(std::stod(field(row_srp, 5)) == Catch::Approx(4 * omega_drive * omega_drive / 0.01).epsilon(1e-12));
  CHECK(std::stod(field(row_srp, 4)) > 0);
}

TEST_CASE("cli phase scan accepts a single-point grid") {
  const auto r = run_cli(
      "phase-scan --lambda-min 0.45 --lambda-count 1 --J 0.5 --g0 0.05 --cutoff-field 12 "
      "--cutoff-mirror 12 --steps 9",
      "scan1");
  CHECK(r.exit_code == 0);
  std::ifstream in(r.dir / "phase_scan.csv");
  int rows = -1;  // discount the header
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 1);
}

TEST_CASE("cli classical emits trajectory, fixed points, and the drive") {
  const auto r =
      run_cli("classical --lambda 0.6 --t-end 10 --dt 0.01 --initial fixed-point", "classical");
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(r.dir / "trajectory.csv"));
  CHECK(slurp(r.dir / "trajectory.csv").starts_with("t,q1,p1,q2,p2,q3,p3,energy\n"));
  const auto m = read_manifest(r.dir);
  CHECK(std::stod(m.at("J")) == 1e5);  // command default
  // drive equals sqrt(2) omega_m |Omega| at kappa = 0
  const double omega_drive = 0.2 * 0.36 * (1 - std::pow(25.0 / 36.0, 2));
  CHECK(std::stod(m.at("drive")) ==
        Catch::Approx(std::sqrt(2.0) * 0.1 * omega_drive).epsilon(1e-12));
  CHECK(m.at("truncated") == "false");

  std::ifstream in(r.dir / "fixed_points.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "branch,q1,p1,q2,p2,q3,p3,energy");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("cli classical reports the dissipative critical point") {
  const auto r = run_cli("classical --lambda 0.505 --kappa 0.2 --t-end 5 --dt 0.01 "
                         "--initial origin",
                         "kappa");
  CHECK(r.exit_code == 0);
  const auto m = read_manifest(r.dir);
  CHECK(std::stod(m.at("lambda_c_kappa")) == Catch::Approx(0.509901951359278).epsilon(1e-9));
  CHECK(m.at("drive_normal_phase") == "true");
  CHECK(m.at("drive") == "0");
}

TEST_CASE("cli ground reports energy and sector") {
  const auto r = run_cli("ground --model dicke --lambda 0 --J 2 --cutoff-field 6", "ground");
  CHECK(r.exit_code == 0);
  const auto m = read_manifest(r.dir);
  CHECK(std::stod(m.at("energy")) == Catch::Approx(-2.0).margin(1e-9));
  CHECK(m.at("parity_projected") == "true");
  CHECK(std::stod(m.at("Jz")) == Catch::Approx(-2.0).margin(1e-9));
  CHECK(fs::exists(r.dir / "ground_observables.csv"));
}

TEST_CASE("cli evolve on the driven mirror matches the closed form") {
  const auto r = run_cli("evolve --model mirror --lambda 0.6 --cutoff-mirror 40 --steps 9 "
                         "--tmax 31.4159265358979",
                         "evolve");
  CHECK(r.exit_code == 0);
  std::ifstream in(r.dir / "occupation.csv");
  std::string line;
  std::getline(in, line);  // header
  ModelParams p;
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const double t = std::stod(line.substr(0, c1));
    const double v = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    CHECK(v == Catch::Approx(driven_mirror_occupation(t, p)).margin(1e-8));
  }
}

TEST_CASE("cli config file with flag override") {
  const fs::path cfg = fs::temp_directory_path() / "optodicke_cli_cfg.txt";
  std::ofstream(cfg) << "lambda=0.55\nJ=0.5\ncutoff_field=12\ncutoff_mirror=10\ng0=0.05\n";
  const auto r = run_cli(
      "fig2 --config " + cfg.string() + " --lambda 0.52 --J-list 0.5 --steps 9", "config");
  CHECK(r.exit_code == 0);
  const auto m = read_manifest(r.dir);
  CHECK(m.at("lambda") == "0.52");       // flag wins
  CHECK(m.at("cutoff_field") == "12");   // config applied
  CHECK(fs::exists(r.dir / "occupation_J0.5.csv"));
}

TEST_CASE("cli rejects unknown config keys") {
  const fs::path cfg = fs::temp_directory_path() / "optodicke_cli_badcfg.txt";
  std::ofstream(cfg) << "lambda=0.6\nfrequency=2\n";
  const auto r = run_cli("fig2 --config " + cfg.string(), "badconfig");
  CHECK(r.exit_code == 2);
}

TEST_CASE("cli validation failure exits 3 but writes everything") {
  // J = 1/2 at g0 = 0.2 leaks past the 1e-6 gate (metastable sector)
  const auto r = run_cli(
      "fig2 --J-list 0.5 --cutoff-field 24 --cutoff-mirror 40 --steps 9 --tmax 12.6", "leak");
  CHECK(r.exit_code == 3);
  CHECK(fs::exists(r.dir / "occupation_J0.5.csv"));
  CHECK(fs::exists(r.dir / "occupation_TL.csv"));
  const auto m = read_manifest(r.dir);
  CHECK(m.at("status") == "validation_failed");
  CHECK(m.count("validation.J0.5") == 1);
  const std::string conv = slurp(r.dir / "convergence.csv");
  CHECK(conv.find("false") != std::string::npos);
}

TEST_CASE("cli rejects garbage flags") {
  const auto r = run_cli("fig2 --nonsense 3", "badflag");
  CHECK(r.exit_code != 0);
}
