// Reproducible experiment runner for the Dicke model with a movable mirror:
// figure-reproduction recipes, phase scans, semiclassical trajectories, and
// raw ground-state / evolution access. Emits CSV artifacts plus a flat
// key=value manifest for every run, success or failure.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "optodicke/io.hpp"

namespace fs = std::filesystem;
using namespace optodicke;

namespace {

struct CommonOptions {
  ModelParams params;
  std::string config_path;
  double tmax = -1;  // < 0: two mirror periods
  int steps = 400;   // number of time-grid samples
  std::uint64_t seed = kDefaultSeed;
  std::string out_dir = "out";
  std::string parity = "even";
  std::string command_line;
};

ParitySector parse_parity(const std::string& s) {
  if (s == "even") return ParitySector::Even;
  if (s == "odd") return ParitySector::Odd;
  if (s == "none") return ParitySector::None;
  throw std::invalid_argument("parity must be one of even|odd|none, got '" + s + "'");
}

// The config file is applied before flag parsing so that flags override it.
std::string scan_for_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return {};
}

void add_common_flags(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--omega", o.params.omega, "field frequency (sets the energy unit)")
      ->capture_default_str();
  cmd->add_option("--omega0", o.params.omega0, "atomic level splitting")->capture_default_str();
  cmd->add_option("--omega-m", o.params.omega_m, "mirror frequency")->capture_default_str();
  cmd->add_option("--lambda", o.params.lambda, "atom-field coupling")->capture_default_str();
  cmd->add_option("--g0", o.params.g0, "scaled radiation-pressure coupling g N")
      ->capture_default_str();
  cmd->add_option("--J", o.params.j, "collective spin J (N = 2J atoms)")->capture_default_str();
  cmd->add_option("--cutoff-field", o.params.cutoff_field, "field Fock cutoff")
      ->capture_default_str();
  cmd->add_option("--cutoff-mirror", o.params.cutoff_mirror, "mirror Fock cutoff")
      ->capture_default_str();
  cmd->add_option("--cutoff-atom", o.params.cutoff_atom,
                  "atom-boson cutoff for the bosonized forms (0: min(N, 40))")
      ->capture_default_str();
  cmd->add_option("--tmax", o.tmax, "trajectory length in 1/omega (default: two mirror periods)");
  cmd->add_option("--steps", o.steps, "number of time-grid samples")->capture_default_str();
  cmd->add_option("--seed", o.seed, "start-vector seed for the eigensolver")
      ->capture_default_str();
  cmd->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--parity", o.parity, "Dicke ground-state sector: even|odd|none")
      ->capture_default_str();
  cmd->add_option("--config", o.config_path,
                  "key=value parameter file; explicit flags override it");
}

std::vector<double> time_grid(const CommonOptions& o) {
  const double tmax = o.tmax > 0 ? o.tmax : 2 * (2 * std::numbers::pi / o.params.omega_m);
  return make_time_grid(tmax, o.steps);
}

void record_params(Manifest& m, const CommonOptions& o) {
  const ModelParams& p = o.params;
  m.set("omega", p.omega);
  m.set("omega0", p.omega0);
  m.set("omega_m", p.omega_m);
  m.set("lambda", p.lambda);
  m.set("g0", p.g0);
  m.set("J", p.j);
  m.set("cutoff_field", p.cutoff_field);
  m.set("cutoff_mirror", p.cutoff_mirror);
  m.set("cutoff_atom", p.atom_cutoff());
  m.set("lambda_c", p.lambda_c());
  if (p.lambda > 0) m.set("mu", p.mu());
  if (p.lambda >= p.lambda_c()) {
    m.set("Omega", p.mirror_drive());
    m.set("alpha", p.alpha());
  }
  m.set("seed", o.seed);
  m.set("parity_sector", o.parity);
  m.set("time_unit", "1/omega");
}

// Wraps a command body: manifest bookkeeping, error-to-exit-code mapping, and
// the guarantee that a manifest lands on disk whatever happens.
int run_command(const std::string& name, CommonOptions& o,
                const std::function<void(Manifest&, const fs::path&)>& body) {
  const fs::path dir(o.out_dir);
  Manifest m;
  m.set("command", name);
  m.set("command_line", o.command_line);
  int code = 0;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fs::create_directories(dir);
    o.params.validate();
    record_params(m, o);
    body(m, dir);
    m.set("status", "ok");
  } catch (const PhaseError& e) {
    m.set("status", "refused");
    m.set("error", e.what());
    m.set("lambda_c", e.lambda_c());
    m.set("mu", e.mu());
    std::cerr << name << ": " << e.what() << "\n";
    code = 2;
  } catch (const CutoffValidationError& e) {
    m.set("status", "validation_failed");
    m.set("error", e.what());
    std::cerr << name << ": " << e.what() << "\n";
    code = 3;
  } catch (const ClassicalDomainError& e) {
    m.set("status", "validation_failed");
    m.set("error", e.what());
    std::cerr << name << ": " << e.what() << "\n";
    code = 3;
  } catch (const ConvergenceError& e) {
    m.set("status", "validation_failed");
    m.set("error", e.what());
    std::cerr << name << ": " << e.what() << "\n";
    code = 3;
  } catch (const StepUnderflowError& e) {
    m.set("status", "validation_failed");
    m.set("error", e.what());
    std::cerr << name << ": " << e.what() << "\n";
    code = 3;
  } catch (const std::invalid_argument& e) {
    m.set("status", "refused");
    m.set("error", e.what());
    std::cerr << name << ": " << e.what() << "\n";
    code = 2;
  } catch (const std::ios_base::failure& e) {
    m.set("status", "io_error");
    m.set("error", e.what());
    std::cerr << name << ": " << e.what() << "\n";
    code = 4;
  } catch (const fs::filesystem_error& e) {
    m.set("status", "io_error");
    m.set("error", e.what());
    std::cerr << name << ": " << e.what() << "\n";
    code = 4;
  } catch (const std::exception& e) {
    m.set("status", "error");
    m.set("error", e.what());
    std::cerr << name << ": " << e.what() << "\n";
    code = 1;
  }
  const auto t1 = std::chrono::steady_clock::now();
  m.set("wall_seconds", std::chrono::duration<double>(t1 - t0).count());
  try {
    m.add_artifact("manifest.txt");
    m.write(dir / "manifest.txt");
  } catch (const std::exception& e) {
    std::cerr << name << ": cannot write manifest: " << e.what() << "\n";
    if (code == 0) code = 4;
  }
  return code;
}

std::string join_args(int argc, char** argv) {
  std::ostringstream os;
  for (int i = 0; i < argc; ++i) os << (i ? " " : "") << argv[i];
  return os.str();
}

void write_series(Manifest& m, const fs::path& dir, const std::string& name,
                  const TimeSeries& series) {
  write_time_series_csv(dir / name, series);
  m.add_artifact(name);
}

void emit_plot_script(Manifest& m, const fs::path& dir, const std::string& name,
                      const std::string& value_label) {
  std::ofstream out(dir / name);
  out << "#!/usr/bin/env python3\n"
         "# Plots every per-J series in this directory against the TL curve.\n"
         "import csv, glob, os\n"
         "import matplotlib.pyplot as plt\n\n"
         "here = os.path.dirname(os.path.abspath(__file__))\n"
         "for path in sorted(glob.glob(os.path.join(here, '*.csv'))):\n"
         "    base = os.path.basename(path)\n"
         "    if not (base.startswith('occupation_') or base.startswith('entropy_')):\n"
         "        continue\n"
         "    with open(path) as fh:\n"
         "        rows = list(csv.DictReader(fh))\n"
         "    if not rows or 't' not in rows[0]:\n"
         "        continue\n"
         "    t = [float(r['t']) for r in rows]\n"
         "    v = [float(r['value']) for r in rows]\n"
         "    style = '--' if rows[0]['label'] == 'TL' else '-'\n"
         "    plt.plot(t, v, style, label=rows[0]['label'])\n"
         "plt.xlabel('t  [1/omega]')\n"
      << "plt.ylabel('" << value_label << "')\n"
      << "plt.legend()\n"
         "plt.tight_layout()\n"
         "plt.savefig(os.path.join(here, 'figure.png'), dpi=160)\n"
         "print('wrote', os.path.join(here, 'figure.png'))\n";
  if (!out) throw std::ios_base::failure("cannot write plot script");
  m.add_artifact(name);
}

// Shared driver for the two figure commands.
int run_figure(bool entropy_mode, CommonOptions& o, std::vector<double>& j_list, bool tl_only,
               bool plot_script) {
  return run_command(entropy_mode ? "fig3" : "fig2", o, [&](Manifest& m, const fs::path& dir) {
    const ModelParams& p = o.params;
    if (p.lambda <= p.lambda_c()) {
      std::ostringstream os;
      os << "super-radiant recipe refused: lambda = " << p.lambda
         << " is not above lambda_c = " << p.lambda_c();
      if (p.lambda > 0) os << " (mu = " << p.mu() << ")";
      throw PhaseError(os.str(), p.lambda, p.lambda_c(), p.lambda > 0 ? p.mu() : 0.0);
    }
    if (tl_only) j_list.clear();
    const auto times = time_grid(o);
    m.set("tmax", times.back());
    m.set("steps", o.steps);
    m.set("defaults_note", "g0 and the J list are artifact defaults, not derived values");
    {
      std::ostringstream os;
      for (std::size_t i = 0; i < j_list.size(); ++i) os << (i ? "," : "") << format_double(j_list[i]);
      m.set("J_list", os.str());
    }

    TrajectoryOptions topt;
    topt.seed = o.seed;
    topt.parity = parse_parity(o.parity);
    topt.compute_entropy = entropy_mode;
    const auto set = mirror_trajectory_set(p, j_list, times, topt, ValidationPolicy::Complete);

    const double period = 2 * std::numbers::pi / p.omega_m;
    Table table;
    if (entropy_mode)
      table.columns = {"J", "max_entropy", "validated"};
    else
      table.columns = {"J", "linf_one_period", "validated"};

    bool any_validation_failure = false;
    double prev_metric = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (const auto& traj : set.per_j) {
      const std::string jtag = format_double(traj.j);
      if (entropy_mode)
        write_series(m, dir, "entropy_J" + jtag + ".csv", traj.entropy);
      else
        write_series(m, dir, "occupation_J" + jtag + ".csv", traj.occupation);

      const double metric =
          entropy_mode ? *std::max_element(traj.entropy.values.begin(), traj.entropy.values.end())
                       : linf_distance(traj.occupation, set.limit, period);
      monotone = monotone && metric < prev_metric;
      prev_metric = metric;
      table.add_row({jtag, format_double(metric), traj.validation_failed ? "false" : "true"});

      m.set("top_field_population.J" + jtag, traj.top_field_population);
      m.set("top_mirror_population.J" + jtag, traj.top_mirror_population);
      m.set("ground_energy.J" + jtag, traj.ground_energy);
      m.set("ground_field_occupation_per_J.J" + jtag, traj.ground_field_occupation);
      m.set("norm_drift.J" + jtag, traj.max_norm_drift);
      m.set("energy_drift.J" + jtag, traj.max_energy_drift);
      if (traj.validation_failed) {
        any_validation_failure = true;
        m.set("validation.J" + jtag, "top-level population above 1e-6 (metastable leak)");
      }
    }
    if (!entropy_mode) write_series(m, dir, "occupation_TL.csv", set.limit);

    const std::string table_name = entropy_mode ? "entropy_max.csv" : "convergence.csv";
    write_table_csv(dir / table_name, table);
    m.add_artifact(table_name);
    m.set(entropy_mode ? "max_entropy_decreasing_in_J" : "linf_decreasing_in_J", monotone);
    if (plot_script)
      emit_plot_script(m, dir, entropy_mode ? "plot_fig3.py" : "plot_fig2.py",
                       entropy_mode ? "S_c(t)" : "<c†c>(t)");

    if (any_validation_failure)
      throw CutoffValidationError(
          "one or more J runs exceeded the 1e-6 top-level population limit; "
          "their series are written and flagged in the convergence table",
          "see manifest", 0.0);
  });
}

int run_phase_scan(CommonOptions& o, std::vector<double>& lambdas, double lambda_min,
                   double lambda_max, int lambda_count) {
  return run_command("phase-scan", o, [&](Manifest& m, const fs::path& dir) {
    if (lambdas.empty()) {
      if (lambda_count < 1 || lambda_max < lambda_min)
        throw std::invalid_argument("phase-scan: bad lambda grid");
      for (int i = 0; i < lambda_count; ++i)
        lambdas.push_back(lambda_count == 1
                              ? lambda_min
                              : lambda_min + (lambda_max - lambda_min) * i / (lambda_count - 1));
    }
    const double period = 2 * std::numbers::pi / o.params.omega_m;
    const auto times = make_time_grid(period, o.steps);
    m.set("steps", o.steps);
    m.set("lambda_grid_size", static_cast<int>(lambdas.size()));

    TrajectoryOptions topt;
    topt.seed = o.seed;
    topt.parity = parse_parity(o.parity);
    topt.compute_entropy = false;

    std::vector<std::future<MirrorTrajectory>> futures;
    for (double lam : lambdas) {
      ModelParams q = o.params;
      q.lambda = lam;
      futures.push_back(std::async(std::launch::async, [q, &times, topt] {
        return run_mirror_trajectory_with_policy(q, times, topt, ValidationPolicy::Complete);
      }));
    }

    Table table;
    table.columns = {"lambda",        "lambda_c", "mu",     "Omega",
                     "peak_finite_J", "peak_TL",  "ground_field_occupation_per_J", "validated"};
    bool any_validation_failure = false;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      ModelParams q = o.params;
      q.lambda = lambdas[i];
      const auto traj = futures[i].get();
      const double peak =
          *std::max_element(traj.occupation.values.begin(), traj.occupation.values.end());
      const bool srp = q.lambda > q.lambda_c();
      const double omega_drive = srp ? q.mirror_drive() : 0.0;
      const double peak_tl = srp ? 4 * omega_drive * omega_drive / (q.omega_m * q.omega_m) : 0.0;
      any_validation_failure = any_validation_failure || traj.validation_failed;
      table.add_row({format_double(q.lambda), format_double(q.lambda_c()),
                     format_double(q.lambda > 0 ? q.mu() : std::nan("")),
                     format_double(srp ? omega_drive : std::nan("")), format_double(peak),
                     format_double(peak_tl), format_double(traj.ground_field_occupation),
                     traj.validation_failed ? "false" : "true"});
    }
    write_table_csv(dir / "phase_scan.csv", table);
    m.add_artifact("phase_scan.csv");
    if (any_validation_failure)
      throw CutoffValidationError(
          "one or more scan points exceeded the 1e-6 top-level population limit; "
          "rows are flagged in phase_scan.csv",
          "see phase_scan.csv", 0.0);
  });
}

int run_classical(CommonOptions& o, double kappa, double t_end, double dt,
                  const std::string& initial, std::vector<double>& coords) {
  return run_command("classical", o, [&](Manifest& m, const fs::path& dir) {
    const ModelParams& p = o.params;
    const auto drive = forced_oscillator_drive(p, kappa);
    m.set("kappa", kappa);
    m.set("lambda_c_kappa", drive.lambda_c_kappa);
    m.set("drive", drive.value);
    m.set("drive_normal_phase", drive.normal_phase);

    const auto fps = fixed_points(p);
    Table fp_table;
    fp_table.columns = {"branch", "q1", "p1", "q2", "p2", "q3", "p3", "energy"};
    for (std::size_t i = 0; i < fps.size(); ++i) {
      const auto& s = fps[i];
      fp_table.add_row({std::to_string(i), format_double(s.q1), format_double(s.p1),
                        format_double(s.q2), format_double(s.p2), format_double(s.q3),
                        format_double(s.p3), format_double(classical_energy(s, p))});
    }
    write_table_csv(dir / "fixed_points.csv", fp_table);
    m.add_artifact("fixed_points.csv");

    ClassicalState start;
    start.j = p.j;
    if (!coords.empty()) {
      if (coords.size() != 6)
        throw std::invalid_argument("--state needs exactly six values q1,p1,q2,p2,q3,p3");
      start.q1 = coords[0];
      start.p1 = coords[1];
      start.q2 = coords[2];
      start.p2 = coords[3];
      start.q3 = coords[4];
      start.p3 = coords[5];
    } else if (initial == "fixed-point") {
      // displaced Dicke block with the mirror at the origin: the
      // forced-oscillator demonstration
      start = fps[0];
      start.q3 = 0;
      start.p3 = 0;
    } else if (initial != "origin") {
      throw std::invalid_argument("--initial must be origin|fixed-point (or use --state)");
    }

    const double period = 2 * std::numbers::pi / p.omega_m;
    const double t_total = t_end > 0 ? t_end : 2 * period;
    const double step = dt > 0 ? dt : period / 10000;
    m.set("t_end", t_total);
    m.set("dt", step);

    const auto traj = integrate(start, p, t_total, step);
    write_trajectory_csv(dir / "trajectory.csv", traj);
    m.add_artifact("trajectory.csv");
    m.set("truncated", traj.truncated);
    double drift = 0;
    for (double e : traj.energies)
      drift = std::max(drift, std::abs(e - traj.energies.front()) /
                                  std::max(1.0, std::abs(traj.energies.front())));
    m.set("energy_drift", drift);
    if (traj.truncated) {
      m.set("truncation_time", traj.truncation_time);
      std::ostringstream os;
      os << "trajectory left the spin coherent-state domain at t = " << traj.truncation_time
         << "; the emitted trajectory is truncated there";
      throw ClassicalDomainError(os.str());
    }
  });
}

int run_ground(CommonOptions& o, const std::string& model, double tol) {
  return run_command("ground", o, [&](Manifest& m, const fs::path& dir) {
    const ModelParams& p = o.params;
    m.set("model", model);

    CompositeBasis basis;
    Operator h = [&]() -> Operator {
      if (model == "dicke") {
        basis = dicke_basis(p);
        return build_dicke(p, basis);
      } else if (model == "full") {
        basis = full_basis(p);
        return build_full(p, basis);
      } else if (model == "hp") {
        basis = hp_basis(p);
        return build_hp(p, basis);
      } else if (model == "normal") {
        basis = hp_basis(p);
        return build_normal_phase(p, basis);
      } else if (model == "superradiant") {
        basis = hp_basis(p);
        return build_superradiant(p, basis);
      } else if (model == "mirror") {
        basis = mirror_basis(p);
        return build_mirror_driven(p, basis);
      }
      throw std::invalid_argument("--model must be dicke|full|hp|normal|superradiant|mirror");
    }();

    LanczosOptions lopt;
    lopt.tolerance = tol;
    lopt.max_iterations = 1500;
    lopt.seed = o.seed;
    const ParitySector sector = parse_parity(o.parity);
    const bool parity_applies = sector != ParitySector::None &&
                                (model == "dicke" || model == "full" || model == "hp");
    if (parity_applies) {
      const Eigen::VectorXd signs = parity_signs(basis, {0, 1});
      StateVector start = detail::seeded_start(basis.dim(), o.seed);
      const double want = sector == ParitySector::Even ? 1.0 : -1.0;
      for (Eigen::Index i = 0; i < start.size(); ++i)
        if (signs[i] != want) start[i] = 0;
      lopt.start = std::move(start);
    }
    const auto g = ground_state(h, lopt);
    const PureState ground(basis, g.vector);

    Table table;
    table.columns = {"observable", "value"};
    auto put = [&](const std::string& key, double v) {
      table.add_row({key, format_double(v)});
      m.set(key, v);
    };
    put("energy", g.energy);
    put("residual", g.residual);
    put("iterations", g.iterations);
    put("first_gap", g.first_gap);
    m.set("degenerate", g.degenerate);
    m.set("parity_projected", parity_applies);

    if (model == "dicke" || model == "full") {
      const Operator n_f = embed(fock_number(field_mode(p)), 0, basis);
      const Operator jz = embed(spin_operators(SpinSector(p.two_j())).z, 1, basis);
      put("field_occupation", expectation(n_f, ground));
      put("field_occupation_per_J", expectation(n_f, ground) / p.j);
      put("Jz", expectation(jz, ground));
    }
    if (model == "hp" || model == "normal" || model == "superradiant") {
      const Operator n_f = embed(fock_number(field_mode(p)), 0, basis);
      const Operator n_b = embed(fock_number(atom_mode(p)), 1, basis);
      put("field_occupation", expectation(n_f, ground));
      put("atom_boson_occupation", expectation(n_b, ground));
    }
    if (basis.arity() == 3) {
      const Operator n_c = embed(fock_number(mirror_mode(p)), 2, basis);
      put("mirror_occupation", expectation(n_c, ground));
      put("top_field_population", top_level_population(ground, 0));
      put("top_mirror_population", top_level_population(ground, 2));
    }
    if (model == "mirror") {
      const Operator n_c = embed(fock_number(mirror_mode(p)), 0, basis);
      put("mirror_occupation", expectation(n_c, ground));
    }
    write_table_csv(dir / "ground_observables.csv", table);
    m.add_artifact("ground_observables.csv");
  });
}

int run_evolve(CommonOptions& o, const std::string& model, const std::string& initial) {
  return run_command("evolve", o, [&](Manifest& m, const fs::path& dir) {
    const ModelParams& p = o.params;
    m.set("model", model);
    m.set("initial", initial);
    const auto times = time_grid(o);
    m.set("tmax", times.back());
    m.set("steps", o.steps);

    TrajectoryOptions topt;
    topt.seed = o.seed;
    topt.parity = parse_parity(o.parity);

    if (model == "full") {
      if (initial != "ground")
        throw std::invalid_argument("evolve --model full supports --initial ground");
      const auto traj =
          run_mirror_trajectory_with_policy(p, times, topt, ValidationPolicy::Complete);
      write_series(m, dir, "occupation.csv", traj.occupation);
      write_series(m, dir, "entropy.csv", traj.entropy);
      m.set("top_field_population", traj.top_field_population);
      m.set("top_mirror_population", traj.top_mirror_population);
      m.set("norm_drift", traj.max_norm_drift);
      m.set("energy_drift", traj.max_energy_drift);
      m.set("ground_energy", traj.ground_energy);
      if (traj.validation_failed)
        throw CutoffValidationError(
            "top-level population above 1e-6; series written and flagged", "see manifest",
            std::max(traj.top_field_population, traj.top_mirror_population));
      return;
    }

    if (model == "mirror") {
      const CompositeBasis basis = mirror_basis(p);
      const Operator h = build_mirror_driven(p, basis);
      const Operator n_c = embed(fock_number(mirror_mode(p)), 0, basis);
      std::vector<double> occ(times.size());
      evolve_observe(h, vacuum_state(basis), times,
                     [&](std::size_t i, double, const PureState& s) { occ[i] = expectation(n_c, s); });
      write_series(m, dir, "occupation.csv", TimeSeries(times, std::move(occ), "mirror"));
      return;
    }

    // bosonized three-factor models: block ground (or vacuum) x mirror vacuum
    const CompositeBasis basis = hp_basis(p);
    const CompositeBasis block = hp_block_basis(p);
    Operator h = [&]() -> Operator {
      if (model == "hp") return build_hp(p, basis);
      if (model == "normal") return build_normal_phase(p, basis);
      if (model == "superradiant") return build_superradiant(p, basis);
      throw std::invalid_argument("--model must be full|hp|normal|superradiant|mirror");
    }();
    PureState block_state = vacuum_state(block);
    if (initial == "ground") {
      const Operator hb = model == "hp" ? build_hp_block(p, block)
                          : model == "normal" ? build_normal_block(p, block)
                                              : build_superradiant_block(p, block);
      LanczosOptions lopt;
      lopt.seed = o.seed;
      lopt.max_iterations = 1500;
      block_state = PureState(block, ground_state(hb, lopt).vector);
    } else if (initial != "vacuum") {
      throw std::invalid_argument("--initial must be ground|vacuum");
    }
    const PureState psi0 = tensor(block_state, vacuum_state(mirror_basis(p)));
    const Operator n_c = embed(fock_number(mirror_mode(p)), 2, basis);

    std::vector<double> occ(times.size()), ent(times.size());
    double top_f = 0, top_m = 0;
    evolve_observe(h, psi0, times, [&](std::size_t i, double, const PureState& s) {
      occ[i] = expectation(n_c, s);
      ent[i] = von_neumann_entropy(reduce_to_mirror(s));
      top_f = std::max(top_f, top_level_population(s, 0));
      top_m = std::max(top_m, top_level_population(s, 2));
    });
    write_series(m, dir, "occupation.csv", TimeSeries(times, std::move(occ), model));
    write_series(m, dir, "entropy.csv", TimeSeries(times, std::move(ent), model));
    m.set("top_field_population", top_f);
    m.set("top_mirror_population", top_m);
    if (top_f > 1e-6 || top_m > 1e-6)
      throw CutoffValidationError("top-level population above 1e-6; series written and flagged",
                                  top_f > top_m ? "field" : "mirror", std::max(top_f, top_m));
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dicke model with a movable mirror: exact finite-J dynamics, "
               "thermodynamic-limit effective models, and semiclassical trajectories"};
  app.require_subcommand(1);

  CommonOptions opt;
  opt.command_line = join_args(argc, argv);
  const std::string config = scan_for_config(argc, argv);
  std::vector<std::string> config_keys;
  try {
    if (!config.empty()) opt.params = load_params(config, opt.params, &config_keys);
  } catch (const std::exception& e) {
    std::cerr << "config: " << e.what() << "\n";
    return 2;
  }

  // fig2: mean mirror occupation per J against the thermodynamic-limit curve
  std::vector<double> j_list{1, 3, 7, 15};
  bool tl_only = false;
  bool plot_script = false;
  auto* fig2 = app.add_subcommand("fig2", "mirror occupation vs time for a list of J, "
                                          "plus the driven thermodynamic-limit curve");
  add_common_flags(fig2, opt);
  fig2->add_option("--J-list", j_list, "finite-J values to simulate")->capture_default_str();
  fig2->add_flag("--tl-only", tl_only, "emit only the thermodynamic-limit curve");
  fig2->add_flag("--plot-script", plot_script, "emit a matplotlib script next to the CSVs");

  auto* fig3 = app.add_subcommand("fig3", "mirror Von Neumann entropy vs time per J");
  add_common_flags(fig3, opt);
  fig3->add_option("--J-list", j_list, "finite-J values to simulate")->capture_default_str();
  fig3->add_flag("--tl-only", tl_only, "emit nothing but the manifest (no finite-J series)");
  fig3->add_flag("--plot-script", plot_script, "emit a matplotlib script next to the CSVs");

  std::vector<double> lambdas;
  double lambda_min = 0.3, lambda_max = 0.7;
  int lambda_count = 9;
  auto* scan = app.add_subcommand("phase-scan",
                                  "peak mirror occupation and ground-state order parameter "
                                  "across the transition (command default: J = 1, 100 steps)");
  add_common_flags(scan, opt);
  scan->add_option("--lambdas", lambdas, "explicit lambda grid (overrides min/max/count)");
  scan->add_option("--lambda-min", lambda_min, "grid start")->capture_default_str();
  scan->add_option("--lambda-max", lambda_max, "grid end")->capture_default_str();
  scan->add_option("--lambda-count", lambda_count, "grid size")->capture_default_str();

  double kappa = 0, t_end = -1, dt = -1;
  std::string initial = "fixed-point";
  std::vector<double> coords;
  auto* classical = app.add_subcommand("classical", "semiclassical trajectory, fixed points, "
                                                    "and the forced-oscillator drive "
                                                    "(command default: J = 1e5)");
  add_common_flags(classical, opt);
  classical->add_option("--kappa", kappa, "cavity loss rate")->capture_default_str();
  classical->add_option("--t-end", t_end, "integration time (default: two mirror periods)");
  classical->add_option("--dt", dt, "RK4 step (default: mirror period / 10000)");
  classical->add_option("--initial", initial, "origin|fixed-point")->capture_default_str();
  classical->add_option("--state", coords, "explicit start q1,p1,q2,p2,q3,p3");

  std::string ground_model = "dicke";
  double ground_tol = 1e-10;
  auto* ground = app.add_subcommand("ground", "ground state and observables of one model");
  add_common_flags(ground, opt);
  ground->add_option("--model", ground_model, "dicke|full|hp|normal|superradiant|mirror")
      ->capture_default_str();
  ground->add_option("--tol", ground_tol, "eigensolver residual tolerance")->capture_default_str();

  std::string evolve_model = "full";
  std::string evolve_initial = "ground";
  auto* evolve_cmd = app.add_subcommand("evolve", "time evolution of one model from a standard "
                                                  "initial state");
  add_common_flags(evolve_cmd, opt);
  evolve_cmd->add_option("--model", evolve_model, "full|hp|normal|superradiant|mirror")
      ->capture_default_str();
  evolve_cmd->add_option("--initial", evolve_initial, "ground|vacuum")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  // per-command defaults, applied only when neither a flag nor the config
  // file pinned the value (priority: flag > config > command default)
  const bool config_has_j =
      std::find(config_keys.begin(), config_keys.end(), "J") != config_keys.end();
  if (scan->parsed()) {
    if (scan->get_option("--J")->count() == 0 && !config_has_j) opt.params.j = 1.0;
    if (scan->get_option("--steps")->count() == 0) opt.steps = 100;
  }
  if (classical->parsed() && classical->get_option("--J")->count() == 0 && !config_has_j)
    opt.params.j = 1e5;

  if (fig2->parsed()) return run_figure(false, opt, j_list, tl_only, plot_script);
  if (fig3->parsed()) return run_figure(true, opt, j_list, tl_only, plot_script);
  if (scan->parsed()) return run_phase_scan(opt, lambdas, lambda_min, lambda_max, lambda_count);
  if (classical->parsed()) return run_classical(opt, kappa, t_end, dt, initial, coords);
  if (ground->parsed()) return run_ground(opt, ground_model, ground_tol);
  if (evolve_cmd->parsed()) return run_evolve(opt, evolve_model, evolve_initial);
  return 1;
}
