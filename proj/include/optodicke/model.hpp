#pragma once

// Model parameters (bare and derived) and every Hamiltonian builder: the
// physical-cavity derivation of the couplings, the Dicke Hamiltonian with a
// movable mirror, the Holstein-Primakoff form, and the thermodynamic-limit
// effective Hamiltonians of the normal and super-radiant phases.
//
// Unit convention: the cavity frequency sets the energy unit (omega = 1 in
// all defaults); time is measured in 1/omega.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "optodicke/errors.hpp"
#include "optodicke/hilbert.hpp"

namespace optodicke {

// Hamiltonians above this dimension are refused outright; they would not fit
// the memory budget of a workstation run.
inline constexpr Eigen::Index kMaxHamiltonianDim = 1 << 22;

// Microscopic cavity data from which the coupling constants derive.
struct PhysicalCavityParams {
  int mode_index = 1;               // longitudinal mode number n
  double light_speed = 1.0;         // C
  double cavity_length = 1.0;       // L, mirror separation
  double atom_position = 0.5;       // x0, 0 < x0 < L
  double dipole_moment = 1.0;       // atomic dipole matrix element
  double vacuum_permittivity = 1.0; // epsilon_0
  double mirror_mass = 1.0;         // effective mass of the movable mirror
  double mirror_frequency = 1.0;    // omega_m of the restoring force
  int atom_number = 1;              // N

  void validate() const {
    if (mode_index < 1) throw std::invalid_argument("PhysicalCavityParams: mode_index must be >= 1");
    if (atom_number < 1) throw std::invalid_argument("PhysicalCavityParams: atom_number must be >= 1");
    if (light_speed <= 0 || cavity_length <= 0 || dipole_moment <= 0 ||
        vacuum_permittivity <= 0 || mirror_mass <= 0 || mirror_frequency <= 0)
      throw std::invalid_argument("PhysicalCavityParams: physical quantities must be positive");
    if (atom_position <= 0 || atom_position >= cavity_length)
      throw std::invalid_argument("PhysicalCavityParams: atom position must satisfy 0 < x0 < L");
  }
};

struct DerivedCouplings {
  double omega;            // n pi C / L
  double wavenumber;       // k = n pi / L
  double field_amplitude;  // rms vacuum field, sqrt(omega / (epsilon_0 L))
  double lambda;           // atom-field coupling
  double delta;            // [sin(k x0) + k x0 cos(k x0)] / L
  double g;                // radiation-pressure coupling per photon
  double eta;              // three-body coupling strength
  double g0;               // g N, the scaled radiation-pressure coupling
};

inline DerivedCouplings derive_couplings(const PhysicalCavityParams& p) {
  p.validate();
  const double pi = std::numbers::pi;
  DerivedCouplings d;
  d.omega = p.mode_index * pi * p.light_speed / p.cavity_length;
  d.wavenumber = p.mode_index * pi / p.cavity_length;
  d.field_amplitude = std::sqrt(d.omega / (p.vacuum_permittivity * p.cavity_length));
  const double kx0 = d.wavenumber * p.atom_position;
  d.lambda = p.dipole_moment * d.field_amplitude * std::sin(kx0);
  d.delta = (std::sin(kx0) + kx0 * std::cos(kx0)) / p.cavity_length;
  const double zp = std::sqrt(2 * p.mirror_mass * p.mirror_frequency);
  d.g = d.omega / (p.cavity_length * zp);
  d.eta = p.dipole_moment * d.field_amplitude * d.delta / zp;
  d.g0 = d.g * p.atom_number;
  return d;
}

// Root of sin(x) + x cos(x) in (pi/2, pi): the value of k x0 at which the
// three-body coupling vanishes (atoms near 2L/3 for the fundamental mode).
// Bisection; residual below 1e-12.
inline double eta_zero_position() {
  auto f = [](double x) { return std::sin(x) + x * std::cos(x); };
  double lo = std::numbers::pi / 2, hi = std::numbers::pi;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Working parameter set for all simulations.
struct ModelParams {
  double omega = 1.0;    // field frequency (energy unit)
  double omega0 = 1.0;   // atomic level splitting
  double omega_m = 0.1;  // mirror frequency
  double lambda = 0.6;   // atom-field coupling
  double g0 = 0.2;       // scaled radiation-pressure coupling g N
  double j = 7.0;        // collective spin J; N = 2J atoms
  int cutoff_field = 40;
  int cutoff_mirror = 40;
  int cutoff_atom = 0;   // Holstein-Primakoff boson cutoff; <= 0 means min(N, 40)

  void validate() const {
    if (omega <= 0 || omega0 <= 0 || omega_m <= 0)
      throw std::invalid_argument("ModelParams: frequencies must be positive");
    if (lambda < 0) throw std::invalid_argument("ModelParams: lambda must be >= 0");
    if (g0 < 0) throw std::invalid_argument("ModelParams: g0 must be >= 0");
    if (j < 0.5 || std::abs(2 * j - std::round(2 * j)) > 1e-9)
      throw std::invalid_argument("ModelParams: J must be a half-integer >= 1/2");
    if (cutoff_field < 1 || cutoff_mirror < 1)
      throw std::invalid_argument("ModelParams: cutoffs must be >= 1");
  }

  int two_j() const { return static_cast<int>(std::llround(2 * j)); }
  // N = 2J; integer-valued by construction.
  int n_atoms() const { return two_j(); }
  int atom_cutoff() const { return cutoff_atom > 0 ? cutoff_atom : std::min(n_atoms(), 40); }

  double lambda_c() const { return 0.5 * std::sqrt(omega * omega0); }

  // mu = omega omega0 / (4 lambda^2) = (lambda_c / lambda)^2; mu <= 1 in the
  // super-radiant phase.
  double mu() const {
    if (lambda <= 0) throw std::invalid_argument("mu is undefined at lambda = 0");
    return omega * omega0 / (4 * lambda * lambda);
  }

  bool superradiant() const { return lambda >= lambda_c(); }

  // Classical drive amplitude on the mirror, Omega = -(g0 lambda^2/omega^2)(1 - mu^2).
  double mirror_drive() const {
    require_superradiant("mirror drive");
    const double m = mu();
    const double v = -(g0 * lambda * lambda / (omega * omega)) * (1 - m * m);
    return v == 0.0 ? 0.0 : v;
  }

  // Square of the field displacement in the super-radiant phase;
  // <a^dag a>/J -> alpha/J in the thermodynamic limit.
  double alpha() const {
    require_superradiant("field displacement");
    const double m = mu();
    return (lambda * lambda / (omega * omega)) * n_atoms() * (1 - m * m);
  }

  double beta() const {
    require_superradiant("atomic displacement");
    return 0.5 * n_atoms() * (1 - mu());
  }

  void require_superradiant(const std::string& what) const {
    if (lambda < lambda_c()) {
      std::ostringstream os;
      os << what << " requires lambda >= lambda_c: lambda = " << lambda
         << ", lambda_c = " << lambda_c();
      if (lambda > 0) os << ", mu = " << mu();
      throw PhaseError(os.str(), lambda, lambda_c(), lambda > 0 ? mu() : 0.0);
    }
  }
};

// --- canonical bases (factor order is part of the public contract) ---------

inline FockMode field_mode(const ModelParams& p) { return FockMode(p.cutoff_field, "field"); }
inline FockMode mirror_mode(const ModelParams& p) { return FockMode(p.cutoff_mirror, "mirror"); }
inline FockMode atom_mode(const ModelParams& p) { return FockMode(p.atom_cutoff(), "atoms"); }

inline CompositeBasis dicke_basis(const ModelParams& p) {
  return CompositeBasis{SpaceFactor(field_mode(p)), SpaceFactor(SpinSector(p.two_j()))};
}
inline CompositeBasis full_basis(const ModelParams& p) {
  return CompositeBasis{SpaceFactor(field_mode(p)), SpaceFactor(SpinSector(p.two_j())),
                        SpaceFactor(mirror_mode(p))};
}
inline CompositeBasis hp_basis(const ModelParams& p) {
  return CompositeBasis{SpaceFactor(field_mode(p)), SpaceFactor(atom_mode(p)),
                        SpaceFactor(mirror_mode(p))};
}
inline CompositeBasis hp_block_basis(const ModelParams& p) {
  return CompositeBasis{SpaceFactor(field_mode(p)), SpaceFactor(atom_mode(p))};
}
inline CompositeBasis mirror_basis(const ModelParams& p) {
  return CompositeBasis{SpaceFactor(mirror_mode(p))};
}

namespace detail {

inline void require_basis(const CompositeBasis& given, const CompositeBasis& expected,
                          const char* builder) {
  if (given != expected)
    throw BasisMismatchError(std::string(builder) + ": basis " + given.describe() +
                             " does not match the expected layout " + expected.describe());
  if (given.dim() > kMaxHamiltonianDim)
    throw std::runtime_error(std::string(builder) + ": dimension " + std::to_string(given.dim()) +
                             " exceeds the build budget");
}

inline Operator finalize_hermitian(const CompositeBasis& basis, const SparseMatrix& m,
                                   const char* builder) {
  Operator h(basis, m, true);
  if (h.hermiticity_defect() >= 1e-12)
    throw std::logic_error(std::string(builder) + ": assembled matrix is not hermitian");
  return h;
}

}  // namespace detail

// Dicke Hamiltonian on field (x) spin:
//   omega a^dag a + omega0 J_z + (lambda/sqrt(N)) (a^dag + a)(J+ + J-).
inline Operator build_dicke(const ModelParams& p, const CompositeBasis& basis) {
  p.validate();
  detail::require_basis(basis, dicke_basis(p), "build_dicke");

  const FockMode field = field_mode(p);
  const SpinSector sector(p.two_j());
  const auto spin = spin_operators(sector);

  const SparseMatrix n_f = embed(fock_number(field), 0, basis).matrix();
  const SparseMatrix j_z = embed(spin.z, 1, basis).matrix();
  const SparseMatrix x_f =
      embed(fock_annihilation(field) + fock_creation(field), 0, basis).matrix();
  const SparseMatrix j_x = embed(spin.plus + spin.minus, 1, basis).matrix();

  SparseMatrix h = p.omega * n_f + p.omega0 * j_z;
  h += (p.lambda / std::sqrt(static_cast<double>(p.n_atoms()))) * SparseMatrix(x_f * j_x);
  return detail::finalize_hermitian(basis, h, "build_dicke");
}

// Full tripartite Hamiltonian on field (x) spin (x) mirror:
//   H_Dicke + omega_m c^dag c - (g0/N) a^dag a (c^dag + c)
// and, when a three-body coupling eta is supplied,
//   - (eta/sqrt(N)) (c^dag + c)(a^dag + a)(J+ + J-).
inline Operator build_full(const ModelParams& p, const CompositeBasis& basis,
                           std::optional<double> eta = std::nullopt) {
  p.validate();
  detail::require_basis(basis, full_basis(p), "build_full");

  const FockMode field = field_mode(p);
  const FockMode mirror = mirror_mode(p);
  const SpinSector sector(p.two_j());
  const auto spin = spin_operators(sector);
  const double n = p.n_atoms();

  const SparseMatrix n_f = embed(fock_number(field), 0, basis).matrix();
  const SparseMatrix j_z = embed(spin.z, 1, basis).matrix();
  const SparseMatrix n_c = embed(fock_number(mirror), 2, basis).matrix();
  const SparseMatrix x_f =
      embed(fock_annihilation(field) + fock_creation(field), 0, basis).matrix();
  const SparseMatrix j_x = embed(spin.plus + spin.minus, 1, basis).matrix();
  const SparseMatrix x_c =
      embed(fock_annihilation(mirror) + fock_creation(mirror), 2, basis).matrix();

  SparseMatrix h = p.omega * n_f + p.omega0 * j_z + p.omega_m * n_c;
  h += (p.lambda / std::sqrt(n)) * SparseMatrix(x_f * j_x);
  h -= (p.g0 / n) * SparseMatrix(n_f * x_c);
  if (eta) h -= (*eta / std::sqrt(n)) * SparseMatrix(SparseMatrix(x_c * x_f) * j_x);
  return detail::finalize_hermitian(basis, h, "build_full");
}

// Holstein-Primakoff form on field (x) atom-boson (x) mirror:
//   omega a^dag a + omega0 b^dag b + omega_m c^dag c - (g0/N) a^dag a (c^dag + c)
//   + lambda (a^dag + a)(b^dag f(b^dag b) + f(b^dag b) b),   f(n) = sqrt(1 - n/N).
// The atom-boson cutoff must not exceed N, else f turns imaginary.
inline Operator build_hp(const ModelParams& p, const CompositeBasis& basis) {
  p.validate();
  detail::require_basis(basis, hp_basis(p), "build_hp");
  const int n = p.n_atoms();
  if (p.atom_cutoff() > n)
    throw std::invalid_argument("build_hp: atom-boson cutoff " + std::to_string(p.atom_cutoff()) +
                                " exceeds N = " + std::to_string(n));

  const FockMode field = field_mode(p);
  const FockMode atoms = atom_mode(p);
  const FockMode mirror = mirror_mode(p);

  // f(b^dag b) as a diagonal in the occupation basis.
  const int da = atoms.dim();
  SparseMatrix f(da, da);
  f.reserve(Eigen::VectorXi::Constant(da, 1));
  for (int k = 0; k < da; ++k) f.insert(k, k) = std::sqrt(1.0 - static_cast<double>(k) / n);
  const Operator f_op(CompositeBasis{SpaceFactor(atoms)}, std::move(f), true);

  const Operator b = fock_annihilation(atoms);
  const Operator b_dag = fock_creation(atoms);
  const Operator coupling_atom = b_dag * f_op + f_op * b;

  const SparseMatrix n_f = embed(fock_number(field), 0, basis).matrix();
  const SparseMatrix n_b = embed(fock_number(atoms), 1, basis).matrix();
  const SparseMatrix n_c = embed(fock_number(mirror), 2, basis).matrix();
  const SparseMatrix x_f =
      embed(fock_annihilation(field) + fock_creation(field), 0, basis).matrix();
  const SparseMatrix x_c =
      embed(fock_annihilation(mirror) + fock_creation(mirror), 2, basis).matrix();
  const SparseMatrix coupling = embed(coupling_atom, 1, basis).matrix();

  SparseMatrix h = p.omega * n_f + p.omega0 * n_b + p.omega_m * n_c;
  h -= (p.g0 / static_cast<double>(n)) * SparseMatrix(n_f * x_c);
  h += p.lambda * SparseMatrix(x_f * coupling);
  return detail::finalize_hermitian(basis, h, "build_hp");
}

// Two-mode block of the Holstein-Primakoff form (no mirror terms).
inline Operator build_hp_block(const ModelParams& p, const CompositeBasis& basis) {
  p.validate();
  detail::require_basis(basis, hp_block_basis(p), "build_hp_block");
  const int n = p.n_atoms();
  if (p.atom_cutoff() > n)
    throw std::invalid_argument("build_hp_block: atom-boson cutoff exceeds N");
  const FockMode field = field_mode(p);
  const FockMode atoms = atom_mode(p);

  const int da = atoms.dim();
  SparseMatrix f(da, da);
  f.reserve(Eigen::VectorXi::Constant(da, 1));
  for (int k = 0; k < da; ++k) f.insert(k, k) = std::sqrt(1.0 - static_cast<double>(k) / n);
  const Operator f_op(CompositeBasis{SpaceFactor(atoms)}, std::move(f), true);
  const Operator coupling_atom = fock_creation(atoms) * f_op + f_op * fock_annihilation(atoms);

  SparseMatrix h = p.omega * embed(fock_number(field), 0, basis).matrix() +
                   p.omega0 * embed(fock_number(atoms), 1, basis).matrix();
  h += p.lambda * SparseMatrix(embed(fock_annihilation(field) + fock_creation(field), 0, basis).matrix() *
                               embed(coupling_atom, 1, basis).matrix());
  return detail::finalize_hermitian(basis, h, "build_hp_block");
}

// Two-mode Dicke block of the normal phase (thermodynamic limit):
//   omega a^dag a + omega0 b^dag b + lambda (a^dag + a)(b^dag + b).
inline Operator build_normal_block(const ModelParams& p, const CompositeBasis& basis) {
  p.validate();
  detail::require_basis(basis, hp_block_basis(p), "build_normal_block");
  const FockMode field = field_mode(p);
  const FockMode atoms = atom_mode(p);

  const SparseMatrix n_f = embed(fock_number(field), 0, basis).matrix();
  const SparseMatrix n_b = embed(fock_number(atoms), 1, basis).matrix();
  const SparseMatrix x_f =
      embed(fock_annihilation(field) + fock_creation(field), 0, basis).matrix();
  const SparseMatrix x_b =
      embed(fock_annihilation(atoms) + fock_creation(atoms), 1, basis).matrix();

  SparseMatrix h = p.omega * n_f + p.omega0 * n_b;
  h += p.lambda * SparseMatrix(x_f * x_b);
  return detail::finalize_hermitian(basis, h, "build_normal_block");
}

// Normal-phase effective Hamiltonian: the two-mode block plus a free mirror.
// The mirror factor commutes with everything else.
inline Operator build_normal_phase(const ModelParams& p, const CompositeBasis& basis) {
  p.validate();
  detail::require_basis(basis, hp_basis(p), "build_normal_phase");
  const FockMode field = field_mode(p);
  const FockMode atoms = atom_mode(p);
  const FockMode mirror = mirror_mode(p);

  const SparseMatrix n_f = embed(fock_number(field), 0, basis).matrix();
  const SparseMatrix n_b = embed(fock_number(atoms), 1, basis).matrix();
  const SparseMatrix n_c = embed(fock_number(mirror), 2, basis).matrix();
  const SparseMatrix x_f =
      embed(fock_annihilation(field) + fock_creation(field), 0, basis).matrix();
  const SparseMatrix x_b =
      embed(fock_annihilation(atoms) + fock_creation(atoms), 1, basis).matrix();

  SparseMatrix h = p.omega * n_f + p.omega0 * n_b + p.omega_m * n_c;
  h += p.lambda * SparseMatrix(x_f * x_b);
  return detail::finalize_hermitian(basis, h, "build_normal_phase");
}

// Two-mode Dicke block of the super-radiant phase (thermodynamic limit):
//   omega a^dag a + (omega0 (1+mu)/(2 mu)) b^dag b
//   + (omega0 (1-mu)(3+mu) / (8 mu (1+mu))) (b^dag + b)^2
//   + lambda mu sqrt(2/(1+mu)) (a^dag + a)(b^dag + b).
inline Operator build_superradiant_block(const ModelParams& p, const CompositeBasis& basis) {
  p.validate();
  p.require_superradiant("build_superradiant_block");
  detail::require_basis(basis, hp_block_basis(p), "build_superradiant_block");
  const FockMode field = field_mode(p);
  const FockMode atoms = atom_mode(p);
  const double mu = p.mu();

  const SparseMatrix n_f = embed(fock_number(field), 0, basis).matrix();
  const SparseMatrix n_b = embed(fock_number(atoms), 1, basis).matrix();
  const SparseMatrix x_f =
      embed(fock_annihilation(field) + fock_creation(field), 0, basis).matrix();
  const SparseMatrix x_b =
      embed(fock_annihilation(atoms) + fock_creation(atoms), 1, basis).matrix();

  SparseMatrix h = p.omega * n_f + (p.omega0 * (1 + mu) / (2 * mu)) * n_b;
  h += (p.omega0 * (1 - mu) * (3 + mu) / (8 * mu * (1 + mu))) * SparseMatrix(x_b * x_b);
  h += (p.lambda * mu * std::sqrt(2 / (1 + mu))) * SparseMatrix(x_f * x_b);
  return detail::finalize_hermitian(basis, h, "build_superradiant_block");
}

// Super-radiant effective Hamiltonian: displaced two-mode block plus a mirror
// that decouples from the Dicke system but picks up the classical drive
// Omega (c^dag + c). Rejected in the normal phase, where the drive-coefficient
// sign convention is meaningless.
inline Operator build_superradiant(const ModelParams& p, const CompositeBasis& basis) {
  p.validate();
  p.require_superradiant("build_superradiant");
  detail::require_basis(basis, hp_basis(p), "build_superradiant");
  const FockMode field = field_mode(p);
  const FockMode atoms = atom_mode(p);
  const FockMode mirror = mirror_mode(p);
  const double mu = p.mu();

  const SparseMatrix n_f = embed(fock_number(field), 0, basis).matrix();
  const SparseMatrix n_b = embed(fock_number(atoms), 1, basis).matrix();
  const SparseMatrix n_c = embed(fock_number(mirror), 2, basis).matrix();
  const SparseMatrix x_f =
      embed(fock_annihilation(field) + fock_creation(field), 0, basis).matrix();
  const SparseMatrix x_b =
      embed(fock_annihilation(atoms) + fock_creation(atoms), 1, basis).matrix();
  const SparseMatrix x_c =
      embed(fock_annihilation(mirror) + fock_creation(mirror), 2, basis).matrix();

  SparseMatrix h = p.omega * n_f + (p.omega0 * (1 + mu) / (2 * mu)) * n_b + p.omega_m * n_c;
  h += (p.omega0 * (1 - mu) * (3 + mu) / (8 * mu * (1 + mu))) * SparseMatrix(x_b * x_b);
  h += (p.lambda * mu * std::sqrt(2 / (1 + mu))) * SparseMatrix(x_f * x_b);
  h += p.mirror_drive() * x_c;
  return detail::finalize_hermitian(basis, h, "build_superradiant");
}

// Driven-mirror Hamiltonian omega_m c^dag c + Omega (c^dag + c).
inline Operator build_mirror_driven(const ModelParams& p, const CompositeBasis& basis) {
  p.validate();
  p.require_superradiant("build_mirror_driven");
  detail::require_basis(basis, mirror_basis(p), "build_mirror_driven");
  const FockMode mirror = mirror_mode(p);

  SparseMatrix h = p.omega_m * fock_number(mirror).matrix();
  h += p.mirror_drive() * (fock_annihilation(mirror) + fock_creation(mirror)).matrix();
  return detail::finalize_hermitian(basis, h, "build_mirror_driven");
}

// --- parameter files --------------------------------------------------------
// Flat key=value text; blank lines and '#' comments allowed; unknown keys
// rejected. Keys: omega, omega0, omega_m, lambda, g0, J, cutoff_field,
// cutoff_mirror, cutoff_atom.

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size())
    throw std::invalid_argument("parameter file: bad numeric value '" + value + "' for " + key);
  return v;
}

inline int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_real(key, value);
  if (v != std::floor(v))
    throw std::invalid_argument("parameter file: " + key + " must be an integer, got '" + value + "'");
  return static_cast<int>(v);
}

}  // namespace detail

inline void apply_param(ModelParams& p, const std::string& key, const std::string& value) {
  if (key == "omega") p.omega = detail::parse_real(key, value);
  else if (key == "omega0") p.omega0 = detail::parse_real(key, value);
  else if (key == "omega_m") p.omega_m = detail::parse_real(key, value);
  else if (key == "lambda") p.lambda = detail::parse_real(key, value);
  else if (key == "g0") p.g0 = detail::parse_real(key, value);
  else if (key == "J") p.j = detail::parse_real(key, value);
  else if (key == "cutoff_field") p.cutoff_field = detail::parse_int(key, value);
  else if (key == "cutoff_mirror") p.cutoff_mirror = detail::parse_int(key, value);
  else if (key == "cutoff_atom") p.cutoff_atom = detail::parse_int(key, value);
  else throw std::invalid_argument("parameter file: unknown key '" + key + "'");
}

inline ModelParams load_params(const std::string& path, ModelParams defaults = {},
                               std::vector<std::string>* seen_keys = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open parameter file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = detail::trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("parameter file: line " + std::to_string(lineno) +
                                  " is not key=value: '" + stripped + "'");
    const std::string key = detail::trim(stripped.substr(0, eq));
    apply_param(defaults, key, detail::trim(stripped.substr(eq + 1)));
    if (seen_keys) seen_keys->push_back(key);
  }
  defaults.validate();
  return defaults;
}

}  // namespace optodicke
