#pragma once

// Classical analogue of the model in the spin/field/mirror coherent-state
// representation: energy function, canonical equations of motion, fixed
// points across the pitchfork bifurcation, RK4 trajectories, and the
// forced-oscillator drive including the small-loss correction.

#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "optodicke/errors.hpp"
#include "optodicke/model.hpp"

namespace optodicke {

// Guard margin for the spin coherent-state domain (q1^2 + p1^2)/2 < 2J.
inline constexpr double kClassicalDomainMargin = 1e-9;

// Phase-space point. (q1,p1) is the collective spin patch, (q2,p2) the field,
// (q3,p3) the mirror; j sets the scale of the spin sphere.
struct ClassicalState {
  double q1 = 0, p1 = 0;
  double q2 = 0, p2 = 0;
  double q3 = 0, p3 = 0;
  double j = 1;

  double spin_energy() const noexcept { return 0.5 * (q1 * q1 + p1 * p1); }
  bool in_domain() const noexcept { return 2 * j - spin_energy() > kClassicalDomainMargin; }
};

using ClassicalDeriv = std::array<double, 6>;  // (dq1, dp1, dq2, dp2, dq3, dp3)

namespace detail {

inline void require_domain(const ClassicalState& s, const char* who) {
  if (!(s.j > 0)) throw std::invalid_argument(std::string(who) + ": J must be positive");
  if (!s.in_domain()) {
    std::ostringstream os;
    os << who << ": (q1^2+p1^2)/2 = " << s.spin_energy() << " leaves the domain < 2J = " << 2 * s.j;
    throw ClassicalDomainError(os.str());
  }
}

}  // namespace detail

// H = (omega0/2)(q1^2+p1^2) - J omega + (omega/2)(q2^2+p2^2) + (omega_m/2)(q3^2+p3^2)
//     + (2 lambda / sqrt(2J)) sqrt(2J - H1) q1 q2 - (g0 sqrt(2)/(4J)) (q2^2+p2^2) q3.
inline double classical_energy(const ClassicalState& s, const ModelParams& p) {
  detail::require_domain(s, "classical_energy");
  const double h1 = s.spin_energy();
  const double two_j = 2 * s.j;
  double e = 0.5 * p.omega0 * (s.q1 * s.q1 + s.p1 * s.p1) - s.j * p.omega;
  e += 0.5 * p.omega * (s.q2 * s.q2 + s.p2 * s.p2);
  e += 0.5 * p.omega_m * (s.q3 * s.q3 + s.p3 * s.p3);
  e += (2 * p.lambda / std::sqrt(two_j)) * std::sqrt(two_j - h1) * s.q1 * s.q2;
  e -= (p.g0 * std::sqrt(2.0) / (4 * s.j)) * (s.q2 * s.q2 + s.p2 * s.p2) * s.q3;
  return e;
}

// Canonical flow of classical_energy (dq = dH/dp, dp = -dH/dq).
inline ClassicalDeriv eom_rhs(const ClassicalState& s, const ModelParams& p) {
  detail::require_domain(s, "eom_rhs");
  const double two_j = 2 * s.j;
  const double root = std::sqrt(two_j - s.spin_energy());
  const double lam = p.lambda / std::sqrt(two_j);
  const double gj2 = p.g0 * std::sqrt(2.0) / (2 * s.j);
  const double gj4 = p.g0 * std::sqrt(2.0) / (4 * s.j);

  ClassicalDeriv d;
  d[0] = p.omega0 * s.p1 - lam * s.p1 * s.q1 * s.q2 / root;
  d[1] = -p.omega0 * s.q1 - 2 * lam * root * s.q2 + lam * s.q1 * s.q1 * s.q2 / root;
  d[2] = p.omega * s.p2 - gj2 * s.p2 * s.q3;
  d[3] = -p.omega * s.q2 - 2 * lam * root * s.q1 + gj2 * s.q2 * s.q3;
  d[4] = p.omega_m * s.p3;
  d[5] = -p.omega_m * s.q3 + gj4 * (s.q2 * s.q2 + s.p2 * s.p2);
  return d;
}

// Stable fixed points. Below the critical coupling only the origin exists;
// at and above it the pitchfork produces two displaced branches
//   q1 = -/+ sqrt(2J(1-mu)),  q2 = +/- sqrt(4J lambda^2/omega^2 (1-mu^2)),
// with the mirror at its static equilibrium q3 = sqrt(2) g0 lambda^2 (1-mu^2)
// / (omega^2 omega_m). The Dicke block is the g0 = 0 fixed point; the
// back-action of the mirror on it is an O(g0/sqrt(J)) residual.
// The +q2 branch is listed first.
inline std::vector<ClassicalState> fixed_points(const ModelParams& p) {
  p.validate();
  ClassicalState origin;
  origin.j = p.j;
  if (p.lambda < p.lambda_c()) return {origin};

  const double mu = p.mu();
  const double q1 = std::sqrt(std::max(0.0, 2 * p.j * (1 - mu)));
  const double q2 =
      std::sqrt(std::max(0.0, 4 * p.j * p.lambda * p.lambda / (p.omega * p.omega) * (1 - mu * mu)));
  const double q3 = std::sqrt(2.0) * p.g0 * p.lambda * p.lambda * (1 - mu * mu) /
                    (p.omega * p.omega * p.omega_m);

  ClassicalState plus = origin, minus = origin;
  plus.q1 = -q1;
  plus.q2 = q2;
  plus.q3 = q3;
  minus.q1 = q1;
  minus.q2 = -q2;
  minus.q3 = q3;
  return {plus, minus};
}

struct Trajectory {
  std::vector<double> times;
  std::vector<ClassicalState> states;
  std::vector<double> energies;
  bool truncated = false;       // stopped early on a domain violation
  double truncation_time = 0;   // time of the last valid state when truncated
};

// Fixed-step classical RK4; energies recorded at every step. A domain
// violation mid-trajectory truncates the output and sets the flag instead of
// throwing.
inline Trajectory integrate(const ClassicalState& s0, const ModelParams& p, double t_end,
                            double dt) {
  if (t_end <= 0 || dt <= 0 || !std::isfinite(dt) || !std::isfinite(t_end))
    throw std::invalid_argument("integrate: need t_end > 0 and dt > 0");
  detail::require_domain(s0, "integrate");

  const auto step_state = [](const ClassicalState& s, const ClassicalDeriv& d, double h) {
    ClassicalState r = s;
    r.q1 += h * d[0];
    r.p1 += h * d[1];
    r.q2 += h * d[2];
    r.p2 += h * d[3];
    r.q3 += h * d[4];
    r.p3 += h * d[5];
    return r;
  };

  const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  Trajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  traj.energies.reserve(n_steps + 1);

  ClassicalState s = s0;
  double t = 0;
  traj.times.push_back(t);
  traj.states.push_back(s);
  traj.energies.push_back(classical_energy(s, p));

  for (std::size_t i = 0; i < n_steps; ++i) {
    const double h = std::min(dt, t_end - t);
    try {
      const ClassicalDeriv k1 = eom_rhs(s, p);
      const ClassicalDeriv k2 = eom_rhs(step_state(s, k1, h / 2), p);
      const ClassicalDeriv k3 = eom_rhs(step_state(s, k2, h / 2), p);
      const ClassicalDeriv k4 = eom_rhs(step_state(s, k3, h), p);
      ClassicalState next = s;
      next.q1 += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
      next.p1 += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
      next.q2 += h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]);
      next.p2 += h / 6 * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3]);
      next.q3 += h / 6 * (k1[4] + 2 * k2[4] + 2 * k3[4] + k4[4]);
      next.p3 += h / 6 * (k1[5] + 2 * k2[5] + 2 * k3[5] + k4[5]);
      if (!next.in_domain()) throw ClassicalDomainError("domain violation");
      s = next;
    } catch (const ClassicalDomainError&) {
      traj.truncated = true;
      traj.truncation_time = t;
      return traj;
    }
    t += h;
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.energies.push_back(classical_energy(s, p));
  }
  return traj;
}

// Critical coupling with cavity loss rate kappa:
// lambda_c(kappa) = (1/2) sqrt(omega omega0 (1 + kappa^2/omega^2)).
inline double lambda_c_dissipative(const ModelParams& p, double kappa) {
  return 0.5 * std::sqrt(p.omega * p.omega0 * (1 + kappa * kappa / (p.omega * p.omega)));
}

struct DriveResult {
  double value = 0;          // constant forcing term of the mirror oscillator
  bool normal_phase = false; // true when lambda is below lambda_c(kappa): no drive
  double lambda_c_kappa = 0;
};

// Forcing term of the mirror equation of motion in the macroscopic limit:
// 0 below lambda_c(kappa), else sqrt(2) omega_m g0 (lambda^2/omega^2)(1-mu^2),
// reduced by (1 - kappa^2/omega^2) for small cavity losses.
inline DriveResult forced_oscillator_drive(const ModelParams& p, double kappa = 0) {
  if (kappa < 0) throw std::invalid_argument("forced_oscillator_drive: kappa must be >= 0");
  p.validate();
  DriveResult r;
  r.lambda_c_kappa = lambda_c_dissipative(p, kappa);
  if (p.lambda < r.lambda_c_kappa) {
    r.normal_phase = true;
    return r;
  }
  const double mu = p.mu();
  r.value = std::sqrt(2.0) * p.omega_m * p.g0 * (p.lambda * p.lambda / (p.omega * p.omega)) *
            (1 - mu * mu) * (1 - kappa * kappa / (p.omega * p.omega));
  return r;
}

// Coherent-state parameters to phase-space coordinates:
//   q1 = sqrt(J/(1+|w|^2)) (w + conj w),  p1 = sqrt(J/(1+|w|^2)) (w - conj w)/i,
//   q2 = (z_a + conj z_a)/sqrt(2),        p2 = (z_a - conj z_a)/(i sqrt(2)),
// and (q3, p3) like (q2, p2) with z_c. w = 0 is the south pole |J,-J>.
inline ClassicalState coherent_coordinates(Complex z_a, Complex w, Complex z_c, double j) {
  if (!(j > 0)) throw std::invalid_argument("coherent_coordinates: J must be positive");
  ClassicalState s;
  s.j = j;
  const double stereographic = std::sqrt(j / (1 + std::norm(w)));
  s.q1 = stereographic * 2 * w.real();
  s.p1 = stereographic * 2 * w.imag();
  s.q2 = std::sqrt(2.0) * z_a.real();
  s.p2 = std::sqrt(2.0) * z_a.imag();
  s.q3 = std::sqrt(2.0) * z_c.real();
  s.p3 = std::sqrt(2.0) * z_c.imag();
  return s;
}

}  // namespace optodicke
