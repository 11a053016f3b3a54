#pragma once

// Ground states and low-lying spectra: a dense solver for small dimensions
// and Lanczos with full reorthogonalization for large sparse Hamiltonians.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "optodicke/errors.hpp"
#include "optodicke/hilbert.hpp"

namespace optodicke {

inline constexpr std::uint64_t kDefaultSeed = 20110906;

struct EigenResult {
  std::vector<double> eigenvalues;        // ascending
  std::vector<StateVector> eigenvectors;  // empty when not requested
  std::vector<double> residuals;          // ||H v - E v|| per pair, when vectors exist
};

struct DenseSpectrumOptions {
  bool compute_vectors = true;
  Eigen::Index threshold = kDenseThreshold;
  double residual_factor = 1e-10;  // residuals must stay below factor * ||H||
};

// Full spectrum of a hermitian operator below the densification threshold.
inline EigenResult dense_spectrum(const Operator& h, const DenseSpectrumOptions& opt = {}) {
  if (!h.hermitian_hint())
    throw std::invalid_argument("dense_spectrum: operator is not flagged hermitian");
  if (h.dim() > opt.threshold)
    throw std::invalid_argument("dense_spectrum: dimension " + std::to_string(h.dim()) +
                                " exceeds the dense threshold " + std::to_string(opt.threshold));

  const DenseMatrix hd = to_dense(h, opt.threshold);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es;
  es.compute(hd, opt.compute_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("dense_spectrum: eigensolver failed to converge");

  EigenResult result;
  result.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + h.dim());
  if (opt.compute_vectors) {
    const double scale = std::max(std::abs(result.eigenvalues.front()),
                                  std::abs(result.eigenvalues.back()));
    const DenseMatrix residual_block =
        hd * es.eigenvectors() - es.eigenvectors() * es.eigenvalues().asDiagonal();
    result.eigenvectors.reserve(h.dim());
    result.residuals.reserve(h.dim());
    for (Eigen::Index i = 0; i < h.dim(); ++i) {
      result.eigenvectors.push_back(es.eigenvectors().col(i));
      const double r = residual_block.col(i).norm();
      result.residuals.push_back(r);
      if (r > opt.residual_factor * scale + 1e-300)
        throw ConvergenceError("dense_spectrum: residual " + std::to_string(r) +
                               " exceeds tolerance for eigenpair " + std::to_string(i));
    }
  }
  return result;
}

struct LanczosOptions {
  double tolerance = 1e-10;  // required residual ||H v - E v|| of the ground pair
  int max_iterations = 500;
  std::uint64_t seed = kDefaultSeed;    // start-vector seed; fixed for reproducibility
  std::optional<StateVector> start;     // overrides the seeded random start
};

struct GroundStateResult {
  double energy = 0;
  StateVector vector;
  double residual = 0;
  int iterations = 0;
  double first_gap = 0;    // estimate of E1 - E0 from the same Krylov space
  bool degenerate = false; // first_gap < 1e-8: callers must not assume a unique ground vector
};

namespace detail {

inline StateVector seeded_start(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  StateVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(u(rng), u(rng));
  return v;
}

}  // namespace detail

// Lowest eigenpair via Lanczos with full reorthogonalization (two classical
// Gram-Schmidt passes against the whole stored block per iteration).
// Deterministic given the seed. Throws ConvergenceError instead of returning
// a silent partial result.
inline GroundStateResult ground_state(const Operator& h, const LanczosOptions& opt) {
  if (!h.hermitian_hint())
    throw std::invalid_argument("ground_state: operator is not flagged hermitian");
  const Eigen::Index dim = h.dim();
  const SparseMatrix& m = h.matrix();
  const int max_steps = static_cast<int>(std::min<Eigen::Index>(opt.max_iterations, dim));

  StateVector v = opt.start ? *opt.start : detail::seeded_start(dim, opt.seed);
  if (v.size() != dim) throw BasisMismatchError("ground_state: start vector has wrong dimension");
  const double vnorm = v.norm();
  if (vnorm == 0) throw std::invalid_argument("ground_state: start vector is zero");
  v /= vnorm;

  DenseMatrix basis(dim, std::min(max_steps, 64));
  std::vector<double> alpha, beta;  // tridiagonal coefficients
  basis.col(0) = v;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tiny;
  auto ritz = [&](int k) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    tiny.compute(t);
  };

  int k = 0;
  bool exhausted = false;
  double matrix_scale = 0;
  while (k < max_steps) {
    if (k + 2 > basis.cols())
      basis.conservativeResize(Eigen::NoChange,
                               std::min(max_steps, static_cast<int>(basis.cols()) + 64));
    StateVector w = m * basis.col(k);
    alpha.push_back(std::real(basis.col(k).dot(w)));
    matrix_scale = std::max({matrix_scale, std::abs(alpha.back()), k > 0 ? beta.back() : 0.0});
    w -= alpha.back() * basis.col(k);
    if (k > 0) w -= beta.back() * basis.col(k - 1);
    // full reorthogonalization, two passes
    for (int pass = 0; pass < 2; ++pass)
      w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).adjoint() * w).eval();
    const double b = w.norm();
    ++k;
    if (b <= 1e-13 * std::max(1.0, matrix_scale)) {
      exhausted = true;  // invariant subspace: the Ritz pairs are exact
      break;
    }
    beta.push_back(b);
    if (k < max_steps) basis.col(k) = w / b;

    // convergence check: residual estimate of Ritz pair i is |beta_k * s_ki|
    if (exhausted || k >= 2) {
      const bool check = exhausted || k % 5 == 0 || k == max_steps;
      if (check) {
        ritz(k);
        const double est = beta.back() * std::abs(tiny.eigenvectors()(k - 1, 0));
        if (est < 0.5 * opt.tolerance) break;
      }
    }
  }

  ritz(k);
  GroundStateResult result;
  result.iterations = k;
  result.energy = tiny.eigenvalues()(0);
  result.vector = basis.leftCols(k) * tiny.eigenvectors().col(0).cast<Complex>();
  result.vector /= result.vector.norm();
  result.residual = (m * result.vector - result.energy * result.vector).norm();
  result.first_gap = k > 1 ? tiny.eigenvalues()(1) - tiny.eigenvalues()(0)
                           : std::numeric_limits<double>::infinity();
  result.degenerate = result.first_gap < 1e-8;

  if (result.residual >= opt.tolerance && !exhausted)
    throw ConvergenceError("ground_state: Lanczos residual " + std::to_string(result.residual) +
                           " above tolerance after " + std::to_string(k) + " iterations");
  return result;
}

inline GroundStateResult ground_state(const Operator& h, double tol = 1e-10) {
  LanczosOptions opt;
  opt.tolerance = tol;
  return ground_state(h, opt);
}

}  // namespace optodicke
