#pragma once

// Truncated bosonic and spin-J Hilbert spaces, elementary operators, and
// tensor embeddings. Every Hamiltonian and observable in this library is an
// Operator: a sparse complex matrix tagged with the CompositeBasis it acts on.
//
// Layout contract: a CompositeBasis flattens multi-factor indices row-major
// over the factor order, i.e. factor 0 varies slowest. All partial traces and
// state preparations rely on this.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <initializer_list>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "optodicke/errors.hpp"

namespace optodicke {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using DenseMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

// Dense conversion is explicit and only permitted below this dimension
// unless the caller raises the limit.
inline constexpr Eigen::Index kDenseThreshold = 2048;

// Truncated bosonic mode. Basis states |0>, ..., |cutoff> in occupation order.
struct FockMode {
  int cutoff = 1;  // max occupation; dimension = cutoff + 1
  std::string label = "mode";

  FockMode() = default;
  FockMode(int cutoff_, std::string label_) : cutoff(cutoff_), label(std::move(label_)) {
    if (cutoff < 1) throw std::invalid_argument("FockMode: cutoff must be >= 1");
  }
  int dim() const noexcept { return cutoff + 1; }

  friend bool operator==(const FockMode& a, const FockMode& b) {
    return a.cutoff == b.cutoff && a.label == b.label;
  }
};

// Collective spin-J space, basis |J,m> ordered m = -J..+J.
struct SpinSector {
  int two_j = 1;  // dimension = two_j + 1

  SpinSector() = default;
  explicit SpinSector(int two_j_) : two_j(two_j_) {
    if (two_j < 1) throw std::invalid_argument("SpinSector: 2J must be >= 1");
  }
  int dim() const noexcept { return two_j + 1; }
  double j() const noexcept { return 0.5 * two_j; }

  friend bool operator==(const SpinSector& a, const SpinSector& b) { return a.two_j == b.two_j; }
};

using SpaceFactor = std::variant<FockMode, SpinSector>;

inline int factor_dim(const SpaceFactor& f) {
  return std::visit([](const auto& s) { return s.dim(); }, f);
}

inline bool same_space(const SpaceFactor& a, const SpaceFactor& b) { return a == b; }

inline std::string describe(const SpaceFactor& f) {
  if (const auto* m = std::get_if<FockMode>(&f)) {
    return "Fock(" + m->label + ", n_max=" + std::to_string(m->cutoff) + ")";
  }
  const auto& s = std::get<SpinSector>(f);
  return "Spin(2J=" + std::to_string(s.two_j) + ")";
}

// Ordered tensor factors defining the index layout of all matrices/vectors.
class CompositeBasis {
public:
  CompositeBasis() = default;

  explicit CompositeBasis(std::vector<SpaceFactor> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw BasisMismatchError("CompositeBasis: no factors");
    dim_ = 1;
    for (const auto& f : factors_) dim_ *= ::optodicke::factor_dim(f);
  }

  CompositeBasis(std::initializer_list<SpaceFactor> factors)
      : CompositeBasis(std::vector<SpaceFactor>(factors)) {}

  Eigen::Index dim() const noexcept { return dim_; }
  std::size_t arity() const noexcept { return factors_.size(); }

  const SpaceFactor& factor(std::size_t slot) const {
    check_slot(slot);
    return factors_[slot];
  }

  Eigen::Index factor_dim(std::size_t slot) const {
    check_slot(slot);
    return ::optodicke::factor_dim(factors_[slot]);
  }

  // Row-major stride of a slot: flat index advances by stride(slot) when the
  // slot's index advances by one.
  Eigen::Index stride(std::size_t slot) const {
    check_slot(slot);
    Eigen::Index s = 1;
    for (std::size_t k = slot + 1; k < factors_.size(); ++k) s *= ::optodicke::factor_dim(factors_[k]);
    return s;
  }

  Eigen::Index flatten(std::span<const Eigen::Index> indices) const {
    if (indices.size() != factors_.size())
      throw BasisMismatchError("flatten: index arity does not match basis arity");
    Eigen::Index flat = 0;
    for (std::size_t k = 0; k < factors_.size(); ++k) {
      const Eigen::Index d = ::optodicke::factor_dim(factors_[k]);
      if (indices[k] < 0 || indices[k] >= d)
        throw std::out_of_range("flatten: factor index out of range");
      flat = flat * d + indices[k];
    }
    return flat;
  }

  Eigen::Index flatten(std::initializer_list<Eigen::Index> indices) const {
    return flatten(std::span<const Eigen::Index>(indices.begin(), indices.size()));
  }

  std::string describe() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < factors_.size(); ++k) {
      if (k) os << " x ";
      os << ::optodicke::describe(factors_[k]);
    }
    return os.str();
  }

  friend bool operator==(const CompositeBasis& a, const CompositeBasis& b) {
    return a.factors_ == b.factors_;
  }
  friend bool operator!=(const CompositeBasis& a, const CompositeBasis& b) { return !(a == b); }

private:
  void check_slot(std::size_t slot) const {
    if (slot >= factors_.size())
      throw std::out_of_range("CompositeBasis: slot " + std::to_string(slot) + " out of range");
  }

  std::vector<SpaceFactor> factors_;
  Eigen::Index dim_ = 0;
};

inline double sup_norm(const SparseMatrix& m) {
  double v = 0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
  return v;
}

// Complex matrix tagged with its basis. Immutable after construction; safe to
// share across concurrent tasks.
class Operator {
public:
  Operator(CompositeBasis basis, SparseMatrix matrix, bool hermitian_hint = false)
      : basis_(std::move(basis)), matrix_(std::move(matrix)), hermitian_hint_(hermitian_hint) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() != basis_.dim())
      throw BasisMismatchError("Operator: matrix is not square on the basis dimension");
    matrix_.makeCompressed();
  }

  const CompositeBasis& basis() const noexcept { return basis_; }
  const SparseMatrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  bool hermitian_hint() const noexcept { return hermitian_hint_; }

  // max |M - M^dagger| over all elements; 0 for an exactly hermitian matrix.
  double hermiticity_defect() const {
    SparseMatrix d = matrix_ - SparseMatrix(matrix_.adjoint());
    return sup_norm(d);
  }

  Operator adjoint() const {
    return Operator(basis_, SparseMatrix(matrix_.adjoint()), hermitian_hint_);
  }

  friend Operator operator+(const Operator& a, const Operator& b) {
    require_same_basis(a, b, "operator+");
    return Operator(a.basis_, a.matrix_ + b.matrix_, a.hermitian_hint_ && b.hermitian_hint_);
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    require_same_basis(a, b, "operator-");
    return Operator(a.basis_, a.matrix_ - b.matrix_, a.hermitian_hint_ && b.hermitian_hint_);
  }
  friend Operator operator*(double c, const Operator& a) {
    return Operator(a.basis_, SparseMatrix(c * a.matrix_), a.hermitian_hint_);
  }
  friend Operator operator*(Complex c, const Operator& a) {
    return Operator(a.basis_, SparseMatrix(c * a.matrix_), a.hermitian_hint_ && c.imag() == 0.0);
  }
  friend Operator operator*(const Operator& a, const Operator& b) {
    require_same_basis(a, b, "operator*");
    return Operator(a.basis_, SparseMatrix(a.matrix_ * b.matrix_), false);
  }

private:
  static void require_same_basis(const Operator& a, const Operator& b, const char* who) {
    if (a.basis_ != b.basis_)
      throw BasisMismatchError(std::string(who) + ": operands live on different bases (" +
                               a.basis_.describe() + " vs " + b.basis_.describe() + ")");
  }

  CompositeBasis basis_;
  SparseMatrix matrix_;
  bool hermitian_hint_;
};

inline Operator identity_operator(const CompositeBasis& basis) {
  SparseMatrix id(basis.dim(), basis.dim());
  id.setIdentity();
  return Operator(basis, std::move(id), true);
}

// Annihilation operator: <n-1| a |n> = sqrt(n).
inline Operator fock_annihilation(const FockMode& mode) {
  const int d = mode.dim();
  SparseMatrix a(d, d);
  a.reserve(Eigen::VectorXi::Constant(d, 1));
  for (int n = 1; n < d; ++n) a.insert(n - 1, n) = std::sqrt(static_cast<double>(n));
  return Operator(CompositeBasis{SpaceFactor(mode)}, std::move(a), false);
}

inline Operator fock_creation(const FockMode& mode) { return fock_annihilation(mode).adjoint(); }

// Number operator diag(0, 1, ..., cutoff).
inline Operator fock_number(const FockMode& mode) {
  const int d = mode.dim();
  SparseMatrix n(d, d);
  n.reserve(Eigen::VectorXi::Constant(d, 1));
  for (int k = 1; k < d; ++k) n.insert(k, k) = static_cast<double>(k);
  return Operator(CompositeBasis{SpaceFactor(mode)}, std::move(n), true);
}

struct SpinOperators {
  Operator plus;
  Operator minus;
  Operator z;
};

// Collective spin ladder and projection operators on |J,m>, m = -J..+J:
// <J,m+1| J+ |J,m> = sqrt(J(J+1) - m(m+1)), J- = (J+)^dagger, J_z = diag(m).
inline SpinOperators spin_operators(const SpinSector& sector) {
  const int d = sector.dim();
  const double j = sector.j();
  CompositeBasis basis{SpaceFactor(sector)};

  SparseMatrix plus(d, d), z(d, d);
  plus.reserve(Eigen::VectorXi::Constant(d, 1));
  z.reserve(Eigen::VectorXi::Constant(d, 1));
  for (int k = 0; k < d; ++k) {
    const double m = -j + k;
    if (k + 1 < d) plus.insert(k + 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
    if (m != 0.0) z.insert(k, k) = m;
  }
  Operator jp(basis, std::move(plus), false);
  return SpinOperators{jp, jp.adjoint(), Operator(basis, std::move(z), true)};
}

// identity (x) ... (x) op (x) ... (x) identity in the declared row-major layout.
inline Operator embed(const Operator& op, std::size_t slot, const CompositeBasis& basis) {
  if (slot >= basis.arity())
    throw std::out_of_range("embed: slot " + std::to_string(slot) + " out of range for basis " +
                            basis.describe());
  if (op.basis().arity() != 1 || !same_space(op.basis().factor(0), basis.factor(slot)))
    throw BasisMismatchError("embed: operator space " + op.basis().describe() +
                             " does not match factor " + std::to_string(slot) + " of " +
                             basis.describe());

  Eigen::Index pre = 1, post = 1;
  for (std::size_t k = 0; k < slot; ++k) pre *= basis.factor_dim(k);
  for (std::size_t k = slot + 1; k < basis.arity(); ++k) post *= basis.factor_dim(k);

  SparseMatrix result = op.matrix();
  if (pre > 1) {
    SparseMatrix id(pre, pre);
    id.setIdentity();
    result = Eigen::kroneckerProduct(id, result).eval();
  }
  if (post > 1) {
    SparseMatrix id(post, post);
    id.setIdentity();
    result = Eigen::kroneckerProduct(result, id).eval();
  }
  return Operator(basis, std::move(result), op.hermitian_hint());
}

inline DenseMatrix to_dense(const Operator& op, Eigen::Index max_dim = kDenseThreshold) {
  if (op.dim() > max_dim)
    throw std::invalid_argument("to_dense: dimension " + std::to_string(op.dim()) +
                                " exceeds the densification limit " + std::to_string(max_dim));
  return DenseMatrix(op.matrix());
}

// Signs (-1)^(sum of factor indices over `slots`). For a Fock x Spin basis
// with slots {0,1} this is the Dicke parity exp(i pi (a^dag a + J_z + J)).
inline Eigen::VectorXd parity_signs(const CompositeBasis& basis, std::span<const std::size_t> slots) {
  Eigen::VectorXd signs = Eigen::VectorXd::Ones(basis.dim());
  for (std::size_t slot : slots) {
    const Eigen::Index d = basis.factor_dim(slot);
    const Eigen::Index stride = basis.stride(slot);
    for (Eigen::Index i = 0; i < basis.dim(); ++i) {
      const Eigen::Index idx = (i / stride) % d;
      if (idx % 2) signs[i] = -signs[i];
    }
  }
  return signs;
}

inline Eigen::VectorXd parity_signs(const CompositeBasis& basis,
                                    std::initializer_list<std::size_t> slots) {
  return parity_signs(basis, std::span<const std::size_t>(slots.begin(), slots.size()));
}

}  // namespace optodicke
