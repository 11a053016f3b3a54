#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include "optodicke/hilbert.hpp"

using namespace optodicke;

namespace {

double max_abs(const DenseMatrix& m) { return m.cwiseAbs().maxCoeff(); }

double spectral_radius(const Operator& op) {
  Eigen::ComplexEigenSolver<DenseMatrix> es(to_dense(op));
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("fock ladder matrix elements") {
  SECTION("cutoff 1: a = [[0,1],[0,0]]") {
    const Operator a = fock_annihilation(FockMode(1, "m"));
    DenseMatrix expected(2, 2);
    expected << 0, 1, 0, 0;
    CHECK(max_abs(to_dense(a) - expected) == 0.0);
  }

  SECTION("cutoff 4: <3|a|4> = 2") {
    const Operator a = fock_annihilation(FockMode(4, "m"));
    CHECK(to_dense(a)(3, 4) == Complex(2.0));
  }

  SECTION("creation is the exact conjugate transpose") {
    const FockMode mode(9, "m");
    const Operator a = fock_annihilation(mode);
    CHECK(sup_norm(fock_creation(mode).matrix() - SparseMatrix(a.matrix().adjoint())) == 0.0);
  }

  SECTION("[a, a†] is the identity except at the top level") {
    // direct matrix product at cutoff 6: the single truncation artifact sits
    // at n = n_max, where a† annihilates instead of raising
    const FockMode mode(6, "m");
    const Operator a = fock_annihilation(mode);
    const DenseMatrix comm = to_dense(a * fock_creation(mode) - fock_creation(mode) * a);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 7; ++j)
        CHECK(std::abs(comm(i, j) - (i == j ? 1.0 : 0.0)) < 1e-14);
    CHECK(std::abs(comm(6, 6) - (-6.0)) < 1e-14);
  }

  SECTION("cutoff below 1 is rejected") {
    CHECK_THROWS_AS(FockMode(0, "m"), std::invalid_argument);
  }
}

TEST_CASE("spin operators") {
  SECTION("J = 1/2: J_z = diag(-1/2, +1/2)") {
    const auto s = spin_operators(SpinSector(1));
    DenseMatrix expected(2, 2);
    expected << -0.5, 0, 0, 0.5;
    CHECK(max_abs(to_dense(s.z) - expected) == 0.0);
  }

  SECTION("J = 1: J+ |1,-1> = sqrt(2) |1,0>") {
    const auto s = spin_operators(SpinSector(2));
    CHECK(std::abs(to_dense(s.plus)(1, 0) - std::sqrt(2.0)) < 1e-15);
  }

  SECTION("J = 3/2: [J+, J-] = 2 J_z by direct multiplication") {
    const auto s = spin_operators(SpinSector(3));
    const DenseMatrix comm = to_dense(s.plus * s.minus - s.minus * s.plus);
    CHECK(max_abs(comm - 2.0 * to_dense(s.z)) < 1e-14);
  }

  SECTION("commutation relations hold for all tested J <= 20") {
    for (int two_j : {1, 2, 3, 5, 8, 13, 27, 40}) {
      const auto s = spin_operators(SpinSector(two_j));
      const DenseMatrix jp = to_dense(s.plus), jm = to_dense(s.minus), jz = to_dense(s.z);
      CHECK(max_abs(jz * jp - jp * jz - jp) < 1e-11);
      CHECK(max_abs(jz * jm - jm * jz + jm) < 1e-11);
      CHECK(max_abs(jp * jm - jm * jp - 2.0 * jz) < 1e-11);
      CHECK(sup_norm(s.minus.matrix() - SparseMatrix(s.plus.matrix().adjoint())) == 0.0);
    }
  }
}

TEST_CASE("composite basis layout") {
  const CompositeBasis basis{SpaceFactor(FockMode(1, "a")), SpaceFactor(SpinSector(2)),
                             SpaceFactor(FockMode(1, "c"))};
  REQUIRE(basis.dim() == 2 * 3 * 2);

  SECTION("row-major flatten: factor 0 varies slowest") {
    CHECK(basis.flatten({0, 0, 0}) == 0);
    CHECK(basis.flatten({0, 0, 1}) == 1);
    CHECK(basis.flatten({0, 1, 0}) == 2);
    CHECK(basis.flatten({1, 0, 0}) == 6);
    CHECK(basis.flatten({1, 2, 1}) == 11);
    CHECK(basis.stride(0) == 6);
    CHECK(basis.stride(1) == 2);
    CHECK(basis.stride(2) == 1);
  }

  SECTION("out-of-range indices throw") {
    CHECK_THROWS_AS(basis.flatten({2, 0, 0}), std::out_of_range);
    CHECK_THROWS_AS(basis.factor(3), std::out_of_range);
  }
}

TEST_CASE("embed") {
  const FockMode a_mode(1, "a");
  const SpinSector sector(2);
  const FockMode c_mode(1, "c");
  const CompositeBasis basis{SpaceFactor(a_mode), SpaceFactor(sector), SpaceFactor(c_mode)};

  SECTION("identity embeds to identity on the total dimension") {
    for (std::size_t slot = 0; slot < 3; ++slot) {
      const Operator id = identity_operator(CompositeBasis{basis.factor(slot)});
      const Operator embedded = embed(id, slot, basis);
      CHECK(sup_norm(embedded.matrix() - identity_operator(basis).matrix()) == 0.0);
    }
  }

  SECTION("embeddings of disjoint factors commute exactly") {
    const Operator a = embed(fock_annihilation(a_mode), 0, basis);
    const Operator c = embed(fock_annihilation(c_mode), 2, basis);
    CHECK(sup_norm((a * c - c * a).matrix()) == 0.0);
  }

  SECTION("trace identity on dims (2,3,2)") {
    // trace(embed(op, k)) = trace(op) * total_dim / dim_k
    const auto s = spin_operators(sector);
    const Operator op = s.z + 0.25 * (s.plus + s.minus);
    const Complex tr_embedded = to_dense(embed(op, 1, basis)).trace();
    const Complex tr_op = to_dense(op).trace();
    CHECK(std::abs(tr_embedded - tr_op * (12.0 / 3.0)) < 1e-13);
  }

  SECTION("embedding preserves hermiticity and spectral radius") {
    const auto s = spin_operators(sector);
    const Operator op = s.z + 0.5 * (s.plus + s.minus);
    const Operator embedded = embed(op, 1, basis);
    CHECK(embedded.hermiticity_defect() == 0.0);
    CHECK(std::abs(spectral_radius(embedded) - spectral_radius(op)) < 1e-12);
  }

  SECTION("composite operators are independent of construction order") {
    const Operator na = embed(fock_number(a_mode), 0, basis);
    const Operator xc = embed(fock_annihilation(c_mode) + fock_creation(c_mode), 2, basis);
    const Operator jz = embed(spin_operators(sector).z, 1, basis);
    const Operator h1 = na * xc + jz + 0.7 * na;
    const Operator h2 = 0.7 * na + jz + xc * na;  // na and xc commute (disjoint slots)
    CHECK(sup_norm((h1 - h2).matrix()) < 1e-14);
  }

  SECTION("slot and dimension errors") {
    CHECK_THROWS_AS(embed(fock_annihilation(a_mode), 3, basis), std::out_of_range);
    CHECK_THROWS_AS(embed(fock_annihilation(FockMode(5, "a")), 0, basis), BasisMismatchError);
    // same dimension, different mode label: still a different space
    CHECK_THROWS_AS(embed(fock_annihilation(c_mode), 0, basis), BasisMismatchError);
  }
}

TEST_CASE("operator algebra sanity") {
  const FockMode mode(5, "m");
  const CompositeBasis basis{SpaceFactor(mode)};
  const Operator n = fock_number(mode);

  SECTION("basis mismatch is rejected") {
    const Operator other = fock_number(FockMode(5, "other"));
    CHECK_THROWS_AS(n + other, BasisMismatchError);
  }

  SECTION("hermitian hint propagates through real combinations") {
    CHECK((2.0 * n + n).hermitian_hint());
    CHECK_FALSE((Complex(0, 1) * n).hermitian_hint());
    CHECK(n.hermiticity_defect() == 0.0);
  }

  SECTION("dense conversion respects the threshold") {
    CHECK_THROWS_AS(to_dense(n, 3), std::invalid_argument);
    CHECK(to_dense(n).rows() == 6);
  }
}

TEST_CASE("parity signs") {
  const CompositeBasis basis{SpaceFactor(FockMode(2, "a")), SpaceFactor(SpinSector(1))};
  const Eigen::VectorXd signs = parity_signs(basis, {0, 1});
  // (n, k) -> (-1)^(n+k) in row-major order
  CHECK(signs[basis.flatten({0, 0})] == 1.0);
  CHECK(signs[basis.flatten({0, 1})] == -1.0);
  CHECK(signs[basis.flatten({1, 0})] == -1.0);
  CHECK(signs[basis.flatten({1, 1})] == 1.0);
  CHECK(signs[basis.flatten({2, 1})] == -1.0);
}
