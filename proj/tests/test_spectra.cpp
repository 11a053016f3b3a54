#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "optodicke/model.hpp"
#include "optodicke/spectra.hpp"

using namespace optodicke;

namespace {

// Random sparse hermitian matrix on a dummy single-mode basis.
Operator random_hermitian(Eigen::Index dim, std::mt19937_64& rng, double density = 0.05) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<Eigen::Index> pick(0, dim - 1);
  const auto n_entries = static_cast<Eigen::Index>(density * dim * dim / 2) + dim;
  std::vector<Eigen::Triplet<Complex>> trips;
  for (Eigen::Index i = 0; i < dim; ++i) trips.emplace_back(i, i, Complex(u(rng), 0));
  for (Eigen::Index k = 0; k < n_entries; ++k) {
    const Eigen::Index i = pick(rng), j = pick(rng);
    if (i == j) continue;
    const Complex v(u(rng), u(rng));
    trips.emplace_back(i, j, v);
    trips.emplace_back(j, i, std::conj(v));
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(trips.begin(), trips.end());
  return Operator(CompositeBasis{SpaceFactor(FockMode(static_cast<int>(dim) - 1, "rand"))},
                  std::move(m), true);
}

}  // namespace

TEST_CASE("dense spectrum") {
  SECTION("mirror number ladder at cutoff 5") {
    ModelParams p;
    p.cutoff_mirror = 5;
    const Operator h = p.omega_m * embed(fock_number(mirror_mode(p)), 0, mirror_basis(p));
    const auto es = dense_spectrum(h);
    for (int n = 0; n <= 5; ++n)
      CHECK(es.eigenvalues[n] == Catch::Approx(n * p.omega_m).margin(1e-14));
  }

  SECTION("decoupled Dicke ground is -J omega0") {
    ModelParams p;
    p.lambda = 0;
    p.j = 2.5;
    p.cutoff_field = 5;
    const auto es = dense_spectrum(build_dicke(p, dicke_basis(p)), {.compute_vectors = false});
    CHECK(es.eigenvalues[0] == Catch::Approx(-2.5).epsilon(1e-13));
  }

  SECTION("driven mirror ladder shifted by the completed square") {
    ModelParams p;
    p.cutoff_mirror = 40;
    const double shift = p.mirror_drive() * p.mirror_drive() / p.omega_m;
    const auto es = dense_spectrum(build_mirror_driven(p, mirror_basis(p)), {.compute_vectors = false});
    for (int n = 0; n <= 20; ++n)
      CHECK(es.eigenvalues[n] == Catch::Approx(n * p.omega_m - shift).margin(1e-9));
  }

  SECTION("residuals stay below 1e-10 times the spectral scale") {
    std::mt19937_64 rng(5);
    const Operator h = random_hermitian(80, rng);
    const auto es = dense_spectrum(h);
    const double scale = std::max(std::abs(es.eigenvalues.front()), std::abs(es.eigenvalues.back()));
    for (double r : es.residuals) CHECK(r < 1e-10 * scale);
  }

  SECTION("rejects non-hermitian hints and oversized matrices") {
    const FockMode mode(5, "m");
    CHECK_THROWS_AS(dense_spectrum(fock_annihilation(mode)), std::invalid_argument);
    std::mt19937_64 rng(6);
    const Operator big = random_hermitian(50, rng);
    DenseSpectrumOptions opt;
    opt.threshold = 32;
    CHECK_THROWS_AS(dense_spectrum(big, opt), std::invalid_argument);
  }
}

TEST_CASE("lanczos ground state") {
  SECTION("agrees with the dense solver on random sparse instances") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<Eigen::Index> dims(40, 400);
    for (int trial = 0; trial < 8; ++trial) {
      const Operator h = random_hermitian(dims(rng), rng);
      const auto dense = dense_spectrum(h, {.compute_vectors = false});
      const auto g = ground_state(h, 1e-10);
      CHECK(std::abs(g.energy - dense.eigenvalues[0]) < 1e-9);
      CHECK(g.residual < 1e-10);
    }
  }

  SECTION("decoupled Dicke model returns |0> x |J,-J> up to a phase") {
    ModelParams p;
    p.lambda = 0;
    p.j = 2;
    p.cutoff_field = 8;
    const auto g = ground_state(build_dicke(p, dicke_basis(p)), 1e-11);
    CHECK(g.energy == Catch::Approx(-2.0).margin(1e-10));
    CHECK(std::abs(g.vector[0]) == Catch::Approx(1.0).margin(1e-9));
  }

  SECTION("deterministic for a fixed seed") {
    ModelParams p;
    p.j = 1;
    p.lambda = 0.5;
    p.cutoff_field = 10;
    const Operator h = build_dicke(p, dicke_basis(p));
    const auto a = ground_state(h, 1e-10);
    const auto b = ground_state(h, 1e-10);
    CHECK(a.energy == b.energy);
    CHECK((a.vector - b.vector).norm() == 0.0);
  }

  SECTION("near-degenerate ground pairs raise the degeneracy flag") {
    SparseMatrix m(4, 4);
    m.insert(1, 1) = 1e-9;  // ground doublet split far below the flag threshold
    m.insert(2, 2) = 0.7;
    m.insert(3, 3) = 1.3;
    m.insert(2, 3) = 0.1;
    m.insert(3, 2) = 0.1;
    const Operator h(CompositeBasis{SpaceFactor(FockMode(3, "m"))}, std::move(m), true);
    const auto g = ground_state(h, 1e-12);
    CHECK(g.degenerate);
    CHECK(g.first_gap < 1e-8);

    // well-separated spectrum: no flag
    ModelParams p;
    p.j = 1;
    p.lambda = 0.4;
    p.cutoff_field = 8;
    CHECK_FALSE(ground_state(build_dicke(p, dicke_basis(p)), 1e-10).degenerate);
  }

  SECTION("iteration budget exhaustion is an explicit failure") {
    std::mt19937_64 rng(13);
    const Operator h = random_hermitian(300, rng);
    LanczosOptions opt;
    opt.tolerance = 1e-12;
    opt.max_iterations = 4;
    CHECK_THROWS_AS(ground_state(h, opt), ConvergenceError);
  }

  SECTION("start-vector override confines the Krylov space to a sector") {
    ModelParams p;
    p.j = 1;
    p.lambda = 0.7;
    p.cutoff_field = 12;
    const CompositeBasis basis = dicke_basis(p);
    const Operator h = build_dicke(p, basis);
    const Eigen::VectorXd signs = parity_signs(basis, {0, 1});

    LanczosOptions opt;
    StateVector start = StateVector::Zero(basis.dim());
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    for (Eigen::Index i = 0; i < start.size(); ++i)
      if (signs[i] > 0) start[i] = Complex(u(rng), u(rng));
    opt.start = start;
    const auto g = ground_state(h, opt);
    // the returned vector stays in the even sector exactly
    for (Eigen::Index i = 0; i < g.vector.size(); ++i)
      if (signs[i] < 0) CHECK(std::abs(g.vector[i]) == 0.0);
  }
}

TEST_CASE("variational monotonicity of the full model ground energy") {
  ModelParams base;
  base.j = 1;
  base.cutoff_field = 8;
  base.cutoff_mirror = 8;
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 10; ++i) {
    ModelParams p = base;
    p.lambda = 0.08 * i;
    const auto g = ground_state(build_full(p, full_basis(p)), 1e-9);
    CHECK(g.energy <= prev + 1e-10);
    prev = g.energy;
  }
}

TEST_CASE("macroscopic field occupation across the transition at J = 15") {
  ModelParams p;
  p.j = 15;
  p.cutoff_field = 40;
  const CompositeBasis basis = dicke_basis(p);
  const Operator n_f = embed(fock_number(field_mode(p)), 0, basis);

  p.lambda = 0.6;
  const auto srp = ground_state(build_dicke(p, basis), 1e-9);
  const double occ_srp =
      std::real(srp.vector.dot(n_f.matrix() * srp.vector)) / p.j;
  // thermodynamic-limit order parameter alpha/J = 2 (lambda/omega)^2 (1 - mu^2)
  CHECK(occ_srp == Catch::Approx(0.372777777777778).epsilon(0.15));

  p.lambda = 0.4;
  const auto np = ground_state(build_dicke(p, basis), 1e-9);
  const double occ_np = std::real(np.vector.dot(n_f.matrix() * np.vector)) / p.j;
  CHECK(occ_np < 0.2 * occ_srp);  // microscopic on the normal side
}
