#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "sympade/error.hpp"
#include "sympade/systems.hpp"
#include "test_support.hpp"

using namespace sympade;
using namespace sympade::testing;

TEST_CASE("Kubo generators are valid and commute") {
  const auto sys = make_kubo({2.0, 0.5, 1.0, 0.0});
  CHECK(sys.half_dim() == 1);
  CHECK(sys.channels() == 1);
  CHECK(sys.commuting());
  CHECK(sys.drift() == 2.0 * Matrix{{0, -1}, {1, 0}});
  CHECK(sys.diffusion(0) == 0.5 * Matrix{{0, -1}, {1, 0}});
  // C = J A is the (scaled) identity, so H = a (p^2 + q^2) / 2.
  CHECK(sys.hamiltonian_matrix(0) == 2.0 * Matrix::identity(2));
}

TEST_CASE("make_linear_shs rejects non-Hamiltonian generators") {
  try {
    make_linear_shs({Matrix::identity(2)});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_infinitesimal_symplectic);
    CHECK(std::string(e.what()).find("0") != std::string::npos);
  }
  try {
    make_linear_shs({Matrix{{0, -1}, {1, 0}}, Matrix{{1, 0}, {0, 1}}});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_infinitesimal_symplectic);
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
  CHECK_THROWS_AS(make_linear_shs({Matrix::identity(3)}), Error);
  CHECK_THROWS_AS(make_linear_shs({Matrix(2), Matrix(4)}), Error);
  CHECK_THROWS_AS(make_linear_shs({}), Error);
}

TEST_CASE("valid generators satisfy the block conditions") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const Matrix a = random_hamiltonian_generator(rng, n, 1.0);
    const auto sys = make_linear_shs({a});
    (void)sys;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        // A1 = -A4^T, A2 = A2^T, A3 = A3^T
        CHECK(a(i, j) == doctest::Approx(-a(n + j, n + i)).epsilon(1e-12));
        CHECK(a(i, n + j) == doctest::Approx(a(j, n + i)).epsilon(1e-12));
        CHECK(a(n + i, j) == doctest::Approx(a(n + j, i)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("oscillator as an additive system") {
  const auto sys = make_oscillator({0.3, 0.0, 1.0});
  CHECK(sys.generator() == Matrix{{0, -1}, {1, 0}});
  REQUIRE(sys.channels() == 1);
  CHECK(sys.noise_vectors()[0] == Vector{0.3, 0.0});
  const auto direct = make_additive_shs(Matrix::identity(2), {Vector{0.0}}, {Vector{0.3}});
  CHECK(direct.generator() == sys.generator());
  CHECK(direct.noise_vectors()[0] == sys.noise_vectors()[0]);
  CHECK(oscillator_initial_state({0.3, 0.0, 1.0}) == Vector{0.0, 1.0});
}

TEST_CASE("make_additive_shs validation") {
  try {
    make_additive_shs(Matrix{{1, 2}, {0, 1}}, {Vector{0.0}}, {Vector{1.0}});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_symmetric);
  }
  CHECK_THROWS_AS(make_additive_shs(Matrix::identity(2), {Vector{0.0, 1.0}}, {Vector{1.0}}), Error);
  CHECK_THROWS_AS(make_additive_shs(Matrix::identity(2), {Vector{0.0}}, {}), Error);
  CHECK_THROWS_AS(make_additive_shs(Matrix::identity(3), {}, {}), Error);
}

TEST_CASE("exact_kubo closed form") {
  const KuboParams p{1.0, 0.0, 1.0, 0.0};
  CHECK(exact_kubo(p, 0.0, 0.0) == Vector{1.0, 0.0});
  const Vector x = exact_kubo(p, std::numbers::pi / 2, 0.0);
  CHECK(x[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(1.0));
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n;
  for (int i = 0; i < 100; ++i) {
    const KuboParams q{n(rng), n(rng), n(rng), n(rng)};
    const Vector y = exact_kubo(q, std::abs(n(rng)) * 10, n(rng) * 3);
    CHECK(y.norm2() == doctest::Approx(std::hypot(q.p0, q.q0)).epsilon(1e-14));
  }
}

TEST_CASE("exact_linear_step matches exact_kubo") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.001, 0.9);
  std::normal_distribution<double> n;
  const KuboParams p{1.3, 0.7, 0.6, -0.8};
  const auto sys = make_kubo(p);
  for (int i = 0; i < 100; ++i) {
    const double h = u(rng);
    const double xi = n(rng);
    const auto noise = make_step_noise(h, {xi}, 2.0);
    const Vector x = exact_linear_step(sys, kubo_initial_state(p), h, noise);
    const Vector y = exact_kubo(p, h, std::sqrt(h) * xi);
    CHECK(max_abs_diff(x, y) <= 1e-10);
  }
}

TEST_CASE("exact_linear_step uses the raw increment, not the truncated one") {
  const auto sys = make_kubo({1.0, 1.0, 1.0, 0.0});
  const double h = 0.5;
  const double xi = 5.0;  // beyond the ell = 1 bound at h = 0.5
  const auto noise = make_step_noise(h, {xi}, 1.0);
  REQUIRE(noise.zeta[0] != noise.xi[0]);
  const Vector x = exact_linear_step(sys, Vector{1.0, 0.0}, h, noise);
  CHECK(max_abs_diff(x, exact_kubo({1.0, 1.0, 1.0, 0.0}, h, std::sqrt(h) * xi)) <= 1e-12);
}

TEST_CASE("exact_linear_step deterministic case is a rotation by a h") {
  const auto sys = make_kubo({2.0, 0.0, 1.0, 0.0});
  const auto noise = make_step_noise(0.3, {1.7}, 2.0);
  const Vector x = exact_linear_step(sys, Vector{1.0, 0.0}, 0.3, noise);
  CHECK(x[0] == doctest::Approx(std::cos(0.6)));
  CHECK(x[1] == doctest::Approx(std::sin(0.6)));
}

TEST_CASE("exact_linear_step requires commuting generators") {
  // Rotation drift with a hyperbolic diffusion: both Hamiltonian, not commuting.
  const auto sys = make_linear_shs({Matrix{{0, -1}, {1, 0}}, Matrix{{1, 0}, {0, -1}}});
  CHECK_FALSE(sys.commuting());
  try {
    exact_linear_step(sys, Vector{1.0, 0.0}, 0.1, make_step_noise(0.1, {0.5}, 2.0));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_commuting_generators);
  }
}

TEST_CASE("exact_additive_step") {
  const auto osc = make_oscillator({0.3, 0.0, 1.0});
  const Vector z{0.2, -0.4};
  CHECK(max_abs_diff(exact_additive_step(osc, z, 0.0, {Vector(2)}), z) == 0.0);
  const auto flat = make_additive_shs(Matrix(2), {Vector{0.5}}, {Vector{0.25}});
  const double dw = 0.37;
  const Vector noise = dw * flat.noise_vectors()[0];
  CHECK(max_abs_diff(exact_additive_step(flat, z, 0.1, {noise}), z + noise) <= 1e-15);
  // J^{-1} R with R = (C1, -C2) = (0.5, -0.25): J^{-1} = [[0,-1],[1,0]].
  CHECK(flat.noise_vectors()[0] == Vector{0.25, 0.5});
}

TEST_CASE("oscillator second moment grows like 1 + sigma^2 t") {
  const OscillatorParams params{0.3, 0.0, 1.0};
  const auto sys = make_oscillator(params);
  const double h = 0.1;
  const int steps = 100;
  const auto spec = additive_joint_spec(sys, h, {1, 1}, 32);
  const int paths = 4000;
  double sum = 0.0, sum2 = 0.0;
  for (int p = 0; p < paths; ++p) {
    NoiseStream stream(515, static_cast<std::uint64_t>(p));
    Vector z = oscillator_initial_state(params);
    for (int k = 0; k < steps; ++k) {
      z = exact_additive_step(sys, z, h, sample_joint(spec, stream).i_exact);
    }
    const double m = dot(z, z);
    sum += m;
    sum2 += m * m;
  }
  const double mean = sum / paths;
  const double stderr_ = std::sqrt((sum2 / paths - mean * mean) / paths);
  const double expected = 1.0 + params.sigma * params.sigma * h * steps;
  CHECK(std::abs(mean - expected) <= 4.0 * stderr_);
}

TEST_CASE("hamiltonian_quadratic") {
  CHECK(hamiltonian_quadratic(2.0 * Matrix::identity(2), Vector{1.0, 0.0}) == 1.0);
  CHECK(hamiltonian_quadratic(Matrix::identity(2), Vector{0.0, 0.0}) == 0.0);
  CHECK(hamiltonian_quadratic(Matrix::identity(2), Vector{3.0, 4.0}) == 12.5);
}
