#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sympade/matrix.hpp"
#include "sympade/pade.hpp"

namespace sympade {

// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block encrypt(Block counter, Key key) noexcept;
};

// Reproducible random stream for one Monte-Carlo path. The Philox key is the
// 64-bit seed; the upper half of the counter is the path index and the lower
// half counts blocks, so every (seed, path_index) pair owns a disjoint
// substream and identical pairs replay identical draws on any platform.
//
// Uniforms take the top 53 bits of a 64-bit word: u = (k + 0.5) 2^-53, which
// lies strictly inside (0, 1). Gaussians are Phi^{-1}(u) computed as
// -sqrt(2) erfc^{-1}(2u).
//
// A stream is a mutable cursor and must not be shared between threads.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t path_index) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t path_index() const noexcept { return path_index_; }

  std::uint64_t next_u64() noexcept;
  double next_uniform() noexcept;
  double next_gaussian();

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t path_index_;
  std::uint64_t block_ = 0;
  Philox4x32::Block buffer_{};
  int used_ = 4;
};

// Standard normal quantile used by NoiseStream.
double normal_quantile(double u);

// Clamp xi to [-a_h, a_h].
double truncate(double xi, double a_h);

// A_h = sqrt(2 ell |ln h|)
double truncation_bound(double h, double ell);

// Per-step random data for the multiplicative-noise schemes: raw standard
// Gaussians xi and their truncations zeta.
struct StepNoise {
  double h = 0.0;
  double ell = 1.0;
  double a_h = 0.0;
  std::vector<double> xi;
  std::vector<double> zeta;
};

// Draws m Gaussians from the stream. Throws Error(degenerate_step) unless
// 0 < h < 1, and Error(invalid_argument) if ell < 1 or m < 1.
StepNoise step_noise(NoiseStream& stream, double h, std::size_t m, double ell);
// Builds StepNoise from given raw draws (used to replay summed increments).
StepNoise make_step_noise(double h, std::vector<double> xi, double ell);

// Gauss-Legendre rule with n nodes on [-1, 1], nodes ascending.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(std::size_t n);

// Zero-mean Gaussian law, per noise channel i, of the stacked block
//   (dW_i, I_exact_i, I_scheme_i)
// with I_exact_i = int_0^h exp((h-t)G) v_i dW_i(t) and
// I_scheme_i = int_0^h P_(r,s)((h-t)G) v_i dW_i(t). Channels are independent,
// so the covariance is block diagonal with one (1+2d)x(1+2d) block each.
class JointGaussianSpec {
 public:
  JointGaussianSpec(std::size_t channels, std::size_t state_dim, double h, PadePair kernel_order,
                    Matrix covariance, Matrix cholesky_factor);

  std::size_t channels() const noexcept { return channels_; }
  std::size_t state_dim() const noexcept { return state_dim_; }
  std::size_t block_size() const noexcept { return 1 + 2 * state_dim_; }
  std::size_t dim() const noexcept { return channels_ * block_size(); }
  double h() const noexcept { return h_; }
  PadePair kernel_order() const noexcept { return kernel_order_; }

  const Matrix& covariance() const noexcept { return covariance_; }
  const Matrix& cholesky_factor() const noexcept { return cholesky_factor_; }

  std::size_t dw_index(std::size_t channel) const noexcept { return channel * block_size(); }
  std::size_t exact_index(std::size_t channel) const noexcept { return dw_index(channel) + 1; }
  std::size_t scheme_index(std::size_t channel) const noexcept {
    return exact_index(channel) + state_dim_;
  }

 private:
  std::size_t channels_;
  std::size_t state_dim_;
  double h_;
  PadePair kernel_order_;
  Matrix covariance_;
  Matrix cholesky_factor_;
};

// Covariances are Gauss-Legendre integrals (quad_nodes >= 8) of the kernel
// products over [0, h]; the Itô isometry turns each block into an ordinary
// integral. The factorization runs on (dW, I_exact, I_scheme - I_exact),
// whose last block is tiny but accurately representable, and is mapped back
// to the public coordinates, where it stays lower triangular. Directions
// with a Schur pivot below 1e-14 of their diagonal are treated as exactly
// dependent (e.g. G = 0 makes every block a multiple of dW).
//
// noise_vectors holds J^{-1} R_i. Throws Error(quadrature_failure) if the
// scheme kernel is singular at any node.
JointGaussianSpec additive_joint_spec(const Matrix& generator,
                                      const std::vector<Vector>& noise_vectors, double h,
                                      PadePair kernel_order, std::size_t quad_nodes = 32);

struct JointSample {
  std::vector<double> dw;
  std::vector<Vector> i_exact;
  std::vector<Vector> i_scheme;
};

// cholesky_factor * g for a fresh standard Gaussian vector g.
Vector sample_joint_stacked(const JointGaussianSpec& spec, NoiseStream& stream);
JointSample unpack_joint(const JointGaussianSpec& spec, const Vector& stacked);
JointSample sample_joint(const JointGaussianSpec& spec, NoiseStream& stream);

}  // namespace sympade
