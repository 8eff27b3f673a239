#include "sympade/noise.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include <boost/math/special_functions/erf.hpp>

#include "sympade/error.hpp"

namespace sympade {

// ---------------------------------------------------------------- Philox

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;
constexpr int kPhiloxRounds = 10;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

Philox4x32::Block Philox4x32::encrypt(Block ctr, Key key) noexcept {
  for (int round = 0; round < kPhiloxRounds; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

// ---------------------------------------------------------------- streams

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t path_index) noexcept
    : seed_(seed), path_index_(path_index) {}

void NoiseStream::refill() noexcept {
  const Philox4x32::Block counter = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(path_index_), static_cast<std::uint32_t>(path_index_ >> 32)};
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed_),
                               static_cast<std::uint32_t>(seed_ >> 32)};
  buffer_ = Philox4x32::encrypt(counter, key);
  ++block_;
  used_ = 0;
}

std::uint64_t NoiseStream::next_u64() noexcept {
  if (used_ >= 4) refill();
  const std::uint64_t hi = buffer_[used_];
  const std::uint64_t lo = buffer_[used_ + 1];
  used_ += 2;
  return (hi << 32) | lo;
}

double NoiseStream::next_uniform() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseStream::next_gaussian() { return normal_quantile(next_uniform()); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw Error(ErrorCode::invalid_argument, "quantile needs u in (0,1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

// ---------------------------------------------------------------- truncation

double truncate(double xi, double a_h) {
  if (!(a_h > 0.0)) throw Error(ErrorCode::invalid_argument, "truncation bound must be positive");
  if (xi > a_h) return a_h;
  if (xi < -a_h) return -a_h;
  return xi;
}

double truncation_bound(double h, double ell) {
  if (!(h > 0.0 && h < 1.0)) {
    throw Error(ErrorCode::degenerate_step,
                "step size " + std::to_string(h) + " must lie in (0, 1) for truncation");
  }
  if (!(ell >= 1.0)) throw Error(ErrorCode::invalid_argument, "truncation level must be >= 1");
  return std::sqrt(2.0 * ell * std::abs(std::log(h)));
}

StepNoise make_step_noise(double h, std::vector<double> xi, double ell) {
  StepNoise noise;
  noise.h = h;
  noise.ell = ell;
  noise.a_h = truncation_bound(h, ell);
  noise.zeta.reserve(xi.size());
  for (double x : xi) noise.zeta.push_back(truncate(x, noise.a_h));
  noise.xi = std::move(xi);
  return noise;
}

StepNoise step_noise(NoiseStream& stream, double h, std::size_t m, double ell) {
  if (m == 0) throw Error(ErrorCode::invalid_argument, "step_noise needs m >= 1");
  const double a_h = truncation_bound(h, ell);
  StepNoise noise;
  noise.h = h;
  noise.ell = ell;
  noise.a_h = a_h;
  noise.xi.resize(m);
  noise.zeta.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    noise.xi[i] = stream.next_gaussian();
    noise.zeta[i] = truncate(noise.xi[i], a_h);
  }
  return noise;
}

// ---------------------------------------------------------------- quadrature

QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "quadrature needs at least one node");
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence for P_n(z) and its derivative.
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * static_cast<double>(j) + 1.0) * z * p2 - static_cast<double>(j) * p3) /
             (static_cast<double>(j) + 1.0);
      }
      dp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) <= 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// ---------------------------------------------------------------- joint law

JointGaussianSpec::JointGaussianSpec(std::size_t channels, std::size_t state_dim, double h,
                                     PadePair kernel_order, Matrix covariance,
                                     Matrix cholesky_factor)
    : channels_(channels),
      state_dim_(state_dim),
      h_(h),
      kernel_order_(kernel_order),
      covariance_(std::move(covariance)),
      cholesky_factor_(std::move(cholesky_factor)) {
  if (covariance_.dim() != dim() || cholesky_factor_.dim() != dim()) {
    throw Error(ErrorCode::dimension_mismatch, "joint Gaussian layout does not match matrices");
  }
}

namespace {

// Cholesky factor of a symmetric positive semidefinite matrix. Columns whose
// Schur pivot is below rel_tol times their original diagonal are zeroed.
Matrix semidefinite_cholesky(const Matrix& c, double rel_tol) {
  const std::size_t n = c.dim();
  Matrix l(n);
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += c(i, i);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = c(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (pivot < -1e-12 * trace) {
      throw Error(ErrorCode::invalid_argument, "covariance is not positive semidefinite");
    }
    if (pivot <= rel_tol * c(j, j) || pivot <= 0.0) continue;
    const double diag = std::sqrt(pivot);
    l(j, j) = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      double sum = c(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
      l(i, j) = sum / diag;
    }
  }
  return l;
}

}  // namespace

JointGaussianSpec additive_joint_spec(const Matrix& generator,
                                      const std::vector<Vector>& noise_vectors, double h,
                                      PadePair kernel_order, std::size_t quad_nodes) {
  kernel_order.validate();
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "joint spec needs h > 0");
  if (quad_nodes < 8) throw Error(ErrorCode::invalid_argument, "joint spec needs >= 8 nodes");
  if (noise_vectors.empty()) throw Error(ErrorCode::invalid_argument, "no noise channels");
  const std::size_t d = generator.dim();
  for (const Vector& v : noise_vectors) {
    if (v.dim() != d) throw Error(ErrorCode::dimension_mismatch, "noise vector dimension");
  }

  const std::size_t m = noise_vectors.size();
  const std::size_t block = 1 + 2 * d;
  const PadeCoefficients coeffs = pade_coefficients(kernel_order);
  const QuadratureRule rule = gauss_legendre(quad_nodes);

  // Kernel matrices at each node, shared by all channels.
  std::vector<Matrix> exact_kernels, diff_kernels;
  std::vector<double> weights;
  for (std::size_t q = 0; q < quad_nodes; ++q) {
    const double theta = 0.5 * h * (rule.nodes[q] + 1.0);
    const Matrix arg = (h - theta) * generator;
    Matrix exact = matrix_exp(arg);
    Matrix scheme;
    try {
      scheme = pade_transfer_matrix(arg, coeffs);
    } catch (const Error& e) {
      throw Error(ErrorCode::quadrature_failure,
                  "scheme kernel at node " + std::to_string(q) + ": " + e.what());
    }
    diff_kernels.push_back(scheme - exact);
    exact_kernels.push_back(std::move(exact));
    weights.push_back(0.5 * h * rule.weights[q]);
  }

  Matrix covariance(m * block), factor(m * block);
  for (std::size_t c = 0; c < m; ++c) {
    // Internal coordinates (dW, I_exact, I_scheme - I_exact).
    Matrix internal(block);
    Vector k(block);
    for (std::size_t q = 0; q < quad_nodes; ++q) {
      const Vector e = exact_kernels[q] * noise_vectors[c];
      const Vector f = diff_kernels[q] * noise_vectors[c];
      k[0] = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        k[1 + i] = e[i];
        k[1 + d + i] = f[i];
      }
      for (std::size_t i = 0; i < block; ++i)
        for (std::size_t j = 0; j <= i; ++j) internal(i, j) += weights[q] * k[i] * k[j];
    }
    for (std::size_t i = 0; i < block; ++i)
      for (std::size_t j = 0; j < i; ++j) internal(j, i) = internal(i, j);
    const Matrix l = semidefinite_cholesky(internal, 1e-14);

    // Public coordinates: row(I_scheme_i) = row(I_exact_i) + row(D_i), i.e.
    // left multiplication by T. The factor becomes T L and the covariance
    // T C T^T.
    auto to_public = [&](const Matrix& src) {
      Matrix out = src;
      for (std::size_t i = 1 + d; i < block; ++i)
        for (std::size_t j = 0; j < block; ++j) out(i, j) += src(i - d, j);
      return out;
    };
    const Matrix public_factor = to_public(l);
    const Matrix quad_cov = to_public(to_public(internal).transpose());

    const std::size_t off = c * block;
    for (std::size_t i = 0; i < block; ++i) {
      for (std::size_t j = 0; j < block; ++j) {
        covariance(off + i, off + j) = 0.5 * (quad_cov(i, j) + quad_cov(j, i));
        factor(off + i, off + j) = public_factor(i, j);
      }
    }
  }
  return JointGaussianSpec(m, d, h, kernel_order, std::move(covariance), std::move(factor));
}

Vector sample_joint_stacked(const JointGaussianSpec& spec, NoiseStream& stream) {
  const std::size_t n = spec.dim();
  const std::size_t block = spec.block_size();
  std::vector<double> g(n);
  for (double& x : g) x = stream.next_gaussian();
  const Matrix& l = spec.cholesky_factor();
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t start = (i / block) * block;
    double sum = 0.0;
    for (std::size_t j = start; j <= i; ++j) sum += l(i, j) * g[j];
    out[i] = sum;
  }
  return out;
}

JointSample unpack_joint(const JointGaussianSpec& spec, const Vector& stacked) {
  if (stacked.dim() != spec.dim()) throw Error(ErrorCode::dimension_mismatch, "joint sample size");
  const std::size_t d = spec.state_dim();
  JointSample sample;
  for (std::size_t c = 0; c < spec.channels(); ++c) {
    sample.dw.push_back(stacked[spec.dw_index(c)]);
    Vector exact(d), scheme(d);
    for (std::size_t i = 0; i < d; ++i) {
      exact[i] = stacked[spec.exact_index(c) + i];
      scheme[i] = stacked[spec.scheme_index(c) + i];
    }
    sample.i_exact.push_back(std::move(exact));
    sample.i_scheme.push_back(std::move(scheme));
  }
  return sample;
}

JointSample sample_joint(const JointGaussianSpec& spec, NoiseStream& stream) {
  return unpack_joint(spec, sample_joint_stacked(spec, stream));
}

}  // namespace sympade
