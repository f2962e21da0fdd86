#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace lqr_recon {

/// Reproducible Gaussian source: std::mt19937_64 (bit-exact across standard
/// libraries) feeding 53-bit uniforms into the Box-Muller transform. The
/// standard distributions are avoided because their algorithms are
/// implementation-defined.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  Eigen::VectorXd normal_vector(Eigen::Index n);
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derives an independent stream seed from a base seed and a stream index
/// (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace lqr_recon
