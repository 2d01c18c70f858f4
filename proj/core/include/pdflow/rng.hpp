#pragma once

#include <cstdint>
#include <random>

#include "pdflow/types.hpp"

namespace pdflow {

/// Reproducible random stream. Identical (seed, stream_id) give identical
/// draws bit-for-bit; distinct stream_ids are decorrelated through a
/// splitmix64 mix of the pair. Distribution transforms are implemented here
/// (not via std::*_distribution) so sequences do not depend on the standard
/// library build.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Derived stream, independent of this one for k1 != k2.
  RngStream sub_stream(std::uint64_t k) const;

  std::uint64_t next_u64();
  double uniform();                 // [0,1)
  double uniform_open();            // (0,1)
  double normal();                  // N(0,1), Box-Muller
  double gamma(double shape);       // unit scale, Marsaglia-Tsang
  double chi_square(double dof);    // 2*gamma(dof/2)
  double exponential();

  Matrix gaussian_matrix(int rows, int cols);
  /// S = (b + b^t)/sqrt(2): off-diagonal variance 1, diagonal variance 2.
  Matrix gaussian_sym(int n);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pdflow
