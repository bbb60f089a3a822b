#pragma once

// Lower bounds for norms of linear maps by restarted local ascent.
//
// The maps probed here send a block matrix [a_kl] (L x L blocks, each block a
// combination of a fixed source basis) to [m(a_kl)]. The objective is the
// ratio |out|_op / |in|_op, which is scale invariant; ascent runs on the
// coefficient vector with the gradient of the top singular values.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "trolink/mats.hpp"

namespace trolink {

using Rng = std::mt19937_64;

/// Entries (N(0,1) + i N(0,1)) / sqrt(2).
ComplexMatrix random_gaussian(Index rows, Index cols, Rng& rng);
/// Haar-distributed unitary from a QR of a Gaussian matrix with the phases of
/// R's diagonal absorbed.
ComplexMatrix random_unitary(Index d, Rng& rng);

/// The amplification id_L (x) m of a linear map between matrix spaces.
class AmplifiedMap {
 public:
  /// `source` holds the vectorized source basis (in_rows*in_cols x p),
  /// `images` the vectorized images of those basis elements
  /// (out_rows*out_cols x p).
  AmplifiedMap(ComplexMatrix source, Index in_rows, Index in_cols,
               ComplexMatrix images, Index out_rows, Index out_cols,
               Index level);

  Index level() const { return level_; }
  Index parameters() const { return level_ * level_ * source_.cols(); }

  ComplexMatrix input(const ComplexVector& z) const;
  ComplexMatrix output(const ComplexVector& z) const;

  /// Ratio |output(z)| / |input(z)|, with 0 when the input vanishes.
  /// With finite `schatten` the denominator is the Schatten norm of that
  /// order instead, which is smooth where singular values of the input tie.
  double ratio(const ComplexVector& z, double schatten = kOperatorNorm) const;
  /// Steepest-ascent direction of ratio(z, schatten) (in coefficient space).
  ComplexVector ascent_direction(const ComplexVector& z, double& value,
                                 double schatten = kOperatorNorm) const;

  static constexpr double kOperatorNorm = 0.0;

  /// Embeds a witness for level L-1 (zero-padded) as a witness for this level.
  ComplexVector embed_lower(const ComplexVector& lower) const;

 private:
  ComplexMatrix assemble(const ComplexMatrix& basis, Index rows, Index cols,
                         const ComplexVector& z) const;
  /// conj(<B_j, g>) for every parameter j, with g an L*rows x L*cols matrix.
  ComplexVector pair(const ComplexMatrix& basis, Index rows, Index cols,
                     const ComplexMatrix& g) const;

  ComplexMatrix source_;
  Index in_rows_, in_cols_;
  ComplexMatrix images_;
  Index out_rows_, out_cols_;
  Index level_;
};

struct AscentOptions {
  /// Random starts; all are scored, the best `ascents` get a local ascent.
  int restarts = 8;
  int ascents = 4;
  /// Per ascent stage.
  int max_iterations = 200;
  /// Stop when a sweep improves the ratio by less than this (relative).
  double tolerance = 1e-13;
};

struct AscentResult {
  double ratio = 0.0;
  ComplexVector witness;
};

/// Local ascent from every seed and from the best-scoring random starts,
/// then a smoothed polish of the winner.
AscentResult maximize_ratio(const AmplifiedMap& map,
                            std::span<const ComplexVector> seeds,
                            const AscentOptions& options, Rng& rng);

/// Local ascent plus smoothed polish from one starting point.
AscentResult ascend(const AmplifiedMap& map, ComplexVector start,
                    const AscentOptions& options);

}  // namespace trolink
