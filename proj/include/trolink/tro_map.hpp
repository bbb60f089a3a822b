#pragma once

#include <functional>

#include "trolink/mats.hpp"

namespace trolink {

using mats::SubspaceBasis;

/// Linear map between matrix subspaces, stored as the coefficient matrix
/// (dim target x dim source) in the two orthonormal bases.
class TroMap {
 public:
  TroMap(SubspaceBasis source, SubspaceBasis target, ComplexMatrix coeffs);

  /// Evaluates f on the source basis. Throws InvalidInput if an image is not
  /// in `target`.
  static TroMap from_function(
      SubspaceBasis source, SubspaceBasis target,
      const std::function<ComplexMatrix(const ComplexMatrix&)>& f);
  static TroMap identity(const SubspaceBasis& s);

  const SubspaceBasis& source() const { return source_; }
  const SubspaceBasis& target() const { return target_; }
  const ComplexMatrix& coeffs() const { return coeffs_; }

  /// Applies the map to the orthogonal projection of m onto the source.
  ComplexMatrix apply(const ComplexMatrix& m) const;
  /// Vectorized images of the source basis, one per column.
  ComplexMatrix images() const;
  /// The map composed with the projection onto the source, as an operator
  /// on vectorized matrices (target ambient size x source ambient size).
  ComplexMatrix vec_operator() const;

 private:
  SubspaceBasis source_;
  SubspaceBasis target_;
  ComplexMatrix coeffs_;
};

/// outer o inner. The inner target must lie in the outer source.
TroMap compose(const TroMap& outer, const TroMap& inner);

/// max over the source basis of a of |a(v) - b(v)|_HS. The two sources must
/// span the same space.
double map_distance(const TroMap& a, const TroMap& b);

/// P^dagger(s) = P(s^*)^*, a map from the adjoint of the source to the
/// adjoint of the target.
TroMap dagger(const TroMap& p);

}  // namespace trolink
