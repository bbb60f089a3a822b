#include "trolink/tro_map.hpp"

#include <string>

namespace trolink {

TroMap::TroMap(SubspaceBasis source, SubspaceBasis target, ComplexMatrix coeffs)
    : source_(std::move(source)),
      target_(std::move(target)),
      coeffs_(std::move(coeffs)) {
  if (coeffs_.rows() != target_.dim() || coeffs_.cols() != source_.dim()) {
    throw InvalidInput("TroMap: coefficient matrix must be " +
                       std::to_string(target_.dim()) + "x" +
                       std::to_string(source_.dim()));
  }
  mats::require_finite(coeffs_, "TroMap coefficients");
}

TroMap TroMap::from_function(
    SubspaceBasis source, SubspaceBasis target,
    const std::function<ComplexMatrix(const ComplexMatrix&)>& f) {
  ComplexMatrix coeffs(target.dim(), source.dim());
  for (Index j = 0; j < source.dim(); ++j) {
    const ComplexMatrix image = f(source.element(j));
    const auto member = mats::membership(target, image);
    if (!member.is_member) {
      throw InvalidInput("map image of basis element " + std::to_string(j) +
                         " escapes the target (residual " +
                         std::to_string(member.residual) + ")");
    }
    coeffs.col(j) = target.coordinates(image);
  }
  return TroMap(std::move(source), std::move(target), std::move(coeffs));
}

TroMap TroMap::identity(const SubspaceBasis& s) {
  return TroMap(s, s, ComplexMatrix::Identity(s.dim(), s.dim()));
}

ComplexMatrix TroMap::apply(const ComplexMatrix& m) const {
  return target_.combine(coeffs_ * source_.coordinates(m));
}

ComplexMatrix TroMap::images() const {
  if (source_.dim() == 0) return ComplexMatrix(target_.ambient_size(), 0);
  return target_.columns() * coeffs_;
}

ComplexMatrix TroMap::vec_operator() const {
  if (source_.dim() == 0 || target_.dim() == 0) {
    return ComplexMatrix::Zero(target_.ambient_size(), source_.ambient_size());
  }
  return target_.columns() * coeffs_ * source_.columns().adjoint();
}

TroMap compose(const TroMap& outer, const TroMap& inner) {
  if (!mats::contains(outer.source(), inner.target())) {
    throw InvalidInput("compose: inner target is not inside outer source");
  }
  // Coordinates of the inner target basis in the outer source basis.
  const ComplexMatrix change =
      outer.source().columns().adjoint() * inner.target().columns();
  return TroMap(inner.source(), outer.target(),
                outer.coeffs() * change * inner.coeffs());
}

double map_distance(const TroMap& a, const TroMap& b) {
  if (!mats::span_equal(a.source(), b.source())) {
    throw InvalidInput("map_distance: maps have different sources");
  }
  if (a.source().dim() == 0) return 0.0;
  const ComplexMatrix diff =
      a.images() - b.vec_operator() * a.source().columns();
  return diff.colwise().norm().maxCoeff();
}

TroMap dagger(const TroMap& p) {
  // With bases {s_j^*} and {x_i^*}: P(s_j)^* = sum conj(c_ij) x_i^*.
  return TroMap(p.source().adjoint(), p.target().adjoint(),
                p.coeffs().conjugate());
}

}  // namespace trolink
