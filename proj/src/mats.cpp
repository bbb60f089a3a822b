#include "trolink/mats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trolink/kernels.hpp"

namespace trolink {

void ToleranceProfile::validate() const {
  if (!(rank_cut > 0.0) || !(rank_cut < 1.0)) {
    throw InvalidInput("tolerance rank_cut must lie in (0, 1)");
  }
  if (!(residual > 0.0)) throw InvalidInput("tolerance residual must be > 0");
  if (!(ortho > 0.0)) throw InvalidInput("tolerance ortho must be > 0");
}

namespace mats {
namespace {

// Index of the first singular value that falls below the relative cutoff.
Index numerical_rank(const Eigen::VectorXd& singular, double rank_cut) {
  if (singular.size() == 0 || singular(0) <= 0.0) return 0;
  const double cut = rank_cut * singular(0);
  Index r = 0;
  while (r < singular.size() && singular(r) > cut) ++r;
  return r;
}

void check_stack(Index rows, Index cols, const ComplexMatrix& stacked) {
  if (rows <= 0 || cols <= 0) {
    throw InvalidInput("ambient dimensions must be positive");
  }
  if (stacked.cols() > 0 && stacked.rows() != rows * cols) {
    throw InvalidInput("stacked generators do not match ambient dimensions");
  }
}

ComplexMatrix stack(Index rows, Index cols,
                    std::span<const ComplexMatrix> ms) {
  ComplexMatrix out(rows * cols, static_cast<Index>(ms.size()));
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i].rows() != rows || ms[i].cols() != cols) {
      throw InvalidInput("mixed matrix dimensions: expected " +
                         std::to_string(rows) + "x" + std::to_string(cols) +
                         ", got " + std::to_string(ms[i].rows()) + "x" +
                         std::to_string(ms[i].cols()));
    }
    require_finite(ms[i], "spanning matrix");
    out.col(static_cast<Index>(i)) = vectorize(ms[i]);
  }
  return out;
}

}  // namespace

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) {
    throw InvalidInput(std::string(what) + ": non-finite entry");
  }
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInput("hs_inner: dimension mismatch");
  }
  // trace(b^* a)
  return (b.array().conjugate() * a.array()).sum();
}

double hs_inner_re(const ComplexMatrix& a, const ComplexMatrix& b) {
  return hs_inner(a, b).real();
}

double hs_norm(const ComplexMatrix& m) { return m.norm(); }

double operator_norm(const ComplexMatrix& m) {
  require_finite(m, "operator_norm");
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

ComplexVector vectorize(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvectorize(const Eigen::Ref<const ComplexVector>& v, Index rows,
                          Index cols) {
  if (v.size() != rows * cols) {
    throw InvalidInput("unvectorize: length mismatch");
  }
  ComplexMatrix out(rows, cols);
  Eigen::Map<ComplexVector>(out.data(), out.size()) = v;
  return out;
}

// ---------------------------------------------------------------------------
// SubspaceBasis

SubspaceBasis::SubspaceBasis(Index rows, Index cols, ToleranceProfile tol)
    : SubspaceBasis(rows, cols, ComplexMatrix(rows * cols, 0), tol) {}

SubspaceBasis::SubspaceBasis(Index rows, Index cols, ComplexMatrix columns,
                             ToleranceProfile tol)
    : rows_(rows), cols_(cols), columns_(std::move(columns)), tol_(tol) {
  if (rows <= 0 || cols <= 0) {
    throw InvalidInput("ambient dimensions must be positive");
  }
  tol_.validate();
}

SubspaceBasis SubspaceBasis::from_orthonormal(Index rows, Index cols,
                                              ComplexMatrix columns,
                                              ToleranceProfile tol) {
  check_stack(rows, cols, columns);
  if (columns.cols() == 0) return SubspaceBasis(rows, cols, tol);
  require_finite(columns, "basis");
  const ComplexMatrix gram = columns.adjoint() * columns;
  const double dev =
      (gram - ComplexMatrix::Identity(gram.rows(), gram.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (dev > tol.ortho) {
    throw InvalidInput("basis is not orthonormal (Gram deviation " +
                       std::to_string(dev) + ")");
  }
  return SubspaceBasis(rows, cols, std::move(columns), tol);
}

ComplexMatrix SubspaceBasis::element(Index i) const {
  return unvectorize(columns_.col(i), rows_, cols_);
}

std::vector<ComplexMatrix> SubspaceBasis::elements() const {
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(dim()));
  for (Index i = 0; i < dim(); ++i) out.push_back(element(i));
  return out;
}

ComplexVector SubspaceBasis::coordinates(const ComplexMatrix& m) const {
  if (m.rows() != rows_ || m.cols() != cols_) {
    throw InvalidInput("coordinates: dimension mismatch");
  }
  return columns_.adjoint() * vectorize(m);
}

ComplexMatrix SubspaceBasis::combine(
    const Eigen::Ref<const ComplexVector>& coords) const {
  if (coords.size() != dim()) throw InvalidInput("combine: length mismatch");
  if (dim() == 0) return ComplexMatrix::Zero(rows_, cols_);
  return unvectorize(columns_ * coords, rows_, cols_);
}

ComplexMatrix SubspaceBasis::project(const ComplexMatrix& m) const {
  return combine(coordinates(m));
}

SubspaceBasis SubspaceBasis::adjoint() const {
  ComplexMatrix cols(columns_.rows(), dim());
  for (Index i = 0; i < dim(); ++i) {
    cols.col(i) = vectorize(element(i).adjoint());
  }
  return SubspaceBasis(cols_, rows_, std::move(cols), tol_);
}

SubspaceBasis SubspaceBasis::with_tol(ToleranceProfile tol) const {
  return SubspaceBasis(rows_, cols_, columns_, tol);
}

// ---------------------------------------------------------------------------
// spans

Svd svd(const ComplexMatrix& a, unsigned options) {
  // One-sided Jacobi after a column-pivoted QR. Eigen 3.4.0's BDCSVD returns
  // wrong (finite) singular values on some wide complex product matrices, so
  // it is not used anywhere.
  Eigen::JacobiSVD<ComplexMatrix> j(a, options);
  return {j.singularValues(), j.computeU() ? j.matrixU() : ComplexMatrix(),
          j.computeV() ? j.matrixV() : ComplexMatrix()};
}

SubspaceBasis span_of_columns(Index rows, Index cols,
                              const ComplexMatrix& stacked,
                              ToleranceProfile tol) {
  check_stack(rows, cols, stacked);
  tol.validate();
  if (stacked.cols() == 0) return SubspaceBasis(rows, cols, tol);
  require_finite(stacked, "spanning set");
  const Svd d = svd(stacked, Eigen::ComputeThinU);
  const Index r = numerical_rank(d.values, tol.rank_cut);
  return SubspaceBasis::from_orthonormal(rows, cols, d.u.leftCols(r), tol);
}

SubspaceBasis orthonormal_basis(std::span<const ComplexMatrix> spanning,
                                ToleranceProfile tol) {
  if (spanning.empty()) {
    throw InvalidInput("orthonormal_basis: empty spanning list");
  }
  return orthonormal_basis(spanning.front().rows(), spanning.front().cols(),
                           spanning, tol);
}

SubspaceBasis orthonormal_basis(Index rows, Index cols,
                                std::span<const ComplexMatrix> spanning,
                                ToleranceProfile tol) {
  return span_of_columns(rows, cols, stack(rows, cols, spanning), tol);
}

SubspaceBasis sum(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInput("sum: dimension mismatch");
  }
  ComplexMatrix both(a.ambient_size(), a.dim() + b.dim());
  both << a.columns(), b.columns();
  return span_of_columns(a.rows(), a.cols(), both, a.tol());
}

Membership membership(const SubspaceBasis& s, const ComplexMatrix& m) {
  if (m.rows() != s.rows() || m.cols() != s.cols()) {
    throw InvalidInput("membership: dimension mismatch");
  }
  require_finite(m, "membership");
  const double residual = hs_norm(m - s.project(m));
  const double bound = s.tol().residual * std::max(1.0, hs_norm(m));
  return {residual <= bound, residual};
}

double containment_residual(const SubspaceBasis& outer,
                            const SubspaceBasis& inner) {
  if (outer.rows() != inner.rows() || outer.cols() != inner.cols()) {
    throw InvalidInput("containment: dimension mismatch");
  }
  if (inner.dim() == 0) return 0.0;
  const Eigen::VectorXd r =
      kernels::parallel::residuals(outer.columns(), inner.columns());
  return r.maxCoeff();
}

bool contains(const SubspaceBasis& outer, const SubspaceBasis& inner) {
  // Basis elements have unit HS norm, so the relative bound is tol.residual.
  return containment_residual(outer, inner) <= outer.tol().residual;
}

double span_distance(const SubspaceBasis& a, const SubspaceBasis& b) {
  return std::max(containment_residual(a, b), containment_residual(b, a));
}

bool span_equal(const SubspaceBasis& a, const SubspaceBasis& b) {
  return contains(a, b) && contains(b, a);
}

// ---------------------------------------------------------------------------
// Decomposer

Decomposer::Decomposer(Index rows, Index cols,
                       std::span<const ComplexMatrix> generators,
                       ToleranceProfile tol)
    : Decomposer(rows, cols, stack(rows, cols, generators), tol) {}

Decomposer::Decomposer(Index rows, Index cols, ComplexMatrix stacked,
                       ToleranceProfile tol)
    : rows_(rows), cols_(cols), stacked_(std::move(stacked)), tol_(tol) {
  check_stack(rows, cols, stacked_);
  tol_.validate();
  factor();
}

void Decomposer::factor() {
  const Index k = stacked_.cols();
  if (k == 0) {
    left_ = ComplexMatrix(rows_ * cols_, 0);
    inv_singular_ = Eigen::VectorXd(0);
    right_ = ComplexMatrix(0, 0);
    kernel_ = ComplexMatrix(0, 0);
    return;
  }
  require_finite(stacked_, "generators");
  const Svd d = svd(stacked_, Eigen::ComputeThinU | Eigen::ComputeFullV);
  rank_ = numerical_rank(d.values, tol_.rank_cut);
  left_ = d.u.leftCols(rank_);
  inv_singular_ = d.values.head(rank_).cwiseInverse();
  right_ = d.v.leftCols(rank_);
  kernel_ = d.v.rightCols(k - rank_);
}

ComplexVector Decomposer::solve(const ComplexMatrix& m,
                                double& residual) const {
  if (m.rows() != rows_ || m.cols() != cols_) {
    throw InvalidInput("decompose: dimension mismatch");
  }
  require_finite(m, "decompose");
  const ComplexVector target = vectorize(m);
  if (rank_ == 0) {
    residual = target.norm();
    return ComplexVector::Zero(stacked_.cols());
  }
  ComplexVector coeffs =
      right_ * (inv_singular_.asDiagonal() * (left_.adjoint() * target));
  residual = (stacked_ * coeffs - target).norm();
  return coeffs;
}

ComplexMatrix Decomposer::solve_columns(const ComplexMatrix& targets,
                                        Eigen::VectorXd& residuals) const {
  if (targets.rows() != rows_ * cols_) {
    throw InvalidInput("decompose: dimension mismatch");
  }
  if (rank_ == 0) {
    residuals = targets.colwise().norm().transpose();
    return ComplexMatrix::Zero(stacked_.cols(), targets.cols());
  }
  ComplexMatrix coeffs =
      right_ * (inv_singular_.asDiagonal() * (left_.adjoint() * targets));
  residuals = (stacked_ * coeffs - targets).colwise().norm().transpose();
  return coeffs;
}

ComplexVector Decomposer::solve(const ComplexMatrix& m) const {
  double residual = 0.0;
  ComplexVector coeffs = solve(m, residual);
  if (residual > tol_.residual * std::max(1.0, hs_norm(m))) {
    throw NotInSpan("decompose: matrix is not in the span of the generators",
                    residual);
  }
  return coeffs;
}

SubspaceBasis Decomposer::range() const {
  return SubspaceBasis::from_orthonormal(rows_, cols_, left_, tol_);
}

ComplexVector decompose(const ComplexMatrix& m,
                        std::span<const ComplexMatrix> generators,
                        ToleranceProfile tol) {
  return Decomposer(m.rows(), m.cols(), generators, tol).solve(m);
}

// ---------------------------------------------------------------------------
// commutants

SubspaceBasis commutant(Index d, std::span<const ComplexMatrix> generators,
                        ToleranceProfile tol) {
  tol.validate();
  const Index n = d * d;
  for (const auto& g : generators) require_finite(g, "commutant generator");
  const ComplexMatrix r = kernels::parallel::commutant_system(d, generators);
  // The cut is relative to the generators, not to the system: commutators of
  // scalars are rounding noise and must give rank 0, not rank of the noise.
  double scale = 0.0;
  for (const auto& g : generators) scale = std::max(scale, g.norm());
  Index rank = 0;
  if (r.rows() > 0 && scale > 0.0) {
    Eigen::JacobiSVD<ComplexMatrix> svd(r, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    while (rank < sv.size() && sv(rank) > tol.rank_cut * scale) ++rank;
    return SubspaceBasis::from_orthonormal(
        d, d, svd.matrixV().rightCols(n - rank), tol);
  }
  return SubspaceBasis::from_orthonormal(d, d, ComplexMatrix::Identity(n, n),
                                         tol);
}

SubspaceBasis commutant(const SubspaceBasis& s) {
  if (s.rows() != s.cols()) throw InvalidInput("commutant: non-square space");
  const auto gens = s.elements();
  return commutant(s.rows(), gens, s.tol());
}

ClosureCheck star_algebra_check(const SubspaceBasis& s) {
  if (s.rows() != s.cols()) {
    throw InvalidInput("star_algebra_check: non-square space");
  }
  if (s.dim() == 0) return {true, 0.0};
  const auto el = s.elements();
  const ComplexMatrix products =
      kernels::parallel::pair_products(el, kernels::Op::plain, el,
                                       kernels::Op::plain);
  double worst = kernels::parallel::residuals(s.columns(), products).maxCoeff();
  worst = std::max(worst, containment_residual(s, s.adjoint()));
  // Products of unit-HS elements have HS norm <= 1.
  return {worst <= s.tol().residual, worst};
}

}  // namespace mats
}  // namespace trolink
