#pragma once

// Dense complex linear algebra on spaces of rectangular matrices.
//
// Every subspace of M_{r,c} is stored as an orthonormal basis with respect to
// the Hilbert-Schmidt inner product <a, b> = trace(b^* a). Basis elements are
// kept vectorized (Eigen column-major order) as the columns of one matrix so
// that projections and coordinate changes are single matrix products.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "trolink/errors.hpp"

namespace trolink {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

struct ToleranceProfile {
  /// Singular values below rank_cut * (largest singular value) count as zero.
  double rank_cut = 1e-10;
  /// Bound on membership and identity residuals, relative to max(1, |m|_HS).
  double residual = 1e-9;
  /// Bound on |Gram - I| for stored bases.
  double ortho = 1e-10;

  /// Throws InvalidInput unless all fields are positive and rank_cut < 1.
  void validate() const;
};

namespace mats {

/// Throws InvalidInput if any entry of m is NaN or infinite.
void require_finite(const ComplexMatrix& m, const char* what);

double hs_inner_re(const ComplexMatrix& a, const ComplexMatrix& b);
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);
double hs_norm(const ComplexMatrix& m);

/// Largest singular value.
double operator_norm(const ComplexMatrix& m);

struct Svd {
  Eigen::VectorXd values;
  ComplexMatrix u;
  ComplexMatrix v;
};

/// The SVD every rank decision goes through. `options` takes the
/// Eigen::Compute* flags.
Svd svd(const ComplexMatrix& a, unsigned options);

ComplexVector vectorize(const ComplexMatrix& m);
ComplexMatrix unvectorize(const Eigen::Ref<const ComplexVector>& v, Index rows,
                          Index cols);

/// Orthonormal basis of a subspace of rows x cols matrices.
class SubspaceBasis {
 public:
  /// The zero subspace.
  SubspaceBasis(Index rows, Index cols, ToleranceProfile tol = {});

  /// Adopts `columns` (vectorized elements) as the basis. Throws InvalidInput
  /// if they are not orthonormal within tol.ortho.
  static SubspaceBasis from_orthonormal(Index rows, Index cols,
                                        ComplexMatrix columns,
                                        ToleranceProfile tol = {});

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index ambient_size() const { return rows_ * cols_; }
  Index dim() const { return columns_.cols(); }
  bool empty() const { return dim() == 0; }
  const ToleranceProfile& tol() const { return tol_; }

  /// N x dim matrix whose columns are the vectorized basis elements.
  const ComplexMatrix& columns() const { return columns_; }
  ComplexMatrix element(Index i) const;
  std::vector<ComplexMatrix> elements() const;

  /// Coordinates <m, b_i> of the orthogonal projection of m.
  ComplexVector coordinates(const ComplexMatrix& m) const;
  ComplexMatrix combine(const Eigen::Ref<const ComplexVector>& coords) const;
  ComplexMatrix project(const ComplexMatrix& m) const;

  /// Basis {b_i^*} of the adjoint space (cols x rows).
  SubspaceBasis adjoint() const;
  SubspaceBasis with_tol(ToleranceProfile tol) const;

 private:
  SubspaceBasis(Index rows, Index cols, ComplexMatrix columns,
                ToleranceProfile tol);

  Index rows_;
  Index cols_;
  ComplexMatrix columns_;
  ToleranceProfile tol_;
};

/// Orthonormal basis of the span of the vectorized columns of `stacked`.
SubspaceBasis span_of_columns(Index rows, Index cols,
                              const ComplexMatrix& stacked,
                              ToleranceProfile tol = {});

/// Orthonormal basis of span(spanning). The list must be nonempty.
SubspaceBasis orthonormal_basis(std::span<const ComplexMatrix> spanning,
                                ToleranceProfile tol = {});
/// As above with explicit ambient dimensions; the list may be empty.
SubspaceBasis orthonormal_basis(Index rows, Index cols,
                                std::span<const ComplexMatrix> spanning,
                                ToleranceProfile tol = {});

/// Orthonormal basis of a + b.
SubspaceBasis sum(const SubspaceBasis& a, const SubspaceBasis& b);

struct Membership {
  bool is_member;
  double residual;
};

Membership membership(const SubspaceBasis& s, const ComplexMatrix& m);

/// Largest membership residual of a basis element of `inner` in `outer`.
double containment_residual(const SubspaceBasis& outer,
                            const SubspaceBasis& inner);
bool contains(const SubspaceBasis& outer, const SubspaceBasis& inner);

/// max of both containment residuals.
double span_distance(const SubspaceBasis& a, const SubspaceBasis& b);
bool span_equal(const SubspaceBasis& a, const SubspaceBasis& b);

/// Minimum-norm least-squares solver for coefficients over a fixed,
/// possibly dependent, generator list. Factor once, solve many.
class Decomposer {
 public:
  Decomposer(Index rows, Index cols, std::span<const ComplexMatrix> generators,
             ToleranceProfile tol = {});
  Decomposer(Index rows, Index cols, ComplexMatrix stacked,
             ToleranceProfile tol = {});

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index generator_count() const { return stacked_.cols(); }
  Index rank() const { return rank_; }

  /// Minimum-norm coefficients. Throws NotInSpan if the reconstruction
  /// residual exceeds tol.residual * max(1, |m|_HS).
  ComplexVector solve(const ComplexMatrix& m) const;
  /// Like solve, but reports the residual instead of throwing.
  ComplexVector solve(const ComplexMatrix& m, double& residual) const;
  /// Column-wise solve for vectorized targets; residuals are absolute.
  ComplexMatrix solve_columns(const ComplexMatrix& targets,
                              Eigen::VectorXd& residuals) const;

  /// Orthonormal basis (in coefficient space) of the kernel of the
  /// generator map, i.e. all coefficient vectors that combine to zero.
  const ComplexMatrix& kernel() const { return kernel_; }
  /// Orthonormal basis of span(generators).
  SubspaceBasis range() const;

 private:
  void factor();

  Index rows_;
  Index cols_;
  ComplexMatrix stacked_;
  ToleranceProfile tol_;
  Index rank_ = 0;
  ComplexMatrix left_;           // N x rank
  Eigen::VectorXd inv_singular_;  // rank
  ComplexMatrix right_;          // k x rank
  ComplexMatrix kernel_;         // k x (k - rank)
};

/// Minimum-norm coefficients c with m = sum c_i generators_i.
ComplexVector decompose(const ComplexMatrix& m,
                        std::span<const ComplexMatrix> generators,
                        ToleranceProfile tol = {});

/// {x in M_d : x g = g x and x g^* = g^* x for every generator g}.
SubspaceBasis commutant(Index d, std::span<const ComplexMatrix> generators,
                        ToleranceProfile tol = {});
SubspaceBasis commutant(const SubspaceBasis& s);

struct ClosureCheck {
  bool ok;
  double residual;
};

/// Closed under products and adjoints, i.e. a *-subalgebra of M_d.
ClosureCheck star_algebra_check(const SubspaceBasis& s);

}  // namespace mats
}  // namespace trolink
