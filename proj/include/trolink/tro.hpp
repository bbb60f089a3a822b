#pragma once

// Ternary rings of operators: finite-dimensional subspaces T of M_{m,n}
// (operators from H = C^n to K = C^m) with T T^* T contained in T.
//
// All spans here are finite dimensional, so "closed linear span" is plain
// linear span and no topology is modelled.

#include <cstdint>
#include <string>
#include <vector>

#include "trolink/mats.hpp"

namespace trolink::tro {

using mats::SubspaceBasis;

class Tro {
 public:
  /// Validates closure under the ternary product; throws InvalidInput if
  /// the space is not a TRO.
  explicit Tro(SubspaceBasis space);

  /// No closure check. Used to carry deliberately invalid inputs to the
  /// gate that is supposed to reject them.
  static Tro unvalidated(SubspaceBasis space);

  /// dim K (rows).
  Index dim_k() const { return space_.rows(); }
  /// dim H (cols).
  Index dim_h() const { return space_.cols(); }
  Index dim() const { return space_.dim(); }
  const SubspaceBasis& space() const { return space_; }
  const ToleranceProfile& tol() const { return space_.tol(); }

 private:
  struct Unchecked {};
  Tro(SubspaceBasis space, Unchecked) : space_(std::move(space)) {}

  SubspaceBasis space_;
};

/// a b^* c.
ComplexMatrix ternary_product(const ComplexMatrix& a, const ComplexMatrix& b,
                              const ComplexMatrix& c);

struct TroCheck {
  bool ok;
  double worst_residual;
};

/// Membership of a b^* c in s for all basis triples.
TroCheck is_tro(const SubspaceBasis& s);

/// Smallest TRO containing s.
Tro ternary_closure(const SubspaceBasis& s);

struct LinkingBlocks {
  SubspaceBasis left;   // <T T^*>, m x m
  SubspaceBasis right;  // <T^* T>, n x n
};

/// Throws InternalError if either block fails to be a *-algebra.
LinkingBlocks linking_blocks(const Tro& t);

/// Positions of the four corners inside the (m+n)-square linking algebra:
/// K indices come first (0..m-1), then H indices (m..m+n-1).
struct BlockLayout {
  Index k_size = 0;  // m
  Index h_size = 0;  // n
  /// Basis element ranges of the four corners, in the order
  /// <TT^*>, T, T^*, <T^*T>.
  Index left_count = 0;
  Index t_count = 0;
  Index t_adj_count = 0;
  Index right_count = 0;

  Index left_offset() const { return 0; }
  Index t_offset() const { return left_count; }
  Index t_adj_offset() const { return left_count + t_count; }
  Index right_offset() const { return left_count + t_count + t_adj_count; }
};

struct LinkingAlgebra {
  Index dim = 0;          // m + n
  SubspaceBasis space;    // basis is the union of the embedded corner bases
  BlockLayout layout;
};

/// Places the corners of a (m+n)-square matrix. Any corner may be empty.
ComplexMatrix embed_blocks(Index m, Index n, const ComplexMatrix* upper_left,
                           const ComplexMatrix* upper_right,
                           const ComplexMatrix* lower_left,
                           const ComplexMatrix* lower_right);

struct Blocks {
  ComplexMatrix upper_left;   // m x m
  ComplexMatrix upper_right;  // m x n
  ComplexMatrix lower_left;   // n x m
  ComplexMatrix lower_right;  // n x n
};
Blocks split_blocks(const ComplexMatrix& a, Index m, Index n);

LinkingAlgebra linking_algebra(const Tro& t);
LinkingAlgebra linking_algebra(const Tro& t, const LinkingBlocks& blocks);

struct Compression {
  Tro compressed;
  ComplexMatrix left_isometry;   // K_0 -> K, m x k0
  ComplexMatrix right_isometry;  // H_0 -> H, n x h0
  bool was_nondegenerate;
};

/// Restricts T to B(H_0, K_0), where K_0 is the span of the ranges of T and
/// H_0 the span of the ranges of T^*. Throws Degeneracy for the zero TRO.
Compression essential_compression(const Tro& t);

/// V_K^* a V_H for the isometries of a compression.
ComplexMatrix compress(const ComplexMatrix& a, const Compression& c);

/// Whether the ranges of T span K and the ranges of T^* span H.
bool nondegenerately_represented(const Tro& t);

struct NamedCheck {
  std::string name;
  bool pass;
  double residual;
};

struct SubTroReport {
  bool is_subspace = true;
  /// <XT^*T> = T, <TT^*X> = T, <XX^*T> = T, <TX^*X> = T,
  /// <XT^*> = <TT^*> and <T^*X> = <T^*T>.
  std::vector<NamedCheck> checks;
  bool nondegenerate = false;  // checks[0] and checks[1]
};

/// Throws InvalidInput if X is not contained in T.
SubTroReport subtro_nondegeneracy(const Tro& x, const Tro& t);
/// Only the two defining identities.
bool is_nondegenerate(const Tro& x, const Tro& t);

/// span(A_X A_T) = A_T and span(A_T A_X) = A_T.
bool linking_subalgebra_nondegenerate(const Tro& x, const Tro& t);

struct ModuleNormResult {
  double operator_norm = 0.0;
  double module_sup_lower_bound = 0.0;
  double gap = 0.0;
  ComplexMatrix witness;  // element of T with unit operator norm
};

/// Compares |c| with sup{|c t| : t in T, |t| <= 1} for c in <TT^*>.
/// Throws NotInSpan if c is not in <TT^*>.
ModuleNormResult module_norm_check(const ComplexMatrix& c, const Tro& t,
                                   int restarts, std::uint64_t seed);

}  // namespace trolink::tro
