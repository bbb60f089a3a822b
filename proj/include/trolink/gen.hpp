#pragma once

// Instance families (T, X, P) with known answers.
//
//  corner         T = M_{m,n}, P(t) = e t f for orthogonal projections e, f.
//  group_average  T = M_{m,n}, P = average of t -> u^j t v^{-j} over a
//                 cyclic group; X is the fixed-point space.
//  random         T a randomly rotated direct sum of blocks M_{p,q} (x) I_r,
//                 P a group average by unitaries preserving the blocks.
//  degenerate     one precondition of the extension fails on purpose.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "trolink/tro.hpp"
#include "trolink/tro_map.hpp"

namespace trolink::gen {

using tro::Tro;

enum class Provenance { corner, group_average, random, degenerate };
enum class DegenerateKind { missing_nondegeneracy, noncontractive_P, non_tro_X };

std::string_view to_string(Provenance p);
std::string_view to_string(DegenerateKind k);
/// Throws InvalidInput on an unknown name.
DegenerateKind parse_degenerate_kind(std::string_view name);

struct Instance {
  Instance(Tro t_, Tro x_, TroMap p_, Provenance provenance_,
           std::uint64_t seed_)
      : t(std::move(t_)),
        x(std::move(x_)),
        p(std::move(p_)),
        provenance(provenance_),
        seed(seed_) {}

  Tro t;
  Tro x;
  TroMap p;
  Provenance provenance;
  std::uint64_t seed = 0;
  /// Result of the nondegeneracy check on (X, T); false for every
  /// degenerate_instance kind except noncontractive_P.
  bool nondegenerate = false;
  std::optional<DegenerateKind> kind;
  /// Gate of the extension pipeline expected to reject the instance.
  std::string expected_gate;
  /// Closed-form data: the projections e, f of a corner instance, or the
  /// unitaries u, v of a group average.
  ComplexMatrix left;
  ComplexMatrix right;
  int order = 0;
};

/// Haar-random rank-r orthogonal projection on C^d.
ComplexMatrix random_projection(Index d, Index rank, std::uint64_t seed);

/// Defaults to full ranks, where X = T. Throws InvalidInput unless
/// 1 <= rank_e <= m and 1 <= rank_f <= n.
Instance corner_instance(Index m, Index n, Index rank_e, Index rank_f,
                         std::uint64_t seed);
Instance corner_instance(const ComplexMatrix& e, const ComplexMatrix& f);

/// Explicit unitaries with u^k = 1 and v^k = 1 (checked).
Instance group_average_instance(const ComplexMatrix& u, const ComplexMatrix& v,
                                int order);
/// Random u, v of the given order whose eigenvalue sets coincide, so X is
/// nondegenerate. order in {1, 2, 3, 4}.
Instance group_average_instance(Index m, Index n, int order,
                                std::uint64_t seed);

/// Ternary closure of generator_count Gaussian matrices, compressed to its
/// essential subspaces.
Tro random_tro(Index m, Index n, int generator_count, std::uint64_t seed);

/// Block-structured T with ambient sizes at most max_dim, possibly with
/// spare dimensions outside the essential subspaces.
Instance random_instance(Index max_dim, std::uint64_t seed);

Instance degenerate_instance(DegenerateKind kind, std::uint64_t seed);

/// Ambient matrix units of M_{m,n}, i.e. an orthonormal basis of all of it.
mats::SubspaceBasis full_space(Index m, Index n, ToleranceProfile tol = {});

}  // namespace trolink::gen
