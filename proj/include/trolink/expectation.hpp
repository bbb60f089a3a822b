#pragma once

// Extension of a TRO conditional expectation P: T -> X to a conditional
// expectation between the linking algebras,
//
//        [ P P^dagger   P          ]
//   E =  [                         ]  : A_T -> A_X,
//        [ P^dagger     P^dagger P ]
//
// with the corner maps given on products by
//   P P^dagger(sum a_i x_i^*) = sum P(a_i) x_i^*,
//   P^dagger P(sum x_i^* a_i) = sum x_i^* P(a_i),
// plus the checks that certify each step numerically.

#include <cstdint>
#include <vector>

#include "trolink/report.hpp"
#include "trolink/tro.hpp"
#include "trolink/tro_map.hpp"

namespace trolink::expectation {

using tro::Tro;

/// Random restarts and ascent length for the norm probes.
struct ProbeOptions {
  int samples = 4;
  int max_iterations = 100;
};

/// Lower bounds for |id_L (x) m| for L = 1..level, nondecreasing in L.
std::vector<double> cb_probe(const TroMap& m, int level, int samples,
                             std::uint64_t seed, int max_iterations = 100);

/// Throws InvalidInput unless p is defined on T and maps it into X.
void require_maps_into(const TroMap& p, const Tro& x, const Tro& t);

/// Idempotency, surjectivity, amplified contractivity, the three module
/// identities on basis triples, and P(t)^*P(u) = P^dagger P(P(t)^* u)
/// = P^dagger P(t^* P(u)) on basis pairs.
Report check_tro_expectation(const TroMap& p, const Tro& x, const Tro& t,
                             int amplification_level, std::uint64_t seed = 0,
                             ProbeOptions probe = {});

enum class Side { left, right };

/// The corner formula evaluated on an arbitrary domain inside
/// span(T X^*) (left) or span(X^* T) (right). No nondegeneracy check.
/// Throws Degeneracy if a domain element is not in that span.
TroMap corner_map_on(const TroMap& p, Side side, const Tro& x, const Tro& t,
                     const SubspaceBasis& domain, const SubspaceBasis& target);

/// P P^dagger : <TT^*> -> <XX^*> (left) or P^dagger P : <T^*T> -> <X^*X>
/// (right). Throws Degeneracy unless X is nondegenerate in T, and
/// PreconditionViolation if the result is not a contractive projection.
TroMap corner_map(const TroMap& p, Side side, const Tro& x, const Tro& t);

/// Largest HS discrepancy of the corner formula between two different
/// decompositions of random elements of <TT^*> and <T^*T>.
double welldefined_check(const TroMap& p, const Tro& x, const Tro& t,
                         int trials, std::uint64_t seed);

struct BlockExpectation {
  Index dim_k = 0;
  Index dim_h = 0;
  TroMap e11;  // <TT^*> -> <XX^*>
  TroMap e12;  // T -> X
  TroMap e21;  // T^* -> X^*
  TroMap e22;  // <T^*T> -> <X^*X>

  /// Blockwise application to an (m+n)-square matrix.
  ComplexMatrix apply(const ComplexMatrix& a) const;
  /// Operator on vec(M_{m+n}); each block map is composed with the
  /// projection onto its source.
  ComplexMatrix vec_operator() const;
  /// The whole map as A_T -> A_X in the linking-algebra bases.
  TroMap as_map(const tro::LinkingAlgebra& source,
                const tro::LinkingAlgebra& target) const;
};

/// Largest HS norm of E(a) outside A_X over the A_T basis.
double block_consistency_residual(const BlockExpectation& e, const Tro& x,
                                  const Tro& t);

BlockExpectation assemble_expectation(const TroMap& p, const Tro& x,
                                      const Tro& t);

/// Idempotency, identity on A_X, bimodule property, positivity on sampled
/// g^*g, and sampled amplified contractivity.
Report verify_expectation(const BlockExpectation& e, const Tro& x,
                          const Tro& t, int samples, int amplification_level,
                          std::uint64_t seed, ProbeOptions probe = {});

struct UniquenessResult {
  bool equal = false;
  double forcing_residual = 0.0;
  double block_deviation = 0.0;
};

/// Throws PreconditionViolation if e_prime.e12 differs from p or e_prime
/// fails verify_expectation.
UniquenessResult uniqueness_check(const BlockExpectation& e_prime,
                                  const TroMap& p, const Tro& x, const Tro& t,
                                  std::uint64_t seed = 0);

/// P := e12. Throws InvalidInput if e12 leaves T, PreconditionViolation if e
/// is not the expectation assembled from its own e12.
TroMap extract_from_expectation(const BlockExpectation& e, const Tro& x,
                                const Tro& t);

/// Largest blockwise map_distance.
double block_distance(const BlockExpectation& a, const BlockExpectation& b);

}  // namespace trolink::expectation
