#pragma once

// Finite-dimensional content of the von Neumann algebra picture: weak*
// closures are spans, so the statements reduce to span equalities between
// product spaces and double commutants.

#include "trolink/report.hpp"
#include "trolink/tro.hpp"
#include "trolink/tro_map.hpp"

namespace trolink::wstar {

using mats::SubspaceBasis;
using tro::Tro;

/// commutant(commutant(s)). If s is not closed under adjoints it is replaced
/// by s + s^* first and *symmetrized (when given) is set.
SubspaceBasis double_commutant(const SubspaceBasis& s,
                               bool* symmetrized = nullptr);

/// Checks, in order:
///  (i)   X nondegenerate in T iff X nondegenerately represented, on the
///        essential compression of T;
///  (ii)  <TX*> = <TT*> = (TT*)'' and <X*T> = <T*T> = (T*T)'' on the
///        compression (mandatory only when X is nondegenerate);
///  (iii) A_T'' = A_T for T as given;
///  (iv)  with p: corner maps evaluated on the double commutants agree with
///        the assembled expectation (mandatory only when X is nondegenerate).
/// Throws InvalidInput if X is not contained in T.
Report finite_dim_wstar_check(const Tro& x, const Tro& t,
                              const TroMap* p = nullptr);

}  // namespace trolink::wstar
