#pragma once

// Instance files: one JSON object with
//   dim_k, dim_h          ambient sizes (m rows, n columns)
//   T_basis, X_basis      lists of m x n matrices spanning T and X
//   P_coeffs              optional, |X_basis| x |T_basis|:
//                         P(T_basis[j]) = sum_i P_coeffs[i][j] X_basis[i]
//   E_blocks              optional {e11, e12, e21, e22}, coefficient matrices
//                         against the product lists
//                           e11: {T_i T_j^*} -> {X_i X_j^*}
//                           e12: {T_j}       -> {X_i}
//                           e21: {T_j^*}     -> {X_i^*}
//                           e22: {T_i^* T_j} -> {X_i^* X_j}
//                         with product index i * |list| + j
//   tolerances            optional {rank_cut, residual, ortho}
//   seed                  optional non-negative integer
// A complex scalar is [re, im]; a matrix is an array of rows.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "trolink/expectation.hpp"
#include "trolink/gen.hpp"

namespace trolink::io {

using Json = nlohmann::ordered_json;

struct EBlocks {
  ComplexMatrix e11;
  ComplexMatrix e12;
  ComplexMatrix e21;
  ComplexMatrix e22;
};

struct InstanceFile {
  Index dim_k = 0;
  Index dim_h = 0;
  std::vector<ComplexMatrix> t_basis;
  std::vector<ComplexMatrix> x_basis;
  std::optional<ComplexMatrix> p_coeffs;
  std::optional<EBlocks> e_blocks;
  std::optional<ToleranceProfile> tolerances;
  std::optional<std::uint64_t> seed;
};

Json matrix_to_json(const ComplexMatrix& m);
/// Throws InvalidInput naming `field` on any malformed entry.
ComplexMatrix matrix_from_json(const Json& j, const std::string& field);

/// Throws InvalidInput with a diagnostic naming the offending field.
InstanceFile parse_instance(const std::string& text);
InstanceFile read_instance(const std::string& path);
/// Pretty-printed JSON; every scalar in shortest round-trip form, so
/// re-parsing gives the identical double.
std::string write_instance(const InstanceFile& f);
Json instance_to_json(const InstanceFile& f);

/// The product lists that E_blocks coefficients refer to.
struct ProductLists {
  std::vector<ComplexMatrix> left;   // a_i b_j^*
  std::vector<ComplexMatrix> adj;    // a_j^*
  std::vector<ComplexMatrix> right;  // a_i^* b_j
};
ProductLists product_lists(const std::vector<ComplexMatrix>& list);

/// The map sending source_list[j] to sum_i coeffs(i, j) target_list[i],
/// expressed between the given orthonormal bases. Throws InvalidInput if the
/// coefficients are inconsistent on dependent source lists or the source
/// list does not span `source`.
TroMap map_from_spanning(const std::vector<ComplexMatrix>& source_list,
                         const std::vector<ComplexMatrix>& target_list,
                         const ComplexMatrix& coeffs,
                         const mats::SubspaceBasis& source,
                         const mats::SubspaceBasis& target,
                         const std::string& field);

/// Minimum-norm coefficients of m against target_list for every source
/// element: the inverse of map_from_spanning.
ComplexMatrix coeffs_against(const TroMap& m,
                             const std::vector<ComplexMatrix>& source_list,
                             const std::vector<ComplexMatrix>& target_list);

/// Spans of the file's lists without TRO validation (the gates check that).
struct Loaded {
  tro::Tro t;
  tro::Tro x;
  std::optional<TroMap> p;
  std::optional<expectation::BlockExpectation> e;
};
Loaded load(const InstanceFile& f, const ToleranceProfile& tol);

InstanceFile from_instance(const gen::Instance& inst);
EBlocks e_blocks_of(const expectation::BlockExpectation& e,
                    const std::vector<ComplexMatrix>& t_list,
                    const std::vector<ComplexMatrix>& x_list);

/// FNV-1a 64-bit digest as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace trolink::io
