#include "trolink/gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "trolink/ratio_ascent.hpp"

namespace trolink::gen {
namespace {

ComplexMatrix projection(Index d, Index rank, Rng& rng) {
  const ComplexMatrix w = random_unitary(d, rng);
  return w.leftCols(rank) * w.leftCols(rank).adjoint();
}

ComplexMatrix matrix_power(const ComplexMatrix& a, int k) {
  ComplexMatrix out = ComplexMatrix::Identity(a.rows(), a.cols());
  for (int i = 0; i < k; ++i) out = out * a;
  return out;
}

// Diagonal unitary W diag(omega^labels) W^*, omega = exp(2 pi i / k).
ComplexMatrix root_unitary(const ComplexMatrix& w, const std::vector<int>& labels,
                           int k) {
  const Index d = static_cast<Index>(labels.size());
  ComplexVector diag(d);
  for (Index i = 0; i < d; ++i) {
    diag(i) = std::polar(1.0, 2.0 * std::numbers::pi * labels[i] / k);
  }
  return w * diag.asDiagonal() * w.adjoint();
}

// `count` labels drawn from `pool`, each pool entry used at least once.
std::vector<int> cover(const std::vector<int>& pool, Index count, Rng& rng) {
  std::vector<int> out(pool.begin(), pool.end());
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  while (static_cast<Index>(out.size()) < count) out.push_back(pool[pick(rng)]);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

// Random nonempty label set from Z_k of size at most `limit`.
std::vector<int> label_pool(int k, Index limit, Rng& rng) {
  std::vector<int> all(k);
  for (int i = 0; i < k; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  const Index cap = std::min<Index>(limit, k);
  std::uniform_int_distribution<Index> size(1, cap);
  all.resize(size(rng));
  return all;
}

TroMap averaging_map(const Tro& t, const Tro& x, const ComplexMatrix& u,
                     const ComplexMatrix& v, int k) {
  return TroMap::from_function(t.space(), x.space(), [&](const ComplexMatrix& a) {
    ComplexMatrix acc = ComplexMatrix::Zero(a.rows(), a.cols());
    ComplexMatrix uj = ComplexMatrix::Identity(u.rows(), u.cols());
    ComplexMatrix vj = ComplexMatrix::Identity(v.rows(), v.cols());
    for (int j = 0; j < k; ++j) {
      acc += uj * a * vj.adjoint();
      uj = uj * u;
      vj = vj * v;
    }
    return ComplexMatrix(acc / static_cast<double>(k));
  });
}

Tro fixed_points(const Tro& t, const ComplexMatrix& u, const ComplexMatrix& v,
                 int k) {
  // The image of the average, computed without a target.
  std::vector<ComplexMatrix> images;
  for (const auto& a : t.space().elements()) {
    ComplexMatrix acc = ComplexMatrix::Zero(a.rows(), a.cols());
    ComplexMatrix uj = ComplexMatrix::Identity(u.rows(), u.cols());
    ComplexMatrix vj = ComplexMatrix::Identity(v.rows(), v.cols());
    for (int j = 0; j < k; ++j) {
      acc += uj * a * vj.adjoint();
      uj = uj * u;
      vj = vj * v;
    }
    images.push_back(acc / static_cast<double>(k));
  }
  return Tro(mats::orthonormal_basis(t.dim_k(), t.dim_h(), images, t.tol()));
}

void require_root_of_unity(const ComplexMatrix& u, int k, const char* name) {
  const Index d = u.rows();
  if (u.cols() != d) throw InvalidInput(std::string(name) + " must be square");
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  if ((u.adjoint() * u - id).norm() > 1e-10) {
    throw InvalidInput(std::string(name) + " is not unitary");
  }
  if ((matrix_power(u, k) - id).norm() > 1e-9) {
    throw InvalidInput(std::string(name) + "^order is not the identity");
  }
}

Instance finish_group_average(Tro t, const ComplexMatrix& u,
                              const ComplexMatrix& v, int k,
                              Provenance nondegenerate_tag,
                              std::uint64_t seed) {
  Tro x = fixed_points(t, u, v, k);
  TroMap p = averaging_map(t, x, u, v, k);
  const bool nd = x.dim() > 0 && tro::is_nondegenerate(x, t);
  Instance out(std::move(t), std::move(x), std::move(p),
               nd ? nondegenerate_tag : Provenance::degenerate, seed);
  out.nondegenerate = nd;
  out.expected_gate = nd ? "" : "nondegeneracy";
  out.left = u;
  out.right = v;
  out.order = k;
  return out;
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::corner: return "corner";
    case Provenance::group_average: return "group_average";
    case Provenance::random: return "random";
    case Provenance::degenerate: return "degenerate";
  }
  return "?";
}

std::string_view to_string(DegenerateKind k) {
  switch (k) {
    case DegenerateKind::missing_nondegeneracy: return "missing_nondegeneracy";
    case DegenerateKind::noncontractive_P: return "noncontractive_P";
    case DegenerateKind::non_tro_X: return "non_tro_X";
  }
  return "?";
}

DegenerateKind parse_degenerate_kind(std::string_view name) {
  for (auto k : {DegenerateKind::missing_nondegeneracy,
                 DegenerateKind::noncontractive_P, DegenerateKind::non_tro_X}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidInput("unknown degenerate kind '" + std::string(name) + "'");
}

mats::SubspaceBasis full_space(Index m, Index n, ToleranceProfile tol) {
  return mats::SubspaceBasis::from_orthonormal(
      m, n, ComplexMatrix::Identity(m * n, m * n), tol);
}

ComplexMatrix random_projection(Index d, Index rank, std::uint64_t seed) {
  Rng rng(seed);
  return projection(d, rank, rng);
}

Instance corner_instance(Index m, Index n, Index rank_e, Index rank_f,
                         std::uint64_t seed) {
  if (m < 1 || n < 1) throw InvalidInput("corner_instance: m, n must be >= 1");
  if (rank_e < 1 || rank_e > m || rank_f < 1 || rank_f > n) {
    throw InvalidInput("corner_instance: ranks must satisfy 1 <= rank_e <= m "
                       "and 1 <= rank_f <= n");
  }
  Rng rng(seed);
  const ComplexMatrix e = projection(m, rank_e, rng);
  const ComplexMatrix f = projection(n, rank_f, rng);
  Instance out = corner_instance(e, f);
  out.seed = seed;
  return out;
}

Instance corner_instance(const ComplexMatrix& e, const ComplexMatrix& f) {
  const Index m = e.rows();
  const Index n = f.rows();
  if (e.cols() != m || f.cols() != n) {
    throw InvalidInput("corner_instance: e and f must be square");
  }
  if ((e * e - e).norm() > 1e-10 || (e - e.adjoint()).norm() > 1e-10 ||
      (f * f - f).norm() > 1e-10 || (f - f.adjoint()).norm() > 1e-10) {
    throw InvalidInput("corner_instance: e and f must be orthogonal projections");
  }
  Tro t(full_space(m, n));
  std::vector<ComplexMatrix> images;
  for (const auto& a : t.space().elements()) images.push_back(e * a * f);
  Tro x(mats::orthonormal_basis(m, n, images));
  TroMap p = TroMap::from_function(
      t.space(), x.space(), [&](const ComplexMatrix& a) { return ComplexMatrix(e * a * f); });
  const bool nd = x.dim() > 0 && tro::is_nondegenerate(x, t);
  Instance out(std::move(t), std::move(x), std::move(p),
               nd ? Provenance::corner : Provenance::degenerate, 0);
  out.nondegenerate = nd;
  out.expected_gate = nd ? "" : "nondegeneracy";
  out.left = e;
  out.right = f;
  return out;
}

Instance group_average_instance(const ComplexMatrix& u, const ComplexMatrix& v,
                                int order) {
  if (order < 1) throw InvalidInput("group_average_instance: order must be >= 1");
  require_root_of_unity(u, order, "u");
  require_root_of_unity(v, order, "v");
  return finish_group_average(Tro(full_space(u.rows(), v.rows())), u, v, order,
                              Provenance::group_average, 0);
}

Instance group_average_instance(Index m, Index n, int order,
                                std::uint64_t seed) {
  if (order < 1 || order > 4) {
    throw InvalidInput("group_average_instance: order must be in {1,2,3,4}");
  }
  if (m < 1 || n < 1) throw InvalidInput("group_average_instance: m, n >= 1");
  Rng rng(seed);
  const auto pool = label_pool(order, std::min(m, n), rng);
  const ComplexMatrix u =
      root_unitary(random_unitary(m, rng), cover(pool, m, rng), order);
  const ComplexMatrix v =
      root_unitary(random_unitary(n, rng), cover(pool, n, rng), order);
  return finish_group_average(Tro(full_space(m, n)), u, v, order,
                              Provenance::group_average, seed);
}

Tro random_tro(Index m, Index n, int generator_count, std::uint64_t seed) {
  if (generator_count < 1) {
    throw InvalidInput("random_tro: generator_count must be >= 1");
  }
  Rng rng(seed);
  std::vector<ComplexMatrix> gens;
  for (int i = 0; i < generator_count; ++i) {
    gens.push_back(random_gaussian(m, n, rng));
  }
  const Tro closed = tro::ternary_closure(mats::orthonormal_basis(m, n, gens));
  return tro::essential_compression(closed).compressed;
}

Instance random_instance(Index max_dim, std::uint64_t seed) {
  if (max_dim < 1) throw InvalidInput("random_instance: max_dim must be >= 1");
  Rng rng(seed);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> three(0, 2);

  struct Block {
    Index p, q, r;
  };
  std::vector<Block> blocks;
  Index m = 0;
  Index n = 0;
  const int wanted = 1 + coin(rng);
  for (int b = 0; b < wanted; ++b) {
    Block blk{1 + coin(rng), 1 + coin(rng), 1 + coin(rng)};
    // Shrink until the block fits.
    while (m + blk.p * blk.r > max_dim || n + blk.q * blk.r > max_dim) {
      if (blk.r > 1) --blk.r;
      else if (blk.p > 1) --blk.p;
      else if (blk.q > 1) --blk.q;
      else break;
    }
    if (m + blk.p * blk.r > max_dim || n + blk.q * blk.r > max_dim) break;
    blocks.push_back(blk);
    m += blk.p * blk.r;
    n += blk.q * blk.r;
  }
  // Occasionally leave a spare dimension outside the essential subspace.
  const int pad = three(rng);
  const Index pad_k = (pad == 1 && m < max_dim) ? 1 : 0;
  const Index pad_h = (pad == 2 && n < max_dim) ? 1 : 0;
  const Index mk = m + pad_k;
  const Index nh = n + pad_h;

  const ComplexMatrix wk = random_unitary(mk, rng);
  const ComplexMatrix wh = random_unitary(nh, rng);
  const int k = 2 + coin(rng);

  std::vector<ComplexMatrix> gens;
  ComplexMatrix u = ComplexMatrix::Identity(mk, mk);
  ComplexMatrix v = ComplexMatrix::Identity(nh, nh);
  Index ok = 0;
  Index oh = 0;
  for (const auto& blk : blocks) {
    for (Index i = 0; i < blk.p; ++i) {
      for (Index j = 0; j < blk.q; ++j) {
        ComplexMatrix z = ComplexMatrix::Zero(mk, nh);
        for (Index s = 0; s < blk.r; ++s) z(ok + i * blk.r + s, oh + j * blk.r + s) = 1.0;
        gens.push_back(wk * z * wh.adjoint());
      }
    }
    const auto pool = label_pool(k, std::min(blk.p, blk.q), rng);
    const ComplexMatrix ub =
        root_unitary(random_unitary(blk.p, rng), cover(pool, blk.p, rng), k);
    const ComplexMatrix vb =
        root_unitary(random_unitary(blk.q, rng), cover(pool, blk.q, rng), k);
    // u_b (x) I_r in the (i * r + s) layout.
    for (Index a = 0; a < blk.p; ++a) {
      for (Index b = 0; b < blk.p; ++b) {
        for (Index s = 0; s < blk.r; ++s) u(ok + a * blk.r + s, ok + b * blk.r + s) = ub(a, b);
      }
    }
    for (Index a = 0; a < blk.q; ++a) {
      for (Index b = 0; b < blk.q; ++b) {
        for (Index s = 0; s < blk.r; ++s) v(oh + a * blk.r + s, oh + b * blk.r + s) = vb(a, b);
      }
    }
    ok += blk.p * blk.r;
    oh += blk.q * blk.r;
  }
  u = wk * u * wk.adjoint();
  v = wh * v * wh.adjoint();
  Tro t(mats::orthonormal_basis(mk, nh, gens));
  return finish_group_average(std::move(t), u, v, k, Provenance::random, seed);
}

Instance degenerate_instance(DegenerateKind kind, std::uint64_t seed) {
  Rng rng(seed);
  const ComplexMatrix w =
      seed == 0 ? ComplexMatrix(ComplexMatrix::Identity(2, 2)) : random_unitary(2, rng);
  Tro t(full_space(2, 2));
  ComplexMatrix e11 = ComplexMatrix::Zero(2, 2);
  e11(0, 0) = 1.0;
  ComplexMatrix e22 = ComplexMatrix::Zero(2, 2);
  e22(1, 1) = 1.0;

  switch (kind) {
    case DegenerateKind::missing_nondegeneracy: {
      const ComplexMatrix q = w * e11 * w.adjoint();
      const std::vector<ComplexMatrix> xs{q};
      Tro x(mats::orthonormal_basis(2, 2, xs));
      TroMap p = TroMap::from_function(
          t.space(), x.space(), [&](const ComplexMatrix& a) { return ComplexMatrix(q * a * q); });
      Instance out(std::move(t), std::move(x), std::move(p),
                   Provenance::degenerate, seed);
      out.kind = kind;
      out.expected_gate = "nondegeneracy";
      out.left = q;
      out.right = q;
      return out;
    }
    case DegenerateKind::noncontractive_P: {
      const ComplexMatrix q1 = w * e11 * w.adjoint();
      const ComplexMatrix q2 = w * e22 * w.adjoint();
      const std::vector<ComplexMatrix> xs{q1, q2};
      Tro x(mats::orthonormal_basis(2, 2, xs));
      TroMap p = TroMap::from_function(
          t.space(), x.space(), [&](const ComplexMatrix& a) {
            return ComplexMatrix(1.5 * (q1 * a * q1 + q2 * a * q2));
          });
      Instance out(std::move(t), std::move(x), std::move(p),
                   Provenance::degenerate, seed);
      out.nondegenerate = true;
      out.kind = kind;
      out.expected_gate = "tro_expectation";
      out.left = w;
      out.right = w;
      return out;
    }
    case DegenerateKind::non_tro_X: {
      const ComplexMatrix g = w * (e11 + 2.0 * e22) * w.adjoint();
      const std::vector<ComplexMatrix> xs{g};
      Tro x = Tro::unvalidated(mats::orthonormal_basis(2, 2, xs));
      const ComplexMatrix unit = g / mats::hs_norm(g);
      TroMap p = TroMap::from_function(
          t.space(), x.space(), [&](const ComplexMatrix& a) {
            return ComplexMatrix(mats::hs_inner(a, unit) * unit);
          });
      Instance out(std::move(t), std::move(x), std::move(p),
                   Provenance::degenerate, seed);
      out.kind = kind;
      out.expected_gate = "X_is_tro";
      out.left = w;
      out.right = w;
      return out;
    }
  }
  throw InvalidInput("degenerate_instance: unknown kind");
}

}  // namespace trolink::gen
