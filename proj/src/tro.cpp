#include "trolink/tro.hpp"

#include <algorithm>

#include "trolink/kernels.hpp"
#include "trolink/ratio_ascent.hpp"

namespace trolink::tro {
namespace {

using kernels::Op;
namespace par = kernels::parallel;

constexpr int kClosureRounds = 64;

SubspaceBasis span(Index rows, Index cols, const ComplexMatrix& stacked,
                   const ToleranceProfile& tol) {
  return mats::span_of_columns(rows, cols, stacked, tol);
}

void require_same_ambient(const Tro& x, const Tro& t) {
  if (x.dim_k() != t.dim_k() || x.dim_h() != t.dim_h()) {
    throw InvalidInput("sub-TRO and TRO have different ambient dimensions");
  }
}

void require_subspace(const Tro& x, const Tro& t) {
  require_same_ambient(x, t);
  const double r = mats::containment_residual(t.space(), x.space());
  if (r > t.tol().residual) {
    throw InvalidInput("X is not a subspace of T (residual " +
                       std::to_string(r) + ")");
  }
}

// Orthonormal basis of the column space of the horizontally stacked blocks.
ComplexMatrix range_isometry(const std::vector<ComplexMatrix>& blocks,
                             Index rows, double rank_cut) {
  Index width = 0;
  for (const auto& b : blocks) width += b.cols();
  ComplexMatrix wide(rows, width);
  Index at = 0;
  for (const auto& b : blocks) {
    wide.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  const mats::Svd svd = mats::svd(wide, Eigen::ComputeThinU);
  const auto& s = svd.values;
  Index r = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    while (r < s.size() && s(r) > rank_cut * s(0)) ++r;
  }
  return svd.u.leftCols(r);
}

}  // namespace

Tro::Tro(SubspaceBasis space) : space_(std::move(space)) {
  const auto check = is_tro(space_);
  if (!check.ok) {
    throw InvalidInput("space is not closed under the ternary product "
                       "(worst residual " +
                       std::to_string(check.worst_residual) + ")");
  }
}

Tro Tro::unvalidated(SubspaceBasis space) {
  return Tro(std::move(space), Unchecked{});
}

ComplexMatrix ternary_product(const ComplexMatrix& a, const ComplexMatrix& b,
                              const ComplexMatrix& c) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != c.rows() ||
      a.cols() != c.cols()) {
    throw InvalidInput("ternary_product: all factors must share dimensions");
  }
  return a * b.adjoint() * c;
}

TroCheck is_tro(const SubspaceBasis& s) {
  if (s.dim() == 0) return {true, 0.0};
  const auto el = s.elements();
  const ComplexMatrix products = par::ternary_products(el, el, el);
  const double worst = par::residuals(s.columns(), products).maxCoeff();
  return {worst <= s.tol().residual, worst};
}

Tro ternary_closure(const SubspaceBasis& s) {
  SubspaceBasis current = s;
  for (int round = 0; round < kClosureRounds; ++round) {
    const auto el = current.elements();
    const ComplexMatrix products = par::ternary_products(el, el, el);
    ComplexMatrix stacked(current.ambient_size(),
                          current.dim() + products.cols());
    stacked << current.columns(), products;
    SubspaceBasis next = span(s.rows(), s.cols(), stacked, s.tol());
    if (next.dim() == current.dim()) {
      const auto check = is_tro(next);
      if (!check.ok) {
        throw InternalError("ternary closure stabilized on a non-TRO space");
      }
      return Tro::unvalidated(std::move(next));
    }
    current = std::move(next);
  }
  throw InternalError("ternary closure did not stabilize");
}

LinkingBlocks linking_blocks(const Tro& t) {
  const auto el = t.space().elements();
  const auto& tol = t.tol();
  LinkingBlocks out{
      span(t.dim_k(), t.dim_k(), par::pair_products(el, Op::plain, el, Op::adjoint),
           tol),
      span(t.dim_h(), t.dim_h(), par::pair_products(el, Op::adjoint, el, Op::plain),
           tol)};
  const auto left = mats::star_algebra_check(out.left);
  const auto right = mats::star_algebra_check(out.right);
  if (!left.ok || !right.ok) {
    throw InternalError("linking block is not a *-algebra");
  }
  return out;
}

ComplexMatrix embed_blocks(Index m, Index n, const ComplexMatrix* upper_left,
                           const ComplexMatrix* upper_right,
                           const ComplexMatrix* lower_left,
                           const ComplexMatrix* lower_right) {
  ComplexMatrix out = ComplexMatrix::Zero(m + n, m + n);
  if (upper_left) out.topLeftCorner(m, m) = *upper_left;
  if (upper_right) out.topRightCorner(m, n) = *upper_right;
  if (lower_left) out.bottomLeftCorner(n, m) = *lower_left;
  if (lower_right) out.bottomRightCorner(n, n) = *lower_right;
  return out;
}

Blocks split_blocks(const ComplexMatrix& a, Index m, Index n) {
  if (a.rows() != m + n || a.cols() != m + n) {
    throw InvalidInput("split_blocks: dimension mismatch");
  }
  return {a.topLeftCorner(m, m), a.topRightCorner(m, n),
          a.bottomLeftCorner(n, m), a.bottomRightCorner(n, n)};
}

LinkingAlgebra linking_algebra(const Tro& t) {
  return linking_algebra(t, linking_blocks(t));
}

LinkingAlgebra linking_algebra(const Tro& t, const LinkingBlocks& blocks) {
  const Index m = t.dim_k();
  const Index n = t.dim_h();
  BlockLayout layout;
  layout.k_size = m;
  layout.h_size = n;
  layout.left_count = blocks.left.dim();
  layout.t_count = t.dim();
  layout.t_adj_count = t.dim();
  layout.right_count = blocks.right.dim();

  const Index total = layout.left_count + 2 * t.dim() + layout.right_count;
  ComplexMatrix cols((m + n) * (m + n), total);
  Index at = 0;
  for (const auto& c : blocks.left.elements()) {
    cols.col(at++) = mats::vectorize(embed_blocks(m, n, &c, nullptr, nullptr, nullptr));
  }
  const auto t_el = t.space().elements();
  for (const auto& x : t_el) {
    cols.col(at++) = mats::vectorize(embed_blocks(m, n, nullptr, &x, nullptr, nullptr));
  }
  for (const auto& x : t_el) {
    const ComplexMatrix xa = x.adjoint();
    cols.col(at++) = mats::vectorize(embed_blocks(m, n, nullptr, nullptr, &xa, nullptr));
  }
  for (const auto& d : blocks.right.elements()) {
    cols.col(at++) = mats::vectorize(embed_blocks(m, n, nullptr, nullptr, nullptr, &d));
  }
  // Corners occupy disjoint entries, so the union of orthonormal corner bases
  // is orthonormal.
  LinkingAlgebra out{m + n,
                     SubspaceBasis::from_orthonormal(m + n, m + n, std::move(cols),
                                                     t.tol()),
                     layout};
  if (!mats::star_algebra_check(out.space).ok) {
    throw InternalError("linking algebra is not a *-algebra");
  }
  return out;
}

Compression essential_compression(const Tro& t) {
  if (t.dim() == 0) throw Degeneracy("essential_compression: zero TRO");
  const auto el = t.space().elements();
  std::vector<ComplexMatrix> adj;
  adj.reserve(el.size());
  for (const auto& x : el) adj.push_back(x.adjoint());
  ComplexMatrix vk = range_isometry(el, t.dim_k(), t.tol().rank_cut);
  ComplexMatrix vh = range_isometry(adj, t.dim_h(), t.tol().rank_cut);

  std::vector<ComplexMatrix> compressed;
  compressed.reserve(el.size());
  for (const auto& x : el) compressed.push_back(vk.adjoint() * x * vh);
  const bool nondegenerate = vk.cols() == t.dim_k() && vh.cols() == t.dim_h();
  auto space = mats::orthonormal_basis(vk.cols(), vh.cols(), compressed, t.tol());
  return {Tro(std::move(space)), std::move(vk), std::move(vh), nondegenerate};
}

ComplexMatrix compress(const ComplexMatrix& a, const Compression& c) {
  return c.left_isometry.adjoint() * a * c.right_isometry;
}

bool nondegenerately_represented(const Tro& t) {
  if (t.dim() == 0) return false;
  const auto el = t.space().elements();
  std::vector<ComplexMatrix> adj;
  for (const auto& x : el) adj.push_back(x.adjoint());
  return range_isometry(el, t.dim_k(), t.tol().rank_cut).cols() == t.dim_k() &&
         range_isometry(adj, t.dim_h(), t.tol().rank_cut).cols() == t.dim_h();
}

SubTroReport subtro_nondegeneracy(const Tro& x, const Tro& t) {
  require_subspace(x, t);
  const auto& tol = t.tol();
  const Index m = t.dim_k();
  const Index n = t.dim_h();
  const auto xe = x.space().elements();
  const auto te = t.space().elements();

  auto against_t = [&](const std::string& name, const ComplexMatrix& products) {
    const double r = mats::span_distance(span(m, n, products, tol), t.space());
    return NamedCheck{name, r <= tol.residual, r};
  };

  SubTroReport report;
  report.checks.push_back(
      against_t("<XT*T>=T", par::ternary_products(xe, te, te)));
  report.checks.push_back(
      against_t("<TT*X>=T", par::ternary_products(te, te, xe)));
  report.checks.push_back(
      against_t("<XX*T>=T", par::ternary_products(xe, xe, te)));
  report.checks.push_back(
      against_t("<TX*X>=T", par::ternary_products(te, xe, xe)));

  const double left = mats::span_distance(
      span(m, m, par::pair_products(xe, Op::plain, te, Op::adjoint), tol),
      span(m, m, par::pair_products(te, Op::plain, te, Op::adjoint), tol));
  const double right = mats::span_distance(
      span(n, n, par::pair_products(te, Op::adjoint, xe, Op::plain), tol),
      span(n, n, par::pair_products(te, Op::adjoint, te, Op::plain), tol));
  const double r = std::max(left, right);
  report.checks.push_back({"<XT*>=<TT*>,<T*X>=<T*T>", r <= tol.residual, r});

  report.nondegenerate = report.checks[0].pass && report.checks[1].pass;
  return report;
}

bool is_nondegenerate(const Tro& x, const Tro& t) {
  require_subspace(x, t);
  const auto& tol = t.tol();
  const auto xe = x.space().elements();
  const auto te = t.space().elements();
  const Index m = t.dim_k();
  const Index n = t.dim_h();
  return mats::span_equal(span(m, n, par::ternary_products(xe, te, te), tol),
                          t.space()) &&
         mats::span_equal(span(m, n, par::ternary_products(te, te, xe), tol),
                          t.space());
}

bool linking_subalgebra_nondegenerate(const Tro& x, const Tro& t) {
  require_subspace(x, t);
  const auto at = linking_algebra(t);
  const auto ax = linking_algebra(x);
  const auto ae = at.space.elements();
  const auto xe = ax.space.elements();
  const Index d = at.dim;
  const auto& tol = t.tol();
  return mats::span_equal(
             span(d, d, par::pair_products(xe, Op::plain, ae, Op::plain), tol),
             at.space) &&
         mats::span_equal(
             span(d, d, par::pair_products(ae, Op::plain, xe, Op::plain), tol),
             at.space);
}

ModuleNormResult module_norm_check(const ComplexMatrix& c, const Tro& t,
                                   int restarts, std::uint64_t seed) {
  if (c.rows() != t.dim_k() || c.cols() != t.dim_k()) {
    throw InvalidInput("module_norm_check: c must be dim_k x dim_k");
  }
  mats::require_finite(c, "module_norm_check");
  const auto blocks = linking_blocks(t);
  const auto member = mats::membership(blocks.left, c);
  if (!member.is_member) {
    throw NotInSpan("module_norm_check: c is not in <TT*>", member.residual);
  }
  ModuleNormResult out;
  out.witness = ComplexMatrix::Zero(t.dim_k(), t.dim_h());
  if (t.dim() == 0 || mats::hs_norm(c) == 0.0) return out;

  // The supremum is unchanged by restricting to the essential subspaces,
  // and the search there runs over a nondegenerately represented TRO.
  const Compression comp = essential_compression(t);
  const ComplexMatrix cc =
      comp.left_isometry.adjoint() * c * comp.left_isometry;
  const Tro& tc = comp.compressed;
  const Index k0 = tc.dim_k();
  const Index h0 = tc.dim_h();

  ComplexMatrix images(k0 * h0, tc.dim());
  for (Index j = 0; j < tc.dim(); ++j) {
    images.col(j) = mats::vectorize(cc * tc.space().element(j));
  }
  AmplifiedMap map(tc.space().columns(), k0, h0, images, k0, h0, 1);

  // Any t in T whose range lies in the top eigenspace of c^* c attains the
  // supremum; the top HS eigenvector of t -> c^* c t on T is such an element.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(images.adjoint() * images);
  const std::vector<ComplexVector> seeds{
      eig.eigenvectors().col(eig.eigenvectors().cols() - 1)};

  Rng rng(seed);
  AscentOptions opts;
  opts.restarts = std::max(0, restarts);
  const AscentResult best = maximize_ratio(map, seeds, opts, rng);

  out.operator_norm = mats::operator_norm(c);
  out.module_sup_lower_bound = best.ratio;
  out.gap = out.operator_norm - out.module_sup_lower_bound;
  const ComplexMatrix w = map.input(best.witness);
  const double wn = mats::operator_norm(w);
  if (wn > 0.0) {
    out.witness =
        comp.left_isometry * (w / wn) * comp.right_isometry.adjoint();
  }
  return out;
}

}  // namespace trolink::tro
