#include "trolink/expectation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "trolink/kernels.hpp"
#include "trolink/ratio_ascent.hpp"

namespace trolink::expectation {
namespace {

using kernels::Op;
namespace par = kernels::parallel;

double max_column_gap(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() == 0) return 0.0;
  return (a - b).colwise().norm().maxCoeff();
}

std::string format_bound(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "bound %.12f", v);
  return buf;
}

// P applied to the basis of T, as matrices.
std::vector<ComplexMatrix> images_on(const TroMap& p, const Tro& t) {
  std::vector<ComplexMatrix> out;
  out.reserve(t.dim());
  for (const auto& e : t.space().elements()) out.push_back(p.apply(e));
  return out;
}

std::vector<ComplexMatrix> unstack(const ComplexMatrix& cols, Index rows,
                                   Index c) {
  std::vector<ComplexMatrix> out;
  out.reserve(cols.cols());
  for (Index j = 0; j < cols.cols(); ++j) {
    out.push_back(mats::unvectorize(cols.col(j), rows, c));
  }
  return out;
}

// Generator list and formula values for one corner:
// left  {t_i x_j^*} -> {P(t_i) x_j^*},
// right {x_i^* t_j} -> {x_i^* P(t_j)}.
struct CornerSystem {
  ComplexMatrix generators;
  ComplexMatrix values;
  Index size = 0;
};

CornerSystem corner_system(const TroMap& p, Side side, const Tro& x,
                           const Tro& t) {
  const auto te = t.space().elements();
  const auto pe = images_on(p, t);
  const auto xe = x.space().elements();
  if (side == Side::left) {
    return {par::pair_products(te, Op::plain, xe, Op::adjoint),
            par::pair_products(pe, Op::plain, xe, Op::adjoint), t.dim_k()};
  }
  return {par::pair_products(xe, Op::adjoint, te, Op::plain),
          par::pair_products(xe, Op::adjoint, pe, Op::plain), t.dim_h()};
}

// Index of entry (i, j) of an r x c block at (r0, c0) inside vec(M_d).
Index embedded_index(Index i, Index j, Index r0, Index c0, Index d) {
  return (r0 + i) + (c0 + j) * d;
}

void place_block(ComplexMatrix& big, const ComplexMatrix& small, Index rows,
                 Index cols, Index r0, Index c0, Index d) {
  // small acts on vec(rows x cols) at (r0, c0) and lands in the same block.
  const Index n = rows * cols;
  std::vector<Index> map(n);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      map[i + j * rows] = embedded_index(i, j, r0, c0, d);
    }
  }
  for (Index b = 0; b < n; ++b) {
    for (Index a = 0; a < n; ++a) big(map[a], map[b]) = small(a, b);
  }
}

}  // namespace

std::vector<double> cb_probe(const TroMap& m, int level, int samples,
                             std::uint64_t seed, int max_iterations) {
  if (level < 1) throw InvalidInput("cb_probe: level must be >= 1");
  const auto& s = m.source();
  const auto& tg = m.target();
  std::vector<double> bounds;
  if (s.dim() == 0) return std::vector<double>(level, 0.0);

  Rng rng(seed);
  AscentOptions opts;
  opts.restarts = std::max(0, samples);
  opts.max_iterations = std::max(1, max_iterations);
  const ComplexMatrix images = m.images();

  ComplexVector previous;
  double previous_bound = 0.0;
  for (int l = 1; l <= level; ++l) {
    AmplifiedMap map(s.columns(), s.rows(), s.cols(), images, tg.rows(),
                     tg.cols(), l);
    std::vector<ComplexVector> seeds;
    if (l == 1) {
      // Best single basis element as a deterministic seed.
      double best = -1.0;
      ComplexVector pick;
      for (Index j = 0; j < s.dim(); ++j) {
        ComplexVector e = ComplexVector::Zero(s.dim());
        e(j) = 1.0;
        const double r = map.ratio(e);
        if (r > best) {
          best = r;
          pick = std::move(e);
        }
      }
      seeds.push_back(std::move(pick));
    } else {
      seeds.push_back(map.embed_lower(previous));
    }
    AscentResult r = maximize_ratio(map, seeds, opts, rng);
    if (l > 1 && r.ratio < previous_bound) {
      r.witness = map.embed_lower(previous);
      r.ratio = previous_bound;
    }
    previous = std::move(r.witness);
    previous_bound = r.ratio;
    bounds.push_back(r.ratio);
  }
  return bounds;
}

void require_maps_into(const TroMap& p, const Tro& x, const Tro& t) {
  if (p.source().rows() != t.dim_k() || p.source().cols() != t.dim_h() ||
      p.target().rows() != x.dim_k() || p.target().cols() != x.dim_h()) {
    throw InvalidInput("P: ambient dimensions do not match T and X");
  }
  if (!mats::span_equal(p.source(), t.space())) {
    throw InvalidInput("P: source is not T");
  }
  if (p.source().dim() == 0) return;
  const Eigen::VectorXd r = par::residuals(x.space().columns(), p.images());
  const double worst = r.maxCoeff();
  if (worst > t.tol().residual) {
    throw InvalidInput("P: image escapes X (residual " +
                       std::to_string(worst) + ")");
  }
}

Report check_tro_expectation(const TroMap& p, const Tro& x, const Tro& t,
                             int amplification_level, std::uint64_t seed,
                             ProbeOptions probe) {
  require_maps_into(p, x, t);
  const auto& tol = t.tol();
  Report report;

  const ComplexMatrix op = p.vec_operator();
  const ComplexMatrix images = p.images();
  {
    const double r = max_column_gap(op * images, images);
    report.add("idempotent", r <= tol.residual, r);
  }

  {
    Index rank = 0;
    if (images.cols() > 0) {
      const Eigen::VectorXd sv = mats::svd(images, 0).values;
      if (sv.size() > 0 && sv(0) > 0.0) {
        while (rank < sv.size() && sv(rank) > tol.rank_cut * sv(0)) ++rank;
      }
    }
    report.add("surjective", rank == x.dim(),
               static_cast<double>(std::abs(x.dim() - rank)),
               "rank " + std::to_string(rank) + " of dim X " +
                   std::to_string(x.dim()));
  }

  const auto bounds =
      cb_probe(p, amplification_level, probe.samples, seed, probe.max_iterations);
  for (std::size_t l = 0; l < bounds.size(); ++l) {
    const double over = std::max(0.0, bounds[l] - 1.0);
    report.add("contractive[L=" + std::to_string(l + 1) + "]",
               over <= tol.residual, over, format_bound(bounds[l]));
  }

  const auto te = t.space().elements();
  const auto pe = images_on(p, t);
  const auto xe = x.space().elements();
  {
    const double r = max_column_gap(op * par::ternary_products(te, xe, xe),
                                    par::ternary_products(pe, xe, xe));
    report.add("module: P(a x* y) = P(a) x* y", r <= tol.residual, r);
  }
  {
    const double r = max_column_gap(op * par::ternary_products(xe, te, xe),
                                    par::ternary_products(xe, pe, xe));
    report.add("module: P(x a* y) = x P(a)* y", r <= tol.residual, r);
  }
  {
    const double r = max_column_gap(op * par::ternary_products(xe, xe, te),
                                    par::ternary_products(xe, xe, pe));
    report.add("module: P(x y* a) = x y* P(a)", r <= tol.residual, r);
  }

  // P^dagger P evaluated by the right corner formula over {x_i^* t_j}.
  if (x.dim() > 0 && t.dim() > 0) {
    const CornerSystem sys = corner_system(p, Side::right, x, t);
    const mats::Decomposer dec(sys.size, sys.size, sys.generators, tol);
    const ComplexMatrix lhs = par::pair_products(pe, Op::adjoint, pe, Op::plain);
    const ComplexMatrix a = par::pair_products(pe, Op::adjoint, te, Op::plain);
    const ComplexMatrix b = par::pair_products(te, Op::adjoint, pe, Op::plain);
    Eigen::VectorXd ra, rb;
    const ComplexMatrix ca = dec.solve_columns(a, ra);
    const ComplexMatrix cb = dec.solve_columns(b, rb);
    const double ga = max_column_gap(lhs, sys.values * ca);
    const double sa = ra.size() ? ra.maxCoeff() : 0.0;
    const double r1 = std::max(ga, sa);
    report.add("PdagP: P(t)*P(u) = PdagP(P(t)*u)", r1 <= tol.residual, r1);

    const double sb = rb.size() ? rb.maxCoeff() : 0.0;
    const double gb = max_column_gap(lhs, sys.values * cb);
    if (sb <= tol.residual) {
      report.add("PdagP: P(t)*P(u) = PdagP(t*P(u))", gb <= tol.residual, gb);
    } else {
      report.add("PdagP: P(t)*P(u) = PdagP(t*P(u))", false, sb,
                 "t*P(u) outside span(X*T); formula undefined", false);
    }
  } else {
    report.add("PdagP: P(t)*P(u) = PdagP(P(t)*u)", true, 0.0);
    report.add("PdagP: P(t)*P(u) = PdagP(t*P(u))", true, 0.0);
  }
  return report;
}

TroMap corner_map_on(const TroMap& p, Side side, const Tro& x, const Tro& t,
                     const SubspaceBasis& domain, const SubspaceBasis& target) {
  require_maps_into(p, x, t);
  const auto& tol = t.tol();
  const CornerSystem sys = corner_system(p, side, x, t);
  if (domain.rows() != sys.size || domain.cols() != sys.size ||
      target.rows() != sys.size || target.cols() != sys.size) {
    throw InvalidInput("corner map: domain or target has the wrong size");
  }
  if (domain.dim() == 0) {
    return TroMap(domain, target, ComplexMatrix(target.dim(), 0));
  }
  const mats::Decomposer dec(sys.size, sys.size, sys.generators, tol);
  Eigen::VectorXd residuals;
  const ComplexMatrix coeffs = dec.solve_columns(domain.columns(), residuals);
  const double worst = residuals.size() ? residuals.maxCoeff() : 0.0;
  if (worst > tol.residual) {
    throw Degeneracy(std::string("corner map: domain is not spanned by ") +
                     (side == Side::left ? "T X^*" : "X^* T") +
                     " (residual " + std::to_string(worst) + ")");
  }
  const ComplexMatrix values = sys.values * coeffs;
  if (target.dim() == 0) {
    if (values.norm() > tol.residual) {
      throw InternalError("corner map: nonzero image in a zero target");
    }
    return TroMap(domain, target, ComplexMatrix(0, domain.dim()));
  }
  const Eigen::VectorXd escape = par::residuals(target.columns(), values);
  if (escape.maxCoeff() > tol.residual) {
    throw InternalError("corner map: image escapes the target corner");
  }
  return TroMap(domain, target, target.columns().adjoint() * values);
}

TroMap corner_map(const TroMap& p, Side side, const Tro& x, const Tro& t) {
  require_maps_into(p, x, t);
  if (!tro::is_nondegenerate(x, t)) {
    throw Degeneracy("corner map: X is not a nondegenerate sub-TRO of T");
  }
  const auto tb = tro::linking_blocks(t);
  const auto xb = tro::linking_blocks(x);
  const auto& domain = side == Side::left ? tb.left : tb.right;
  const auto& target = side == Side::left ? xb.left : xb.right;
  TroMap m = corner_map_on(p, side, x, t, domain, target);

  const auto& tol = t.tol();
  const ComplexMatrix on_target = m.vec_operator() * target.columns();
  const double fix = max_column_gap(on_target, target.columns());
  if (fix > tol.residual) {
    throw PreconditionViolation("corner map is not the identity on its range "
                                "(residual " + std::to_string(fix) + ")");
  }
  const double bound = cb_probe(m, 1, 2, 0x5eed, 60)[0];
  if (bound > 1.0 + tol.residual) {
    throw PreconditionViolation("corner map is not contractive (" +
                                format_bound(bound) + ")");
  }
  return m;
}

double welldefined_check(const TroMap& p, const Tro& x, const Tro& t,
                         int trials, std::uint64_t seed) {
  require_maps_into(p, x, t);
  if (!tro::is_nondegenerate(x, t)) {
    throw Degeneracy("welldefined_check: X is not a nondegenerate sub-TRO");
  }
  const auto& tol = t.tol();
  const auto tb = tro::linking_blocks(t);
  Rng rng(seed);
  double worst = 0.0;
  for (Side side : {Side::left, Side::right}) {
    const CornerSystem sys = corner_system(p, side, x, t);
    const mats::Decomposer dec(sys.size, sys.size, sys.generators, tol);
    const auto& domain = side == Side::left ? tb.left : tb.right;
    if (domain.dim() == 0) continue;
    const ComplexMatrix& kernel = dec.kernel();
    for (int k = 0; k < trials; ++k) {
      const ComplexVector coords = random_gaussian(domain.dim(), 1, rng).col(0);
      const ComplexMatrix c = domain.combine(coords);
      const ComplexVector a1 = dec.solve(c);
      // A second, generally non-minimal, decomposition of the same element.
      ComplexVector a2 = a1;
      if (kernel.cols() > 0) {
        ComplexVector shift =
            kernel * random_gaussian(kernel.cols(), 1, rng).col(0);
        const double scale = std::max(1.0, a1.norm());
        a2 += shift * (scale / shift.norm());
      }
      const double recon =
          (sys.generators * a2 - mats::vectorize(c)).norm();
      if (recon > tol.residual * std::max(1.0, mats::hs_norm(c))) {
        throw InternalError("welldefined_check: perturbed decomposition "
                            "does not reproduce c");
      }
      worst = std::max(worst, (sys.values * (a1 - a2)).norm());
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

ComplexMatrix BlockExpectation::apply(const ComplexMatrix& a) const {
  const tro::Blocks b = tro::split_blocks(a, dim_k, dim_h);
  const ComplexMatrix ul = e11.apply(b.upper_left);
  const ComplexMatrix ur = e12.apply(b.upper_right);
  const ComplexMatrix ll = e21.apply(b.lower_left);
  const ComplexMatrix lr = e22.apply(b.lower_right);
  return tro::embed_blocks(dim_k, dim_h, &ul, &ur, &ll, &lr);
}

ComplexMatrix BlockExpectation::vec_operator() const {
  const Index d = dim_k + dim_h;
  ComplexMatrix big = ComplexMatrix::Zero(d * d, d * d);
  place_block(big, e11.vec_operator(), dim_k, dim_k, 0, 0, d);
  place_block(big, e12.vec_operator(), dim_k, dim_h, 0, dim_k, d);
  place_block(big, e21.vec_operator(), dim_h, dim_k, dim_k, 0, d);
  place_block(big, e22.vec_operator(), dim_h, dim_h, dim_k, dim_k, d);
  return big;
}

TroMap BlockExpectation::as_map(const tro::LinkingAlgebra& source,
                                const tro::LinkingAlgebra& target) const {
  const ComplexMatrix images = vec_operator() * source.space.columns();
  return TroMap(source.space, target.space,
                target.space.columns().adjoint() * images);
}

double block_consistency_residual(const BlockExpectation& e, const Tro& x,
                                  const Tro& t) {
  const auto at = tro::linking_algebra(t);
  const auto ax = tro::linking_algebra(x);
  if (at.space.dim() == 0) return 0.0;
  const ComplexMatrix images = e.vec_operator() * at.space.columns();
  if (ax.space.dim() == 0) return images.colwise().norm().maxCoeff();
  return par::residuals(ax.space.columns(), images).maxCoeff();
}

BlockExpectation assemble_expectation(const TroMap& p, const Tro& x,
                                      const Tro& t) {
  require_maps_into(p, x, t);
  BlockExpectation e{
      t.dim_k(),
      t.dim_h(),
      corner_map(p, Side::left, x, t),
      TroMap(t.space(), x.space(),
             x.space().columns().adjoint() * p.vec_operator() *
                 t.space().columns()),
      TroMap::identity(x.space().adjoint()),
      corner_map(p, Side::right, x, t)};
  e.e21 = dagger(e.e12);
  const double r = block_consistency_residual(e, x, t);
  if (r > t.tol().residual) {
    throw InternalError("assembled expectation leaves A_X (residual " +
                        std::to_string(r) + ")");
  }
  return e;
}

Report verify_expectation(const BlockExpectation& e, const Tro& x,
                          const Tro& t, int samples, int amplification_level,
                          std::uint64_t seed, ProbeOptions probe) {
  const auto& tol = t.tol();
  const auto at = tro::linking_algebra(t);
  const auto ax = tro::linking_algebra(x);
  const Index d = at.dim;
  const ComplexMatrix op = e.vec_operator();
  const ComplexMatrix& basis = at.space.columns();
  const ComplexMatrix images = op * basis;
  Report report;

  auto add = [&](const std::string& name, double r, std::string details = {}) {
    report.add(name, r <= tol.residual, r, std::move(details));
  };

  add("block-consistent",
      ax.space.dim() ? par::residuals(ax.space.columns(), images).maxCoeff()
                     : (images.cols() ? images.colwise().norm().maxCoeff() : 0.0));
  add("idempotent", max_column_gap(op * images, images));
  add("identity on A_X",
      max_column_gap(op * ax.space.columns(), ax.space.columns()));

  const auto ae = at.space.elements();
  const auto xe = ax.space.elements();
  const auto ee = unstack(images, d, d);
  {
    // E(a^*) = E(a)^*.
    double r = 0.0;
    for (std::size_t i = 0; i < ae.size(); ++i) {
      const ComplexMatrix lhs = mats::unvectorize(
          op * mats::vectorize(ae[i].adjoint()), d, d);
      r = std::max(r, mats::hs_norm(lhs - ee[i].adjoint()));
    }
    add("adjoint-preserving", r);
  }
  add("bimodule: E(b a) = b E(a)",
      max_column_gap(op * par::pair_products(xe, Op::plain, ae, Op::plain),
                     par::pair_products(xe, Op::plain, ee, Op::plain)));
  add("bimodule: E(a b) = E(a) b",
      max_column_gap(op * par::pair_products(ae, Op::plain, xe, Op::plain),
                     par::pair_products(ee, Op::plain, xe, Op::plain)));

  Rng rng(seed);
  {
    double r = 0.0;
    for (int s = 0; s < samples && ax.space.dim() > 0; ++s) {
      const ComplexMatrix b = ax.space.combine(
          random_gaussian(ax.space.dim(), 1, rng).col(0));
      const ComplexMatrix a = at.space.combine(
          random_gaussian(at.space.dim(), 1, rng).col(0));
      const ComplexMatrix c = ax.space.combine(
          random_gaussian(ax.space.dim(), 1, rng).col(0));
      const double scale =
          std::max(1.0, mats::hs_norm(b) * mats::hs_norm(a) * mats::hs_norm(c));
      r = std::max(r, mats::hs_norm(e.apply(b * a * c) - b * e.apply(a) * c) /
                          scale);
    }
    add("bimodule: E(b a b') = b E(a) b' (sampled)", r);
  }
  {
    double herm = 0.0;
    double neg = 0.0;
    for (int s = 0; s < samples; ++s) {
      const ComplexMatrix g = at.space.combine(
          random_gaussian(at.space.dim(), 1, rng).col(0));
      const ComplexMatrix h = g.adjoint() * g;
      const ComplexMatrix img = e.apply(h);
      const double scale = std::max(1.0, mats::hs_norm(h));
      herm = std::max(herm, mats::hs_norm(img - img.adjoint()) / scale);
      const ComplexMatrix sym = 0.5 * (img + img.adjoint());
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sym,
                                                       Eigen::EigenvaluesOnly);
      neg = std::max(neg, -eig.eigenvalues().minCoeff() / scale);
    }
    add("positive: E(g*g) hermitian", herm);
    add("positive: E(g*g) >= 0", std::max(0.0, neg));
  }

  const auto bounds = cb_probe(e.as_map(at, ax), amplification_level,
                               probe.samples, seed ^ 0x9e3779b97f4a7c15ull,
                               probe.max_iterations);
  for (std::size_t l = 0; l < bounds.size(); ++l) {
    add("contractive[L=" + std::to_string(l + 1) + "]",
        std::max(0.0, bounds[l] - 1.0), format_bound(bounds[l]));
  }
  return report;
}

UniquenessResult uniqueness_check(const BlockExpectation& e_prime,
                                  const TroMap& p, const Tro& x, const Tro& t,
                                  std::uint64_t seed) {
  require_maps_into(p, x, t);
  const auto& tol = t.tol();
  const ComplexMatrix& tc = t.space().columns();
  const double e12_gap = max_column_gap(e_prime.e12.vec_operator() * tc,
                                        p.vec_operator() * tc);
  if (e12_gap > tol.residual) {
    throw PreconditionViolation("uniqueness: e12 differs from P (residual " +
                                std::to_string(e12_gap) + ")");
  }
  const Report r = verify_expectation(e_prime, x, t, 8, 1, seed);
  if (const auto* f = r.first_failure()) {
    throw PreconditionViolation(
        "uniqueness: candidate is not a conditional expectation (" + f->name +
        ", residual " + std::to_string(f->residual) + ")");
  }

  UniquenessResult out;
  const auto te = t.space().elements();
  const auto pe = images_on(p, t);
  const auto xe = x.space().elements();
  out.forcing_residual = max_column_gap(
      e_prime.e11.vec_operator() *
          par::pair_products(te, Op::plain, xe, Op::adjoint),
      par::pair_products(pe, Op::plain, xe, Op::adjoint));
  out.block_deviation = block_distance(e_prime, assemble_expectation(p, x, t));
  out.equal = out.forcing_residual <= tol.residual &&
              out.block_deviation <= tol.residual;
  return out;
}

TroMap extract_from_expectation(const BlockExpectation& e, const Tro& x,
                                const Tro& t) {
  const auto& tol = t.tol();
  if (!mats::span_equal(e.e12.source(), t.space())) {
    throw InvalidInput("extract: e12 is not defined on T");
  }
  const ComplexMatrix images = e.e12.vec_operator() * t.space().columns();
  if (t.dim() > 0) {
    const double escape =
        par::residuals(t.space().columns(), images).maxCoeff();
    if (escape > tol.residual) {
      throw InvalidInput("extract: e12 maps T outside T (residual " +
                         std::to_string(escape) + ")");
    }
  }
  TroMap p(t.space(), x.space(), x.space().columns().adjoint() * images);
  require_maps_into(p, x, t);
  const double dev = block_distance(e, assemble_expectation(p, x, t));
  if (dev > tol.residual) {
    throw PreconditionViolation(
        "extract: E is not the expectation determined by its T block "
        "(residual " + std::to_string(dev) + ")");
  }
  return p;
}

double block_distance(const BlockExpectation& a, const BlockExpectation& b) {
  return std::max({map_distance(a.e11, b.e11), map_distance(a.e12, b.e12),
                   map_distance(a.e21, b.e21), map_distance(a.e22, b.e22)});
}

}  // namespace trolink::expectation
