#include "trolink/wstar.hpp"

#include <algorithm>

#include "trolink/expectation.hpp"
#include "trolink/kernels.hpp"

namespace trolink::wstar {
namespace {

using kernels::Op;
namespace par = kernels::parallel;

bool adjoint_closed(const SubspaceBasis& s) {
  return mats::contains(s, s.adjoint());
}

Tro compress_sub(const Tro& x, const tro::Compression& c) {
  std::vector<ComplexMatrix> el;
  for (const auto& e : x.space().elements()) el.push_back(tro::compress(e, c));
  return Tro(mats::orthonormal_basis(c.left_isometry.cols(),
                                     c.right_isometry.cols(), el, x.tol()));
}

}  // namespace

SubspaceBasis double_commutant(const SubspaceBasis& s, bool* symmetrized) {
  if (s.rows() != s.cols()) {
    throw InvalidInput("double_commutant: ambient space must be square");
  }
  const bool closed = adjoint_closed(s);
  if (symmetrized) *symmetrized = !closed;
  const SubspaceBasis base = closed ? s : mats::sum(s, s.adjoint());
  return mats::commutant(mats::commutant(base));
}

Report finite_dim_wstar_check(const Tro& x, const Tro& t, const TroMap* p) {
  const auto& tol = t.tol();
  Report report;
  const auto sub = tro::subtro_nondegeneracy(x, t);
  const bool nondegenerate = sub.nondegenerate;

  if (t.dim() == 0) {
    report.add("(i) nondegenerate <=> nondegenerately represented", false, 1.0,
               "T is zero");
    return report;
  }
  const tro::Compression comp = tro::essential_compression(t);
  const Tro& tc = comp.compressed;
  const Tro xc = compress_sub(x, comp);

  {
    const bool represented = xc.dim() > 0 && tro::nondegenerately_represented(xc);
    const bool sub_nd = tro::is_nondegenerate(xc, tc);
    report.add("(i) nondegenerate <=> nondegenerately represented",
               sub_nd == represented, sub_nd == represented ? 0.0 : 1.0,
               std::string("nondegenerate=") + (sub_nd ? "yes" : "no") +
                   " represented=" + (represented ? "yes" : "no"));
  }

  {
    const Index m = tc.dim_k();
    const Index n = tc.dim_h();
    const auto te = tc.space().elements();
    const auto xe = xc.space().elements();
    const auto blocks = tro::linking_blocks(tc);
    auto span = [&](Index d, const ComplexMatrix& cols) {
      return mats::span_of_columns(d, d, cols, tol);
    };
    const std::string note = nondegenerate ? "" : "X degenerate; not required";
    auto add = [&](const std::string& name, double r) {
      report.add(name, r <= tol.residual, r, note, nondegenerate);
    };
    add("(ii) <TX*>=<TT*>",
        mats::span_distance(
            span(m, par::pair_products(te, Op::plain, xe, Op::adjoint)),
            blocks.left));
    add("(ii) <TT*>=(TT*)''",
        mats::span_distance(double_commutant(blocks.left), blocks.left));
    add("(ii) <X*T>=<T*T>",
        mats::span_distance(
            span(n, par::pair_products(xe, Op::adjoint, te, Op::plain)),
            blocks.right));
    add("(ii) <T*T>=(T*T)''",
        mats::span_distance(double_commutant(blocks.right), blocks.right));
  }

  {
    const auto at = tro::linking_algebra(t);
    const auto bicomm = double_commutant(at.space);
    const double r = mats::span_distance(bicomm, at.space);
    report.add("(iii) A_T''=A_T", r <= tol.residual, r,
               "dim A_T=" + std::to_string(at.space.dim()) +
                   " dim A_T''=" + std::to_string(bicomm.dim()));
  }

  if (p) {
    const std::string name = "(iv) double-commutant corners = E";
    if (!nondegenerate) {
      report.add(name, false, 1.0, "X degenerate; E not defined", false);
      return report;
    }
    try {
      expectation::require_maps_into(*p, x, t);
      // P in compressed coordinates.
      const TroMap pc = TroMap::from_function(
          tc.space(), xc.space(), [&](const ComplexMatrix& s) {
            return tro::compress(
                p->apply(comp.left_isometry * s * comp.right_isometry.adjoint()),
                comp);
          });
      const auto e = expectation::assemble_expectation(pc, xc, tc);
      const auto tb = tro::linking_blocks(tc);
      const auto xb = tro::linking_blocks(xc);
      const TroMap left = expectation::corner_map_on(
          pc, expectation::Side::left, xc, tc, double_commutant(tb.left),
          double_commutant(xb.left));
      const TroMap right = expectation::corner_map_on(
          pc, expectation::Side::right, xc, tc, double_commutant(tb.right),
          double_commutant(xb.right));
      const double r =
          std::max(map_distance(left, e.e11), map_distance(right, e.e22));
      report.add(name, r <= tol.residual, r);
    } catch (const Error& err) {
      report.add(name, false, 1.0, err.what());
    }
  }
  return report;
}

}  // namespace trolink::wstar
