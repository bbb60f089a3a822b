#include "trolink/ratio_ascent.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace trolink {
namespace {

struct TopSingular {
  double value = 0.0;
  ComplexVector u;
  ComplexVector v;
};

// Singular data from a Hermitian eigensolve of the smaller Gram matrix, which
// is several times cheaper than an SVD at the sizes probed here. The largest
// singular value keeps full relative accuracy.
struct Gram {
  bool columns;  // true: G = m^* m (eigenvectors are right vectors)
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig;

  Gram(const ComplexMatrix& m, bool vectors)
      : columns(m.cols() <= m.rows()),
        eig(columns ? ComplexMatrix(m.adjoint() * m) : ComplexMatrix(m * m.adjoint()),
            vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly) {}

  double top() const {
    const auto& l = eig.eigenvalues();
    return l.size() ? std::sqrt(std::max(0.0, l(l.size() - 1))) : 0.0;
  }
};

double top_value(const ComplexMatrix& m) { return Gram(m, false).top(); }

TopSingular top_singular(const ComplexMatrix& m) {
  const Gram g(m, true);
  TopSingular out;
  out.value = g.top();
  const Index last = g.eig.eigenvalues().size() - 1;
  if (out.value <= 0.0) {
    out.u = ComplexVector::Zero(m.rows());
    out.v = ComplexVector::Zero(m.cols());
    return out;
  }
  if (g.columns) {
    out.v = g.eig.eigenvectors().col(last);
    out.u = m * out.v / out.value;
  } else {
    out.u = g.eig.eigenvectors().col(last);
    out.v = m.adjoint() * out.u / out.value;
  }
  return out;
}

}  // namespace

ComplexMatrix random_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(2.0);
  ComplexMatrix out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(i, j) = Complex(re * scale, im * scale);
    }
  }
  return out;
}

ComplexMatrix random_unitary(Index d, Rng& rng) {
  const ComplexMatrix g = random_gaussian(d, d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix& r = qr.matrixQR();
  for (Index i = 0; i < d; ++i) {
    const Complex rii = r(i, i);
    const double mag = std::abs(rii);
    q.col(i) *= mag > 0.0 ? rii / mag : Complex(1.0);
  }
  return q;
}

// ---------------------------------------------------------------------------

AmplifiedMap::AmplifiedMap(ComplexMatrix source, Index in_rows, Index in_cols,
                           ComplexMatrix images, Index out_rows,
                           Index out_cols, Index level)
    : source_(std::move(source)),
      in_rows_(in_rows),
      in_cols_(in_cols),
      images_(std::move(images)),
      out_rows_(out_rows),
      out_cols_(out_cols),
      level_(level) {
  if (level_ < 1) throw InvalidInput("amplification level must be >= 1");
  if (source_.rows() != in_rows_ * in_cols_ ||
      images_.rows() != out_rows_ * out_cols_ ||
      source_.cols() != images_.cols()) {
    throw InvalidInput("AmplifiedMap: inconsistent shapes");
  }
}

ComplexMatrix AmplifiedMap::assemble(const ComplexMatrix& basis, Index rows,
                                     Index cols, const ComplexVector& z) const {
  const Index p = basis.cols();
  ComplexMatrix out(level_ * rows, level_ * cols);
  for (Index k = 0; k < level_; ++k) {
    for (Index l = 0; l < level_; ++l) {
      const ComplexVector block = basis * z.segment((k * level_ + l) * p, p);
      out.block(k * rows, l * cols, rows, cols) =
          Eigen::Map<const ComplexMatrix>(block.data(), rows, cols);
    }
  }
  return out;
}

ComplexMatrix AmplifiedMap::input(const ComplexVector& z) const {
  return assemble(source_, in_rows_, in_cols_, z);
}

ComplexMatrix AmplifiedMap::output(const ComplexVector& z) const {
  return assemble(images_, out_rows_, out_cols_, z);
}

namespace {

// Schatten norm of order p from squared singular values in ascending order
// (Gram eigenvalues), scaled by the largest so large orders do not overflow.
double schatten_norm(const Eigen::VectorXd& squared, double p) {
  const Index n = squared.size();
  if (n == 0 || squared(n - 1) <= 0.0) return 0.0;
  const double top = squared(n - 1);
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) acc += std::pow(std::max(0.0, squared(i)) / top, p / 2.0);
  return std::sqrt(top) * std::pow(acc, 1.0 / p);
}

}  // namespace

double AmplifiedMap::ratio(const ComplexVector& z, double schatten) const {
  const ComplexMatrix in = input(z);
  const double den = schatten == kOperatorNorm
                         ? top_value(in)
                         : schatten_norm(Gram(in, false).eig.eigenvalues(), schatten);
  if (den <= 0.0) return 0.0;
  return top_value(output(z)) / den;
}

// d/dz of Re <sum_j z_j B_j, g> along w is Re sum_j w_j <B_j, g>, so the
// real-gradient direction is conj(<B_j, g>) = conj(sum_ab conj(g_ab) B_j,ab).
ComplexVector AmplifiedMap::pair(const ComplexMatrix& basis, Index rows,
                                 Index cols, const ComplexMatrix& g) const {
  const Index p = basis.cols();
  ComplexVector out(parameters());
  for (Index k = 0; k < level_; ++k) {
    for (Index l = 0; l < level_; ++l) {
      const ComplexMatrix w = g.block(k * rows, l * cols, rows, cols).conjugate();
      const ComplexVector wv = Eigen::Map<const ComplexVector>(w.data(), w.size());
      out.segment((k * level_ + l) * p, p) = basis.transpose() * wv;
    }
  }
  return out.conjugate();
}

ComplexVector AmplifiedMap::ascent_direction(const ComplexVector& z,
                                             double& value,
                                             double schatten) const {
  const TopSingular out = top_singular(output(z));
  const ComplexMatrix in = input(z);
  // Gradient of the denominator: u_1 v_1^* for the operator norm. For the
  // Schatten norm of order p it is |m|_p^(1-p) m (m^* m)^((p-2)/2), written
  // with ratios to the top squared singular value.
  double den = 0.0;
  ComplexMatrix g_den;
  if (schatten == kOperatorNorm) {
    const TopSingular t = top_singular(in);
    den = t.value;
    g_den = t.u * t.v.adjoint();
  } else {
    const Gram g(in, true);
    const Eigen::VectorXd& l = g.eig.eigenvalues();
    den = schatten_norm(l, schatten);
    if (den > 0.0) {
      const double top = l(l.size() - 1);
      const double s1 = std::sqrt(top);
      Eigen::VectorXd w(l.size());
      for (Index i = 0; i < l.size(); ++i) {
        w(i) = std::pow(std::max(0.0, l(i)) / top, (schatten - 2.0) / 2.0);
      }
      const ComplexMatrix& vecs = g.eig.eigenvectors();
      const ComplexMatrix power = vecs * w.cast<Complex>().asDiagonal() * vecs.adjoint();
      g_den = (g.columns ? ComplexMatrix(in * power) : ComplexMatrix(power * in)) *
              (std::pow(s1 / den, schatten - 1.0) / s1);
    }
  }
  if (den <= 0.0) {
    value = 0.0;
    return ComplexVector::Zero(parameters());
  }
  value = out.value / den;
  const ComplexVector g_out =
      pair(images_, out_rows_, out_cols_, out.u * out.v.adjoint());
  const ComplexVector g_in = pair(source_, in_rows_, in_cols_, g_den);
  return g_out / den - (out.value / (den * den)) * g_in;
}

ComplexVector AmplifiedMap::embed_lower(const ComplexVector& lower) const {
  const Index p = source_.cols();
  const Index prev = level_ - 1;
  if (prev < 1 || lower.size() != prev * prev * p) {
    throw InvalidInput("embed_lower: witness has the wrong size");
  }
  ComplexVector out = ComplexVector::Zero(parameters());
  for (Index k = 0; k < prev; ++k) {
    for (Index l = 0; l < prev; ++l) {
      out.segment((k * level_ + l) * p, p) =
          lower.segment((k * prev + l) * p, p);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Backtracking ascent on ratio(., schatten) from a unit vector z.
ComplexVector ascend_stage(const AmplifiedMap& map, ComplexVector z,
                           double schatten, const AscentOptions& options) {
  double value = 0.0;
  double step = 0.25;
  for (int it = 0; it < options.max_iterations; ++it) {
    ComplexVector dir = map.ascent_direction(z, value, schatten);
    const double gnorm = dir.norm();
    if (gnorm == 0.0) break;
    dir /= gnorm;
    // The ratio is scale invariant, so the iterate is renormalized after
    // every accepted move.
    bool moved = false;
    double best = value;
    ComplexVector best_z = z;
    for (int tries = 0; tries < 40 && step > 1e-15; ++tries) {
      ComplexVector trial = z + step * dir;
      trial.normalize();
      const double v = map.ratio(trial, schatten);
      if (v > best) {
        best = v;
        best_z = std::move(trial);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    const double gain = best - value;
    z = std::move(best_z);
    value = best;
    step = std::min(1.0, step * 2.0);
    if (gain <= options.tolerance * std::max(1.0, value)) break;
  }
  return z;
}

}  // namespace

namespace {

// Continuation through smooth Schatten denominators from a local optimum of
// the operator-norm ratio, where ties between input singular values stall
// plain ascent. Every stage is scored with the operator norm, so the result
// stays a lower bound.
AscentResult polish(const AmplifiedMap& map, AscentResult best,
                    const AscentOptions& options) {
  ComplexVector z = best.witness;
  for (double p : {8.0, 32.0, 128.0, AmplifiedMap::kOperatorNorm}) {
    z = ascend_stage(map, std::move(z), p, options);
    const double r = map.ratio(z);
    if (r > best.ratio) best = {r, z};
  }
  return best;
}

AscentResult local(const AmplifiedMap& map, ComplexVector z,
                   const AscentOptions& options) {
  z.normalize();
  z = ascend_stage(map, std::move(z), AmplifiedMap::kOperatorNorm, options);
  return {map.ratio(z), z};
}

}  // namespace

AscentResult ascend(const AmplifiedMap& map, ComplexVector z,
                    const AscentOptions& options) {
  if (z.norm() == 0.0) return {0.0, z};
  return polish(map, local(map, std::move(z), options), options);
}

AscentResult maximize_ratio(const AmplifiedMap& map,
                            std::span<const ComplexVector> seeds,
                            const AscentOptions& options, Rng& rng) {
  AscentResult best;
  best.witness = ComplexVector::Zero(map.parameters());
  auto consider = [&](const ComplexVector& start) {
    if (start.norm() == 0.0) return;
    AscentResult r = local(map, start, options);
    if (r.ratio > best.ratio) best = std::move(r);
  };
  for (const auto& s : seeds) {
    if (s.size() == map.parameters()) consider(s);
  }
  // Screen the random starts by their ratio; ascend from the best few.
  std::vector<std::pair<double, ComplexVector>> starts;
  starts.reserve(static_cast<std::size_t>(std::max(0, options.restarts)));
  for (int r = 0; r < options.restarts; ++r) {
    ComplexVector z = random_gaussian(map.parameters(), 1, rng).col(0);
    const double v = map.ratio(z);
    starts.emplace_back(v, std::move(z));
  }
  const std::size_t keep =
      std::min(starts.size(), static_cast<std::size_t>(std::max(0, options.ascents)));
  std::partial_sort(starts.begin(), starts.begin() + static_cast<std::ptrdiff_t>(keep),
                    starts.end(), [](const auto& a, const auto& b) {
                      return a.first > b.first;
                    });
  for (std::size_t i = 0; i < keep; ++i) consider(starts[i].second);
  if (best.ratio == 0.0) return best;
  return polish(map, std::move(best), options);
}

}  // namespace trolink
