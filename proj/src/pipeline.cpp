#include "trolink/pipeline.hpp"

#include <functional>

namespace trolink {

PipelineResult run_pipeline(const tro::Tro& t, const tro::Tro& x,
                            const TroMap& p, const PipelineOptions& options) {
  PipelineResult out;
  const auto& tol = t.tol();

  // Runs one gate; returns false when the pipeline has to stop.
  auto gate = [&](const std::string& name, const std::function<Report()>& body) {
    Report r = body();
    out.report.append(r, name + ": ");
    if (!r.passed()) {
      out.failed_gate = name;
      return false;
    }
    return name != options.last_gate;
  };

  if (!gate("T_is_tro", [&] {
        Report r;
        const auto c = tro::is_tro(t.space());
        r.add("T T* T in T", c.ok, c.worst_residual);
        return r;
      }))
    return out;
  if (!gate("X_is_tro", [&] {
        Report r;
        const auto c = tro::is_tro(x.space());
        r.add("X X* X in X", c.ok, c.worst_residual);
        return r;
      }))
    return out;
  if (!gate("X_subspace_of_T", [&] {
        Report r;
        const bool dims = x.dim_k() == t.dim_k() && x.dim_h() == t.dim_h();
        const double c =
            dims ? mats::containment_residual(t.space(), x.space()) : 1.0;
        r.add("X in T", dims && c <= tol.residual, c,
              dims ? std::string{} : "ambient dimensions differ");
        return r;
      }))
    return out;
  if (!gate("tro_expectation", [&] {
        return expectation::check_tro_expectation(
            p, x, t, options.amplification_level, options.seed, options.probe);
      }))
    return out;
  if (!gate("nondegeneracy", [&] {
        Report r;
        const auto s = tro::subtro_nondegeneracy(x, t);
        for (std::size_t i = 0; i < s.checks.size(); ++i) {
          // Only the two defining identities decide the gate.
          r.add(s.checks[i].name, s.checks[i].pass, s.checks[i].residual, {},
                i < 2);
        }
        return r;
      }))
    return out;
  gate("extension", [&] {
    Report r;
    try {
      out.expectation = expectation::assemble_expectation(p, x, t);
    } catch (const Degeneracy& e) {
      r.add("assemble", false, 1.0, e.what());
      return r;
    } catch (const PreconditionViolation& e) {
      r.add("assemble", false, 1.0, e.what());
      return r;
    }
    r.add("assemble", true, 0.0);
    r.append(expectation::verify_expectation(
        *out.expectation, x, t, options.samples, options.amplification_level,
        options.seed, options.probe));
    return r;
  });
  return out;
}

}  // namespace trolink
