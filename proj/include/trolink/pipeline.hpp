#pragma once

// The hypothesis gates in front of the extension, run in order:
//   T_is_tro, X_is_tro, X_subspace_of_T, tro_expectation, nondegeneracy,
//   extension.
// Each gate appends its checks to one report; the first failing gate stops
// the run.

#include <cstdint>
#include <optional>
#include <string>

#include "trolink/expectation.hpp"

namespace trolink {

struct PipelineOptions {
  int amplification_level = 4;
  int samples = 8;
  std::uint64_t seed = 0;
  expectation::ProbeOptions probe;
  /// Stop after this gate even if it passes; empty runs every gate.
  std::string last_gate;
};

struct PipelineResult {
  Report report;
  /// Name of the first failing gate, empty when every gate passed.
  std::string failed_gate;
  std::optional<expectation::BlockExpectation> expectation;

  bool passed() const { return failed_gate.empty(); }
};

/// t and x may be unvalidated; the first two gates check them.
PipelineResult run_pipeline(const tro::Tro& t, const tro::Tro& x,
                            const TroMap& p, const PipelineOptions& options = {});

}  // namespace trolink
