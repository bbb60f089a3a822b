#pragma once

#include <string>
#include <vector>

namespace trolink {

struct CheckRecord {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  std::string details;
  /// Non-mandatory checks are reported but do not affect the verdict.
  bool mandatory = true;
};

class Report {
 public:
  void add(CheckRecord record) { checks_.push_back(std::move(record)); }
  void add(std::string name, bool pass, double residual,
           std::string details = {}, bool mandatory = true);
  /// Appends every record of `other`, prefixing names with `prefix`.
  void append(const Report& other, const std::string& prefix = {});

  const std::vector<CheckRecord>& checks() const { return checks_; }
  const CheckRecord* find(const std::string& name) const;
  /// First mandatory failing check, or nullptr.
  const CheckRecord* first_failure() const;
  bool passed() const { return first_failure() == nullptr; }
  double worst_residual() const;

  /// One line per check plus a verdict line.
  std::string text() const;

 private:
  std::vector<CheckRecord> checks_;
};

}  // namespace trolink
