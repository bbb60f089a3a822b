#include "trolink/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace trolink {

void Report::add(std::string name, bool pass, double residual,
                 std::string details, bool mandatory) {
  checks_.push_back(
      {std::move(name), pass, residual, std::move(details), mandatory});
}

void Report::append(const Report& other, const std::string& prefix) {
  for (auto r : other.checks_) {
    r.name = prefix + r.name;
    checks_.push_back(std::move(r));
  }
}

const CheckRecord* Report::find(const std::string& name) const {
  for (const auto& c : checks_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const CheckRecord* Report::first_failure() const {
  for (const auto& c : checks_) {
    if (c.mandatory && !c.pass) return &c;
  }
  return nullptr;
}

double Report::worst_residual() const {
  double worst = 0.0;
  for (const auto& c : checks_) {
    if (c.mandatory) worst = std::max(worst, c.residual);
  }
  return worst;
}

std::string Report::text() const {
  std::ostringstream out;
  std::size_t width = 0;
  for (const auto& c : checks_) width = std::max(width, c.name.size());
  for (const auto& c : checks_) {
    const char* status = c.pass ? "PASS" : (c.mandatory ? "FAIL" : "n/a ");
    char residual[32];
    std::snprintf(residual, sizeof residual, "%.3e", c.residual);
    out << "  " << c.name << std::string(width - c.name.size() + 2, ' ')
        << status << "  " << residual;
    if (!c.details.empty()) out << "  " << c.details;
    out << '\n';
  }
  out << "verdict: " << (passed() ? "PASS" : "FAIL");
  if (const auto* f = first_failure()) out << " (first failure: " << f->name << ")";
  out << '\n';
  return out.str();
}

}  // namespace trolink
