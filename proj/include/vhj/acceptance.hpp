#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vhj::acceptance {

struct CriterionResult {
  std::string id;
  bool pass = false;
  std::string detail;
};

struct Options {
  int threads = 2;
  std::ostream* log = nullptr;  // per-criterion pass/fail lines
};

/// Canonical suite ids ("a1".."a8"); aliases: hopf-cole-q2, diffusion, vss,
/// hj, monitors, threshold-scan, closed-forms, forced-linear, all.
std::vector<std::string> suite_ids();
bool resolve_suite(const std::string& name, std::string& id);

/// Run the named suites (shared scenario runs are computed once and reused,
/// e.g. the monitor suite reads the regime runs). Returns one result per
/// requested criterion, in a1..a8 order.
std::vector<CriterionResult> run_suites(const std::vector<std::string>& ids,
                                        const Options& opt);

}  // namespace vhj::acceptance
