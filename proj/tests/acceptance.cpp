#include <fmt/format.h>

#include <chrono>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "engel/experiments.hpp"

using engel::RunConfig;
using engel::RunReport;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::string experiment;
  std::function<bool(const std::string&)> selects;
};

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

std::function<bool(const std::string&)> prefix(std::string p) {
  return [p](const std::string& s) { return starts_with(s, p); };
}

std::function<bool(const std::string&)> names(std::vector<std::string> v) {
  return [v](const std::string& s) {
    for (const auto& n : v)
      if (s == n) return true;
    return false;
  };
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "exact algebra suite", "identities", prefix("exact.")},
      {2, "harmonic oscillator levels", "dispersion", names({"harmonic_oscillator_levels"})},
      {3, "rescaling law", "dispersion", names({"rescaling_law_relative_deviation"})},
      {4, "Feynman-Hellmann and diagonal-part identities", "identities", prefix("numeric.")},
      {5, "ground branch critical point", "critical-points",
       names({"critical_points_nondegenerate", "ground_branch_unique_critical_point", "ground_branch_positive_curvature",
              "grid_refinement_shift", "frozen_nu_c", "frozen_mu_at_c", "frozen_curvature"})},
      {6, "cone curvature consistency", "critical-points",
       names({"cone_curvature_consistency", "cone_first_derivative"})},
      {7, "residual scaling", "residual-scaling", [](const std::string&) { return true; }},
      {8, "transport law", "transport", [](const std::string&) { return true; }},
      {9, "Plancherel invariance", "plancherel", names({"kernel_relative_spread", "box_doubling_relative_change"})},
      {10, "difference operators", "plancherel", names({"difference_operator_1", "difference_operator_2"})},
      {11, "Strichartz arithmetic", "strichartz", [](const std::string&) { return true; }},
      {12, "second-microlocal profile", "smicro-profile", [](const std::string&) { return true; }},
  };

  std::map<std::string, RunReport> reports;
  std::map<std::string, std::string> errors;
  std::map<std::string, double> seconds;
  for (const auto& c : criteria) {
    if (reports.count(c.experiment) || errors.count(c.experiment)) continue;
    RunConfig config;
    config.experiment = c.experiment;
    const auto start = std::chrono::steady_clock::now();
    try {
      reports.emplace(c.experiment, engel::run_experiment(config));
    } catch (const std::exception& e) {
      errors.emplace(c.experiment, e.what());
    }
    seconds[c.experiment] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  int failed = 0;
  for (const auto& c : criteria) {
    bool pass = true;
    std::vector<std::string> lines;
    if (auto e = errors.find(c.experiment); e != errors.end()) {
      pass = false;
      lines.push_back("error: " + e->second);
    } else {
      int used = 0;
      for (const auto& ch : reports.at(c.experiment).checks) {
        if (!c.selects(ch.name)) continue;
        ++used;
        pass = pass && ch.pass;
        lines.push_back(fmt::format("{} {} value {:.6g} threshold {:.6g}{}", ch.pass ? "met   " : "missed", ch.name, ch.value,
                                    ch.threshold, ch.detail.empty() ? "" : " (" + ch.detail + ")"));
      }
      if (used == 0) {
        pass = false;
        lines.push_back("no checks reported");
      }
    }
    failed += !pass;
    std::cout << fmt::format("CRITERION {} {}: {} [{}, {:.1f} s]\n", c.id, pass ? "PASS" : "FAIL", c.title, c.experiment,
                             seconds[c.experiment]);
    for (const auto& l : lines) std::cout << "    " << l << "\n";
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
