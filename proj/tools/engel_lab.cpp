#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "engel/experiments.hpp"
#include "engel/parallel.hpp"
#include "json.hpp"

namespace {

using json = nlohmann::json;

struct Overrides {
  std::string config;
  std::string out = "engel_out";
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
  std::string hbar_ladder;
  std::optional<int> grid_n;
  std::optional<double> grid_l;
  std::optional<double> tol;
  std::string q, p;
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double x = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument(fmt::format("bad number '{}'", item));
    v.push_back(x);
  }
  return v;
}

engel::RunConfig build_config(const std::string& experiment, const Overrides& o) {
  engel::RunConfig c;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw std::invalid_argument(fmt::format("cannot read config '{}'", o.config));
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw std::invalid_argument(fmt::format("malformed config '{}': {}", o.config, e.what()));
    }
    c = engel::RunConfig::from_json(j);
    if (!c.experiment.empty() && c.experiment != experiment)
      throw std::invalid_argument(
          fmt::format("config is for experiment '{}', not '{}'", c.experiment, experiment));
  }
  c.experiment = experiment;
  if (o.seed) c.seed = *o.seed;
  if (o.n) {
    if (experiment == "dispersion")
      c.params["n"] = json::array({*o.n});
    else
      c.params["n"] = *o.n;
  }
  if (!o.hbar_ladder.empty()) c.params["hbar_ladder"] = parse_list(o.hbar_ladder);
  if (o.grid_n) c.params["grid_n"] = *o.grid_n;
  if (o.grid_l) c.params["grid_l"] = *o.grid_l;
  if (o.tol) c.params["tol"] = *o.tol;
  if (!o.q.empty()) {
    if (o.q == "inf")
      c.params["q_infinite"] = 1;
    else
      c.params["q"] = parse_list(o.q).at(0);
  }
  if (!o.p.empty()) c.params["p"] = parse_list(o.p).at(0);
  return c;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  os << text;
}

int run(const std::string& experiment, const Overrides& o) {
  const engel::RunConfig config = build_config(experiment, o);
  const auto start = std::chrono::steady_clock::now();
  const engel::RunReport report = engel::run_experiment(config);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::filesystem::path dir(o.out);
  std::filesystem::create_directories(dir);
  write_file(dir / "report.json", report.to_json().dump(2) + "\n");
  write_file(dir / "timing.json",
             json{{"experiment", experiment}, {"wall_seconds", seconds}, {"workers", engel::worker_count()}}.dump(2) +
                 "\n");
  for (const auto& [name, text] : report.files) write_file(dir / name, text);

  for (const auto& c : report.checks)
    std::cout << fmt::format("{} {}: value {:.6g} threshold {:.6g}\n", c.pass ? "PASS" : "FAIL", c.name, c.value,
                             c.threshold);
  std::cout << fmt::format("{} {} ({} checks, {:.1f} s) -> {}\n", experiment, report.passed() ? "passed" : "FAILED",
                           report.checks.size(), seconds, dir.string());
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments on the Engel group"};
  app.require_subcommand(1);
  Overrides o;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"identities", "Exact enveloping-algebra suite and numeric diagonal-part identities"},
      {"dispersion", "Montgomery branch sweep with harmonic and rescaling sanity checks"},
      {"critical-points", "Critical points of a Montgomery branch and cone curvature consistency"},
      {"plancherel", "Plancherel constant calibration and difference operators"},
      {"residual-scaling", "Schrodinger residual of the wave-packet ansatz across an hbar ladder"},
      {"transport", "Centroid transport of wave packets for generic and critical beta"},
      {"smicro-profile", "One-dimensional effective dispersion of the second-microlocal profile"},
      {"strichartz", "Strichartz exponent classification"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "JSON config {experiment, seed, params}");
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "Seed for all stochastic sampling");
    sub->add_option("--n", o.n, "Mode index");
    sub->add_option("--hbar-ladder", o.hbar_ladder, "Comma-separated hbar values");
    sub->add_option("--grid-n", o.grid_n, "Spectral grid points");
    sub->add_option("--grid-l", o.grid_l, "Spectral half-width (0 selects automatically)");
    sub->add_option("--tol", o.tol, "Root tolerance for critical points");
    if (name == "strichartz") {
      sub->add_option("--q", o.q, "Time exponent (number or inf)");
      sub->add_option("--p", o.p, "Space exponent");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return run(app.get_subcommands().front()->get_name(), o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
