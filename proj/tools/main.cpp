#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "thirdq/cli.hpp"
#include "thirdq/error.hpp"

int main(int argc, char** argv) {
  using namespace thirdq;
  RunConfig cfg;
  CLI::App app{"Quadratic bosonic Lindblad solver by symplectic diagonalization"};
  app.add_option("command", cfg.command, "spectrum | normal-form | stability | cumulants | symmetry | oracle-check | evolve-jordan")
      ->required();
  app.add_option("--model", cfg.modelPath, "model JSON file");
  app.add_option("--output", cfg.outputFormat, "json or csv");
  int cutoff = 0, steps = 0, order = 0;
  double smax = 0.0, tol = 0.0, time = 0.0;
  std::string occupation, mu, nu;
  auto* o_cutoff = app.add_option("--cutoff", cutoff, "Fock cutoff per mode (oracle-check)");
  auto* o_smax = app.add_option("--s-max", smax, "counting-field range (cumulants)");
  auto* o_steps = app.add_option("--s-steps", steps, "grid intervals on each side of s = 0");
  auto* o_order = app.add_option("--order", order, "cumulant order, or max total occupation for sums");
  auto* o_tol = app.add_option("--tol", tol, "pass threshold for oracle-check");
  auto* o_occ = app.add_option("--occupation", occupation, "occupation numbers \"n1,n2,...\"");
  auto* o_time = app.add_option("--time", time, "evolution time (evolve-jordan)");
  auto* o_mu = app.add_option("--mu", mu, "coalesced eigenvalue \"re,im\" (evolve-jordan)");
  auto* o_nu = app.add_option("--nu", nu, "Jordan coupling \"re,im\" (evolve-jordan)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << nlohmann::json{{"code", "InvalidInput"}, {"message", e.what()}, {"context", "arguments"}}.dump()
              << '\n';
    return 2;
  }

  try {
    if (o_cutoff->count()) cfg.cutoff = cutoff;
    if (o_smax->count()) cfg.sMax = smax;
    if (o_steps->count()) cfg.sSteps = steps;
    if (o_order->count()) cfg.order = order;
    if (o_tol->count()) cfg.tol = tol;
    if (o_time->count()) cfg.time = time;
    if (o_occ->count()) cfg.occupation = parse_occupation(occupation);
    if (o_mu->count()) cfg.mu = parse_complex(mu);
    if (o_nu->count()) cfg.nu = parse_complex(nu);
  } catch (const Error& e) {
    std::cerr << nlohmann::json{{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"context", e.context()}}.dump()
              << '\n';
    return 2;
  }
  return run(cfg, std::cout, std::cerr);
}
