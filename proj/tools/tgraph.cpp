#include <CLI11.hpp>

#include <iostream>

#include "tgraph/cli.hpp"

int main(int argc, char** argv) {
  using namespace tgraph;
  RunConfig c;
  CLI::App app{"Trace graphs of rotated links"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("-o,--output", c.output, "Output path (standard output when omitted)");
  app.add_option("--grid-size", c.grid_size, "Event grid size")->check(CLI::Range(std::size_t{64}, std::size_t{1} << 30));
  app.add_option("--tol", c.root_tol, "Root tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "Random seed");

  auto* build = app.add_subcommand("build", "Trace graph of a closed braid");
  build->add_option("--braid", c.braid, "Braid word, e.g. \"1 -2 3\"");
  build->add_option("--strands", c.strands, "Number of strands")->required();

  auto* simulate = app.add_subcommand("simulate", "Trace graph and event log of a link file");
  simulate->add_option("link", c.inputs, "Link file")->required()->expected(1);
  simulate->add_option("--events", c.events, "Event log path (appended to standard output when omitted)");

  auto* validate = app.add_subcommand("validate", "Check the generic conditions of a trace graph");
  validate->add_option("graph", c.inputs, "Trace-graph file")->expected(0, 1);
  validate->add_option("--braid", c.braid, "Braid word instead of a file");
  validate->add_option("--strands", c.strands, "Number of strands");

  auto* compare = app.add_subcommand("compare", "Compare two braids or two trace graphs");
  compare->add_option("graphs", c.inputs, "Two trace-graph files")->expected(0, 2);
  compare->add_option("--braid-a", c.braid_a, "First braid word");
  compare->add_option("--braid-b", c.braid_b, "Second braid word");
  compare->add_option("--strands", c.strands, "Number of strands");
  compare->add_option("--budget", c.budget, "Move budget");

  auto* bif = app.add_subcommand("bifurcation", "Locus samples and consistency report of versal deformations");
  bif->add_option("--kind", c.kind, "Singularity kind, roman numeral i..x, or all");
  bif->add_option("--grid", c.loci_grid, "Points per axis of the parameter grid");
  bif->add_option("--loci-tol", c.loci_tol, "Locus tolerance")->check(CLI::PositiveNumber);
  bif->add_option("--samples", c.loci_samples, "Sample lines per axis");

  auto* render = app.add_subcommand("render", "SVG picture of a trace graph");
  render->add_option("graph", c.inputs, "Trace-graph file")->expected(0, 1);
  render->add_option("--braid", c.braid, "Braid word instead of a file");
  render->add_option("--strands", c.strands, "Number of strands");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  c.command = app.get_subcommands().front()->get_name();
  const auto r = run(c);
  std::cout << r.out;
  std::cerr << r.err;
  return r.status;
}
