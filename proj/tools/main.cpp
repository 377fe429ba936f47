#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Inspect, check and transform .bir binary IR files"};
  app.require_subcommand(1);

  std::string path, pathB, outPath, imagePath, mapPath;
  std::uint64_t base = 0x400000;

  auto* validate = app.add_subcommand("validate", "Check structural invariants");
  validate->add_option("file", path)->required();

  auto* stats = app.add_subcommand("stats", "Entity and edge counts");
  stats->add_option("file", path)->required();

  auto* dump = app.add_subcommand("dump", "Readable walk of the whole IR");
  dump->add_option("file", path)->required();

  auto* cfgDot = app.add_subcommand("cfg-dot", "Emit the CFG as Graphviz");
  cfgDot->add_option("file", path)->required();

  auto* diff = app.add_subcommand("diff", "Structural comparison of two IRs");
  diff->add_option("a", path)->required();
  diff->add_option("b", pathB)->required();

  auto* canon = app.add_subcommand("canonicalize", "Rewrite a file in canonical form");
  canon->add_option("file", path)->required();
  canon->add_option("-o,--out", outPath, "Output path (default: in place)");

  auto* layout = app.add_subcommand("layout", "Assign addresses and build a raw image");
  layout->add_option("file", path)->required();
  layout->add_option("--base", base, "Image base address (default 0x400000)");
  layout->add_option("--out-image", imagePath, "Raw image output path")->required();
  layout->add_option("--out-map", mapPath, "Address map output path")->required();

  CLI11_PARSE(app, argc, argv);

  using namespace bir::cli;
  if (validate->parsed()) return runValidate(path, std::cout, std::cerr);
  if (stats->parsed()) return runStats(path, std::cout, std::cerr);
  if (dump->parsed()) return runDump(path, std::cout, std::cerr);
  if (cfgDot->parsed()) return runCfgDot(path, std::cout, std::cerr);
  if (diff->parsed()) return runDiff(path, pathB, std::cout, std::cerr);
  if (canon->parsed())
    return runCanonicalize(path, outPath.empty() ? path : outPath, std::cerr);
  if (layout->parsed()) return runLayout(path, base, imagePath, mapPath, std::cerr);
  return 2;
}
