#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace bir::cli {

// Each command returns its process exit code: 0 for success, 1 for a domain
// finding (violations, differences, layout failure), 2 when the input file
// cannot be read or parsed. Domain output goes to `out`, errors to `err`;
// both are parameters so tests and the golden-file generator can capture
// exactly what the binary would print.

int runValidate(const std::string& path, std::ostream& out, std::ostream& err);
int runStats(const std::string& path, std::ostream& out, std::ostream& err);
int runDump(const std::string& path, std::ostream& out, std::ostream& err);
int runCfgDot(const std::string& path, std::ostream& out, std::ostream& err);
int runDiff(const std::string& pathA, const std::string& pathB, std::ostream& out,
            std::ostream& err);
int runCanonicalize(const std::string& path, const std::string& outPath, std::ostream& err);
int runLayout(const std::string& path, std::uint64_t base, const std::string& imagePath,
              const std::string& mapPath, std::ostream& err);

}  // namespace bir::cli
