// Experiment runner shared by the CLI and the integration tests.
// run() validates the manifest, executes the experiment, and writes
// manifest.json / samples.csv (or curve.csv, llt.csv) / verdicts.json under
// manifest.out_dir.  Returns 0 when all verdicts pass.

#pragma once

#include <string>
#include <vector>

#include "zrec/io.hpp"

namespace zrec {
namespace runner {

struct RunResult {
  int exit_code = 1;
  std::vector<Verdict> verdicts;
  std::vector<std::string> files_written;
};

RunResult run(const Manifest& manifest);

// Aggregates verdicts.json files into a single pass/fail summary; writes
// report.json into out_dir when non-empty.
RunResult report(const std::vector<std::string>& verdict_files,
                 const std::string& out_dir);

std::vector<std::string> known_kinds();

}  // namespace runner
}  // namespace zrec
