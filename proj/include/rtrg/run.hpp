#pragma once

#include <iosfwd>
#include <string>

#include "rtrg/config.hpp"

namespace rtrg {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitPartial = 4 };

// Executes one command, writes its artifacts plus run.cfg and manifest.json
// into cfg.out. Numerical failures leave diagnostic.txt behind.
int run(const RunConfig& cfg, std::ostream& log);

// Re-runs the config stored in a manifest.json (or run.cfg) into out_dir and
// compares artifact checksums against the manifest.
int replay(const std::string& path, const std::string& out_dir, std::ostream& log);

// flags that make a phase scan partial
bool row_is_partial(const PhaseRow& row);

} // namespace rtrg
