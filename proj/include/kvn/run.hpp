#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kvn/config.hpp"

namespace kvn {

/* exit status of a mode run; outputs are written even on a numerical stop */
struct RunStatus {
  int exit_code = 0;
  std::vector<std::string> outputs;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/* runs the mode, writes data CSVs and manifest.json under cfg.out_dir */
RunStatus run(const RunConfig& cfg, std::ostream& log);

/* --config <path> [--out <dir>] [--seed <u64>] [--mode <name>] */
int cli_main(int argc, char** argv);

}  // namespace kvn
