#pragma once

namespace geoest::bench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCriteriaFailed = 1;
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the `geoest` command line tool.
int cli_main(int argc, char** argv);

}  // namespace geoest::bench
