// SPDX-License-Identifier: MIT

#ifndef FUSETRACK_CLI_H_
#define FUSETRACK_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace fusetrack {

inline constexpr const char *kManifestName = "run_manifest.ini";

// Runs one subcommand: generate-model, generate-scene, track, refine,
// evaluate or overlay. `args` excludes the program name. Returns the exit
// status: 0 on success, 1 on errors, 2 on usage errors.
int Dispatch(const std::vector<std::string> &args, std::ostream &out,
             std::ostream &err);

// Worker count from ICG_THREADS, default 1.
int ThreadsFromEnvironment();

}  // namespace fusetrack

#endif  // FUSETRACK_CLI_H_
