#pragma once

#include <string>
#include <vector>

namespace aigdetect {

/// Runs one CLI invocation (argv without the program name). Returns the
/// process exit code: 0 on success, 1 on module errors, 2 on usage errors.
/// Every successful run writes its outputs plus a reproducibility manifest
/// (config snapshot, seeds, content hashes) into the chosen output
/// directory.
int dispatch(const std::vector<std::string>& args);

}  // namespace aigdetect
