#pragma once

#include "affmatch/matcher.hpp"

#include <filesystem>

namespace affmatch {

// Versioned JSON snapshot of a built registry: entries plus the analyzed
// stored queries of every criterion index. Only round-trip equality of
// percolation results is normative.
void save_snapshot(const RegistrySnapshot& snapshot, const std::filesystem::path& path);
RegistrySnapshot load_snapshot(const std::filesystem::path& path);

} // namespace affmatch
