#pragma once

#include <filesystem>
#include <fstream>
#include <string>

namespace kpeaks {

/// Shortest decimal with 17 significant digits, the precision used in every artifact.
std::string fmt17(double x);

/// Opens \p path for writing, creating parent directories.
std::ofstream open_output(const std::filesystem::path& path);

} // namespace kpeaks
