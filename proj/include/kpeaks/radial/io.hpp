#pragma once

#include <filesystem>

#include "kpeaks/radial/profile.hpp"

namespace kpeaks::radial {

/// Writes <stem>.csv (r, u, du, d2u) and <stem>.json (equation, tail and diagnostics).
void write_profile(const RadialProfile& profile, const std::filesystem::path& stem);

} // namespace kpeaks::radial
