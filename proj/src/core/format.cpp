#include "kpeaks/core/format.hpp"

#include <cstdio>

#include "kpeaks/core/error.hpp"

namespace kpeaks {

std::string
fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::ofstream
open_output(const std::filesystem::path& path)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string() + " for writing");
    }
    return out;
}

} // namespace kpeaks
