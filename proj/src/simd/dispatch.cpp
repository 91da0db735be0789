#include <cstdlib>
#include <string_view>

#include "kpeaks/core/parallel.hpp"
#include "kpeaks/simd/kernels.hpp"

namespace kpeaks::simd {

const KernelTable&
active_kernels()
{
    static const KernelTable& table = [] () -> const KernelTable& {
        const char* env = std::getenv("KPEAKS_SIMD");
        if (env != nullptr && std::string_view(env) == "scalar") {
            return scalar_kernels();
        }
        const KernelTable* vec = avx2_kernels();
        return vec != nullptr ? *vec : scalar_kernels();
    }();
    return table;
}

double
dot(const double* x, const double* y, std::size_t len)
{
    const KernelTable& k = active_kernels();
    return deterministic_sum(len, [&](std::size_t b, std::size_t e) { return k.dot(x + b, y + b, e - b); });
}

} // namespace kpeaks::simd
