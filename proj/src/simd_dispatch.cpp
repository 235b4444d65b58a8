#include <atomic>
#include <cstdlib>

#include "needlet/simd.hpp"

namespace needlet::simd {

#if defined(NEEDLET_BUILD_AVX2)
const Kernels* avx2_kernels_impl();
#endif

bool avx2_runtime_available() {
#if defined(NEEDLET_BUILD_AVX2) && defined(__x86_64__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Kernels* avx2_kernels() {
#if defined(NEEDLET_BUILD_AVX2)
    if (avx2_runtime_available()) {
        return avx2_kernels_impl();
    }
#endif
    return nullptr;
}

namespace {
std::atomic<bool> g_force_scalar{[] {
    const char* env = std::getenv("NEEDLET_FORCE_SCALAR");
    return env != nullptr && env[0] != '\0' && env[0] != '0';
}()};
}  // namespace

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

const Kernels& active() {
    if (!g_force_scalar.load(std::memory_order_relaxed)) {
        if (const Kernels* v = avx2_kernels()) {
            return *v;
        }
    }
    return scalar_kernels();
}

}  // namespace needlet::simd
