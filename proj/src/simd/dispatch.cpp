#include "dsre/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace dsre::simd {

#if defined(__x86_64__) || defined(_M_X64)
bool avx2_supported() {
    return __builtin_cpu_supports("avx2") != 0;
}
#endif

namespace {

const Kernels* resolve_auto() {
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_supported()) return &kAvx2Kernels;
#endif
    return &kScalarKernels;
}

const Kernels* resolve_env() {
    if (const char* env = std::getenv("DSRE_SIMD")) {
        const std::string_view want(env);
        if (want == "scalar") return &kScalarKernels;
#if defined(__x86_64__) || defined(_M_X64)
        if (want == "avx2" && avx2_supported()) return &kAvx2Kernels;
#endif
    }
    return resolve_auto();
}

std::atomic<const Kernels*> g_active{nullptr};

} // namespace

const Kernels& kernels() {
    const Kernels* k = g_active.load(std::memory_order_acquire);
    if (k == nullptr) {
        k = resolve_env();
        g_active.store(k, std::memory_order_release);
    }
    return *k;
}

bool select_backend(std::string_view name) {
    if (name == "auto") {
        g_active.store(resolve_env(), std::memory_order_release);
        return true;
    }
    if (name == "scalar") {
        g_active.store(&kScalarKernels, std::memory_order_release);
        return true;
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (name == "avx2") {
        if (!avx2_supported()) return false;
        g_active.store(&kAvx2Kernels, std::memory_order_release);
        return true;
    }
#endif
    return false;
}

std::vector<std::string> available_backends() {
    std::vector<std::string> out{"scalar"};
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_supported()) out.emplace_back("avx2");
#endif
    return out;
}

} // namespace dsre::simd
