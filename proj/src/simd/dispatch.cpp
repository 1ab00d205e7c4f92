#include <cstdlib>
#include <string>

#include "occkit/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <cpuid.h>
#endif

namespace occkit::simd {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    unsigned eax, ebx, ecx, edx;
    if (!__get_cpuid_count(7, 0, &eax, &ebx, &ecx, &edx)) return false;
    return (ebx & bit_AVX2) != 0;
#else
    return false;
#endif
}

const KernelTable* table_by_name(const std::string& name) {
    if (name == "scalar") return &kScalarTable;
#if defined(__x86_64__) || defined(_M_X64)
    if (name == "avx2" && cpu_has_avx2()) return &kAvx2Table;
#endif
#if defined(__ARM_NEON) || defined(__ARM_NEON__)
    if (name == "neon") return &kNeonTable;
#endif
    return nullptr;
}

static const KernelTable* resolve() {
    if (const char* env = std::getenv("OCCKIT_SIMD")) {
        const std::string want(env);
        if (!want.empty() && want != "auto") {
            if (const KernelTable* t = table_by_name(want)) return t;
            // Unsupported request falls through to auto selection.
        }
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2()) return &kAvx2Table;
#endif
#if defined(__ARM_NEON) || defined(__ARM_NEON__)
    return &kNeonTable;
#endif
    return &kScalarTable;
}

const KernelTable& active() {
    static const KernelTable* table = resolve();
    return *table;
}

const char* active_name() { return active().name; }

}  // namespace occkit::simd
