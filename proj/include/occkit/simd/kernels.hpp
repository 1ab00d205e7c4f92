#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace occkit::simd {

// Data-parallel inner loops shared by the numeric kernels. Every variant of a
// kernel accumulates each output element in the same order with the same
// mul/add sequence (no FMA), so scalar and vector paths agree bit for bit.

// y = W x + b. W is column-major: W[c * rows + r] holds element (r, c).
// Accumulation sweeps columns in increasing c, adding x[c] * Wcol into y.
using MatvecFn = void (*)(const double* w_cm, const double* bias, const double* x,
                          double* y, std::size_t rows, std::size_t cols);

// y += a * x over n elements.
using AxpyFn = void (*)(double a, const double* x, double* y, std::size_t n);

// y = a * x over n elements.
using ScaleFn = void (*)(double a, const double* x, double* y, std::size_t n);

// Occupancy pair counts between two label arrays: number of non-free entries
// in a, in b, and positions non-free in both.
struct PairCounts {
    std::uint64_t a = 0, b = 0, both = 0;
};
using CountPairsFn = PairCounts (*)(const std::uint8_t* a, const std::uint8_t* b,
                                    std::size_t n);

struct KernelTable {
    MatvecFn matvec = nullptr;
    AxpyFn axpy = nullptr;
    ScaleFn scale = nullptr;
    CountPairsFn count_pairs = nullptr;
    const char* name = "none";
};

// Reference implementations (always available).
extern const KernelTable kScalarTable;

#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable kAvx2Table;
#endif
#if defined(__ARM_NEON) || defined(__ARM_NEON__)
extern const KernelTable kNeonTable;
#endif

bool cpu_has_avx2();

// Active table: best available for the host, unless overridden by the
// OCCKIT_SIMD environment variable ("scalar", "avx2", "auto"). Resolved once.
const KernelTable& active();
const char* active_name();

// For equivalence tests: pick a table by name, nullptr if unsupported here.
const KernelTable* table_by_name(const std::string& name);

}  // namespace occkit::simd
