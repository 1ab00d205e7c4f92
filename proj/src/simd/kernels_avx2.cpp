// AVX2 variants. Each output element sees the same mul/add sequence as the
// scalar reference (column sweep, no FMA), so results are bit-identical.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstring>

#include "occkit/simd/kernels.hpp"

namespace occkit::simd {

__attribute__((target("avx2"))) static void matvec_avx2(const double* w_cm,
                                                        const double* bias,
                                                        const double* x, double* y,
                                                        std::size_t rows,
                                                        std::size_t cols) {
    if (bias)
        std::memcpy(y, bias, rows * sizeof(double));
    else
        std::memset(y, 0, rows * sizeof(double));
    const std::size_t rv = rows & ~std::size_t(3);
    for (std::size_t c = 0; c < cols; ++c) {
        const double xc = x[c];
        const double* col = w_cm + c * rows;
        const __m256d vx = _mm256_set1_pd(xc);
        std::size_t r = 0;
        for (; r < rv; r += 4) {
            __m256d acc = _mm256_loadu_pd(y + r);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(vx, _mm256_loadu_pd(col + r)));
            _mm256_storeu_pd(y + r, acc);
        }
        for (; r < rows; ++r) y[r] += xc * col[r];
    }
}

__attribute__((target("avx2"))) static void axpy_avx2(double a, const double* x,
                                                      double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_loadu_pd(y + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, acc);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2"))) static void scale_avx2(double a, const double* x,
                                                       double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = a * x[i];
}

__attribute__((target("avx2"))) static PairCounts count_pairs_avx2(
    const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    PairCounts pc;
    const __m256i zero = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        // Mask bits are set where the byte is zero (free); invert for occupied.
        const std::uint32_t fa = std::uint32_t(_mm256_movemask_epi8(_mm256_cmpeq_epi8(va, zero)));
        const std::uint32_t fb = std::uint32_t(_mm256_movemask_epi8(_mm256_cmpeq_epi8(vb, zero)));
        const std::uint32_t oa = ~fa;
        const std::uint32_t ob = ~fb;
        pc.a += __builtin_popcount(oa);
        pc.b += __builtin_popcount(ob);
        pc.both += __builtin_popcount(oa & ob);
    }
    for (; i < n; ++i) {
        const bool oa = a[i] != 0;
        const bool ob = b[i] != 0;
        pc.a += oa;
        pc.b += ob;
        pc.both += oa && ob;
    }
    return pc;
}

const KernelTable kAvx2Table = {matvec_avx2, axpy_avx2, scale_avx2, count_pairs_avx2,
                                "avx2"};

}  // namespace occkit::simd

#endif  // x86_64
