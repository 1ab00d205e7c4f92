// NEON variants (aarch64). Same accumulation order as the scalar reference;
// vmulq/vaddq are kept separate to match its rounding exactly.

#if defined(__ARM_NEON) || defined(__ARM_NEON__)

#include <arm_neon.h>

#include <cstring>

#include "occkit/simd/kernels.hpp"

namespace occkit::simd {

static void matvec_neon(const double* w_cm, const double* bias, const double* x,
                        double* y, std::size_t rows, std::size_t cols) {
    if (bias)
        std::memcpy(y, bias, rows * sizeof(double));
    else
        std::memset(y, 0, rows * sizeof(double));
    const std::size_t rv = rows & ~std::size_t(1);
    for (std::size_t c = 0; c < cols; ++c) {
        const double xc = x[c];
        const double* col = w_cm + c * rows;
        const float64x2_t vx = vdupq_n_f64(xc);
        std::size_t r = 0;
        for (; r < rv; r += 2) {
            float64x2_t acc = vld1q_f64(y + r);
            acc = vaddq_f64(acc, vmulq_f64(vx, vld1q_f64(col + r)));
            vst1q_f64(y + r, acc);
        }
        for (; r < rows; ++r) y[r] += xc * col[r];
    }
}

static void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t acc = vld1q_f64(y + i);
        acc = vaddq_f64(acc, vmulq_f64(va, vld1q_f64(x + i)));
        vst1q_f64(y + i, acc);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

static void scale_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] = a * x[i];
}

static PairCounts count_pairs_neon(const std::uint8_t* a, const std::uint8_t* b,
                                   std::size_t n) {
    PairCounts pc;
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        const uint8x16_t va = vld1q_u8(a + i);
        const uint8x16_t vb = vld1q_u8(b + i);
        const uint8x16_t oa = vtstq_u8(va, va);  // 0xff where nonzero
        const uint8x16_t ob = vtstq_u8(vb, vb);
        pc.a += vaddvq_u8(vshrq_n_u8(oa, 7));
        pc.b += vaddvq_u8(vshrq_n_u8(ob, 7));
        pc.both += vaddvq_u8(vshrq_n_u8(vandq_u8(oa, ob), 7));
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

const KernelTable kNeonTable = {matvec_neon, axpy_neon, scale_neon, count_pairs_neon,
                                "neon"};

}  // namespace occkit::simd

#endif  // __ARM_NEON
