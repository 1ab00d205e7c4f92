#include "occkit/simd/kernels.hpp"

#include <cstring>

namespace occkit::simd {

static void matvec_scalar(const double* w_cm, const double* bias, const double* x,
                          double* y, std::size_t rows, std::size_t cols) {
    if (bias)
        std::memcpy(y, bias, rows * sizeof(double));
    else
        std::memset(y, 0, rows * sizeof(double));
    for (std::size_t c = 0; c < cols; ++c) {
        const double xc = x[c];
        const double* col = w_cm + c * rows;
        for (std::size_t r = 0; r < rows; ++r) y[r] += xc * col[r];
    }
}

static void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

static void scale_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i];
}

static PairCounts count_pairs_scalar(const std::uint8_t* a, const std::uint8_t* b,
                                     std::size_t n) {
    PairCounts pc;
    for (std::size_t i = 0; i < n; ++i) {
        const bool oa = a[i] != 0;
        const bool ob = b[i] != 0;
        pc.a += oa;
        pc.b += ob;
        pc.both += oa && ob;
    }
    return pc;
}

const KernelTable kScalarTable = {matvec_scalar, axpy_scalar, scale_scalar,
                                  count_pairs_scalar, "scalar"};

}  // namespace occkit::simd
