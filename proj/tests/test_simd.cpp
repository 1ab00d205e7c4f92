#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "occkit/simd/kernels.hpp"

using namespace occkit::simd;

namespace {

double sym(std::mt19937_64& rng, double a) {
    return (2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0) * a;
}

// Plain reference loops, written independently of kernels_scalar.cpp. The
// accumulation order (columns outer, rows inner) matches the documented
// contract so results must be bit-identical, not merely close.
void matvec_ref(const double* w_cm, const double* bias, const double* x, double* y,
                std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = bias ? bias[r] : 0.0;
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r) y[r] += x[c] * w_cm[c * rows + r];
}

std::vector<const KernelTable*> tables_under_test() {
    std::vector<const KernelTable*> t{&kScalarTable};
    if (const KernelTable* avx2 = table_by_name("avx2")) t.push_back(avx2);
    if (const KernelTable* neon = table_by_name("neon")) t.push_back(neon);
    return t;
}

}  // namespace

TEST_CASE("active table resolves to a usable implementation") {
    const KernelTable& t = active();
    CHECK(t.matvec != nullptr);
    CHECK(t.axpy != nullptr);
    CHECK(t.scale != nullptr);
    CHECK(t.count_pairs != nullptr);
    CHECK(std::string(active_name()) == std::string(t.name));
    CHECK(table_by_name("scalar") == &kScalarTable);
    CHECK(table_by_name("definitely-not-a-table") == nullptr);
}

TEST_CASE("matvec bit-identical to the reference across sizes") {
    std::mt19937_64 rng(7);
    for (const KernelTable* table : tables_under_test()) {
        CAPTURE(table->name);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t rows = 1 + rng() % 67;
            const std::size_t cols = 1 + rng() % 23;
            std::vector<double> w(rows * cols), x(cols), bias(rows);
            for (auto& v : w) v = sym(rng, 2.0);
            for (auto& v : x) v = sym(rng, 2.0);
            for (auto& v : bias) v = sym(rng, 2.0);
            std::vector<double> got(rows), want(rows);
            const bool with_bias = trial % 2 == 0;
            table->matvec(w.data(), with_bias ? bias.data() : nullptr, x.data(),
                          got.data(), rows, cols);
            matvec_ref(w.data(), with_bias ? bias.data() : nullptr, x.data(),
                       want.data(), rows, cols);
            CHECK(std::memcmp(got.data(), want.data(), rows * sizeof(double)) == 0);
        }
    }
}

TEST_CASE("axpy and scale bit-identical to plain loops") {
    std::mt19937_64 rng(13);
    for (const KernelTable* table : tables_under_test()) {
        CAPTURE(table->name);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t n = 1 + rng() % 129;
            const double a = sym(rng, 3.0);
            std::vector<double> x(n), y0(n);
            for (auto& v : x) v = sym(rng, 2.0);
            for (auto& v : y0) v = sym(rng, 2.0);

            std::vector<double> y = y0, want = y0;
            table->axpy(a, x.data(), y.data(), n);
            for (std::size_t i = 0; i < n; ++i) want[i] += a * x[i];
            CHECK(std::memcmp(y.data(), want.data(), n * sizeof(double)) == 0);

            std::vector<double> s(n), swant(n);
            table->scale(a, x.data(), s.data(), n);
            for (std::size_t i = 0; i < n; ++i) swant[i] = a * x[i];
            CHECK(std::memcmp(s.data(), swant.data(), n * sizeof(double)) == 0);
        }
    }
}

TEST_CASE("count_pairs equals the naive tally") {
    std::mt19937_64 rng(19);
    for (const KernelTable* table : tables_under_test()) {
        CAPTURE(table->name);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t n = rng() % 300;
            std::vector<std::uint8_t> a(n), b(n);
            for (auto& v : a) v = (rng() % 4 == 0) ? std::uint8_t(rng() % 17) : 0;
            for (auto& v : b) v = (rng() % 4 == 0) ? std::uint8_t(rng() % 17) : 0;
            const PairCounts got = table->count_pairs(a.data(), b.data(), n);
            PairCounts want;
            for (std::size_t i = 0; i < n; ++i) {
                if (a[i]) ++want.a;
                if (b[i]) ++want.b;
                if (a[i] && b[i]) ++want.both;
            }
            CHECK(got.a == want.a);
            CHECK(got.b == want.b);
            CHECK(got.both == want.both);
        }
    }
}

TEST_CASE("vector variants agree with scalar on identical inputs") {
    // The matvec contract promises bit-equal results between variants, not
    // only against the reference; cover a shape with an awkward tail.
    std::mt19937_64 rng(29);
    const std::size_t rows = 61, cols = 17;
    std::vector<double> w(rows * cols), x(cols);
    for (auto& v : w) v = sym(rng, 1.0);
    for (auto& v : x) v = sym(rng, 1.0);
    std::vector<double> base(rows);
    kScalarTable.matvec(w.data(), nullptr, x.data(), base.data(), rows, cols);
    for (const KernelTable* table : tables_under_test()) {
        std::vector<double> out(rows);
        table->matvec(w.data(), nullptr, x.data(), out.data(), rows, cols);
        CHECK(std::memcmp(out.data(), base.data(), rows * sizeof(double)) == 0);
    }
}
