#include "tact/kernels.hpp"

#if TACT_KERNELS_HAVE_AVX2
#include <immintrin.h>
#endif
#if TACT_KERNELS_HAVE_NEON
#include <arm_neon.h>
#endif

namespace tact::kernels {

// ---------------------------------------------------------------------------
// Scalar reference kernels
// ---------------------------------------------------------------------------

namespace scalar {

double sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double squared_norm(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double autocovariance(const double* x, std::size_t n, double mean, std::size_t lag) {
    if (lag >= n) return 0.0;
    double acc = 0.0;
    const std::size_t m = n - lag;
    for (std::size_t t = 0; t < m; ++t) acc += (x[t] - mean) * (x[t + lag] - mean);
    return acc;
}

}  // namespace scalar

// ---------------------------------------------------------------------------
// AVX2 + FMA kernels (x86-64). Built with a target attribute so no special
// compile flags are needed; only ever called after a cpuid check.
// ---------------------------------------------------------------------------

#if TACT_KERNELS_HAVE_AVX2

namespace avx2 {

__attribute__((target("avx2,fma"))) static double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

__attribute__((target("avx2,fma"))) double sum(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i];
    return acc;
}

__attribute__((target("avx2,fma"))) double dot(const double* x, const double* y,
                                               std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

__attribute__((target("avx2,fma"))) double squared_norm(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d a = _mm256_loadu_pd(x + i);
        const __m256d b = _mm256_loadu_pd(x + i + 4);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
        acc1 = _mm256_fmadd_pd(b, b, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(x + i);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

__attribute__((target("avx2,fma"))) void axpy(double a, const double* x, double* y,
                                              std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2,fma"))) double autocovariance(const double* x, std::size_t n,
                                                          double mean, std::size_t lag) {
    if (lag >= n) return 0.0;
    const std::size_t m = n - lag;
    const __m256d mv = _mm256_set1_pd(mean);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t t = 0;
    for (; t + 8 <= m; t += 8) {
        const __m256d a0 = _mm256_sub_pd(_mm256_loadu_pd(x + t), mv);
        const __m256d b0 = _mm256_sub_pd(_mm256_loadu_pd(x + t + lag), mv);
        const __m256d a1 = _mm256_sub_pd(_mm256_loadu_pd(x + t + 4), mv);
        const __m256d b1 = _mm256_sub_pd(_mm256_loadu_pd(x + t + 4 + lag), mv);
        acc0 = _mm256_fmadd_pd(a0, b0, acc0);
        acc1 = _mm256_fmadd_pd(a1, b1, acc1);
    }
    for (; t + 4 <= m; t += 4) {
        const __m256d a = _mm256_sub_pd(_mm256_loadu_pd(x + t), mv);
        const __m256d b = _mm256_sub_pd(_mm256_loadu_pd(x + t + lag), mv);
        acc0 = _mm256_fmadd_pd(a, b, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; t < m; ++t) acc += (x[t] - mean) * (x[t + lag] - mean);
    return acc;
}

}  // namespace avx2

#endif  // TACT_KERNELS_HAVE_AVX2

// ---------------------------------------------------------------------------
// NEON kernels (aarch64; NEON is baseline there, no runtime check needed).
// ---------------------------------------------------------------------------

#if TACT_KERNELS_HAVE_NEON

namespace neon {

double sum(const double* x, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vld1q_f64(x + i));
        acc1 = vaddq_f64(acc1, vld1q_f64(x + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += x[i];
    return acc;
}

double dot(const double* x, const double* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double squared_norm(const double* x, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t a = vld1q_f64(x + i);
        const float64x2_t b = vld1q_f64(x + i + 2);
        acc0 = vfmaq_f64(acc0, a, a);
        acc1 = vfmaq_f64(acc1, b, b);
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t av = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), av, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

double autocovariance(const double* x, std::size_t n, double mean, std::size_t lag) {
    if (lag >= n) return 0.0;
    const std::size_t m = n - lag;
    const float64x2_t mv = vdupq_n_f64(mean);
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t t = 0;
    for (; t + 2 <= m; t += 2) {
        const float64x2_t a = vsubq_f64(vld1q_f64(x + t), mv);
        const float64x2_t b = vsubq_f64(vld1q_f64(x + t + lag), mv);
        acc = vfmaq_f64(acc, a, b);
    }
    double s = vaddvq_f64(acc);
    for (; t < m; ++t) s += (x[t] - mean) * (x[t + lag] - mean);
    return s;
}

}  // namespace neon

#endif  // TACT_KERNELS_HAVE_NEON

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

namespace {

struct KernelTable {
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*squared_norm)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    double (*autocovariance)(const double*, std::size_t, double, std::size_t);
    std::string_view name;
};

constexpr KernelTable kScalarTable{scalar::sum, scalar::dot, scalar::squared_norm,
                                   scalar::axpy, scalar::autocovariance, "scalar"};

#if TACT_KERNELS_HAVE_AVX2
constexpr KernelTable kAvx2Table{avx2::sum, avx2::dot, avx2::squared_norm, avx2::axpy,
                                 avx2::autocovariance, "avx2"};
#endif
#if TACT_KERNELS_HAVE_NEON
constexpr KernelTable kNeonTable{neon::sum, neon::dot, neon::squared_norm, neon::axpy,
                                 neon::autocovariance, "neon"};
#endif

const KernelTable* detect() {
#if TACT_KERNELS_HAVE_AVX2
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2Table;
#endif
#if TACT_KERNELS_HAVE_NEON
    return &kNeonTable;
#endif
    return &kScalarTable;
}

const KernelTable*& active_table() {
    static const KernelTable* table = detect();
    return table;
}

}  // namespace

double sum(const double* x, std::size_t n) { return active_table()->sum(x, n); }
double dot(const double* x, const double* y, std::size_t n) {
    return active_table()->dot(x, y, n);
}
double squared_norm(const double* x, std::size_t n) {
    return active_table()->squared_norm(x, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
    active_table()->axpy(a, x, y, n);
}
double autocovariance(const double* x, std::size_t n, double mean, std::size_t lag) {
    return active_table()->autocovariance(x, n, mean, lag);
}

std::string_view active_isa() { return active_table()->name; }

bool select_isa(std::string_view name) {
    if (name == "scalar") {
        active_table() = &kScalarTable;
        return true;
    }
#if TACT_KERNELS_HAVE_AVX2
    if (name == "avx2" && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        active_table() = &kAvx2Table;
        return true;
    }
#endif
#if TACT_KERNELS_HAVE_NEON
    if (name == "neon") {
        active_table() = &kNeonTable;
        return true;
    }
#endif
    return false;
}

}  // namespace tact::kernels
