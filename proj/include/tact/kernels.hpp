// Dense double-precision reductions used by the oracles and diagnostics.
// Each kernel has a scalar reference implementation and, where the platform
// provides them, AVX2/FMA or NEON variants selected once at startup. The
// vector variants reassociate sums, so they agree with the scalar reference
// to rounding error, not bit-exactly; equivalence is tested in
// tests/test_kernels.cpp.
#pragma once

#include <cstddef>
#include <string_view>

namespace tact::kernels {

// Scalar reference kernels. Always available; the dispatcher and the
// equivalence tests both use them as ground truth.
namespace scalar {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double squared_norm(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
// Sum over t of (x[t]-mean)*(x[t+lag]-mean), t in [0, n-lag).
double autocovariance(const double* x, std::size_t n, double mean, std::size_t lag);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define TACT_KERNELS_HAVE_AVX2 1
namespace avx2 {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double squared_norm(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double autocovariance(const double* x, std::size_t n, double mean, std::size_t lag);
}  // namespace avx2
#else
#define TACT_KERNELS_HAVE_AVX2 0
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
#define TACT_KERNELS_HAVE_NEON 1
namespace neon {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double squared_norm(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double autocovariance(const double* x, std::size_t n, double mean, std::size_t lag);
}  // namespace neon
#else
#define TACT_KERNELS_HAVE_NEON 0
#endif

// Dispatched entry points. The implementation is chosen on first use from
// runtime CPU detection and stays fixed for the lifetime of the process.
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double squared_norm(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double autocovariance(const double* x, std::size_t n, double mean, std::size_t lag);

// Name of the active instruction set: "scalar", "avx2" or "neon".
std::string_view active_isa();

// Force a specific implementation (used by tests and the manifest writer).
// Returns false if the requested ISA is not usable on this machine.
bool select_isa(std::string_view name);

}  // namespace tact::kernels
