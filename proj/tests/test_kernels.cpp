// Scalar reference vs dispatched SIMD kernels: equivalence on awkward sizes,
// plus basic algebraic identities.
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "tact/kernels.hpp"
#include "tact/rng.hpp"

using namespace tact;

namespace {

std::vector<double> random_vector(std::size_t n, RngStream& rng, double scale = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = scale * rng.normal();
    return v;
}

// Vector reductions reassociate; allow rounding slack proportional to the
// absolute-term magnitude.
void check_close(double got, double want, double magnitude) {
    CHECK(std::abs(got - want) <= 1e-12 * (magnitude + 1.0));
}

}  // namespace

TEST_CASE("kernels: scalar and dispatched implementations agree") {
    RngStream rng(42);
    const std::vector<std::size_t> sizes = {0, 1, 2, 3, 7, 8, 9, 15, 16, 33, 100, 1023, 10007};
    for (std::size_t n : sizes) {
        auto x = random_vector(n, rng, 2.0);
        auto y = random_vector(n, rng, 0.5);

        double mag = 0.0;
        for (double v : x) mag += std::abs(v);

        check_close(kernels::sum(x.data(), n), kernels::scalar::sum(x.data(), n), mag);
        check_close(kernels::dot(x.data(), y.data(), n),
                    kernels::scalar::dot(x.data(), y.data(), n), 2.0 * mag);
        check_close(kernels::squared_norm(x.data(), n),
                    kernels::scalar::squared_norm(x.data(), n), 4.0 * mag);

        auto y1 = y;
        auto y2 = y;
        kernels::axpy(0.37, x.data(), y1.data(), n);
        kernels::scalar::axpy(0.37, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));

        if (n >= 4) {
            const double mean = kernels::scalar::sum(x.data(), n) / double(n);
            for (std::size_t lag : {std::size_t{0}, std::size_t{1}, std::size_t{3}, n / 2}) {
                check_close(kernels::autocovariance(x.data(), n, mean, lag),
                            kernels::scalar::autocovariance(x.data(), n, mean, lag),
                            4.0 * mag);
            }
        }
    }
}

TEST_CASE("kernels: algebraic identities") {
    RngStream rng(7);
    auto x = random_vector(257, rng);
    auto y = random_vector(257, rng);

    CHECK(kernels::dot(x.data(), y.data(), x.size()) ==
          doctest::Approx(kernels::dot(y.data(), x.data(), x.size())));
    CHECK(kernels::squared_norm(x.data(), x.size()) ==
          doctest::Approx(kernels::dot(x.data(), x.data(), x.size())));

    // autocovariance at lag 0 is the centered sum of squares
    const double mean = kernels::sum(x.data(), x.size()) / double(x.size());
    double ssq = 0.0;
    for (double v : x) ssq += (v - mean) * (v - mean);
    CHECK(kernels::autocovariance(x.data(), x.size(), mean, 0) == doctest::Approx(ssq));

    // axpy with a = 0 is a no-op
    auto y0 = y;
    kernels::axpy(0.0, x.data(), y0.data(), y0.size());
    CHECK(y0 == y);
}

TEST_CASE("kernels: ISA selection is reported and reversible") {
    const std::string original(kernels::active_isa());
    REQUIRE(kernels::select_isa("scalar"));
    CHECK(kernels::active_isa() == "scalar");
    CHECK(kernels::select_isa("definitely-not-an-isa") == false);
    REQUIRE(kernels::select_isa(original));
    CHECK(kernels::active_isa() == original);
}
