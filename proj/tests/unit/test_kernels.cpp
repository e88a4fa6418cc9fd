#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gemsec/kernels.hpp"

using namespace gemsec::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

std::vector<const KernelTable*> simd_tables() {
    std::vector<const KernelTable*> out;
    if (cpu_supports(Backend::avx2)) out.push_back(avx2_table());
    if (cpu_supports(Backend::neon)) out.push_back(neon_table());
    return out;
}

// FMA contraction changes the last bits only.
void check_close(double a, double b, double scale) { CHECK(std::abs(a - b) <= 1e-13 * std::max(1.0, scale)); }

}  // namespace

TEST_CASE("scalar table is always available") {
    CHECK(cpu_supports(Backend::scalar));
    CHECK(scalar_table().backend == Backend::scalar);
    double a[3] = {1, 2, 3}, b[3] = {4, 5, 6};
    CHECK(scalar_table().dot(a, b, 3) == 32.0);
    CHECK(scalar_table().squared_distance(a, b, 3) == 27.0);
}

TEST_CASE("backend names round-trip") {
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) CHECK(parse_backend(backend_name(b)) == b);
    CHECK_THROWS_AS(parse_backend("sse9"), std::invalid_argument);
}

TEST_CASE("set_backend switches the active table and reset restores the default") {
    set_backend(Backend::scalar);
    CHECK(active().backend == Backend::scalar);
    reset_backend();
    if (std::getenv("GEMSEC_KERNEL") == nullptr) {
        const bool wide = cpu_supports(Backend::avx2) || cpu_supports(Backend::neon);
        CHECK((active().backend != Backend::scalar) == wide);
    }
    for (Backend b : {Backend::avx2, Backend::neon})
        if (!cpu_supports(b)) CHECK_THROWS_AS(set_backend(b), std::invalid_argument);
}

TEST_CASE("SIMD kernels agree with the scalar reference on every length and alignment") {
    const auto tables = simd_tables();
    if (tables.empty()) {
        MESSAGE("no SIMD backend on this machine; only the scalar path is exercised");
        return;
    }
    std::mt19937_64 rng(11);
    const KernelTable& ref = scalar_table();
    for (const KernelTable* t : tables) {
        CAPTURE(backend_name(t->backend));
        for (std::size_t n = 0; n <= 67; ++n) {
            for (std::size_t offset = 0; offset < 3; ++offset) {
                CAPTURE(n);
                CAPTURE(offset);
                auto a = random_vector(n + offset, rng);
                auto b = random_vector(n + offset, rng);
                const double* pa = a.data() + offset;
                const double* pb = b.data() + offset;

                double scale = 0.0;
                for (std::size_t i = 0; i < n; ++i) scale += std::abs(pa[i] * pb[i]);
                check_close(t->dot(pa, pb, n), ref.dot(pa, pb, n), scale);
                double dscale = 0.0;
                for (std::size_t i = 0; i < n; ++i) dscale += (pa[i] - pb[i]) * (pa[i] - pb[i]);
                check_close(t->squared_distance(pa, pb, n), ref.squared_distance(pa, pb, n), dscale);

                auto y1 = random_vector(n + offset, rng);
                auto y2 = y1;
                t->axpy(0.37, pa, y1.data() + offset, n);
                ref.axpy(0.37, pa, y2.data() + offset, n);
                for (std::size_t i = 0; i < y1.size(); ++i) check_close(y1[i], y2[i], 4.0);

                y2 = y1;
                t->axpy_diff(-1.3, pa, pb, y1.data() + offset, n);
                ref.axpy_diff(-1.3, pa, pb, y2.data() + offset, n);
                for (std::size_t i = 0; i < y1.size(); ++i) check_close(y1[i], y2[i], 8.0);
            }
        }
    }
}

TEST_CASE("SIMD Adam step is bit-identical to the scalar reference") {
    const auto tables = simd_tables();
    std::mt19937_64 rng(5);
    const AdamCoefficients c{0.9, 0.999, 1e-8, 0.01, 1.0 - std::pow(0.9, 7.0), 1.0 - std::pow(0.999, 7.0)};
    for (const KernelTable* t : tables) {
        for (std::size_t n : {1u, 3u, 4u, 7u, 16u, 33u}) {
            auto p1 = random_vector(n, rng), m1 = random_vector(n, rng), g = random_vector(n, rng);
            auto v1 = random_vector(n, rng);
            for (double& x : v1) x = std::abs(x);
            auto p2 = p1, m2 = m1, v2 = v1;
            t->adam_step(p1.data(), m1.data(), v1.data(), g.data(), n, c);
            scalar_table().adam_step(p2.data(), m2.data(), v2.data(), g.data(), n, c);
            CHECK(p1 == p2);
            CHECK(m1 == m2);
            CHECK(v1 == v2);
        }
    }
}

TEST_CASE("span wrappers use the active table") {
    std::vector<double> a{1, 2}, b{3, 4}, y{0, 0};
    CHECK(dot(a, b) == doctest::Approx(11.0));
    CHECK(squared_distance(a, b) == doctest::Approx(8.0));
    axpy(2.0, a, y);
    CHECK(y == std::vector<double>{2, 4});
    axpy_diff(1.0, b, a, y);
    CHECK(y == std::vector<double>{4, 6});
}
