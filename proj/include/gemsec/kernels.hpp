#pragma once

// Dense vector kernels used by the inner training loop.
//
// Every kernel has a scalar reference implementation. SIMD variants (AVX2+FMA
// on x86-64, NEON on AArch64) are compiled into separate translation units and
// selected once at runtime. The active backend can be forced with the
// GEMSEC_KERNEL environment variable (scalar | avx2 | neon) or with
// set_backend().

#include <cstddef>
#include <span>
#include <string_view>

namespace gemsec::kernels {

enum class Backend { scalar, avx2, neon };

struct AdamCoefficients {
    double beta1;
    double beta2;
    double epsilon;
    double step_size;
    double bias_correction1;  // 1 - beta1^t
    double bias_correction2;  // 1 - beta2^t
};

struct KernelTable {
    Backend backend;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // y += alpha * (a - b)
    void (*axpy_diff)(double alpha, const double* a, const double* b, double* y, std::size_t n);
    void (*adam_step)(double* param, double* m, double* v, const double* grad, std::size_t n,
                      const AdamCoefficients& c);
};

const KernelTable& scalar_table();
// Null when the backend was not compiled in for this target.
const KernelTable* avx2_table();
const KernelTable* neon_table();

bool cpu_supports(Backend b);

// Returns the table in use. Selected on first call.
const KernelTable& active();

// Throws std::invalid_argument if the backend is unavailable on this machine.
void set_backend(Backend b);
// Back to the default choice: GEMSEC_KERNEL if set, else the widest supported.
void reset_backend();

std::string_view backend_name(Backend b);
Backend parse_backend(std::string_view name);  // throws std::invalid_argument

// span wrappers over the active table

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    return active().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), y.size());
}

inline void axpy_diff(double alpha, std::span<const double> a, std::span<const double> b,
                      std::span<double> y) {
    active().axpy_diff(alpha, a.data(), b.data(), y.data(), y.size());
}

}  // namespace gemsec::kernels
