#include "gemsec/kernels.hpp"

#include <cmath>

namespace gemsec::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_diff_scalar(double alpha, const double* a, const double* b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * (a[i] - b[i]);
}

void adam_step_scalar(double* param, double* m, double* v, const double* grad, std::size_t n,
                      const AdamCoefficients& c) {
    const double one_minus_b1 = 1.0 - c.beta1;
    const double one_minus_b2 = 1.0 - c.beta2;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grad[i];
        m[i] = c.beta1 * m[i] + one_minus_b1 * g;
        v[i] = c.beta2 * v[i] + one_minus_b2 * (g * g);
        const double m_hat = m[i] / c.bias_correction1;
        const double v_hat = v[i] / c.bias_correction2;
        param[i] -= c.step_size * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{Backend::scalar,  dot_scalar,      squared_distance_scalar,
                                   axpy_scalar,      axpy_diff_scalar, adam_step_scalar};
    return table;
}

}  // namespace gemsec::kernels
