#include "gemsec/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace gemsec::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double squared_distance_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        acc = vfmaq_f64(acc, d, d);
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_diff_neon(double alpha, const double* a, const double* b, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, d));
    }
    for (; i < n; ++i) y[i] += alpha * (a[i] - b[i]);
}

void adam_step_neon(double* param, double* m, double* v, const double* grad, std::size_t n,
                    const AdamCoefficients& c) {
    const float64x2_t b1 = vdupq_n_f64(c.beta1);
    const float64x2_t b2 = vdupq_n_f64(c.beta2);
    const float64x2_t omb1 = vdupq_n_f64(1.0 - c.beta1);
    const float64x2_t omb2 = vdupq_n_f64(1.0 - c.beta2);
    const float64x2_t bc1 = vdupq_n_f64(c.bias_correction1);
    const float64x2_t bc2 = vdupq_n_f64(c.bias_correction2);
    const float64x2_t eps = vdupq_n_f64(c.epsilon);
    const float64x2_t lr = vdupq_n_f64(c.step_size);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t g = vld1q_f64(grad + i);
        const float64x2_t mi = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(omb1, g));
        const float64x2_t vi = vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)), vmulq_f64(omb2, vmulq_f64(g, g)));
        vst1q_f64(m + i, mi);
        vst1q_f64(v + i, vi);
        const float64x2_t m_hat = vdivq_f64(mi, bc1);
        const float64x2_t v_hat = vdivq_f64(vi, bc2);
        const float64x2_t step = vdivq_f64(vmulq_f64(lr, m_hat), vaddq_f64(vsqrtq_f64(v_hat), eps));
        vst1q_f64(param + i, vsubq_f64(vld1q_f64(param + i), step));
    }
    for (; i < n; ++i) {
        const double gi = grad[i];
        m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * gi;
        v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * (gi * gi);
        const double m_hat = m[i] / c.bias_correction1;
        const double v_hat = v[i] / c.bias_correction2;
        param[i] -= c.step_size * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
}

}  // namespace

const KernelTable* neon_table() {
    static const KernelTable table{Backend::neon, dot_neon,       squared_distance_neon,
                                   axpy_neon,     axpy_diff_neon, adam_step_neon};
    return &table;
}

}  // namespace gemsec::kernels

#else

namespace gemsec::kernels {
const KernelTable* neon_table() { return nullptr; }
}  // namespace gemsec::kernels

#endif
