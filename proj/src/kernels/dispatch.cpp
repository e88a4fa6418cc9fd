#include "gemsec/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace gemsec::kernels {
namespace {

const KernelTable* table_for(Backend b) {
    switch (b) {
        case Backend::scalar: return &scalar_table();
        case Backend::avx2: return avx2_table();
        case Backend::neon: return neon_table();
    }
    return nullptr;
}

const KernelTable* select_default() {
    if (const char* forced = std::getenv("GEMSEC_KERNEL"); forced != nullptr && *forced != '\0') {
        const Backend b = parse_backend(forced);
        if (!cpu_supports(b)) {
            throw std::invalid_argument("GEMSEC_KERNEL=" + std::string(forced) +
                                        " is not supported on this machine");
        }
        return table_for(b);
    }
    if (cpu_supports(Backend::avx2)) return avx2_table();
    if (cpu_supports(Backend::neon)) return neon_table();
    return &scalar_table();
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

bool cpu_supports(Backend b) {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return avx2_table() != nullptr && __builtin_cpu_supports("avx2") &&
                   __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::neon: return neon_table() != nullptr;
    }
    return false;
}

const KernelTable& active() {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (t == nullptr) {
        t = select_default();
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

void set_backend(Backend b) {
    if (!cpu_supports(b)) {
        throw std::invalid_argument("kernel backend '" + std::string(backend_name(b)) +
                                    "' is not available on this machine");
    }
    g_active.store(table_for(b), std::memory_order_release);
}

void reset_backend() { g_active.store(select_default(), std::memory_order_release); }

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "unknown";
}

Backend parse_backend(std::string_view name) {
    if (name == "scalar") return Backend::scalar;
    if (name == "avx2") return Backend::avx2;
    if (name == "neon") return Backend::neon;
    throw std::invalid_argument("unknown kernel backend '" + std::string(name) + "'");
}

}  // namespace gemsec::kernels
