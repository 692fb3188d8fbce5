#include "gdsl/kernels.hpp"

#include "gdsl/errors.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(_M_X64)
#define GDSL_X86 1
#include <immintrin.h>
#else
#define GDSL_X86 0
#endif

#if defined(__aarch64__)
#define GDSL_NEON 1
#include <arm_neon.h>
#else
#define GDSL_NEON 0
#endif

namespace gdsl::kernels {

namespace {

// ---------------------------------------------------------------------------
// Scalar reference kernels
// ---------------------------------------------------------------------------

void squared_distances_scalar(const double* coords, std::size_t n, std::size_t dim,
                              const double* query, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        const double* col = coords + d * n;
        const double q = query[d];
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = col[i] - q;
            out[i] += diff * diff;
        }
    }
}

void mean_var_scalar(const double* in, std::size_t n, double& mean, double& var) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += in[i];
    mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = in[i] - mean;
        ss += d * d;
    }
    var = ss / static_cast<double>(n);
}

void affine_scalar(const double* in, std::size_t n, double shift, double scale, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (in[i] - shift) * scale;
}

// ---------------------------------------------------------------------------
// AVX2 kernels (x86-64 only; guarded by runtime cpuid check)
// ---------------------------------------------------------------------------

#if GDSL_X86

__attribute__((target("avx2,fma"))) void squared_distances_avx2(
    const double* coords, std::size_t n, std::size_t dim, const double* query, double* out) {
    std::memset(out, 0, n * sizeof(double));
    for (std::size_t d = 0; d < dim; ++d) {
        const double* col = coords + d * n;
        const __m256d q = _mm256_set1_pd(query[d]);
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4) {
            const __m256d x = _mm256_loadu_pd(col + i);
            const __m256d diff = _mm256_sub_pd(x, q);
            const __m256d acc = _mm256_loadu_pd(out + i);
            _mm256_storeu_pd(out + i, _mm256_fmadd_pd(diff, diff, acc));
        }
        for (; i < n; ++i) {
            const double diff = col[i] - query[d];
            out[i] += diff * diff;
        }
    }
}

__attribute__((target("avx2,fma"))) void mean_var_avx2(const double* in, std::size_t n,
                                                       double& mean, double& var) {
    __m256d vsum = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) vsum = _mm256_add_pd(vsum, _mm256_loadu_pd(in + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vsum);
    double sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) sum += in[i];
    mean = sum / static_cast<double>(n);

    const __m256d vmean = _mm256_set1_pd(mean);
    __m256d vss = _mm256_setzero_pd();
    i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(in + i), vmean);
        vss = _mm256_fmadd_pd(d, d, vss);
    }
    _mm256_store_pd(lanes, vss);
    double ss = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) {
        const double d = in[i] - mean;
        ss += d * d;
    }
    var = ss / static_cast<double>(n);
}

__attribute__((target("avx2,fma"))) void affine_avx2(const double* in, std::size_t n,
                                                     double shift, double scale, double* out) {
    const __m256d vshift = _mm256_set1_pd(shift);
    const __m256d vscale = _mm256_set1_pd(scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_sub_pd(_mm256_loadu_pd(in + i), vshift);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(x, vscale));
    }
    for (; i < n; ++i) out[i] = (in[i] - shift) * scale;
}

#endif // GDSL_X86

// ---------------------------------------------------------------------------
// NEON kernels (aarch64)
// ---------------------------------------------------------------------------

#if GDSL_NEON

void squared_distances_neon(const double* coords, std::size_t n, std::size_t dim,
                            const double* query, double* out) {
    std::memset(out, 0, n * sizeof(double));
    for (std::size_t d = 0; d < dim; ++d) {
        const double* col = coords + d * n;
        const float64x2_t q = vdupq_n_f64(query[d]);
        std::size_t i = 0;
        for (; i + 2 <= n; i += 2) {
            const float64x2_t diff = vsubq_f64(vld1q_f64(col + i), q);
            vst1q_f64(out + i, vfmaq_f64(vld1q_f64(out + i), diff, diff));
        }
        for (; i < n; ++i) {
            const double diff = col[i] - query[d];
            out[i] += diff * diff;
        }
    }
}

void mean_var_neon(const double* in, std::size_t n, double& mean, double& var) {
    float64x2_t vsum = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vsum = vaddq_f64(vsum, vld1q_f64(in + i));
    double sum = vgetq_lane_f64(vsum, 0) + vgetq_lane_f64(vsum, 1);
    for (; i < n; ++i) sum += in[i];
    mean = sum / static_cast<double>(n);

    const float64x2_t vmean = vdupq_n_f64(mean);
    float64x2_t vss = vdupq_n_f64(0.0);
    i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(in + i), vmean);
        vss = vfmaq_f64(vss, d, d);
    }
    double ss = vgetq_lane_f64(vss, 0) + vgetq_lane_f64(vss, 1);
    for (; i < n; ++i) {
        const double d = in[i] - mean;
        ss += d * d;
    }
    var = ss / static_cast<double>(n);
}

void affine_neon(const double* in, std::size_t n, double shift, double scale, double* out) {
    const float64x2_t vshift = vdupq_n_f64(shift);
    const float64x2_t vscale = vdupq_n_f64(scale);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t x = vsubq_f64(vld1q_f64(in + i), vshift);
        vst1q_f64(out + i, vmulq_f64(x, vscale));
    }
    for (; i < n; ++i) out[i] = (in[i] - shift) * scale;
}

#endif // GDSL_NEON

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

bool backend_supported(Backend b) {
    switch (b) {
    case Backend::scalar:
        return true;
    case Backend::avx2:
#if GDSL_X86
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Backend::neon:
        return GDSL_NEON != 0;
    }
    return false;
}

Backend detect_backend() {
    if (const char* env = std::getenv("GDSL_KERNELS")) {
        const std::string name(env);
        for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
            if (name == backend_name(b)) {
                if (!backend_supported(b))
                    throw ParamError("GDSL_KERNELS requests unsupported backend: " + name);
                return b;
            }
        }
        throw ParamError("GDSL_KERNELS: unknown backend name: " + name);
    }
    if (backend_supported(Backend::avx2)) return Backend::avx2;
    if (backend_supported(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

std::atomic<Backend>& backend_slot() {
    static std::atomic<Backend> slot{detect_backend()};
    return slot;
}

} // namespace

const char* backend_name(Backend b) {
    switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
    }
    return "unknown";
}

std::vector<Backend> supported_backends() {
    std::vector<Backend> out;
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon})
        if (backend_supported(b)) out.push_back(b);
    return out;
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void force_backend(Backend b) {
    if (!backend_supported(b))
        throw ParamError(std::string("kernel backend not supported on this CPU: ") + backend_name(b));
    backend_slot().store(b, std::memory_order_relaxed);
}

void squared_distances(const double* coords, std::size_t n, std::size_t dim,
                       const double* query, double* out) {
    switch (active_backend()) {
#if GDSL_X86
    case Backend::avx2:
        squared_distances_avx2(coords, n, dim, query, out);
        return;
#endif
#if GDSL_NEON
    case Backend::neon:
        squared_distances_neon(coords, n, dim, query, out);
        return;
#endif
    default:
        squared_distances_scalar(coords, n, dim, query, out);
        return;
    }
}

void zscore(std::span<const double> in, std::span<double> out) {
    if (in.size() != out.size()) throw ParamError("zscore: size mismatch");
    if (in.empty()) return;
    const std::size_t n = in.size();
    double mean = 0.0, var = 0.0;
    const Backend b = active_backend();
    switch (b) {
#if GDSL_X86
    case Backend::avx2:
        mean_var_avx2(in.data(), n, mean, var);
        break;
#endif
#if GDSL_NEON
    case Backend::neon:
        mean_var_neon(in.data(), n, mean, var);
        break;
#endif
    default:
        mean_var_scalar(in.data(), n, mean, var);
        break;
    }
    const double sd = std::sqrt(var);
    const double scale = sd < 1e-300 ? 1.0 : 1.0 / sd;
    switch (b) {
#if GDSL_X86
    case Backend::avx2:
        affine_avx2(in.data(), n, mean, scale, out.data());
        return;
#endif
#if GDSL_NEON
    case Backend::neon:
        affine_neon(in.data(), n, mean, scale, out.data());
        return;
#endif
    default:
        affine_scalar(in.data(), n, mean, scale, out.data());
        return;
    }
}

} // namespace gdsl::kernels
