#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

// Data-parallel inner loops behind the k-NN predictor. Each kernel has a
// scalar reference implementation and SIMD variants (AVX2 on x86-64, NEON on
// aarch64) selected once at runtime. The SIMD paths reassociate floating-point
// sums, so results may differ from scalar in the last few ulps; the
// equivalence tests pin that gap. Counting/entropy code stays scalar — it has
// to match the dense brute-force oracles to 1e-12.
namespace gdsl::kernels {

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);

// Backends usable on this CPU (scalar always included).
std::vector<Backend> supported_backends();

// Active backend. Resolved on first use: best supported, unless the
// GDSL_KERNELS environment variable ("scalar", "avx2", "neon") pins one.
Backend active_backend();

// Pin the backend explicitly (tests use this). Throws ParamError if the CPU
// does not support it.
void force_backend(Backend b);

// out[i] = sum_d (coords[d * n + i] - query[d])^2   for i in [0, n).
// coords holds dim coordinate blocks of length n each (structure-of-arrays).
void squared_distances(const double* coords, std::size_t n, std::size_t dim,
                       const double* query, double* out);

// out[i] = (in[i] - mean) / sd over the whole span. A nearly-constant input
// (sd < 1e-300) is centered only, so downstream distances see zeros instead
// of NaNs.
void zscore(std::span<const double> in, std::span<double> out);

} // namespace gdsl::kernels
