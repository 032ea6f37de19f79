#pragma once

#include <cstddef>
#include <string_view>

// Dense double-precision kernels behind the MLP. Every kernel has a scalar
// reference; vector variants must agree with it to rounding (see
// tests/unit/test_simd.cpp). Matrices are row-major.

namespace hipmdp::simd {

struct KernelTable {
  std::string_view name;

  double (*dot)(const double* a, const double* b, std::size_t n);

  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // Y[b][o] = bias[o] + sum_i X[b][i] * W[o][i]      (X: rows x in, W: out x in)
  void (*affine_rows)(std::size_t rows, std::size_t out, std::size_t in, const double* x,
                      const double* w, const double* bias, double* y);

  // GX[b][i] += sum_o G[b][o] * W[o][i]              (input gradient)
  void (*accumulate_input_grad)(std::size_t rows, std::size_t out, std::size_t in,
                                const double* g, const double* w, double* gx);

  // GW[o][i] += sum_b G[b][o] * X[b][i]              (weight gradient)
  void (*accumulate_weight_grad)(std::size_t rows, std::size_t out, std::size_t in,
                                 const double* g, const double* x, double* gw);
};

const KernelTable& scalar_kernels();

/// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_kernels();

/// Kernel set used by ndcore. Chosen once per process: AVX2+FMA when the CPU
/// supports it, scalar otherwise. HIPMDP_SIMD=scalar in the environment
/// forces the reference path.
const KernelTable& active();

}  // namespace hipmdp::simd
