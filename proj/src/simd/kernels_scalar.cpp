#include "hipmdp/simd/kernels.hpp"

namespace hipmdp::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void affine_rows_scalar(std::size_t rows, std::size_t out, std::size_t in, const double* x,
                        const double* w, const double* bias, double* y) {
  for (std::size_t b = 0; b < rows; ++b) {
    const double* xb = x + b * in;
    double* yb = y + b * out;
    for (std::size_t o = 0; o < out; ++o) yb[o] = bias[o] + dot_scalar(w + o * in, xb, in);
  }
}

void accumulate_input_grad_scalar(std::size_t rows, std::size_t out, std::size_t in,
                                  const double* g, const double* w, double* gx) {
  for (std::size_t b = 0; b < rows; ++b) {
    for (std::size_t o = 0; o < out; ++o) {
      const double go = g[b * out + o];
      if (go != 0.0) axpy_scalar(go, w + o * in, gx + b * in, in);
    }
  }
}

void accumulate_weight_grad_scalar(std::size_t rows, std::size_t out, std::size_t in,
                                   const double* g, const double* x, double* gw) {
  for (std::size_t o = 0; o < out; ++o) {
    for (std::size_t b = 0; b < rows; ++b) {
      const double go = g[b * out + o];
      if (go != 0.0) axpy_scalar(go, x + b * in, gw + o * in, in);
    }
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",
                                 &dot_scalar,
                                 &axpy_scalar,
                                 &affine_rows_scalar,
                                 &accumulate_input_grad_scalar,
                                 &accumulate_weight_grad_scalar};
  return table;
}

}  // namespace hipmdp::simd
