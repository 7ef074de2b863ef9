#include "hfrac/kernels.hpp"

namespace hfrac::kernels {
namespace {

void gather_differences_ref(const double* u, const int* lo, const int* hi,
                            const double* offset, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = u[hi[k]] - u[lo[k]] + (offset ? offset[k] : 0.0);
  }
}

double dot_ref(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

double weighted_sum_squares_ref(const double* w, const double* d, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += w[k] * d[k] * d[k];
  return s;
}

double weighted_cross_ref(const double* w, const double* d, const double* e,
                          std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += w[k] * d[k] * e[k];
  return s;
}

void scaled_product_ref(double s, const double* w, const double* d, double* out,
                        std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = s * w[k] * d[k];
}

void axpy_ref(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += a * x[k];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{gather_differences_ref, dot_ref, weighted_sum_squares_ref,
                             weighted_cross_ref,     scaled_product_ref, axpy_ref};
  return t;
}

}  // namespace hfrac::kernels
