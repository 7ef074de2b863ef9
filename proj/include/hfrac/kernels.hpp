#pragma once

// Data-parallel inner loops of the lattice energies. Each kernel has a scalar
// reference implementation and, where the CPU supports it, an AVX2 variant.
// The variant is picked once at first use; set HFRAC_SIMD=scalar to force the
// reference path.

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>

namespace hfrac::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  /// out[k] = u[hi[k]] - u[lo[k]] + offset[k]; offset may be null.
  void (*gather_differences)(const double* u, const int* lo, const int* hi,
                             const double* offset, double* out, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// sum w[k] * d[k]^2
  double (*weighted_sum_squares)(const double* w, const double* d, std::size_t n);
  /// sum w[k] * d[k] * e[k]
  double (*weighted_cross)(const double* w, const double* d, const double* e,
                           std::size_t n);
  /// out[k] = s * w[k] * d[k]
  void (*scaled_product)(double s, const double* w, const double* d, double* out,
                         std::size_t n);
  /// y[k] += a * x[k]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif

bool isa_available(Isa isa);
std::string_view isa_name(Isa isa);
const KernelTable& table(Isa isa);

/// ISA used by the convenience wrappers below.
Isa active_isa();
const KernelTable& active();

inline void gather_differences(std::span<const double> u, std::span<const int> lo,
                               std::span<const int> hi, std::span<const double> offset,
                               std::span<double> out) {
  assert(lo.size() == out.size() && hi.size() == out.size());
  assert(offset.empty() || offset.size() == out.size());
  active().gather_differences(u.data(), lo.data(), hi.data(),
                              offset.empty() ? nullptr : offset.data(), out.data(),
                              out.size());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

inline double weighted_sum_squares(std::span<const double> w, std::span<const double> d) {
  assert(w.size() == d.size());
  return active().weighted_sum_squares(w.data(), d.data(), w.size());
}

inline double weighted_cross(std::span<const double> w, std::span<const double> d,
                             std::span<const double> e) {
  assert(w.size() == d.size() && d.size() == e.size());
  return active().weighted_cross(w.data(), d.data(), e.data(), w.size());
}

inline void scaled_product(double s, std::span<const double> w, std::span<const double> d,
                           std::span<double> out) {
  assert(w.size() == d.size() && d.size() == out.size());
  active().scaled_product(s, w.data(), d.data(), out.data(), out.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(a, x.data(), y.data(), x.size());
}

}  // namespace hfrac::kernels
