#pragma once
// Vector arithmetic kernels used by the hot loops (mixture responsibilities,
// similarity matrices, latent updates). Scalar reference implementations are
// always available; an AVX2 variant is selected at runtime when the CPU
// supports it. Elementwise kernels are bit-identical across backends;
// reductions may differ in the last ulps due to lane-wise accumulation.

#include <cstddef>
#include <span>
#include <string_view>

namespace cno::kern {

enum class Backend { scalar, avx2 };

// Active backend. Resolved once from CPU features; can be pinned (tests,
// reproducibility experiments) before first use or at any point after.
Backend active_backend();
void force_backend(Backend b);
std::string_view backend_name();

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double sumsq(std::span<const double> a);
// Squared Euclidean distance sum((a-b)^2).
double sqdist(std::span<const double> a, std::span<const double> b);
// sum((a[i] - c*b[i])^2), the distance to a scaled mean without a temporary.
double sqdist_scaled(std::span<const double> a, double c, std::span<const double> b);
// out[i] = ca*a[i] + cb*b[i]
void lincomb(std::span<double> out, double ca, std::span<const double> a,
             double cb, std::span<const double> b);
// y[i] += c*x[i]
void axpy(std::span<double> y, double c, std::span<const double> x);
// x[i] *= c
void scale(std::span<double> x, double c);

namespace detail {
struct Ops {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*sumsq)(const double*, std::size_t);
  double (*sqdist)(const double*, const double*, std::size_t);
  double (*sqdist_scaled)(const double*, double, const double*, std::size_t);
  void (*lincomb)(double*, double, const double*, double, const double*, std::size_t);
  void (*axpy)(double*, double, const double*, std::size_t);
  void (*scale)(double*, double, std::size_t);
};
extern const Ops scalar_ops;
#if defined(__x86_64__) || defined(_M_X64)
extern const Ops avx2_ops;
#endif
}  // namespace detail

}  // namespace cno::kern
