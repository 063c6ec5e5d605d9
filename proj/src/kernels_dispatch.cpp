#include "cno/kernels.hpp"

namespace cno::kern {

namespace {

Backend detect() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return Backend::avx2;
#endif
  return Backend::scalar;
}

Backend g_backend = detect();

const detail::Ops& ops() {
#if defined(__x86_64__) || defined(_M_X64)
  if (g_backend == Backend::avx2) return detail::avx2_ops;
#endif
  return detail::scalar_ops;
}

}  // namespace

Backend active_backend() { return g_backend; }

void force_backend(Backend b) {
#if !defined(__x86_64__) && !defined(_M_X64)
  b = Backend::scalar;
#endif
  if (b == Backend::avx2 && detect() != Backend::avx2) b = Backend::scalar;
  g_backend = b;
}

std::string_view backend_name() {
  return g_backend == Backend::avx2 ? "avx2" : "scalar";
}

double dot(std::span<const double> a, std::span<const double> b) {
  return ops().dot(a.data(), b.data(), a.size());
}
double sum(std::span<const double> a) { return ops().sum(a.data(), a.size()); }
double sumsq(std::span<const double> a) { return ops().sumsq(a.data(), a.size()); }
double sqdist(std::span<const double> a, std::span<const double> b) {
  return ops().sqdist(a.data(), b.data(), a.size());
}
double sqdist_scaled(std::span<const double> a, double c, std::span<const double> b) {
  return ops().sqdist_scaled(a.data(), c, b.data(), a.size());
}
void lincomb(std::span<double> out, double ca, std::span<const double> a,
             double cb, std::span<const double> b) {
  ops().lincomb(out.data(), ca, a.data(), cb, b.data(), out.size());
}
void axpy(std::span<double> y, double c, std::span<const double> x) {
  ops().axpy(y.data(), c, x.data(), y.size());
}
void scale(std::span<double> x, double c) { ops().scale(x.data(), c, x.size()); }

}  // namespace cno::kern
