#include "cno/kernels.hpp"

namespace cno::kern::detail {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double sumsq_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double sqdist_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double sqdist_scaled_scalar(const double* a, double c, const double* b,
                            std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - c * b[i];
    acc += d * d;
  }
  return acc;
}

void lincomb_scalar(double* out, double ca, const double* a, double cb,
                    const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = ca * a[i] + cb * b[i];
}

void axpy_scalar(double* y, double c, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += c * x[i];
}

void scale_scalar(double* x, double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= c;
}

}  // namespace

const Ops scalar_ops = {dot_scalar,     sum_scalar,  sumsq_scalar,
                        sqdist_scalar,  sqdist_scaled_scalar,
                        lincomb_scalar, axpy_scalar, scale_scalar};

}  // namespace cno::kern::detail
