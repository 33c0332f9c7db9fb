#include "cavtel/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace cavtel::kernels {

namespace detail {

void matvec_scalar(const Cplx* a, const Cplx* x, Cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const Cplx* row = a + i * n;
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double ar = row[j].real(), ai = row[j].imag();
      const double xr = x[j].real(), xi = x[j].imag();
      re += ar * xr - ai * xi;
      im += ar * xi + ai * xr;
    }
    y[i] = Cplx(re, im);
  }
}

double norm2_scalar(const Cplx* x, std::size_t n) {
  double s = 0.0;
  const double* d = reinterpret_cast<const double*>(x);
  for (std::size_t i = 0; i < 2 * n; ++i) s += d[i] * d[i];
  return s;
}

void axpy_scalar(Cplx s, const Cplx* x, Cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += s * x[i];
}

void scale_scalar(Cplx s, Cplx* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

}  // namespace detail

namespace {

struct Vtable {
  void (*matvec)(const Cplx*, const Cplx*, Cplx*, std::size_t);
  double (*norm2)(const Cplx*, std::size_t);
  void (*axpy)(Cplx, const Cplx*, Cplx*, std::size_t);
  void (*scale)(Cplx, Cplx*, std::size_t);
  Backend backend;
};

constexpr Vtable kScalar{detail::matvec_scalar, detail::norm2_scalar,
                         detail::axpy_scalar, detail::scale_scalar,
                         Backend::Scalar};
#if defined(CAVTEL_HAVE_AVX2)
constexpr Vtable kAvx2{detail::matvec_avx2, detail::norm2_avx2,
                       detail::axpy_avx2, detail::scale_avx2, Backend::Avx2};
#endif

bool cpu_has_avx2() {
#if defined(CAVTEL_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Vtable* pick_default() {
#if defined(CAVTEL_HAVE_AVX2)
  const char* env = std::getenv("CAVTEL_KERNELS");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return &kScalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return &kAvx2;
  }
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

const Vtable*& active() {
  static const Vtable* v = pick_default();
  return v;
}

}  // namespace

void matvec(const Cplx* a, const Cplx* x, Cplx* y, std::size_t n) {
  active()->matvec(a, x, y, n);
}
double norm2(const Cplx* x, std::size_t n) { return active()->norm2(x, n); }
void axpy(Cplx s, const Cplx* x, Cplx* y, std::size_t n) {
  active()->axpy(s, x, y, n);
}
void scale(Cplx s, Cplx* x, std::size_t n) { active()->scale(s, x, n); }

Backend active_backend() { return active()->backend; }

std::string_view backend_name() {
  return active()->backend == Backend::Avx2 ? "avx2" : "scalar";
}

bool avx2_available() { return cpu_has_avx2(); }

bool set_backend(Backend b) {
  if (b == Backend::Scalar) {
    active() = &kScalar;
    return true;
  }
#if defined(CAVTEL_HAVE_AVX2)
  if (b == Backend::Avx2 && cpu_has_avx2()) {
    active() = &kAvx2;
    return true;
  }
#endif
  return false;
}

}  // namespace cavtel::kernels
