#pragma once
// Dense complex vector kernels used by the propagation hot path.
//
// A scalar reference implementation is always available.  On x86-64 an
// AVX2+FMA variant is compiled in and selected at runtime when the CPU
// supports it.  The selection can be overridden with the environment
// variable CAVTEL_KERNELS=scalar|avx2 or programmatically (tests compare
// the two implementations against each other).

#include <complex>
#include <cstddef>
#include <string_view>

namespace cavtel::kernels {

using Cplx = std::complex<double>;

enum class Backend { Scalar, Avx2 };

// y = A x with A a dense row-major n x n complex matrix.
void matvec(const Cplx* a, const Cplx* x, Cplx* y, std::size_t n);
// Sum of |x_i|^2.
double norm2(const Cplx* x, std::size_t n);
// y += s x.
void axpy(Cplx s, const Cplx* x, Cplx* y, std::size_t n);
// x *= s.
void scale(Cplx s, Cplx* x, std::size_t n);

Backend active_backend();
std::string_view backend_name();
// Returns false (and leaves the selection unchanged) if the requested
// backend is not available on this machine.
bool set_backend(Backend b);
bool avx2_available();

namespace detail {
void matvec_scalar(const Cplx* a, const Cplx* x, Cplx* y, std::size_t n);
double norm2_scalar(const Cplx* x, std::size_t n);
void axpy_scalar(Cplx s, const Cplx* x, Cplx* y, std::size_t n);
void scale_scalar(Cplx s, Cplx* x, std::size_t n);
#if defined(CAVTEL_HAVE_AVX2)
void matvec_avx2(const Cplx* a, const Cplx* x, Cplx* y, std::size_t n);
double norm2_avx2(const Cplx* x, std::size_t n);
void axpy_avx2(Cplx s, const Cplx* x, Cplx* y, std::size_t n);
void scale_avx2(Cplx s, Cplx* x, std::size_t n);
#endif
}  // namespace detail

}  // namespace cavtel::kernels
