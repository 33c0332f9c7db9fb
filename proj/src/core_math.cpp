#include "cavtel/core_math.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace cavtel {

namespace {
int dim_for(int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  return 9 * (n_max + 1) * (n_max + 1);
}
}  // namespace

JointState::JointState(int n_max_photons)
    : n_max(n_max_photons), amp(dim_for(n_max_photons), Cplx(0.0, 0.0)) {}

int JointState::index(int j_a, int n_a, int j_b, int n_b) const {
  return ((j_a * (n_max + 1) + n_a) * 3 + j_b) * (n_max + 1) + n_b;
}

Cplx& JointState::at(int j_a, int n_a, int j_b, int n_b) {
  return amp[index(j_a, n_a, j_b, n_b)];
}

const Cplx& JointState::at(int j_a, int n_a, int j_b, int n_b) const {
  return amp[index(j_a, n_a, j_b, n_b)];
}

double JointState::norm2() const {
  return kernels::norm2(amp.data(), amp.size());
}

void JointState::normalize() {
  const double n2 = norm2();
  if (!(n2 > 1e-300)) throw std::runtime_error("state norm underflow");
  kernels::scale(Cplx(1.0 / std::sqrt(n2), 0.0), amp.data(), amp.size());
}

Operator Operator::zero(int n_max_photons) {
  Operator o;
  o.n_max = n_max_photons;
  o.dim = dim_for(n_max_photons);
  o.m.assign(std::size_t(o.dim) * o.dim, Cplx(0.0, 0.0));
  return o;
}

Operator Operator::identity(int n_max_photons) {
  Operator o = zero(n_max_photons);
  for (int i = 0; i < o.dim; ++i) o.at(i, i) = 1.0;
  return o;
}

Operator& Operator::add_scaled(Cplx s, const Operator& o) {
  if (o.dim != dim) throw std::invalid_argument("operator dim mismatch");
  kernels::axpy(s, o.m.data(), m.data(), m.size());
  return *this;
}

Operator Operator::dagger() const {
  Operator o = zero(n_max);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) o.at(j, i) = std::conj(at(i, j));
  return o;
}

Operator Operator::operator*(const Operator& o) const {
  if (o.dim != dim) throw std::invalid_argument("operator dim mismatch");
  Operator r = zero(n_max);
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k) {
      const Cplx a = at(i, k);
      if (a == Cplx(0.0, 0.0)) continue;
      for (int j = 0; j < dim; ++j) r.at(i, j) += a * o.at(k, j);
    }
  return r;
}

void Operator::apply(const JointState& in, JointState& out) const {
  if (in.dim() != dim) throw std::invalid_argument("state dim mismatch");
  if (out.dim() != dim) out = JointState(n_max);
  kernels::matvec(m.data(), in.amp.data(), out.amp.data(), std::size_t(dim));
}

JointState Operator::apply(const JointState& in) const {
  JointState out(n_max);
  apply(in, out);
  return out;
}

double Operator::max_abs() const {
  double v = 0.0;
  for (const Cplx& c : m) v = std::max(v, std::abs(c));
  return v;
}

Operator build_flip(int n_max, Side side, int i, int j) {
  if (i < 0 || i > 2 || j < 0 || j > 2)
    throw std::invalid_argument("atomic level out of range");
  Operator o = Operator::zero(n_max);
  const int np = n_max + 1;
  for (int ja = 0; ja < 3; ++ja)
    for (int na = 0; na < np; ++na)
      for (int jb = 0; jb < 3; ++jb)
        for (int nb = 0; nb < np; ++nb) {
          const int col = ((ja * np + na) * 3 + jb) * np + nb;
          if (side == Side::A && ja == j) {
            const int row = ((i * np + na) * 3 + jb) * np + nb;
            o.m[std::size_t(row) * o.dim + col] += 1.0;
          } else if (side == Side::B && jb == j) {
            const int row = ((ja * np + na) * 3 + i) * np + nb;
            o.m[std::size_t(row) * o.dim + col] += 1.0;
          }
        }
  return o;
}

Operator build_annihilation(int n_max, Side side) {
  Operator o = Operator::zero(n_max);
  const int np = n_max + 1;
  for (int ja = 0; ja < 3; ++ja)
    for (int na = 0; na < np; ++na)
      for (int jb = 0; jb < 3; ++jb)
        for (int nb = 0; nb < np; ++nb) {
          const int col = ((ja * np + na) * 3 + jb) * np + nb;
          if (side == Side::A && na >= 1) {
            const int row = ((ja * np + (na - 1)) * 3 + jb) * np + nb;
            o.m[std::size_t(row) * o.dim + col] += std::sqrt(double(na));
          } else if (side == Side::B && nb >= 1) {
            const int row = ((ja * np + na) * 3 + jb) * np + (nb - 1);
            o.m[std::size_t(row) * o.dim + col] += std::sqrt(double(nb));
          }
        }
  return o;
}

Operator build_number(int n_max, Side side) {
  Operator o = Operator::zero(n_max);
  const int np = n_max + 1;
  for (int ja = 0; ja < 3; ++ja)
    for (int na = 0; na < np; ++na)
      for (int jb = 0; jb < 3; ++jb)
        for (int nb = 0; nb < np; ++nb) {
          const int k = ((ja * np + na) * 3 + jb) * np + nb;
          o.at(k, k) = side == Side::A ? double(na) : double(nb);
        }
  return o;
}

// ---------------------------------------------------------------------------
// Propagator

struct Propagator::Impl {
  int n_max = 1;
  int dim = 0;
  bool diagonal = false;
  bool eigen_ok = false;

  std::vector<Cplx> lambda;  // eigenvalues (or the diagonal itself)
  std::vector<Cplx> v;       // eigenvectors, row-major
  std::vector<Cplx> vinv;    // inverse eigenvector matrix, row-major
  std::vector<Cplx> h;       // retained for the series fallback

  // exp(-i lambda_k t)
  Cplx phase(int k, double t) const {
    const double re = lambda[k].real(), im = lambda[k].imag();
    const double mag = std::exp(im * t);
    return Cplx(mag * std::cos(re * t), -mag * std::sin(re * t));
  }

  void series_apply(double t, const Cplx* in, Cplx* out) const;
};

void Propagator::Impl::series_apply(double t, const Cplx* in,
                                    Cplx* out) const {
  // Scaled Taylor series: out = (e^B)^(2^s) in with B = -i t H / 2^s and
  // ||B||_inf <= 1/2.
  double hnorm = 0.0;
  for (int i = 0; i < dim; ++i) {
    double row = 0.0;
    for (int j = 0; j < dim; ++j) row += std::abs(h[std::size_t(i) * dim + j]);
    hnorm = std::max(hnorm, row);
  }
  double target = hnorm * std::abs(t);
  int s = 0;
  while (target > 0.5 && s < 62) {
    target *= 0.5;
    ++s;
  }
  const Cplx f(0.0, -t / double(std::uint64_t(1) << s));
  std::vector<Cplx> b(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) b[k] = f * h[k];

  std::vector<Cplx> vcur(in, in + dim), term(dim), next(dim), acc(dim);
  for (std::uint64_t step = 0; step < (std::uint64_t(1) << s); ++step) {
    term = vcur;
    acc = vcur;
    for (int k = 1; k <= 48; ++k) {
      kernels::matvec(b.data(), term.data(), next.data(), std::size_t(dim));
      const Cplx inv_k(1.0 / double(k), 0.0);
      for (int i = 0; i < dim; ++i) term[i] = next[i] * inv_k;
      for (int i = 0; i < dim; ++i) acc[i] += term[i];
      if (kernels::norm2(term.data(), dim) <
          1e-34 * kernels::norm2(acc.data(), dim))
        break;
    }
    vcur = acc;
  }
  for (int i = 0; i < dim; ++i) out[i] = vcur[i];
}

Propagator::Propagator(const Operator& hop) : impl_(new Impl) {
  impl_->n_max = hop.n_max;
  impl_->dim = hop.dim;
  impl_->h = hop.m;
  const int d = hop.dim;

  bool diag = true;
  for (int i = 0; i < d && diag; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j && hop.at(i, j) != Cplx(0.0, 0.0)) {
        diag = false;
        break;
      }
  if (diag) {
    impl_->diagonal = true;
    impl_->lambda.resize(d);
    for (int i = 0; i < d; ++i) impl_->lambda[i] = hop.at(i, i);
    return;
  }

  using Mat = Eigen::MatrixXcd;
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = hop.at(i, j);

  Eigen::ComplexEigenSolver<Mat> es(m, true);
  if (es.info() == Eigen::Success) {
    const Mat& vec = es.eigenvectors();
    Mat vinv = vec.partialPivLu().inverse();
    const Mat resid = vec * es.eigenvalues().asDiagonal() * vinv - m;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double cond = vec.norm() * vinv.norm();
    if (resid.cwiseAbs().maxCoeff() <= 1e-8 * scale && cond < 1e8) {
      impl_->eigen_ok = true;
      impl_->lambda.assign(es.eigenvalues().data(),
                           es.eigenvalues().data() + d);
      impl_->v.resize(std::size_t(d) * d);
      impl_->vinv.resize(std::size_t(d) * d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          impl_->v[std::size_t(i) * d + j] = vec(i, j);
          impl_->vinv[std::size_t(i) * d + j] = vinv(i, j);
        }
    }
  }
  // otherwise: series fallback, impl_->h already saved
}

Propagator::~Propagator() = default;
Propagator::Propagator(Propagator&&) noexcept = default;
Propagator& Propagator::operator=(Propagator&&) noexcept = default;

int Propagator::dim() const { return impl_->dim; }
bool Propagator::diagonal() const { return impl_->diagonal; }
bool Propagator::eigen_route() const {
  return impl_->diagonal || impl_->eigen_ok;
}

void Propagator::apply(double t, const JointState& in, JointState& out) const {
  const int d = impl_->dim;
  if (in.dim() != d) throw std::invalid_argument("state dim mismatch");
  if (out.dim() != d) out = JointState(impl_->n_max);
  if (impl_->diagonal) {
    for (int i = 0; i < d; ++i) out.amp[i] = impl_->phase(i, t) * in.amp[i];
    return;
  }
  if (impl_->eigen_ok) {
    std::vector<Cplx> w(d), z(d);
    kernels::matvec(impl_->vinv.data(), in.amp.data(), w.data(),
                    std::size_t(d));
    for (int i = 0; i < d; ++i) z[i] = impl_->phase(i, t) * w[i];
    kernels::matvec(impl_->v.data(), z.data(), out.amp.data(),
                    std::size_t(d));
    return;
  }
  impl_->series_apply(t, in.amp.data(), out.amp.data());
}

JointState Propagator::apply(double t, const JointState& in) const {
  JointState out(impl_->n_max);
  apply(t, in, out);
  return out;
}

void Propagator::enter(const JointState& in, Workspace& ws) const {
  const int d = impl_->dim;
  if (in.dim() != d) throw std::invalid_argument("state dim mismatch");
  ws.w.resize(d);
  ws.z.resize(d);
  if (ws.scratch.dim() != d) ws.scratch = JointState(impl_->n_max);
  if (impl_->diagonal) {
    ws.w = in.amp;
    ws.w2.resize(d);
    for (int i = 0; i < d; ++i) ws.w2[i] = std::norm(in.amp[i]);
    return;
  }
  if (impl_->eigen_ok) {
    kernels::matvec(impl_->vinv.data(), in.amp.data(), ws.w.data(),
                    std::size_t(d));
    return;
  }
  ws.w = in.amp;  // series route: keep the input itself
}

double Propagator::norm2_at(double t, Workspace& ws) const {
  const int d = impl_->dim;
  if (impl_->diagonal) {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      if (ws.w2[i] != 0.0)
        s += ws.w2[i] * std::exp(2.0 * impl_->lambda[i].imag() * t);
    return s;
  }
  if (impl_->eigen_ok) {
    for (int i = 0; i < d; ++i) ws.z[i] = impl_->phase(i, t) * ws.w[i];
    kernels::matvec(impl_->v.data(), ws.z.data(), ws.scratch.amp.data(),
                    std::size_t(d));
    return kernels::norm2(ws.scratch.amp.data(), std::size_t(d));
  }
  impl_->series_apply(t, ws.w.data(), ws.scratch.amp.data());
  return kernels::norm2(ws.scratch.amp.data(), std::size_t(d));
}

void Propagator::state_at(double t, Workspace& ws, JointState& out) const {
  const int d = impl_->dim;
  if (out.dim() != d) out = JointState(impl_->n_max);
  if (impl_->diagonal) {
    for (int i = 0; i < d; ++i) out.amp[i] = impl_->phase(i, t) * ws.w[i];
    return;
  }
  if (impl_->eigen_ok) {
    for (int i = 0; i < d; ++i) ws.z[i] = impl_->phase(i, t) * ws.w[i];
    kernels::matvec(impl_->v.data(), ws.z.data(), out.amp.data(),
                    std::size_t(d));
    return;
  }
  impl_->series_apply(t, ws.w.data(), out.amp.data());
}

JointState expm_apply(const Operator& h, double t, const JointState& psi) {
  Propagator p(h);
  return p.apply(t, psi);
}

}  // namespace cavtel
