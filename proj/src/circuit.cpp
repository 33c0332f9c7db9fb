#include "cavtel/circuit.hpp"

#include <cmath>
#include <stdexcept>

namespace cavtel::circuit {

namespace {
constexpr double kTol = 1e-9;
}  // namespace

void DistortedInput::validate() const {
  const double n = std::norm(alpha) + std::norm(beta);
  if (std::abs(n - 1.0) > kTol)
    throw std::invalid_argument("input qubit is not normalized");
  if (std::abs(zeta) > 1.0 + kTol)
    throw std::invalid_argument("distortion must not amplify");
}

double DistortedInput::normalization() const {
  return 1.0 / std::sqrt(std::norm(alpha) + std::norm(zeta * beta));
}

void ResourceState::validate() const {
  const double n = std::norm(a) + std::norm(b);
  if (std::abs(n - 1.0) > kTol)
    throw std::invalid_argument("resource state is not normalized");
}

std::array<Branch, 4> branch_states(const DistortedInput& in,
                                    const ResourceState& res) {
  in.validate();
  res.validate();
  const Cplx pre = in.normalization() / std::sqrt(2.0);
  const Cplx za = pre * in.alpha;
  const Cplx zb = pre * in.zeta * in.beta;
  // Measuring the distorted qubit and the local resource half in the
  // Bell-type basis leaves Bob with:
  //   00: b alpha |1> + a zeta beta |0>
  //   01: a alpha |0> + b zeta beta |1>
  //   10: a alpha |0> - b zeta beta |1>
  //   11: b alpha |1> - a zeta beta |0>
  std::array<Branch, 4> out;
  out[0] = Branch{0, 0, res.a * zb, res.b * za};
  out[1] = Branch{0, 1, res.a * za, res.b * zb};
  out[2] = Branch{1, 0, res.a * za, -res.b * zb};
  out[3] = Branch{1, 1, -res.a * zb, res.b * za};
  return out;
}

Branch apply_correction(const Branch& br) {
  Branch out = br;
  const bool flip = (br.m1 == br.m2);      // 00 and 11 need X
  const bool phase = (br.m1 == 1);         // 10 and 11 need Z
  if (flip) std::swap(out.c0, out.c1);
  if (phase) out.c1 = -out.c1;
  return out;
}

BranchReport postselect_fidelity(const DistortedInput& in,
                                 const ResourceState& res, int m1, int m2) {
  if (m1 < 0 || m1 > 1 || m2 < 0 || m2 > 1)
    throw std::invalid_argument("measurement bits must be 0 or 1");
  const auto branches = branch_states(in, res);
  const Branch* found = nullptr;
  for (const auto& br : branches)
    if (br.m1 == m1 && br.m2 == m2) found = &br;
  const Branch corr = apply_correction(*found);
  BranchReport rep;
  rep.probability = corr.probability();
  if (rep.probability <= 0.0) return rep;
  const Cplx ov = std::conj(in.alpha) * corr.c0 + std::conj(in.beta) * corr.c1;
  rep.fidelity = std::norm(ov) / rep.probability;
  return rep;
}

}  // namespace cavtel::circuit
