#include "rtc/frame_solver.hpp"

#include <cmath>
#include <numeric>

#include "rtc/error.hpp"

namespace rtc {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

std::vector<double> solve_frame(const LinearFrame& frame, std::span<const double> coeffs,
                                std::span<const double> weights, int max_iterations, double tolerance,
                                SolveReport* report) {
  const std::size_t m = frame.coefficient_size;
  const std::size_t n = frame.signal_size;
  if (coeffs.size() != m) throw ConfigError("coefficient vector does not match the frame");
  if (!weights.empty() && weights.size() != m) throw ConfigError("weight vector does not match the frame");

  std::vector<double> sqrt_w(m, 1.0);
  for (std::size_t i = 0; i < weights.size(); ++i) sqrt_w[i] = std::sqrt(weights[i]);

  // B = W^(1/2) A; solve min ||B x - d|| with d = W^(1/2) c
  std::vector<double> x(n, 0.0);
  std::vector<double> r(m);
  for (std::size_t i = 0; i < m; ++i) r[i] = sqrt_w[i] * coeffs[i];
  std::vector<double> tmp(m);
  auto apply_bt = [&](std::span<const double> v, std::span<double> out) {
    for (std::size_t i = 0; i < m; ++i) tmp[i] = sqrt_w[i] * v[i];
    frame.adjoint(tmp, out);
  };
  auto apply_b = [&](std::span<const double> v, std::span<double> out) {
    frame.analyze(v, out);
    for (std::size_t i = 0; i < m; ++i) out[i] *= sqrt_w[i];
  };

  std::vector<double> s(n);
  apply_bt(r, s);
  std::vector<double> p = s;
  std::vector<double> q(m);
  double gamma = dot(s, s);
  const double gamma0 = gamma;
  const double data0 = std::sqrt(dot(r, r));

  SolveReport local;
  SolveReport& rep = report ? *report : local;
  rep = SolveReport{};
  if (gamma0 == 0.0) {
    rep.converged = true;
    return x;
  }
  for (int it = 0; it < max_iterations; ++it) {
    apply_b(p, q);
    const double qq = dot(q, q);
    if (qq == 0.0) break;
    const double alpha = gamma / qq;
    for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
    for (std::size_t i = 0; i < m; ++i) r[i] -= alpha * q[i];
    apply_bt(r, s);
    const double gamma_next = dot(s, s);
    rep.iterations = it + 1;
    rep.normal_residual.push_back(std::sqrt(gamma_next / gamma0));
    rep.data_residual.push_back(std::sqrt(dot(r, r)) / data0);
    if (!std::isfinite(gamma_next)) throw NumericalError("frame solver diverged");
    if (std::sqrt(gamma_next / gamma0) <= tolerance) {
      rep.converged = true;
      break;
    }
    const double beta = gamma_next / gamma;
    gamma = gamma_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = s[i] + beta * p[i];
  }
  return x;
}

}  // namespace rtc
