#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rtc {

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  /// ||A^T W (c - A x)|| / ||A^T W c|| after each iteration.
  std::vector<double> normal_residual;
  /// ||W^(1/2) (c - A x)|| / ||W^(1/2) c|| after each iteration; non-increasing.
  std::vector<double> data_residual;
};

/// A linear frame given by its analysis operator and that operator's adjoint.
struct LinearFrame {
  std::size_t signal_size = 0;
  std::size_t coefficient_size = 0;
  std::function<void(std::span<const double> signal, std::span<double> coeffs)> analyze;
  std::function<void(std::span<const double> coeffs, std::span<double> signal)> adjoint;
};

/// Least-squares frame inversion: returns argmin_x ||W^(1/2) (A x - c)|| by
/// conjugate gradients on the weighted normal equations (CGLS form), using
/// only applications of A and A^T. `weights` is per coefficient (empty means
/// all ones). Stops once the normal residual drops below `tolerance`
/// relative to its initial value or after `max_iterations`.
std::vector<double> solve_frame(const LinearFrame& frame, std::span<const double> coeffs,
                                std::span<const double> weights, int max_iterations, double tolerance,
                                SolveReport* report = nullptr);

}  // namespace rtc
