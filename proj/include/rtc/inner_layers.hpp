#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rtc/dog_transform.hpp"
#include "rtc/monotone_lut.hpp"
#include "rtc/params.hpp"
#include "rtc/temporal_schedule.hpp"

namespace rtc {

/// Static rectification from bipolar potential (V) to ganglionic current (A):
///   i0^2 / (i0 - lambda (v - v0))   for v <  v0
///   i0 + lambda (v - v0)            for v >= v0
/// Continuous with slope lambda at the knee and strictly increasing.
/// Throws NumericalError for non-finite input.
double rectifier(double v, const RetinaParams& params);

/// Time course of the inner layers for a step input starting at t = 0.
struct InnerTrajectory {
  std::vector<double> time;        // s
  std::vector<double> v_bipolar;   // V
  std::vector<double> g_bipolar;   // S
  std::vector<double> i_ganglion;  // A
};

/// Explicit Euler integration of the contrast gain control loop and the
/// transient filter, both realized as first-order states:
///   c_b dV/dt = I - g V,  tau_b dg/dt = g0_b + lambda_b V^2 - g,  g(0) = g0_b
///   tau_g dz/dt = V - z,  z(0) = 0,  I_g = rectifier(V - w_g z)
/// The step is shrunk to duration / ceil(duration / dt) so the last sample
/// falls exactly on `duration`. Requires dt <= tau_b / 50.
InnerTrajectory simulate_inner_layers(double current, double duration, double dt, const RetinaParams& params);

/// Ganglionic current at exactly t_cut; same arithmetic as the last sample
/// of simulate_inner_layers without storing the trajectory.
double inner_response(double current, double t_cut, double dt, const RetinaParams& params);

/// Uniform grid on [0, max_current].
std::vector<double> uniform_grid(double max_current, int size);

/// Transversal cut of the step responses at t_cut: I -> I_g(t_cut, I).
/// Throws NumericalError if the cut is not strictly increasing.
MonotoneLUT build_inner_map(double t_cut, const RetinaParams& params, std::span<const double> grid,
                            double dt = codec_constants::kInnerDt, int threads = 0);

/// One map per subband, cut at each subband delay.
std::vector<MonotoneLUT> build_inner_maps(const DelaySchedule& schedule, const RetinaParams& params,
                                          std::span<const double> grid, double dt = codec_constants::kInnerDt,
                                          int threads = 0);

/// Rectified magnitudes plus the sign of every source coefficient.
struct RectifiedPyramid {
  SubbandPyramid currents;             // |I_opl| mapped through f_g; subband 0 left at zero
  std::vector<std::uint8_t> negative;  // 1 where the source coefficient is < 0, (k,i,j) order
  std::size_t overflow = 0;            // magnitudes clamped to the map domain
};

/// Applies the per-subband maps to coefficient magnitudes (linear
/// interpolation). The low-pass coefficient travels separately and is not
/// rectified.
RectifiedPyramid apply_inner_layers(const SubbandPyramid& pyramid, std::span<const MonotoneLUT> maps);

}  // namespace rtc
