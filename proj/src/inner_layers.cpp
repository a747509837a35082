#include "rtc/inner_layers.hpp"

#include <cmath>
#include <sstream>

#include "rtc/error.hpp"
#include "rtc/parallel.hpp"

namespace rtc {
namespace {

struct InnerState {
  double v = 0.0;  // bipolar potential
  double g = 0.0;  // bipolar conductance (low-passed Q(V))
  double z = 0.0;  // low-passed potential for the transient filter

  void step(double current, double dt, const RetinaParams& p) {
    const double dv = (current - g * v) / p.c_b;
    const double dg = (p.g0_b + p.lambda_b * v * v - g) / p.tau_b;
    const double dz = (v - z) / p.tau_g;
    v += dt * dv;
    g += dt * dg;
    z += dt * dz;
  }
};

std::size_t step_count(double duration, double dt, const RetinaParams& p) {
  if (!(dt > 0.0) || dt > p.tau_b / 50.0) {
    std::ostringstream msg;
    msg << "inner-layer time step " << dt << " s is too coarse (must be in (0, tau_b/50])";
    throw ConfigError(msg.str());
  }
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be finite and >= 0");
  return static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
}

void check_input(double current) {
  if (!(current >= 0.0) || !std::isfinite(current)) {
    throw ConfigError("inner layers take a finite non-negative step magnitude");
  }
}

[[noreturn]] void diverged(double t) {
  std::ostringstream msg;
  msg << "inner-layer state diverged at t=" << t << " s";
  throw NumericalError(msg.str());
}

}  // namespace

double rectifier(double v, const RetinaParams& p) {
  if (!std::isfinite(v)) throw NumericalError("rectifier input is not finite");
  const double d = v - p.v0_g;
  if (d < 0.0) return p.i0_g * p.i0_g / (p.i0_g - p.lambda_g * d);
  return p.i0_g + p.lambda_g * d;
}

InnerTrajectory simulate_inner_layers(double current, double duration, double dt, const RetinaParams& p) {
  check_input(current);
  const std::size_t steps = step_count(duration, dt, p);
  const double h = steps ? duration / static_cast<double>(steps) : 0.0;
  InnerTrajectory tr;
  tr.time.reserve(steps + 1);
  tr.v_bipolar.reserve(steps + 1);
  tr.g_bipolar.reserve(steps + 1);
  tr.i_ganglion.reserve(steps + 1);
  InnerState s{0.0, p.g0_b, 0.0};
  auto record = [&](std::size_t n) {
    tr.time.push_back(n == steps ? duration : static_cast<double>(n) * h);
    tr.v_bipolar.push_back(s.v);
    tr.g_bipolar.push_back(s.g);
    tr.i_ganglion.push_back(rectifier(s.v - p.w_g * s.z, p));
  };
  record(0);
  for (std::size_t n = 1; n <= steps; ++n) {
    s.step(current, h, p);
    if (!std::isfinite(s.v) || !std::isfinite(s.g) || !std::isfinite(s.z)) diverged(static_cast<double>(n) * h);
    record(n);
  }
  return tr;
}

double inner_response(double current, double t_cut, double dt, const RetinaParams& p) {
  check_input(current);
  const std::size_t steps = step_count(t_cut, dt, p);
  const double h = steps ? t_cut / static_cast<double>(steps) : 0.0;
  InnerState s{0.0, p.g0_b, 0.0};
  for (std::size_t n = 1; n <= steps; ++n) {
    s.step(current, h, p);
    if (!std::isfinite(s.v) || !std::isfinite(s.g) || !std::isfinite(s.z)) diverged(static_cast<double>(n) * h);
  }
  return rectifier(s.v - p.w_g * s.z, p);
}

std::vector<double> uniform_grid(double max_current, int size) {
  if (size < 1 || !(max_current > 0.0)) throw ConfigError("grid needs size >= 1 and a positive maximum");
  std::vector<double> g(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    g[static_cast<std::size_t>(i)] = size == 1 ? 0.0 : max_current * i / (size - 1);
  }
  return g;
}

MonotoneLUT build_inner_map(double t_cut, const RetinaParams& params, std::span<const double> grid, double dt,
                            int threads) {
  if (!(t_cut > 0.0)) throw ConfigError("transversal cut time must be positive");
  std::vector<double> x(grid.begin(), grid.end());
  std::vector<double> y(x.size());
  parallel_for(x.size(), threads, [&](std::size_t i) { y[i] = inner_response(x[i], t_cut, dt, params); });
  try {
    return MonotoneLUT(std::move(x), std::move(y), MonotoneLUT::Rule::Linear, true);
  } catch (const NumericalError& e) {
    std::ostringstream msg;
    msg << "inner map at t=" << t_cut << " s is not invertible: " << e.what();
    throw NumericalError(msg.str());
  }
}

std::vector<MonotoneLUT> build_inner_maps(const DelaySchedule& schedule, const RetinaParams& params,
                                          std::span<const double> grid, double dt, int threads) {
  std::vector<MonotoneLUT> maps;
  maps.reserve(static_cast<std::size_t>(schedule.subbands()));
  for (double t : schedule.delays()) maps.push_back(build_inner_map(t, params, grid, dt, threads));
  return maps;
}

RectifiedPyramid apply_inner_layers(const SubbandPyramid& pyramid, std::span<const MonotoneLUT> maps) {
  if (maps.size() != static_cast<std::size_t>(pyramid.subbands())) {
    throw ConfigError("one inner map per subband expected");
  }
  RectifiedPyramid out{SubbandPyramid(pyramid.n(), pyramid.subbands()),
                       std::vector<std::uint8_t>(pyramid.size(), 0), 0};
  const auto src = pyramid.values();
  for (std::size_t q = 0; q < src.size(); ++q) out.negative[q] = src[q] < 0.0 ? 1 : 0;
  for (int k = 1; k < pyramid.subbands(); ++k) {
    const auto& map = maps[static_cast<std::size_t>(k)];
    const auto in = pyramid.band(k);
    auto dst = out.currents.band(k);
    for (std::size_t q = 0; q < in.size(); ++q) {
      const auto r = map.evaluate(std::abs(in[q]));
      dst[q] = r.value;
      if (r.clamped) ++out.overflow;
    }
  }
  return out;
}

}  // namespace rtc
