#include "rtc/dual_bank.hpp"

#include <cmath>
#include <sstream>

#include "rtc/error.hpp"
#include "rtc/rng.hpp"

namespace rtc {
namespace {

std::vector<double> stride_weights(const DoGBank& bank) {
  std::vector<double> w(static_cast<std::size_t>(bank.subbands()));
  for (int k = 0; k < bank.subbands(); ++k) {
    const double s = bank.band(k).stride;
    w[static_cast<std::size_t>(k)] = s * s;
  }
  return w;
}

std::vector<double> expand_weights(const DoGBank& bank, const std::vector<double>& band_weights) {
  std::vector<double> w;
  w.reserve(SubbandPyramid::total_size(bank.subbands()));
  for (int k = 0; k < bank.subbands(); ++k) {
    w.insert(w.end(), std::size_t{1} << (2 * k), band_weights[static_cast<std::size_t>(k)]);
  }
  return w;
}

ImagePlane solve(const SubbandPyramid& pyramid, const DoGBank& bank, const std::vector<double>& band_weights,
                 const DualOptions& options, SolveReport* report) {
  const auto frame = make_frame(bank, options.threads);
  const auto weights = expand_weights(bank, band_weights);
  SolveReport local;
  auto x = solve_frame(frame, pyramid.values(), weights, options.max_iterations, options.tolerance, &local);
  if (report) *report = local;
  if (!local.converged) {
    std::ostringstream msg;
    msg << "dual synthesis did not converge in " << options.max_iterations
        << " iterations; normal residual "
        << (local.normal_residual.empty() ? 1.0 : local.normal_residual.back());
    throw NumericalError(msg.str());
  }
  return ImagePlane(bank.n(), bank.n(), std::move(x));
}

}  // namespace

LinearFrame make_frame(const DoGBank& bank, int threads) {
  LinearFrame frame;
  const int n = bank.n();
  frame.signal_size = static_cast<std::size_t>(n) * n;
  frame.coefficient_size = SubbandPyramid::total_size(bank.subbands());
  frame.analyze = [&bank, n, threads](std::span<const double> signal, std::span<double> coeffs) {
    const ImagePlane image(n, n, std::vector<double>(signal.begin(), signal.end()));
    const auto pyr = analyze(image, bank, threads);
    std::copy(pyr.values().begin(), pyr.values().end(), coeffs.begin());
  };
  frame.adjoint = [&bank, n, threads](std::span<const double> coeffs, std::span<double> signal) {
    SubbandPyramid pyr(n, bank.subbands());
    std::copy(coeffs.begin(), coeffs.end(), pyr.values().begin());
    const auto image = analyze_adjoint(pyr, bank, {}, threads);
    std::copy(image.pixels().begin(), image.pixels().end(), signal.begin());
  };
  return frame;
}

DualBank::DualBank(DoGBank bank, DualOptions options, double residual_bound, SolveReport probe_log)
    : bank_(std::move(bank)),
      options_(options),
      band_weights_(stride_weights(bank_)),
      residual_bound_(residual_bound),
      probe_log_(std::move(probe_log)) {}

ImagePlane DualBank::dual_atom(int k, int i, int j) const {
  SubbandPyramid unit(bank_.n(), bank_.subbands());
  unit.at(k, i, j) = 1.0;
  return synthesize(unit, *this);
}

DualBank build_dual_bank(const DoGBank& bank, const DualOptions& options) {
  const auto weights = stride_weights(bank);
  double worst = 0.0;
  SolveReport first_log;
  Rng rng(options.probe_seed);
  for (int p = 0; p < options.probes; ++p) {
    ImagePlane probe(bank.n(), bank.n());
    for (double& v : probe.pixels()) v = 255.0 * open_unit(rng);
    const auto coeffs = analyze(probe, bank, options.threads);
    SolveReport log;
    const auto back = solve(coeffs, bank, weights, options, &log);
    double err = 0.0, ref = 0.0;
    for (std::size_t q = 0; q < probe.size(); ++q) {
      const double d = back.pixels()[q] - probe.pixels()[q];
      err += d * d;
      ref += probe.pixels()[q] * probe.pixels()[q];
    }
    worst = std::max(worst, std::sqrt(err / ref));
    if (p == 0) first_log = std::move(log);
  }
  if (worst > options.max_probe_residual) {
    std::ostringstream msg;
    msg << "dual bank round-trip residual " << worst << " exceeds " << options.max_probe_residual;
    throw NumericalError(msg.str());
  }
  return DualBank(bank, options, worst, std::move(first_log));
}

ImagePlane synthesize(const SubbandPyramid& pyramid, const DualBank& dual, SolveReport* report) {
  if (pyramid.n() != dual.bank().n() || pyramid.subbands() != dual.bank().subbands()) {
    throw ConfigError("pyramid shape does not match the dual bank");
  }
  return solve(pyramid, dual.bank(), dual.band_weights(), dual.options(), report);
}

}  // namespace rtc
