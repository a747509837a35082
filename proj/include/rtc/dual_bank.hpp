#pragma once

#include <cstdint>
#include <vector>

#include "rtc/dog_transform.hpp"
#include "rtc/frame_solver.hpp"
#include "rtc/params.hpp"

namespace rtc {

struct DualOptions {
  int max_iterations = codec_constants::kDualMaxIterations;
  double tolerance = codec_constants::kDualTolerance;
  int probes = 10;
  std::uint64_t probe_seed = 0x5eed;
  double max_probe_residual = 1e-6;
  int threads = 0;
};

/// Dual frame of a DoGBank, realized implicitly: synthesis solves the
/// stride^2-weighted normal equations of the analysis operator. The dual
/// atoms are therefore never stored; dual_atom() computes one on demand.
class DualBank {
 public:
  DualBank(DoGBank bank, DualOptions options, double residual_bound, SolveReport probe_log);

  const DoGBank& bank() const noexcept { return bank_; }
  /// Largest relative L2 round-trip error measured on the construction probes.
  double residual_bound() const noexcept { return residual_bound_; }
  /// Convergence log of the first probe solve.
  const SolveReport& probe_log() const noexcept { return probe_log_; }
  const std::vector<double>& band_weights() const noexcept { return band_weights_; }
  const DualOptions& options() const noexcept { return options_; }

  /// Synthesis of the unit coefficient at (k, i, j), in pixel units per ampere.
  ImagePlane dual_atom(int k, int i, int j) const;

 private:
  DoGBank bank_;
  DualOptions options_;
  std::vector<double> band_weights_;
  double residual_bound_ = 0.0;
  SolveReport probe_log_;
};

/// The analysis operator of `bank` as a generic frame.
LinearFrame make_frame(const DoGBank& bank, int threads = 0);

/// Builds the dual and verifies perfect reconstruction on random probes.
/// Throws NumericalError reporting the achieved residual when the solver
/// misses its tolerance or a probe exceeds `max_probe_residual`.
DualBank build_dual_bank(const DoGBank& bank, const DualOptions& options = {});

/// sum_{kij} c_kij * dual_kij, returned in pixel units (unclamped).
ImagePlane synthesize(const SubbandPyramid& pyramid, const DualBank& dual, SolveReport* report = nullptr);

}  // namespace rtc
