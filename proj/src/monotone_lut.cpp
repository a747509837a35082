#include "rtc/monotone_lut.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "rtc/error.hpp"

namespace rtc {
namespace {

double interpolate(const std::vector<double>& from, const std::vector<double>& to, double v) {
  const auto it = std::upper_bound(from.begin(), from.end(), v);
  const auto hi = static_cast<std::size_t>(it - from.begin());
  const std::size_t lo = hi - 1;
  if (hi == from.size()) return to.back();
  const double t = (v - from[lo]) / (from[hi] - from[lo]);
  if (t == 0.0) return to[lo];
  return to[lo] + t * (to[hi] - to[lo]);
}

}  // namespace

MonotoneLUT::MonotoneLUT(std::vector<double> abscissae, std::vector<double> ordinates, Rule rule, bool strict)
    : x_(std::move(abscissae)), y_(std::move(ordinates)), rule_(rule), strict_(strict) {
  if (x_.empty() || x_.size() != y_.size()) throw ConfigError("LUT needs matching, non-empty sample arrays");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) {
      throw NumericalError("LUT sample " + std::to_string(i) + " is not finite");
    }
    if (i == 0) continue;
    if (!(x_[i] > x_[i - 1])) {
      throw NumericalError("LUT abscissae not strictly increasing at sample " + std::to_string(i));
    }
    const bool bad = strict_ ? !(y_[i] > y_[i - 1]) : (y_[i] < y_[i - 1]);
    if (bad) {
      std::ostringstream msg;
      msg << std::setprecision(6) << "LUT not monotone at sample " << i << " (x=" << x_[i]
          << ", y=" << y_[i] << " after " << y_[i - 1] << ")";
      throw NumericalError(msg.str());
    }
  }
}

MonotoneLUT::Lookup MonotoneLUT::evaluate(double x) const {
  if (x <= x_.front()) return {y_.front(), x < x_.front()};
  if (x >= x_.back()) return {y_.back(), x > x_.back()};
  if (rule_ == Rule::Step) {
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return {y_[static_cast<std::size_t>(it - x_.begin()) - 1], false};
  }
  return {interpolate(x_, y_, x), false};
}

MonotoneLUT::Lookup MonotoneLUT::inverse(double y) const {
  if (!strict_ || rule_ != Rule::Linear) throw ConfigError("inverse lookup needs a strictly monotone linear LUT");
  if (y <= y_.front()) return {x_.front(), y < y_.front()};
  if (y >= y_.back()) return {x_.back(), y > y_.back()};
  return {interpolate(y_, x_, y), false};
}

void MonotoneLUT::write_text(std::ostream& out) const {
  out << "# abscissa ordinate (" << (rule_ == Rule::Linear ? "linear" : "step")
      << (strict_ ? ", strict" : "") << ")\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < x_.size(); ++i) out << x_[i] << ' ' << y_[i] << '\n';
}

MonotoneLUT MonotoneLUT::read_text(std::istream& in) {
  std::vector<double> x, y;
  Rule rule = Rule::Linear;
  bool strict = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("step") != std::string::npos) rule = Rule::Step;
      if (line.find("strict") != std::string::npos) strict = true;
      continue;
    }
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    if (!(row >> a >> b)) throw ConfigError("malformed LUT row: '" + line + "'");
    x.push_back(a);
    y.push_back(b);
  }
  return MonotoneLUT(std::move(x), std::move(y), rule, strict);
}

}  // namespace rtc
