#pragma once

#include <iosfwd>
#include <vector>

namespace rtc {

/// Sampled monotone scalar map with lookup and inverse lookup.
///
/// Abscissae must be strictly increasing and ordinates non-decreasing
/// (strictly increasing when `strict` is set); violations throw
/// NumericalError naming the first offending sample.
class MonotoneLUT {
 public:
  enum class Rule { Linear, Step };

  struct Lookup {
    double value = 0.0;
    bool clamped = false;
  };

  MonotoneLUT() = default;
  MonotoneLUT(std::vector<double> abscissae, std::vector<double> ordinates, Rule rule = Rule::Linear,
              bool strict = false);

  std::size_t size() const noexcept { return x_.size(); }
  Rule rule() const noexcept { return rule_; }
  bool strict() const noexcept { return strict_; }
  const std::vector<double>& abscissae() const noexcept { return x_; }
  const std::vector<double>& ordinates() const noexcept { return y_; }
  double domain_min() const { return x_.front(); }
  double domain_max() const { return x_.back(); }
  double range_min() const { return y_.front(); }
  double range_max() const { return y_.back(); }

  /// Forward map; inputs outside the domain clamp to its ends.
  Lookup evaluate(double x) const;

  /// Inverse of a strictly monotone linear table; ordinates outside the range
  /// clamp to the domain ends.
  Lookup inverse(double y) const;

  /// One "abscissa ordinate" pair per line after a '#' header line.
  void write_text(std::ostream& out) const;
  static MonotoneLUT read_text(std::istream& in);

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  Rule rule_ = Rule::Linear;
  bool strict_ = false;
};

}  // namespace rtc
