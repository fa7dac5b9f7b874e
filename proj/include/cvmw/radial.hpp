#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cvmw/interp.hpp"

namespace cvmw {

// How a radial function behaves at large r; drives quadrature truncation.
struct DecayHint {
  enum class Kind { gaussian, polynomial, compact };
  Kind kind = Kind::gaussian;
  // gaussian: length scale of the envelope (look-ahead when truncating)
  // polynomial: power p with |f(r)| <= C r^{-p}
  // compact: support radius R
  double param = 1.0;

  static DecayHint gaussian(double scale = 1.0) { return {Kind::gaussian, scale}; }
  static DecayHint polynomial(double p) { return {Kind::polynomial, p}; }
  static DecayHint compact(double radius) { return {Kind::compact, radius}; }
};

// An immutable real function of r >= 0.  Either a closed form (tag, parameters
// and a callable) or a sampled grid interpolated by a cubic spline and taken
// to vanish beyond the last sample.
class RadialFunction {
 public:
  using Fn = std::function<double(double)>;

  static RadialFunction closed_form(std::string tag, std::vector<double> params, Fn fn, DecayHint hint);
  static RadialFunction sampled(std::vector<double> r, std::vector<double> values, DecayHint hint,
                                InterpOrder order = InterpOrder::cubic);
  static RadialFunction zero();

  double operator()(double r) const;

  const DecayHint& decay() const { return impl_->hint; }
  const std::string& tag() const { return impl_->tag; }
  std::span<const double> params() const { return impl_->params; }
  bool is_sampled() const { return impl_->sampled; }
  // Sample abscissae and values; empty for closed forms.
  std::span<const double> abscissae() const;
  std::span<const double> values() const;

  // c * f, keeping the decay hint.
  RadialFunction scaled(double c) const;
  // a f + b g; the decay hint is the slower of the two.
  static RadialFunction combine(double a, const RadialFunction& f, double b, const RadialFunction& g);

 private:
  struct Impl {
    std::string tag;
    std::vector<double> params;
    Fn fn;
    DecayHint hint;
    bool sampled = false;
    Interpolant interp;
  };
  explicit RadialFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace cvmw
