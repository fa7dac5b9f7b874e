#include "cvmw/radial.hpp"

#include <cmath>

#include "cvmw/errors.hpp"

namespace cvmw {

namespace {

// Rank of how slowly each hint decays; larger means slower.
int slowness(const DecayHint& h) {
  switch (h.kind) {
    case DecayHint::Kind::compact: return 0;
    case DecayHint::Kind::gaussian: return 1;
    case DecayHint::Kind::polynomial: return 2;
  }
  return 2;
}

DecayHint slower(const DecayHint& a, const DecayHint& b) {
  if (slowness(a) != slowness(b)) return slowness(a) > slowness(b) ? a : b;
  switch (a.kind) {
    case DecayHint::Kind::compact: return DecayHint::compact(std::max(a.param, b.param));
    case DecayHint::Kind::gaussian: return DecayHint::gaussian(std::max(a.param, b.param));
    case DecayHint::Kind::polynomial: return DecayHint::polynomial(std::min(a.param, b.param));
  }
  return a;
}

void check_hint(const DecayHint& h) {
  if (!(h.param > 0.0) || !std::isfinite(h.param)) throw ValidationError("decay hint parameter must be positive and finite");
}

}  // namespace

RadialFunction RadialFunction::closed_form(std::string tag, std::vector<double> params, Fn fn, DecayHint hint) {
  check_hint(hint);
  if (!fn) throw ValidationError("closed-form radial function needs a callable");
  auto impl = std::make_shared<Impl>();
  impl->tag = std::move(tag);
  impl->params = std::move(params);
  impl->fn = std::move(fn);
  impl->hint = hint;
  return RadialFunction(std::move(impl));
}

RadialFunction RadialFunction::sampled(std::vector<double> r, std::vector<double> values, DecayHint hint,
                                       InterpOrder order) {
  check_hint(hint);
  if (r.size() < 2) throw ValidationError("sampled radial function needs at least two points");
  if (r.front() < 0.0) throw ValidationError("sampled radial function abscissae must be non-negative");
  auto impl = std::make_shared<Impl>();
  impl->tag = "sampled";
  impl->hint = hint;
  impl->sampled = true;
  impl->interp = Interpolant(r, values, order);
  return RadialFunction(std::move(impl));
}

RadialFunction RadialFunction::zero() {
  return closed_form("zero", {}, [](double) { return 0.0; }, DecayHint::compact(1e-300));
}

double RadialFunction::operator()(double r) const {
  const Impl& m = *impl_;
  if (m.hint.kind == DecayHint::Kind::compact && r > m.hint.param) return 0.0;
  if (m.sampled) {
    if (r > m.interp.back()) return 0.0;
    return m.interp(r);
  }
  return m.fn(r);
}

std::span<const double> RadialFunction::abscissae() const {
  return impl_->sampled ? impl_->interp.x() : std::span<const double>{};
}

std::span<const double> RadialFunction::values() const {
  return impl_->sampled ? impl_->interp.y() : std::span<const double>{};
}

RadialFunction RadialFunction::scaled(double c) const {
  RadialFunction self = *this;
  return closed_form("scaled", {c}, [self, c](double r) { return c * self(r); }, decay());
}

RadialFunction RadialFunction::combine(double a, const RadialFunction& f, double b, const RadialFunction& g) {
  return closed_form("combination", {a, b}, [a, f, b, g](double r) { return a * f(r) + b * g(r); },
                     slower(f.decay(), g.decay()));
}

}  // namespace cvmw
