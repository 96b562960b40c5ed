#pragma once

#include <concepts>
#include <utility>
#include <vector>

#include "qcopt/errors.hpp"
#include "qcopt/numeric.hpp"

namespace qcopt {

/// Contract for a smooth strongly convex scalar objective: value, gradient,
/// and its smoothness (L_i) / strong-convexity (mu_i) constants. Only
/// quadratics ship, but the drivers accept anything modeling this concept.
template <class C>
concept CostFunction = requires(const C& c, const Rational& x) {
  { c.evaluate(x) } -> std::convertible_to<Rational>;
  { c.gradient(x) } -> std::convertible_to<Rational>;
  { c.smoothness() } -> std::convertible_to<Rational>;
  { c.strong_convexity() } -> std::convertible_to<Rational>;
};

/// f(x) = beta/2 * (x - center)^2, the local objective of a node holding one
/// scalar measurement `center` with confidence weight `beta`. For quadratics
/// the smoothness and strong-convexity constants coincide with beta.
class QuadraticCost {
 public:
  QuadraticCost(Rational beta, Rational center)
      : beta_(std::move(beta)), center_(std::move(center)) {
    if (beta_ <= 0) throw Error("quadratic cost needs beta > 0");
  }

  Rational evaluate(const Rational& x) const {
    const Rational d = x - center_;
    return beta_ * d * d / 2;
  }

  Rational gradient(const Rational& x) const { return beta_ * (x - center_); }

  Rational smoothness() const { return beta_; }
  Rational strong_convexity() const { return beta_; }

  const Rational& beta() const { return beta_; }
  const Rational& center() const { return center_; }

 private:
  Rational beta_;
  Rational center_;
};

static_assert(CostFunction<QuadraticCost>);

/// The network-wide objective sum(f_i) together with the global constants the
/// step-size bound and convergence envelopes are built from: L = sum(L_i) and
/// mu = min(mu_i).
class CostEnsemble {
 public:
  explicit CostEnsemble(std::vector<QuadraticCost> costs) : costs_(std::move(costs)) {
    if (costs_.empty()) throw Error("cost ensemble must not be empty");
  }

  int size() const { return static_cast<int>(costs_.size()); }
  const QuadraticCost& operator[](int i) const { return costs_[static_cast<std::size_t>(i)]; }
  auto begin() const { return costs_.begin(); }
  auto end() const { return costs_.end(); }

  Rational lipschitz_total() const {
    Rational total = 0;
    for (const auto& c : costs_) total += c.smoothness();
    return total;
  }

  Rational convexity_floor() const {
    Rational floor = costs_.front().strong_convexity();
    for (const auto& c : costs_)
      if (c.strong_convexity() < floor) floor = c.strong_convexity();
    return floor;
  }

  /// Largest admissible step size, 2n / (mu + L).
  Rational max_stepsize() const {
    return Rational(2 * size()) / (convexity_floor() + lipschitz_total());
  }

  /// Unique minimizer of sum(f_i): the beta-weighted mean of the centers.
  /// Closed form, never produced by the optimization algorithms themselves.
  Rational global_optimum() const {
    Rational weighted = 0, total = 0;
    for (const auto& c : costs_) {
      weighted += c.beta() * c.center();
      total += c.beta();
    }
    return weighted / total;
  }

  Rational evaluate_total(const Rational& x) const {
    Rational total = 0;
    for (const auto& c : costs_) total += c.evaluate(x);
    return total;
  }

  Rational gradient_total(const Rational& x) const {
    Rational total = 0;
    for (const auto& c : costs_) total += c.gradient(x);
    return total;
  }

 private:
  std::vector<QuadraticCost> costs_;
};

/// Scalar bisection on sum(grad f_i) for ensembles without a closed form.
/// The bracket [lo, hi] must contain the optimum.
template <class Range>
double global_optimum_bisect(const Range& costs, double lo, double hi, double tol = 1e-12) {
  auto total_gradient = [&](double x) {
    Rational g = 0;
    const Rational xr = rational_from_double(x);
    for (const auto& c : costs) g += c.gradient(xr);
    return to_double(g);
  };
  double glo = total_gradient(lo), ghi = total_gradient(hi);
  if (glo > 0 || ghi < 0) throw Unsupported("bisection bracket does not contain the optimum");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (total_gradient(mid) <= 0) {
      lo = mid;
      glo = total_gradient(mid);
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace qcopt
