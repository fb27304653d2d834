#pragma once

// Scalar fields over a chart box, evaluated to jets.

#include <functional>
#include <utility>

#include "fourframes/jet.hpp"

namespace fourframes {

class ScalarJetField {
 public:
  using Evaluator = std::function<Jet(const Vec4&, int)>;

  ScalarJetField() = default;

  ScalarJetField(Evaluator f, Box domain, int max_order = kJetOrder,
                 double margin = 0.0)
      : f_(std::move(f)),
        domain_(domain),
        max_order_(max_order),
        margin_(margin) {}

  const Box& domain() const { return domain_; }
  int max_order() const { return max_order_; }

  Jet eval(const Vec4& p, int ord = -1) const {
    int o = ord < 0 ? max_order_ : ord;
    if (o > max_order_) {
      throw Error(ErrorKind::order_exhausted,
                  "field supports order " + std::to_string(max_order_), p);
    }
    if (!domain_.contains(p, margin_)) {
      throw Error(ErrorKind::outside_domain, "field evaluation", p);
    }
    Jet j = f_(p, o);
    if (!jet_finite(j)) {
      throw Error(ErrorKind::non_finite, "field produced a non-finite jet", p);
    }
    return j;
  }

  // Derivative field; evaluating it needs one extra order from the source.
  ScalarJetField partial(int var) const {
    Evaluator src = f_;
    return ScalarJetField(
        [src, var](const Vec4& p, int ord) {
          return fourframes::partial(src(p, ord + 1), var);
        },
        domain_, max_order_ - 1, margin_);
  }

 private:
  Evaluator f_;
  Box domain_{};
  int max_order_ = kJetOrder;
  double margin_ = 0.0;
};

inline ScalarJetField constant_field(double v, const Box& box) {
  return ScalarJetField(
      [v](const Vec4& p, int ord) { return jet_constant(v, p, ord); }, box);
}

inline ScalarJetField coordinate_field(int var, const Box& box) {
  return ScalarJetField(
      [var](const Vec4& p, int ord) { return jet_coordinate(var, p, ord); },
      box);
}

inline ScalarJetField operator+(const ScalarJetField& a,
                                const ScalarJetField& b) {
  return ScalarJetField(
      [a, b](const Vec4& p, int ord) { return a.eval(p, ord) + b.eval(p, ord); },
      a.domain(), std::min(a.max_order(), b.max_order()));
}

inline ScalarJetField operator-(const ScalarJetField& a,
                                const ScalarJetField& b) {
  return ScalarJetField(
      [a, b](const Vec4& p, int ord) { return a.eval(p, ord) - b.eval(p, ord); },
      a.domain(), std::min(a.max_order(), b.max_order()));
}

inline ScalarJetField operator*(const ScalarJetField& a,
                                const ScalarJetField& b) {
  return ScalarJetField(
      [a, b](const Vec4& p, int ord) { return a.eval(p, ord) * b.eval(p, ord); },
      a.domain(), std::min(a.max_order(), b.max_order()));
}

inline ScalarJetField operator/(const ScalarJetField& a,
                                const ScalarJetField& b) {
  return ScalarJetField(
      [a, b](const Vec4& p, int ord) { return a.eval(p, ord) / b.eval(p, ord); },
      a.domain(), std::min(a.max_order(), b.max_order()));
}

inline ScalarJetField map_field(const ScalarJetField& a,
                                Jet (*fn)(const Jet&)) {
  return ScalarJetField(
      [a, fn](const Vec4& p, int ord) { return fn(a.eval(p, ord)); },
      a.domain(), a.max_order());
}

}  // namespace fourframes
