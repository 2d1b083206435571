#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "adae/numerics.hpp"

namespace adae {

/// t -> exp(rate t) * sum_j coeffs[j] t^j
struct ExpPoly {
  Complex rate = 0.0;
  std::vector<CVector> coeffs;

  Index dim() const { return coeffs.empty() ? 0 : coeffs.front().size(); }
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  CVector value(double t) const;
  ExpPoly derivative() const;
  ExpPoly mapped(const CMatrix& M) const;
  ExpPoly scaled_rate(Complex extra_rate) const;
};

/// Forcing f : [0, t_f] -> C^n.
class ForcingSignal {
 public:
  enum class Kind { piecewise_polynomial, sampled, callable };
  /// fn(t, order) returns the derivative of the given order.
  using DerivFn = std::function<CVector(double, int)>;
  static constexpr int kUnlimited = std::numeric_limits<int>::max();

  static ForcingSignal zero(Index dim);
  /// Single polynomial piece in global time.
  static ForcingSignal polynomial(std::vector<CVector> coeffs);
  /// pieces.size() == breaks.size() + 1; piece i is active on [breaks[i-1], breaks[i]).
  static ForcingSignal piecewise(std::vector<double> breaks, std::vector<ExpPoly> pieces);
  /// Columns of samples are values at t0 + j dt.
  static ForcingSignal sampled(double t0, double dt, CMatrix samples);
  static ForcingSignal callable(Index dim, DerivFn fn, int max_order);

  Kind kind() const { return kind_; }
  Index dim() const { return dim_; }
  int max_order() const { return max_order_; }
  CVector value(double t) const { return derivative(t, 0); }
  /// Throws InsufficientSmoothness when order exceeds max_order().
  CVector derivative(double t, int order) const;

  /// t -> exp(rate t) M f(t)
  ForcingSignal transformed(const CMatrix& M, Complex rate) const;
  /// Sum of signals of equal dimension.
  static ForcingSignal sum(const std::vector<ForcingSignal>& parts);
  /// Derivative signal of the given order.
  ForcingSignal differentiated(int order) const;

  bool is_exp_polynomial() const { return kind_ == Kind::piecewise_polynomial; }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<ExpPoly>& pieces() const { return pieces_; }
  size_t piece_index(double t) const;

 private:
  Kind kind_ = Kind::piecewise_polynomial;
  Index dim_ = 0;
  int max_order_ = kUnlimited;
  std::vector<double> breaks_;
  std::vector<ExpPoly> pieces_;
  std::shared_ptr<const DerivFn> fn_;
};

}  // namespace adae
