#include "adae/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace adae {

CVector ExpPoly::value(double t) const {
  CVector acc = CVector::Zero(dim());
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
  if (rate != 0.0) acc *= std::exp(rate * t);
  return acc;
}

ExpPoly ExpPoly::derivative() const {
  ExpPoly d;
  d.rate = rate;
  const size_t m = coeffs.size();
  d.coeffs.assign(m, CVector::Zero(dim()));
  for (size_t j = 0; j < m; ++j) {
    d.coeffs[j] = rate * coeffs[j];
    if (j + 1 < m) d.coeffs[j] += static_cast<double>(j + 1) * coeffs[j + 1];
  }
  if (rate == 0.0 && d.coeffs.size() > 1) d.coeffs.pop_back();
  return d;
}

ExpPoly ExpPoly::mapped(const CMatrix& M) const {
  ExpPoly out;
  out.rate = rate;
  // BLAS rejects the leading dimension of an empty operand.
  for (const CVector& c : coeffs)
    out.coeffs.push_back(M.size() == 0 ? CVector(CVector::Zero(M.rows())) : CVector(M * c));
  if (out.coeffs.empty()) out.coeffs.push_back(CVector::Zero(M.rows()));
  return out;
}

ExpPoly ExpPoly::scaled_rate(Complex extra_rate) const {
  ExpPoly out = *this;
  out.rate += extra_rate;
  return out;
}

ForcingSignal ForcingSignal::zero(Index dim) { return polynomial({CVector::Zero(dim)}); }

ForcingSignal ForcingSignal::polynomial(std::vector<CVector> coeffs) {
  if (coeffs.empty()) throw InvalidInput("polynomial forcing needs at least one coefficient");
  ExpPoly p;
  p.coeffs = std::move(coeffs);
  return piecewise({}, {p});
}

ForcingSignal ForcingSignal::piecewise(std::vector<double> breaks, std::vector<ExpPoly> pieces) {
  if (pieces.size() != breaks.size() + 1) throw InvalidInput("piece count must equal breakpoints + 1");
  for (size_t i = 1; i < breaks.size(); ++i)
    if (!(breaks[i] > breaks[i - 1])) throw InvalidInput("breakpoints must increase");
  const Index dim = pieces.front().dim();
  for (const ExpPoly& p : pieces) {
    if (p.coeffs.empty() || p.dim() != dim) throw InvalidInput("pieces must share a dimension");
    for (const CVector& c : p.coeffs)
      if (c.size() != dim || !c.allFinite()) throw InvalidInput("non-finite or ragged coefficients");
  }
  ForcingSignal f;
  f.kind_ = Kind::piecewise_polynomial;
  f.dim_ = dim;
  f.max_order_ = kUnlimited;
  f.breaks_ = std::move(breaks);
  f.pieces_ = std::move(pieces);
  return f;
}

namespace {

/// Cubic Lagrange interpolation of uniformly sampled columns.
CVector interpolate(const CMatrix& s, double t0, double dt, double t) {
  const Index count = s.cols();
  const double u = (t - t0) / dt;
  Index i0 = static_cast<Index>(std::floor(u)) - 1;
  i0 = std::clamp<Index>(i0, 0, count - 4);
  CVector out = CVector::Zero(s.rows());
  for (Index a = 0; a < 4; ++a) {
    double w = 1.0;
    for (Index b = 0; b < 4; ++b)
      if (b != a) w *= (u - static_cast<double>(i0 + b)) / static_cast<double>(a - b);
    out += w * s.col(i0 + a);
  }
  return out;
}

CMatrix first_derivative_samples(const CMatrix& f, double dt) {
  const Index N = f.cols();
  CMatrix d(f.rows(), N);
  const double c = 1.0 / (12.0 * dt);
  for (Index j = 2; j + 2 < N; ++j)
    d.col(j) = c * (f.col(j - 2) - 8.0 * f.col(j - 1) + 8.0 * f.col(j + 1) - f.col(j + 2));
  d.col(0) = c * (-25.0 * f.col(0) + 48.0 * f.col(1) - 36.0 * f.col(2) + 16.0 * f.col(3) - 3.0 * f.col(4));
  d.col(1) = c * (-3.0 * f.col(0) - 10.0 * f.col(1) + 18.0 * f.col(2) - 6.0 * f.col(3) + f.col(4));
  d.col(N - 1) = c * (25.0 * f.col(N - 1) - 48.0 * f.col(N - 2) + 36.0 * f.col(N - 3) -
                      16.0 * f.col(N - 4) + 3.0 * f.col(N - 5));
  d.col(N - 2) = c * (3.0 * f.col(N - 1) + 10.0 * f.col(N - 2) - 18.0 * f.col(N - 3) +
                      6.0 * f.col(N - 4) - f.col(N - 5));
  return d;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

ForcingSignal ForcingSignal::sampled(double t0, double dt, CMatrix samples) {
  if (!(dt > 0.0)) throw InvalidInput("sample spacing must be positive");
  if (samples.cols() < 5) throw GridTooCoarse("sampled forcing needs at least 5 samples");
  if (!samples.allFinite()) throw InvalidInput("sampled forcing has non-finite values");
  auto values = std::make_shared<CMatrix>(std::move(samples));
  auto derivs = std::make_shared<CMatrix>(first_derivative_samples(*values, dt));
  ForcingSignal f;
  f.kind_ = Kind::sampled;
  f.dim_ = values->rows();
  f.max_order_ = 1;
  f.fn_ = std::make_shared<const DerivFn>([values, derivs, t0, dt](double t, int order) -> CVector {
    return interpolate(order == 0 ? *values : *derivs, t0, dt, t);
  });
  return f;
}

ForcingSignal ForcingSignal::callable(Index dim, DerivFn fn, int max_order) {
  if (!fn) throw InvalidInput("callable forcing needs a function");
  ForcingSignal f;
  f.kind_ = Kind::callable;
  f.dim_ = dim;
  f.max_order_ = std::max(0, max_order);
  f.fn_ = std::make_shared<const DerivFn>(std::move(fn));
  return f;
}

size_t ForcingSignal::piece_index(double t) const {
  return static_cast<size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), t) - breaks_.begin());
}

CVector ForcingSignal::derivative(double t, int order) const {
  if (order < 0) throw InvalidInput("negative derivative order");
  if (order > max_order_)
    throw InsufficientSmoothness("derivative of order " + std::to_string(order) +
                                 " requested; forcing provides " + std::to_string(max_order_));
  if (kind_ == Kind::piecewise_polynomial) {
    ExpPoly p = pieces_[piece_index(t)];
    for (int i = 0; i < order; ++i) p = p.derivative();
    return p.value(t);
  }
  return (*fn_)(t, order);
}

ForcingSignal ForcingSignal::transformed(const CMatrix& M, Complex rate) const {
  if (M.cols() != dim_) throw InvalidInput("forcing map has the wrong width");
  if (kind_ == Kind::piecewise_polynomial) {
    std::vector<ExpPoly> pieces;
    for (const ExpPoly& p : pieces_) pieces.push_back(p.mapped(M).scaled_rate(rate));
    return piecewise(breaks_, std::move(pieces));
  }
  auto inner = fn_;
  ForcingSignal f;
  f.kind_ = kind_;
  f.dim_ = M.rows();
  f.max_order_ = max_order_;
  // Product rule with the scalar factor exp(rate t).
  f.fn_ = std::make_shared<const DerivFn>([inner, M, rate](double t, int order) -> CVector {
    CVector acc = CVector::Zero(M.cols());
    for (int i = 0; i <= order; ++i)
      acc += binomial(order, i) * std::pow(rate, order - i) * (*inner)(t, i);
    if (M.size() == 0) return CVector(CVector::Zero(M.rows()));
    return std::exp(rate * t) * (M * acc);
  });
  return f;
}

ForcingSignal ForcingSignal::sum(const std::vector<ForcingSignal>& parts) {
  if (parts.empty()) throw InvalidInput("empty forcing sum");
  const Index dim = parts.front().dim();
  bool all_poly = true;
  for (const ForcingSignal& p : parts) {
    if (p.dim() != dim) throw InvalidInput("forcing dimensions differ");
    all_poly = all_poly && p.is_exp_polynomial();
  }
  if (all_poly) {
    std::set<double> bset;
    for (const ForcingSignal& p : parts) bset.insert(p.breaks().begin(), p.breaks().end());
    std::vector<double> breaks(bset.begin(), bset.end());
    // Representative time inside each merged interval selects the active pieces.
    std::vector<double> probes;
    if (breaks.empty()) {
      probes.push_back(0.0);
    } else {
      probes.push_back(breaks.front() - 1.0);
      for (size_t i = 0; i + 1 < breaks.size(); ++i) probes.push_back(0.5 * (breaks[i] + breaks[i + 1]));
      probes.push_back(breaks.back() + 1.0);
    }
    bool same_rates = true;
    std::vector<ExpPoly> merged;
    for (double t : probes) {
      ExpPoly acc;
      bool first = true;
      for (const ForcingSignal& p : parts) {
        const ExpPoly& q = p.pieces()[p.piece_index(t)];
        if (first) {
          acc = q;
          first = false;
          continue;
        }
        if (q.rate != acc.rate) same_rates = false;
        while (acc.coeffs.size() < q.coeffs.size()) acc.coeffs.push_back(CVector::Zero(dim));
        for (size_t j = 0; j < q.coeffs.size(); ++j) acc.coeffs[j] += q.coeffs[j];
      }
      merged.push_back(acc);
    }
    if (same_rates) return piecewise(std::move(breaks), std::move(merged));
  }
  auto copies = std::make_shared<std::vector<ForcingSignal>>(parts);
  int order = kUnlimited;
  Kind kind = Kind::callable;
  for (const ForcingSignal& p : parts) {
    order = std::min(order, p.max_order());
    if (p.kind() == Kind::sampled) kind = Kind::sampled;
  }
  ForcingSignal f = callable(
      dim,
      [copies, dim](double t, int o) -> CVector {
        CVector acc = CVector::Zero(dim);
        for (const ForcingSignal& p : *copies) acc += p.derivative(t, o);
        return acc;
      },
      order);
  f.kind_ = kind;
  return f;
}

ForcingSignal ForcingSignal::differentiated(int order) const {
  if (order == 0) return *this;
  if (order > max_order_)
    throw InsufficientSmoothness("derivative of order " + std::to_string(order) +
                                 " requested; forcing provides " + std::to_string(max_order_));
  if (kind_ == Kind::piecewise_polynomial) {
    std::vector<ExpPoly> pieces;
    for (ExpPoly p : pieces_) {
      for (int i = 0; i < order; ++i) p = p.derivative();
      pieces.push_back(std::move(p));
    }
    return piecewise(breaks_, std::move(pieces));
  }
  auto self = std::make_shared<ForcingSignal>(*this);
  ForcingSignal f = callable(
      dim_, [self, order](double t, int o) -> CVector { return self->derivative(t, o + order); },
      max_order_ == kUnlimited ? kUnlimited : max_order_ - order);
  f.kind_ = kind_;
  return f;
}

}  // namespace adae
