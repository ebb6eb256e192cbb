#include "eqcapm/vol_surface.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eqcapm/equilibrium.hpp"
#include "eqcapm/error.hpp"
#include "eqcapm/fourier_pricer.hpp"

namespace eqcapm {

namespace {

constexpr double kVolLow = 1e-6;
constexpr double kVolHigh = 5.0;

double ncdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double npdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

double reference_call(double spot, double strike, double tau, double vol, VolConvention conv) {
  const double sd = vol * std::sqrt(tau);
  if (conv == VolConvention::Normal) {
    if (sd <= 0.0) return std::max(spot - strike, 0.0);
    const double d = (spot - strike) / sd;
    return (spot - strike) * ncdf(d) + sd * npdf(d);
  }
  if (sd <= 0.0) return std::max(spot - strike, 0.0);
  const double d1 = std::log(spot / strike) / sd + 0.5 * sd;
  return spot * ncdf(d1) - strike * ncdf(d1 - sd);
}

ImpliedVol implied_vol(double spot, double strike, double tau, double call_price,
                       VolConvention conv) {
  require(tau > 0.0, ErrorKind::InvalidArgument, "implied_vol: maturity must be > 0");
  ImpliedVol out;
  if (!std::isfinite(call_price)) return out;
  const bool lognormal = conv == VolConvention::Lognormal;
  if (lognormal && (spot <= 0.0 || strike <= 0.0)) return out;
  const double intrinsic = std::max(spot - strike, 0.0);
  if (call_price < intrinsic || (lognormal && call_price >= spot)) return out;
  double lo = kVolLow;
  double hi = lognormal ? kVolHigh : kVolHigh * std::max(std::abs(spot), 1.0);
  if (call_price == intrinsic) {
    out.vol = lo;
    out.residual = reference_call(spot, strike, tau, lo, conv) - call_price;
    return out;
  }
  const double f_lo = reference_call(spot, strike, tau, lo, conv) - call_price;
  const double f_hi = reference_call(spot, strike, tau, hi, conv) - call_price;
  if (f_lo > 0.0 || f_hi < 0.0) {
    out.vol = f_lo > 0.0 ? lo : hi;
    out.residual = f_lo > 0.0 ? f_lo : f_hi;
    return out;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (reference_call(spot, strike, tau, mid, conv) - call_price > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.vol = 0.5 * (lo + hi);
  out.residual = reference_call(spot, strike, tau, out.vol, conv) - call_price;
  out.invertible = true;
  return out;
}

Smile smile(const SmileSetup& setup, double sweep_value) {
  require(static_cast<bool>(setup.model), ErrorKind::InvalidArgument, "smile: model missing");
  require(!setup.strikes.empty(), ErrorKind::InvalidArgument, "smile: empty strike grid");
  Smile out;
  out.sweep_value = sweep_value;
  out.points.resize(setup.strikes.size());
  for (std::size_t k = 0; k < setup.strikes.size(); ++k) out.points[k].strike = setup.strikes[k];

  const std::vector<double> state =
      setup.state.empty() ? setup.model->initial_state() : setup.state;
  try {
    const MarketSpec m = single_agent_market(setup.gamma, setup.strikes, true, setup.T);
    const PricingProblem pb = PricingProblem::from_market(m);
    const PriceResult r =
        price_ratio(*setup.model, pb, default_damping(pb), setup.quad, setup.t, state);
    out.spot = r.prices[0];
    const double tau = setup.T - setup.t;
    for (std::size_t k = 0; k < setup.strikes.size(); ++k) {
      SmilePoint& pt = out.points[k];
      pt.call_price = r.prices[k + 1];
      const ImpliedVol iv = implied_vol(out.spot, pt.strike, tau, pt.call_price, setup.convention);
      if (iv.invertible) {
        pt.implied_vol = iv.vol;
      } else {
        pt.error = "NotInvertible";
      }
    }
  } catch (const std::exception& e) {
    for (SmilePoint& pt : out.points) {
      pt.call_price = std::nan("");
      pt.error = e.what();
    }
  }
  return out;
}

std::vector<Smile> smile_sweep(const std::function<SmileSetup(double)>& make,
                               std::span<const double> sweep_values) {
  std::vector<Smile> out;
  for (double v : sweep_values) {
    try {
      out.push_back(smile(make(v), v));
    } catch (const std::exception& e) {
      Smile s;
      s.sweep_value = v;
      s.spot = std::nan("");
      SmilePoint pt;
      pt.call_price = std::nan("");
      pt.error = e.what();
      s.points.push_back(pt);
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<double> default_strike_grid(double center, double sd, std::size_t n) {
  require(n >= 1 && sd >= 0.0, ErrorKind::InvalidArgument, "default_strike_grid: bad arguments");
  if (n == 1) return {center};
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = center - 2.0 * sd + 4.0 * sd * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return k;
}

TerminalMoments terminal_moments(const AffineModel& model, double T, double t,
                                 std::span<const double> state) {
  const double tau = T - t;
  require(tau > 0.0, ErrorKind::InvalidArgument, "terminal_moments: need t < T");
  const double h = 1e-3;
  const double lp = model.log_transform_x(tau, cplx(h, 0.0), state).real();
  const double l0 = model.log_transform_x(tau, cplx(0.0, 0.0), state).real();
  const double lm = model.log_transform_x(tau, cplx(-h, 0.0), state).real();
  TerminalMoments m;
  m.mean = (lp - lm) / (2.0 * h);
  m.sd = std::sqrt(std::max(0.0, (lp - 2.0 * l0 + lm) / (h * h)));
  return m;
}

double vol_at_moneyness(const Smile& s, double moneyness) {
  std::vector<std::pair<double, double>> pts;
  for (const SmilePoint& p : s.points) {
    if (p.implied_vol) pts.emplace_back(p.strike / s.spot, *p.implied_vol);
  }
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto [m0, v0] = pts[i];
    const auto [m1, v1] = pts[i + 1];
    if (moneyness >= m0 && moneyness <= m1) {
      return m1 > m0 ? v0 + (v1 - v0) * (moneyness - m0) / (m1 - m0) : v0;
    }
  }
  return std::nan("");
}

bool dominates(const Smile& a, const Smile& b, double lo, double hi, int* compared) {
  int n = 0;
  bool ok = true;
  for (const SmilePoint& p : a.points) {
    if (!p.implied_vol) continue;
    const double m = p.strike / a.spot;
    if (m < lo || m > hi) continue;
    const double vb = vol_at_moneyness(b, m);
    if (std::isnan(vb)) continue;
    ++n;
    if (!(*p.implied_vol > vb)) ok = false;
  }
  if (compared) *compared = n;
  return ok && n > 0;
}

}  // namespace eqcapm
