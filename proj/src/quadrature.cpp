#include "eqcapm/quadrature.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <sstream>

#include "eqcapm/error.hpp"

namespace eqcapm {

namespace {

constexpr unsigned kNodes = 64;

struct Rule {
  std::array<double, kNodes> x{};
  std::array<double, kNodes> w{};
};

const Rule& rule() {
  static const Rule r = [] {
    using G = boost::math::quadrature::gauss<double, kNodes>;
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    Rule out;
    std::size_t i = 0;
    for (std::size_t j = 0; j < ab.size(); ++j) {
      out.x[i] = -ab[j];
      out.w[i++] = wt[j];
      out.x[i] = ab[j];
      out.w[i++] = wt[j];
    }
    return out;
  }();
  return r;
}

void composite(const VectorIntegrand& f, std::size_t dim, double a, double b, int pieces,
               std::vector<double>& acc, std::vector<double>& mag, std::vector<double>& buf,
               std::size_t& evals) {
  const Rule& r = rule();
  std::fill(acc.begin(), acc.end(), 0.0);
  std::fill(mag.begin(), mag.end(), 0.0);
  const double h = (b - a) / pieces;
  for (int p = 0; p < pieces; ++p) {
    const double lo = a + p * h;
    const double half = 0.5 * h;
    const double mid = lo + half;
    for (unsigned n = 0; n < kNodes; ++n) {
      f(mid + half * r.x[n], buf);
      ++evals;
      for (std::size_t d = 0; d < dim; ++d) {
        acc[d] += half * r.w[n] * buf[d];
        mag[d] += half * r.w[n] * std::abs(buf[d]);
      }
    }
  }
}

}  // namespace

void QuadratureConfig::validate() const {
  require(abs_tol > 0.0 && rel_tol > 0.0, ErrorKind::InvalidTolerance,
          "quadrature: tolerances must be positive");
  require(first_panel > 0.0 && max_panels > 0 && max_subdivisions > 0, ErrorKind::InvalidArgument,
          "quadrature: panel settings must be positive");
  require(truncation >= 0.0, ErrorKind::InvalidArgument, "quadrature: truncation must be >= 0");
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
  const Rule& r = rule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (unsigned n = 0; n < kNodes; ++n) acc += r.w[n] * f(mid + half * r.x[n]);
  return half * acc;
}

QuadratureResult integrate_half_line(const VectorIntegrand& f, std::size_t dim,
                                     const QuadratureConfig& cfg, double tail_limit) {
  cfg.validate();
  QuadratureResult res;
  res.values.assign(dim, 0.0);
  res.abs_error.assign(dim, 0.0);
  std::vector<double> coarse(dim), fine(dim), buf(dim), mag(dim), seen(dim, 0.0);

  auto small = [&](const std::vector<double>& v) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double scale = std::max(std::abs(res.values[d]), seen[d]);
      if (v[d] > std::max(cfg.abs_tol, cfg.rel_tol * scale)) {
        return false;
      }
    }
    return true;
  };

  double a = 0.0;
  double b = cfg.first_panel;
  int pieces = 1;
  int quiet_panels = 0;
  for (int panel = 0; panel < cfg.max_panels; ++panel) {
    composite(f, dim, a, b, pieces, coarse, mag, buf, res.evaluations);
    for (;;) {
      if (2 * pieces > cfg.max_subdivisions) {
        std::ostringstream os;
        os << "quadrature: panel [" << a << ", " << b << "] not resolved with "
           << cfg.max_subdivisions << " subintervals";
        fail(ErrorKind::QuadratureNotConverged, os.str());
      }
      pieces *= 2;
      composite(f, dim, a, b, pieces, fine, mag, buf, res.evaluations);
      bool ok = true;
      for (std::size_t d = 0; d < dim; ++d) {
        // cancelling integrands: roundoff is set by the mass of |f|, not by the sum
        const double scale = std::max(std::abs(res.values[d] + fine[d]), seen[d] + mag[d]);
        if (std::abs(fine[d] - coarse[d]) > std::max(cfg.abs_tol, cfg.rel_tol * scale)) ok = false;
      }
      if (ok) break;
      coarse.swap(fine);
    }
    for (std::size_t d = 0; d < dim; ++d) {
      res.values[d] += fine[d];
      res.abs_error[d] += std::abs(fine[d] - coarse[d]);
      seen[d] += mag[d];
    }
    res.upper = b;
    quiet_panels = small(mag) ? quiet_panels + 1 : 0;
    if (b >= tail_limit || quiet_panels >= 2) return res;
    // Next panel is twice as long; starting from half the accepted count lets
    // the node density fall off in smooth tails and refinement restores it.
    pieces = std::max(1, pieces / 2);
    a = b;
    b *= 2.0;
  }
  std::ostringstream os;
  os << "quadrature: integrand not negligible after " << cfg.max_panels << " panels (s=" << a
     << ")";
  fail(ErrorKind::QuadratureNotConverged, os.str());
}

}  // namespace eqcapm
