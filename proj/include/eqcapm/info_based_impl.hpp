#pragma once

#include <algorithm>
#include <random>

namespace eqcapm::info {

template <class Rng>
double sample_prior(const Prior& prior, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (const auto* d = std::get_if<DiscretePrior>(&prior)) {
    double u = unif(rng);
    for (std::size_t i = 0; i + 1 < d->points.size(); ++i) {
      if (u < d->probs[i]) return d->points[i];
      u -= d->probs[i];
    }
    return d->points.back();
  }
  if (const auto* e = std::get_if<ExponentialPrior>(&prior)) {
    return std::exponential_distribution<double>(1.0 / e->kappa)(rng);
  }
  const auto& g = std::get<GridPrior>(prior);
  std::piecewise_linear_distribution<double> dist(g.x.begin(), g.x.end(), g.density.begin());
  return dist(rng);
}

}  // namespace eqcapm::info
