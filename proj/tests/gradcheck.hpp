#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "af/ad.hpp"
#include "af/rng.hpp"

namespace aftest {

// Central-difference gradient check over sampled coordinates. Two step sizes
// guard against lrelu/abs kinks (central differences are only valid where f
// is smooth; inconsistent estimates mean a kink was crossed and the
// coordinate is resampled). Coordinates whose gradient is negligible against
// the largest component are compared with a matching absolute floor.
// Returns the worst relative error over `samples` accepted coordinates.
inline double gradcheck(
    const std::function<af::ad::Var(const std::vector<af::ad::Var>&)>& f,
    std::vector<af::Tensor> inputs, uint64_t seed, double h = 1e-2, int samples = 24) {
  using af::Tensor;
  using namespace af::ad;

  auto eval = [&](const std::vector<Tensor>& xs) {
    std::vector<Var> leaves;
    for (const auto& t : xs) leaves.push_back(leaf(t));
    return static_cast<double>(f(leaves)->val.v[0]);
  };

  std::vector<Var> leaves;
  for (const auto& t : inputs) leaves.push_back(leaf(t));
  Var root = f(leaves);
  Grads grads = backward(root);
  std::vector<Tensor> gt;
  double gmax = 0.0;
  int64_t total = 0;
  for (size_t i = 0; i < leaves.size(); ++i) {
    gt.push_back(grads.tensor_of(leaves[i]));
    for (float g : gt.back().v) gmax = std::max(gmax, static_cast<double>(std::fabs(g)));
    total += inputs[i].numel();
  }
  // coordinates well below the dominant gradient are held to a matching
  // absolute standard (fp32 quotients cannot resolve them relatively)
  const double floor = std::max(1e-6, 5e-2 * gmax);

  af::Rng rng(seed);
  double worst = 0.0;
  int accepted = 0, attempts = 0;
  const int want = std::min<int64_t>(samples, total);
  while (accepted < want) {
    if (++attempts > 60 * want) throw std::runtime_error("gradcheck: function too non-smooth");
    int64_t flat = static_cast<int64_t>(rng.uniform() * total);
    size_t ti = 0;
    while (flat >= inputs[ti].numel()) flat -= inputs[ti++].numel();

    auto probe = [&](double step) {
      std::vector<Tensor> xs = inputs;
      xs[ti].v[flat] += static_cast<float>(step);
      return eval(xs);
    };
    const double d1 = (probe(h) - probe(-h)) / (2.0 * h);
    const double d2 = (probe(h / 2) - probe(-h / 2)) / h;
    const double scale = std::max({floor, std::fabs(d1), std::fabs(d2)});
    if (std::fabs(d1 - d2) / scale > 0.02) continue;  // kink crossed, resample
    const double numeric = (4.0 * d2 - d1) / 3.0;
    const double analytic = gt[ti].v[flat];
    ++accepted;
    const double denom = std::max({floor, std::fabs(analytic), std::fabs(numeric)});
    worst = std::max(worst, std::fabs(analytic - numeric) / denom);
  }
  return worst;
}

}  // namespace aftest
