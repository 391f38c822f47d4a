#pragma once

// Internal Vose alias tables for O(1) discrete sampling. Not installed.

#include <cstdint>
#include <span>
#include <vector>

#include "agee/errors.hpp"
#include "agee/rng.hpp"

namespace agee {

class AliasTable {
 public:
  AliasTable() = default;

  static AliasTable build(std::span<const double> weights) {
    AliasTable t;
    const std::size_t n = weights.size();
    t.prob_.assign(n, 0.0);
    t.alias_.assign(n, 0);
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) raise(ErrorKind::Config, "alias table weight < 0");
      total += w;
    }
    if (!(total > 0.0)) raise(ErrorKind::Config, "alias table needs positive mass");

    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i)
      scaled[i] = weights[i] * static_cast<double>(n) / total;
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i)
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    while (!small.empty() && !large.empty()) {
      const std::uint32_t s = small.back();
      const std::uint32_t l = large.back();
      small.pop_back();
      large.pop_back();
      t.prob_[s] = scaled[s];
      t.alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (std::uint32_t i : large) t.prob_[i] = 1.0;
    for (std::uint32_t i : small) t.prob_[i] = 1.0;  // numerical leftovers
    return t;
  }

  std::size_t size() const noexcept { return prob_.size(); }

  /// Two RNG draws per sample, always.
  std::uint32_t sample(Rng& rng) const {
    const std::uint32_t k = static_cast<std::uint32_t>(rng.below(prob_.size()));
    const double coin = rng.unit();
    return coin < prob_[k] ? k : alias_[k];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace agee
