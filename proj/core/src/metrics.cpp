#include "agee/metrics.hpp"

#include <algorithm>
#include <vector>

#include "agee/errors.hpp"

namespace agee {

double rank_auc(std::span<const double> positives,
                std::span<const double> negatives) {
  if (positives.empty() || negatives.empty())
    raise(ErrorKind::UndefinedMetric, "AUC needs both classes nonempty");
  struct Item {
    double score;
    bool positive;
  };
  std::vector<Item> items;
  items.reserve(positives.size() + negatives.size());
  for (double s : positives) items.push_back({s, true});
  for (double s : negatives) items.push_back({s, false});
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.score < b.score; });

  double pos_rank_sum = 0.0;
  std::size_t k = 0;
  while (k < items.size()) {
    std::size_t run_end = k;
    while (run_end + 1 < items.size() &&
           items[run_end + 1].score == items[k].score)
      ++run_end;
    const double avg_rank = 0.5 * static_cast<double>(k + 1 + run_end + 1);
    for (std::size_t t = k; t <= run_end; ++t)
      if (items[t].positive) pos_rank_sum += avg_rank;
    k = run_end + 1;
  }
  const double np = static_cast<double>(positives.size());
  const double nn = static_cast<double>(negatives.size());
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

}  // namespace agee
