#pragma once

#include <span>

namespace agee {

/// Mann-Whitney rank AUC over raw score values, ties at half credit.
/// Both classes must be nonempty.
double rank_auc(std::span<const double> positives,
                std::span<const double> negatives);

}  // namespace agee
