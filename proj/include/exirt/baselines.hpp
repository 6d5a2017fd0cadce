#pragma once

#include <cstdint>

#include "exirt/dataset.hpp"
#include "exirt/ensemble.hpp"
#include "exirt/rank.hpp"

namespace exirt {

/// Mean test-accuracy drop after shuffling one column, over `repeats` seeded
/// shuffles. Ranked descending.
AttributeRank permutation_importance_rank(const TrainedEnsemble& model, const Dataset& test, int repeats,
                                          std::uint64_t seed);

/// Leave-one-covariate-out: baseline test accuracy minus the accuracy of a
/// model retrained (same family, hyperparameters and seed) with the attribute
/// removed. Ranked descending.
AttributeRank loco_rank(const Dataset& train, const Dataset& test, Family family, const Hyperparameters& hyper,
                        std::uint64_t seed);

/// Information gain (bits) of the best single split on each attribute:
/// best threshold for ordered attributes, one branch per category for symbolic
/// ones. Uses the true labels, so it is an importance rank. Ranked descending.
AttributeRank info_gain_rank(const Dataset& train);

/// Gain of the best split of `labels` on one column.
double information_gain(std::span<const double> values, std::span<const int> labels, bool categorical);

}  // namespace exirt
