#pragma once

#include "mbci/recording.hpp"

#include <span>
#include <vector>

namespace mbci {

/// Equal-frequency bin index per value (rank based, ties broken by position).
std::vector<int> equal_frequency_bins(std::span<const double> values, int n_bins = 8);

/// Mutual information in bits between a binned feature and discrete labels.
double mutual_information_bits(std::span<const double> feature, std::span<const int> labels, int n_bins = 8);

/// Feature indices sorted by descending mutual information with the labels;
/// equal values keep ascending feature order. Needs at least 10 trials.
std::vector<std::size_t> mi_order(const Matrix& features, std::span<const int> labels, int n_bins = 8);

}  // namespace mbci
