#include "mbci/mutual_info.hpp"

#include "mbci/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace mbci {

std::vector<int> equal_frequency_bins(std::span<const double> values, int n_bins)
{
    if (n_bins < 1)
        throw Error(Errc::InvalidRequest, "bin count must be positive");
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<int> bins(n);
    for (std::size_t r = 0; r < n; ++r)
        bins[order[r]] = static_cast<int>(r * static_cast<std::size_t>(n_bins) / n);
    return bins;
}

double mutual_information_bits(std::span<const double> feature, std::span<const int> labels, int n_bins)
{
    if (feature.size() != labels.size())
        throw Error(Errc::Validation, "feature and labels differ in length");
    const auto bins = equal_frequency_bins(feature, n_bins);
    std::map<int, std::size_t> label_index;
    for (int l : labels)
        label_index.emplace(l, 0);
    std::size_t next = 0;
    for (auto& kv : label_index)
        kv.second = next++;
    const std::size_t n_labels = label_index.size();
    std::vector<double> joint(static_cast<std::size_t>(n_bins) * n_labels, 0.0);
    std::vector<double> pb(static_cast<std::size_t>(n_bins), 0.0);
    std::vector<double> pl(n_labels, 0.0);
    const double n = static_cast<double>(feature.size());
    for (std::size_t i = 0; i < feature.size(); ++i) {
        const std::size_t b = static_cast<std::size_t>(bins[i]);
        const std::size_t l = label_index[labels[i]];
        joint[b * n_labels + l] += 1.0 / n;
        pb[b] += 1.0 / n;
        pl[l] += 1.0 / n;
    }
    double mi = 0.0;
    for (std::size_t b = 0; b < pb.size(); ++b)
        for (std::size_t l = 0; l < n_labels; ++l) {
            const double pj = joint[b * n_labels + l];
            if (pj > 0.0)
                mi += pj * std::log2(pj / (pb[b] * pl[l]));
        }
    return std::max(mi, 0.0);
}

std::vector<std::size_t> mi_order(const Matrix& features, std::span<const int> labels, int n_bins)
{
    if (features.rows() < 10)
        throw Error(Errc::InsufficientData, "mutual-information ordering needs at least 10 trials");
    std::vector<double> mi(static_cast<std::size_t>(features.cols()));
    std::vector<double> column(static_cast<std::size_t>(features.rows()));
    for (Eigen::Index f = 0; f < features.cols(); ++f) {
        for (Eigen::Index t = 0; t < features.rows(); ++t)
            column[static_cast<std::size_t>(t)] = features(t, f);
        mi[static_cast<std::size_t>(f)] = mutual_information_bits(column, labels, n_bins);
    }
    std::vector<std::size_t> order(mi.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mi[a] > mi[b]; });
    return order;
}

}  // namespace mbci
