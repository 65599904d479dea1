#pragma once

#include "mbci/recording.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mbci {

/// Sufficient statistics of one trial: scatter of the mean-removed samples,
/// sample count and the sum of fourth powers of sample norms (for shrinkage).
struct TrialScatter {
    Matrix scatter;
    double n_samples = 0.0;
    double fourth_moment = 0.0;
};

TrialScatter trial_scatter(const Matrix& trial);
std::vector<TrialScatter> trial_scatters(const Epochs& epochs);

struct SpatialFilterBank {
    Matrix filters;                 // n_filters x channels, unit rows
    Matrix patterns;                // channels x n_filters
    Vector eigenvalues;             // generalized eigenvalue per filter
    std::vector<int> filter_class;  // class the filter was extracted for
    std::vector<int> classes;
    std::vector<double> shrinkage;  // per class
    std::vector<std::string> channel_labels;
    std::vector<std::size_t> mi_order;

    std::size_t n_filters() const { return static_cast<std::size_t>(filters.rows()); }
};

struct CspOptions {
    std::size_t n_filters = 6;
    /// Fixed shrinkage in [0,1]; Ledoit-Wolf when empty.
    std::optional<double> shrinkage;
};

/// Ledoit-Wolf shrinkage coefficient from pooled sample statistics.
double ledoit_wolf_shrinkage(const Matrix& scatter, double n_samples, double fourth_moment);

/// One-vs-rest CSP: for every class solve S_c v = lambda (S_c + S_rest) v and
/// keep the eigenvectors with the largest eigenvalues.
SpatialFilterBank csp_fit_multiclass(const Epochs& epochs, const CspOptions& options = {});

/// Same fit from precomputed trial statistics, restricted to `trials`.
SpatialFilterBank csp_fit_from_scatters(std::span<const TrialScatter> scatters, std::span<const int> labels,
                                        std::span<const std::size_t> trials,
                                        const std::vector<std::string>& channel_labels,
                                        const CspOptions& options = {});

/// trials x n_filters, log(var(f' x) + 1e-12).
Matrix csp_log_bandpower(const SpatialFilterBank& bank, const Epochs& epochs);
Matrix csp_log_bandpower(const SpatialFilterBank& bank, std::span<const TrialScatter> scatters,
                         std::span<const std::size_t> trials);

/// Writes the patterns as CSV: channel,x,y,pattern_0..pattern_k.
void write_patterns_csv(const std::string& path, const SpatialFilterBank& bank,
                        const std::vector<ChannelInfo>& channels);

}  // namespace mbci
