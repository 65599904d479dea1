#pragma once

#include "mbci/recording.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mbci {

struct IcaOptions {
    std::size_t n_components = 0;  // 0 = all channels
    std::uint64_t seed = 0;
    double tolerance = 1e-6;
    int max_iterations = 500;
    /// Fit on every k-th sample so that at most this many are used (0 = all).
    std::size_t max_fit_samples = 0;
};

/// Unmixing = rotation * whitener, mixing its inverse on the retained subspace.
struct IcaDecomposition {
    Matrix unmixing;   // n_components x n_channels
    Matrix mixing;     // n_channels x n_components
    Matrix whitener;   // n_components x n_channels
    Matrix rotation;   // n_components x n_components, orthogonal
    Vector mean;       // n_channels
    std::vector<std::string> channel_labels;
    std::vector<std::size_t> rejected;
    bool converged = false;
    int iterations = 0;
    std::size_t fit_samples = 0;
    std::string fitted_on;

    std::size_t n_components() const { return static_cast<std::size_t>(unmixing.rows()); }
    /// Component time courses for channel data laid out like the fit.
    Matrix sources(const Matrix& data) const;
};

/// Symmetric (parallel) FastICA with the log-cosh contrast after PCA
/// whitening. Rows of `data` are channels.
IcaDecomposition fastica_fit(const Matrix& data, std::vector<std::string> channel_labels,
                             const IcaOptions& options);

/// Fits on the EEG channels of a recording.
IcaDecomposition fastica_fit(const Recording& recording, const IcaOptions& options);

/// Fits on the EEG channels of concatenated epochs.
IcaDecomposition fastica_fit(const Epochs& epochs, const IcaOptions& options);

/// Marks components whose time course has |Pearson r| > threshold with any
/// of the EOG channels.
IcaDecomposition ica_mark_artifacts(IcaDecomposition ica, const Recording& recording,
                                    const std::vector<std::string>& eog_labels, double threshold = 0.7);

/// |r| between every component and every EOG channel (components x eog).
Matrix ica_eog_correlations(const IcaDecomposition& ica, const Recording& recording,
                            const std::vector<std::string>& eog_labels);

/// Removes the rejected components from the fitted channels.
Recording ica_apply(const IcaDecomposition& ica, const Recording& recording);
void ica_apply_inplace(const IcaDecomposition& ica, Recording& recording);

}  // namespace mbci
