#pragma once

#include "mbci/recording.hpp"

#include <cstddef>
#include <span>

namespace mbci {

/// Cuts one epoch per marker over [marker + tmin, marker + tmax).
/// Length is round((tmax - tmin) * fs); the first sample is
/// round((marker + tmin) * fs). Windows leaving the recording are dropped
/// and counted in Epochs::dropped. Labels are taken from the markers.
Epochs epoch_extract(const Recording& recording, const MarkerList& markers, double tmin, double tmax);

/// Same, restricted to a subset of channel rows.
Epochs epoch_extract(const Recording& recording, const MarkerList& markers, double tmin, double tmax,
                     std::span<const std::size_t> rows);

struct RejectResult {
    Epochs kept;
    std::size_t rejected = 0;
};

/// Drops trials whose peak-to-peak range on any EEG channel strictly
/// exceeds `threshold_volts`.
RejectResult peak_to_peak_reject(const Epochs& epochs, double threshold_volts);

inline constexpr double kMicrovolt = 1e-6;

}  // namespace mbci
