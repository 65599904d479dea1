#pragma once

#include "mbci/recording.hpp"

#include <string>
#include <vector>

namespace mbci {

/// The 32-channel 10-20 EEG layout with 2-D azimuthal scalp coordinates
/// (Cz at the origin, T7 at x = -0.8, nasion towards +y).
std::vector<ChannelInfo> eeg32_montage();

/// 32 EEG + 4 EMG (left/right flexor and extensor) + 4 EOG channels.
std::vector<ChannelInfo> full_montage();

inline constexpr const char* kEmgLabels[4] = {"EMG_LF", "EMG_LE", "EMG_RF", "EMG_RE"};
inline constexpr const char* kEogLabels[4] = {"HEOG_L", "HEOG_R", "VEOG_U", "VEOG_D"};

/// Nearest-neighbour set used by the small Laplacian at C3/C4.
std::vector<std::string> laplacian_neighbors(const std::string& center);

}  // namespace mbci
