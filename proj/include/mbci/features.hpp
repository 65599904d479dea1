#pragma once

#include "mbci/recording.hpp"

namespace mbci {

/// trials x channels matrix of mean(x^2) per EMG channel. Every channel of
/// the epochs must be an EMG channel.
Matrix emg_mean_power_features(const Epochs& epochs);

/// Mean of x^2 over one channel-major window (channels x samples).
Vector mean_power(const Eigen::Ref<const Matrix>& window);

}  // namespace mbci
