#pragma once

#include "mbci/recording.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace mbci {

/// Subtracts, per sample, the mean over all channels of the given kinds.
/// Other channels are untouched. Needs at least two matching channels.
Recording common_average_reference(const Recording& recording,
                                   std::initializer_list<ChannelKind> kinds);
void common_average_reference_inplace(Recording& recording, std::initializer_list<ChannelKind> kinds);

/// Hjorth small Laplacian: centre minus the mean of the neighbours.
Vector surface_laplacian(const Recording& recording, const std::string& center,
                         const std::vector<std::string>& neighbors);

/// Per-trial Laplacian; result has one channel labelled "<center>_lap".
Epochs surface_laplacian(const Epochs& epochs, const std::string& center,
                         const std::vector<std::string>& neighbors);

}  // namespace mbci
