#pragma once

#include "mbci/frame.hpp"
#include "mbci/recording.hpp"

#include <cstdint>
#include <vector>

namespace mbci {

/// A frame together with its arrival time on the recorder's clock.
struct ReceivedFrame {
    StreamFrame frame;
    double arrival_s = 0.0;
};

/// Everything that arrived over one transport (one device clock).
using Transport = std::vector<ReceivedFrame>;

/// Static description of a data stream (there is no metadata exchange).
struct DataStreamInfo {
    std::uint16_t stream_id = 0;
    double fs = 0.0;
    std::vector<ChannelInfo> channels;
};

struct StreamGap {
    std::uint16_t stream_id = 0;
    double time_s = 0.0;  // on the reference clock
    std::size_t missing_samples = 0;
};

struct RecordedSession {
    /// One recording per described data stream, t0 on the reference clock.
    std::vector<Recording> recordings;
    /// Markers relative to the start of the first recording.
    MarkerList markers;
    /// Clock offset of every transport relative to transport 0.
    std::vector<double> offsets_s;
    std::vector<StreamGap> gaps;
};

/// Clock offset of a transport against the reference transport: the median
/// of (timestamp - arrival) over its frames minus the same for the reference.
double estimate_clock_offset(const Transport& transport, const Transport& reference);

/// Merges the transports on the reference clock (transport 0). Throws
/// Errc::Validation for an empty set or an undescribed data stream.
RecordedSession record_streams(const std::vector<Transport>& transports, const std::vector<DataStreamInfo>& streams);

}  // namespace mbci
