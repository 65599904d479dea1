#pragma once

#include "mbci/frame.hpp"
#include "mbci/recording.hpp"

#include <cstdint>
#include <functional>

namespace mbci {

class BytePipe;

struct ProducerOptions {
    std::size_t chunk_samples = 32;
    /// Real-time factor: 1 streams in real time, 2 twice as fast, 0 as fast
    /// as possible. Only wall-clock timing depends on it.
    double pacing = 0.0;
    std::uint16_t data_stream_id = 0;
    std::uint16_t marker_stream_id = 1;
    /// Added to every timestamp (device clock).
    double clock_offset_s = 0.0;
};

/// Frames of a recording: DATA chunks in order, each MARKER emitted before
/// the first DATA frame that starts after it, remaining markers, then END.
/// Marker timestamps must be strictly increasing.
void produce_frames(const Recording& recording, const MarkerList& markers, const ProducerOptions& options,
                    const std::function<void(const StreamFrame&)>& sink);

/// Streams the frames into a pipe and closes it; on error the pipe is
/// failed and the error rethrown.
void stream_producer(const Recording& recording, const MarkerList& markers, const ProducerOptions& options,
                     BytePipe& pipe);

}  // namespace mbci
