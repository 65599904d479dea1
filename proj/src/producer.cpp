#include "mbci/producer.hpp"

#include "mbci/error.hpp"
#include "mbci/pipe.hpp"

#include <chrono>
#include <limits>
#include <thread>

namespace mbci {

void produce_frames(const Recording& recording, const MarkerList& markers, const ProducerOptions& options,
                    const std::function<void(const StreamFrame&)>& sink)
{
    if (options.chunk_samples < 1 || options.chunk_samples > std::numeric_limits<std::uint16_t>::max())
        throw Error(Errc::InvalidRequest, "chunk size must lie in [1, 65535]");
    if (!(options.pacing >= 0.0))
        throw Error(Errc::InvalidRequest, "pacing must be non-negative");
    if (recording.n_channels() > std::numeric_limits<std::uint16_t>::max())
        throw Error(Errc::InvalidRequest, "too many channels for the wire format");
    for (std::size_t i = 1; i < markers.events.size(); ++i)
        if (!(markers.events[i].time_s > markers.events[i - 1].time_s))
            throw Error(Errc::Protocol, "marker timestamps must be strictly increasing");

    const double base = recording.t0 + options.clock_offset_s;
    const auto n_ch = static_cast<std::uint16_t>(recording.n_channels());
    const std::size_t total = recording.n_samples();
    const auto start = std::chrono::steady_clock::now();
    std::size_t next_marker = 0;

    for (std::size_t first = 0; first < total; first += options.chunk_samples) {
        const std::size_t n = std::min(options.chunk_samples, total - first);
        const double ts = base + static_cast<double>(first) / recording.fs;
        while (next_marker < markers.events.size() && base + markers.events[next_marker].time_s < ts) {
            const auto& m = markers.events[next_marker++];
            sink(make_marker_frame(options.marker_stream_id, base + m.time_s, to_string(m.label)));
        }
        if (options.pacing > 0.0) {
            // a chunk is released once its last sample has been "acquired"
            const double due = static_cast<double>(first + n) / recording.fs / options.pacing;
            std::this_thread::sleep_until(start + std::chrono::duration<double>(due));
        }
        std::vector<float> samples(std::size_t{n_ch} * n);
        for (std::size_t c = 0; c < n_ch; ++c)
            for (std::size_t i = 0; i < n; ++i)
                samples[c * n + i] = static_cast<float>(
                    recording.data(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(first + i)));
        sink(make_data_frame(options.data_stream_id, ts, n_ch, static_cast<std::uint16_t>(n), std::move(samples)));
    }
    while (next_marker < markers.events.size()) {
        const auto& m = markers.events[next_marker++];
        sink(make_marker_frame(options.marker_stream_id, base + m.time_s, to_string(m.label)));
    }
    sink(make_end_frame(options.data_stream_id, base + static_cast<double>(total) / recording.fs));
}

void stream_producer(const Recording& recording, const MarkerList& markers, const ProducerOptions& options,
                     BytePipe& pipe)
{
    try {
        produce_frames(recording, markers, options, [&](const StreamFrame& f) { write_frame(pipe, f); });
    } catch (...) {
        pipe.fail();
        throw;
    }
    pipe.close();
}

}  // namespace mbci
