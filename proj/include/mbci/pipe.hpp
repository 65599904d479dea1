#pragma once

#include "mbci/frame.hpp"

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <span>

namespace mbci {

/// Bounded, blocking, in-process byte stream (FIFO, no loss). Writers block
/// while the buffer is full; readers block while it is empty.
class BytePipe {
public:
    explicit BytePipe(std::size_t capacity = 1 << 20);

    /// Throws Errc::Protocol after close() or fail().
    void write(std::span<const std::uint8_t> bytes);
    /// Fills `out` completely. Returns false on a clean end of stream before
    /// the first byte; throws Errc::Protocol when the stream ends mid-way or
    /// was failed.
    bool read_exact(std::span<std::uint8_t> out);

    /// No more writes; readers drain what is buffered.
    void close();
    /// Abort both directions.
    void fail();

private:
    std::size_t m_capacity;
    std::deque<std::uint8_t> m_buffer;
    bool m_closed = false;
    bool m_failed = false;
    std::mutex m_mutex;
    std::condition_variable m_readable;
    std::condition_variable m_writable;
};

void write_frame(BytePipe& pipe, const StreamFrame& frame);
/// Next frame, or nullopt at a clean end of stream.
std::optional<StreamFrame> read_frame(BytePipe& pipe);

}  // namespace mbci
