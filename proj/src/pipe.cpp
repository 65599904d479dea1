#include "mbci/pipe.hpp"

#include "mbci/error.hpp"

#include <algorithm>
#include <vector>

namespace mbci {

BytePipe::BytePipe(std::size_t capacity) : m_capacity(std::max<std::size_t>(capacity, 1)) {}

void BytePipe::write(std::span<const std::uint8_t> bytes)
{
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        std::unique_lock lock(m_mutex);
        m_writable.wait(lock, [&] { return m_failed || m_closed || m_buffer.size() < m_capacity; });
        if (m_failed || m_closed)
            throw Error(Errc::Protocol, "write to a closed stream");
        const std::size_t n = std::min(bytes.size() - pos, m_capacity - m_buffer.size());
        m_buffer.insert(m_buffer.end(), bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                        bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
        pos += n;
        lock.unlock();
        m_readable.notify_one();
    }
}

bool BytePipe::read_exact(std::span<std::uint8_t> out)
{
    std::size_t pos = 0;
    while (pos < out.size()) {
        std::unique_lock lock(m_mutex);
        m_readable.wait(lock, [&] { return m_failed || m_closed || !m_buffer.empty(); });
        if (m_failed)
            throw Error(Errc::Protocol, "stream failed");
        if (m_buffer.empty()) {
            if (pos == 0)
                return false;
            throw Error(Errc::Protocol, "stream ended inside a frame");
        }
        const std::size_t n = std::min(out.size() - pos, m_buffer.size());
        std::copy_n(m_buffer.begin(), n, out.begin() + static_cast<std::ptrdiff_t>(pos));
        m_buffer.erase(m_buffer.begin(), m_buffer.begin() + static_cast<std::ptrdiff_t>(n));
        pos += n;
        lock.unlock();
        m_writable.notify_one();
    }
    return true;
}

void BytePipe::close()
{
    {
        std::lock_guard lock(m_mutex);
        m_closed = true;
    }
    m_readable.notify_all();
    m_writable.notify_all();
}

void BytePipe::fail()
{
    {
        std::lock_guard lock(m_mutex);
        m_failed = true;
    }
    m_readable.notify_all();
    m_writable.notify_all();
}

void write_frame(BytePipe& pipe, const StreamFrame& frame)
{
    pipe.write(encode_frame(frame));
}

std::optional<StreamFrame> read_frame(BytePipe& pipe)
{
    std::vector<std::uint8_t> buf(kFrameHeaderBytes);
    if (!pipe.read_exact(buf))
        return std::nullopt;
    const std::size_t payload = frame_payload_bytes(buf);
    buf.resize(kFrameHeaderBytes + payload);
    if (payload > 0 && !pipe.read_exact(std::span<std::uint8_t>(buf).subspan(kFrameHeaderBytes)))
        throw Error(Errc::Protocol, "stream ended inside a frame");
    return decode_frame(buf);
}

}  // namespace mbci
