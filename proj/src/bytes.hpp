#pragma once

// Little-endian byte packing shared by the MBR1 container and the stream
// wire format.

#include "mbci/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace mbci::detail {

static_assert(std::endian::native == std::endian::little, "little-endian host required");

class ByteWriter {
public:
    explicit ByteWriter(std::vector<std::uint8_t>& out) : m_out(out) {}

    template <class T>
    void put(T value)
    {
        std::uint8_t buf[sizeof(T)];
        std::memcpy(buf, &value, sizeof(T));
        m_out.insert(m_out.end(), buf, buf + sizeof(T));
    }
    void put_bytes(std::span<const std::uint8_t> bytes) { m_out.insert(m_out.end(), bytes.begin(), bytes.end()); }
    void put_string(const std::string& s) { m_out.insert(m_out.end(), s.begin(), s.end()); }

private:
    std::vector<std::uint8_t>& m_out;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> in) : m_in(in) {}

    template <class T>
    T get()
    {
        need(sizeof(T));
        T value;
        std::memcpy(&value, m_in.data() + m_pos, sizeof(T));
        m_pos += sizeof(T);
        return value;
    }
    std::span<const std::uint8_t> get_bytes(std::size_t n)
    {
        need(n);
        auto s = m_in.subspan(m_pos, n);
        m_pos += n;
        return s;
    }
    std::size_t position() const { return m_pos; }
    std::size_t remaining() const { return m_in.size() - m_pos; }

private:
    void need(std::size_t n) const
    {
        if (m_pos + n > m_in.size())
            throw Error(Errc::Format, "truncated buffer");
    }
    std::span<const std::uint8_t> m_in;
    std::size_t m_pos = 0;
};

}  // namespace mbci::detail
