#include "mbci/frame.hpp"

#include "bytes.hpp"
#include "mbci/error.hpp"

#include <cstring>
#include <limits>

namespace mbci {

namespace {

constexpr char kMagic[4] = {'B', 'S', 'T', 'R'};

struct Header {
    std::uint8_t version;
    std::uint16_t stream_id;
    FrameKind kind;
    std::uint16_t n_channels;
    std::uint16_t n_samples;
    double timestamp;
    std::size_t payload;
};

Header parse_header(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kFrameHeaderBytes)
        throw Error(Errc::Protocol, "truncated frame header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw Error(Errc::Protocol, "bad frame magic");
    detail::ByteReader r(bytes.subspan(4, kFrameHeaderBytes - 4));
    Header h{};
    h.version = r.get<std::uint8_t>();
    h.stream_id = r.get<std::uint16_t>();
    const auto kind = r.get<std::uint8_t>();
    h.n_channels = r.get<std::uint16_t>();
    h.n_samples = r.get<std::uint16_t>();
    h.timestamp = r.get<double>();
    if (h.version != kFrameVersion)
        throw Error(Errc::Protocol, "unsupported frame version " + std::to_string(h.version));
    if (kind > static_cast<std::uint8_t>(FrameKind::End))
        throw Error(Errc::Protocol, "unknown frame kind " + std::to_string(kind));
    h.kind = static_cast<FrameKind>(kind);
    switch (h.kind) {
    case FrameKind::Data:
        h.payload = std::size_t{h.n_channels} * h.n_samples * sizeof(float);
        break;
    case FrameKind::Marker:
        if (h.n_channels != 0)
            throw Error(Errc::Protocol, "marker frame with channels");
        h.payload = h.n_samples;
        break;
    case FrameKind::End:
        if (h.n_channels != 0 || h.n_samples != 0)
            throw Error(Errc::Protocol, "end frame with payload counts");
        h.payload = 0;
        break;
    }
    return h;
}

}  // namespace

void encode_frame(const StreamFrame& frame, std::vector<std::uint8_t>& out)
{
    std::size_t payload = 0;
    switch (frame.kind) {
    case FrameKind::Data:
        payload = std::size_t{frame.n_channels} * frame.n_samples;
        if (frame.samples.size() != payload)
            throw Error(Errc::Protocol, "data frame sample count does not match its header");
        payload *= sizeof(float);
        break;
    case FrameKind::Marker:
        if (frame.label.size() != frame.n_samples || frame.n_channels != 0)
            throw Error(Errc::Protocol, "marker frame counts do not match its label");
        payload = frame.label.size();
        break;
    case FrameKind::End:
        if (frame.n_channels != 0 || frame.n_samples != 0)
            throw Error(Errc::Protocol, "end frame must not carry a payload");
        break;
    }
    out.reserve(out.size() + kFrameHeaderBytes + payload);
    detail::ByteWriter w(out);
    out.insert(out.end(), kMagic, kMagic + 4);
    w.put<std::uint8_t>(frame.version);
    w.put<std::uint16_t>(frame.stream_id);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(frame.kind));
    w.put<std::uint16_t>(frame.n_channels);
    w.put<std::uint16_t>(frame.n_samples);
    w.put<double>(frame.timestamp);
    if (frame.kind == FrameKind::Data) {
        const auto* p = reinterpret_cast<const std::uint8_t*>(frame.samples.data());
        out.insert(out.end(), p, p + payload);
    } else if (frame.kind == FrameKind::Marker) {
        w.put_string(frame.label);
    }
}

std::vector<std::uint8_t> encode_frame(const StreamFrame& frame)
{
    std::vector<std::uint8_t> out;
    encode_frame(frame, out);
    return out;
}

std::size_t frame_payload_bytes(std::span<const std::uint8_t> header)
{
    return parse_header(header).payload;
}

StreamFrame decode_frame(std::span<const std::uint8_t> bytes)
{
    const Header h = parse_header(bytes);
    if (bytes.size() != kFrameHeaderBytes + h.payload)
        throw Error(Errc::Protocol, "frame length " + std::to_string(bytes.size()) + " does not match header (" +
                                        std::to_string(kFrameHeaderBytes + h.payload) + ")");
    StreamFrame f;
    f.version = h.version;
    f.stream_id = h.stream_id;
    f.kind = h.kind;
    f.n_channels = h.n_channels;
    f.n_samples = h.n_samples;
    f.timestamp = h.timestamp;
    const auto payload = bytes.subspan(kFrameHeaderBytes);
    if (h.kind == FrameKind::Data) {
        f.samples.resize(std::size_t{h.n_channels} * h.n_samples);
        std::memcpy(f.samples.data(), payload.data(), payload.size());
    } else if (h.kind == FrameKind::Marker) {
        f.label.assign(payload.begin(), payload.end());
    }
    return f;
}

StreamFrame make_data_frame(std::uint16_t stream_id, double timestamp, std::uint16_t n_channels,
                            std::uint16_t n_samples, std::vector<float> samples)
{
    StreamFrame f;
    f.stream_id = stream_id;
    f.kind = FrameKind::Data;
    f.n_channels = n_channels;
    f.n_samples = n_samples;
    f.timestamp = timestamp;
    f.samples = std::move(samples);
    return f;
}

StreamFrame make_marker_frame(std::uint16_t stream_id, double timestamp, const std::string& label)
{
    if (label.size() > std::numeric_limits<std::uint16_t>::max())
        throw Error(Errc::Protocol, "marker label too long");
    StreamFrame f;
    f.stream_id = stream_id;
    f.kind = FrameKind::Marker;
    f.n_samples = static_cast<std::uint16_t>(label.size());
    f.timestamp = timestamp;
    f.label = label;
    return f;
}

StreamFrame make_end_frame(std::uint16_t stream_id, double timestamp)
{
    StreamFrame f;
    f.stream_id = stream_id;
    f.kind = FrameKind::End;
    f.timestamp = timestamp;
    return f;
}

}  // namespace mbci
