#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mbci {

enum class FrameKind : std::uint8_t { Data = 0, Marker = 1, End = 2 };

/// Wire layout, little-endian:
///   "BSTR" | u8 version | u16 stream_id | u8 kind | u16 n_channels |
///   u16 n_samples | f64 timestamp | payload
/// DATA payload: n_channels * n_samples f32, channel-major.
/// MARKER payload: n_samples bytes of UTF-8 label, n_channels = 0.
/// END: no payload, both counts 0.
struct StreamFrame {
    std::uint8_t version = 1;
    std::uint16_t stream_id = 0;
    FrameKind kind = FrameKind::Data;
    std::uint16_t n_channels = 0;
    std::uint16_t n_samples = 0;
    double timestamp = 0.0;
    std::vector<float> samples;
    std::string label;

    float sample(std::size_t channel, std::size_t i) const { return samples[channel * n_samples + i]; }
    bool operator==(const StreamFrame&) const = default;
};

inline constexpr std::size_t kFrameHeaderBytes = 20;
inline constexpr std::uint8_t kFrameVersion = 1;

std::vector<std::uint8_t> encode_frame(const StreamFrame& frame);
void encode_frame(const StreamFrame& frame, std::vector<std::uint8_t>& out);

/// Decodes exactly one frame occupying the whole buffer. Throws
/// Errc::Protocol on bad magic, version, kind, counts or length.
StreamFrame decode_frame(std::span<const std::uint8_t> bytes);

/// Payload byte count announced by a header (validated like decode_frame).
std::size_t frame_payload_bytes(std::span<const std::uint8_t> header);

StreamFrame make_data_frame(std::uint16_t stream_id, double timestamp, std::uint16_t n_channels,
                            std::uint16_t n_samples, std::vector<float> samples);
StreamFrame make_marker_frame(std::uint16_t stream_id, double timestamp, const std::string& label);
StreamFrame make_end_frame(std::uint16_t stream_id, double timestamp);

}  // namespace mbci
