#pragma once

#include "mbci/recording.hpp"

#include <filesystem>
#include <string>

namespace mbci {

inline constexpr std::uint16_t kMbr1Version = 1;

/// MBR1 container: "MBR1", u16 version, f64 fs, u16 channel count, then per
/// channel {u16 label length, label bytes, u8 kind, u8 has_position,
/// f64 x, f64 y}, then f32 samples channel-major. All little-endian. The
/// sample count follows from the file size; t0 is not stored (reads as 0).
void write_mbr1(const std::filesystem::path& path, const Recording& recording);
Recording read_mbr1(const std::filesystem::path& path);

/// One JSON object per line: {"t": seconds, "label": "LEFT"}.
void write_markers_jsonl(const std::filesystem::path& path, const MarkerList& markers);
MarkerList read_markers_jsonl(const std::filesystem::path& path);

std::string markers_to_jsonl(const MarkerList& markers);
MarkerList markers_from_jsonl(const std::string& text);

}  // namespace mbci
