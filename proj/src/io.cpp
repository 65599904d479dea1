#include "mbci/io.hpp"

#include "bytes.hpp"
#include "mbci/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace mbci {

namespace {

std::uint8_t kind_code(ChannelKind kind)
{
    switch (kind) {
    case ChannelKind::EEG: return 0;
    case ChannelKind::EMG: return 1;
    case ChannelKind::EOG: return 2;
    }
    return 0;
}

ChannelKind kind_from_code(std::uint8_t code)
{
    switch (code) {
    case 0: return ChannelKind::EEG;
    case 1: return ChannelKind::EMG;
    case 2: return ChannelKind::EOG;
    default: throw Error(Errc::Format, "MBR1: unknown channel kind code " + std::to_string(code));
    }
}

void read_exact(std::ifstream& in, void* dst, std::size_t n)
{
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw Error(Errc::Format, "MBR1: truncated file");
}

template <class T>
T read_value(std::ifstream& in)
{
    T v;
    read_exact(in, &v, sizeof(T));
    return v;
}

}  // namespace

void write_mbr1(const std::filesystem::path& path, const Recording& recording)
{
    recording.validate();
    if (recording.n_channels() > 0xFFFF)
        throw Error(Errc::Format, "MBR1: too many channels");
    std::vector<std::uint8_t> header;
    detail::ByteWriter w(header);
    w.put_string("MBR1");
    w.put<std::uint16_t>(kMbr1Version);
    w.put<double>(recording.fs);
    w.put<std::uint16_t>(static_cast<std::uint16_t>(recording.n_channels()));
    for (const auto& ch : recording.channels) {
        if (ch.label.size() > 0xFFFF)
            throw Error(Errc::Format, "MBR1: channel label too long");
        w.put<std::uint16_t>(static_cast<std::uint16_t>(ch.label.size()));
        w.put_string(ch.label);
        w.put<std::uint8_t>(kind_code(ch.kind));
        w.put<std::uint8_t>(ch.position ? 1 : 0);
        w.put<double>(ch.position ? ch.position->x : 0.0);
        w.put<double>(ch.position ? ch.position->y : 0.0);
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(Errc::Io, "cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
    std::vector<float> row(recording.n_samples());
    for (Eigen::Index r = 0; r < recording.data.rows(); ++r) {
        for (std::size_t i = 0; i < row.size(); ++i)
            row[i] = static_cast<float>(recording.data(r, static_cast<Eigen::Index>(i)));
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out)
        throw Error(Errc::Io, "write failed for '" + path.string() + "'");
}

Recording read_mbr1(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::Io, "cannot open '" + path.string() + "'");
    in.seekg(0, std::ios::end);
    const auto file_size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);

    char magic[4];
    read_exact(in, magic, 4);
    if (std::string(magic, 4) != "MBR1")
        throw Error(Errc::Format, "MBR1: bad magic");
    const auto version = read_value<std::uint16_t>(in);
    if (version != kMbr1Version)
        throw Error(Errc::Format, "MBR1: unsupported version " + std::to_string(version));

    Recording rec;
    rec.fs = read_value<double>(in);
    const auto n_channels = read_value<std::uint16_t>(in);
    for (std::uint16_t c = 0; c < n_channels; ++c) {
        ChannelInfo ch;
        const auto len = read_value<std::uint16_t>(in);
        ch.label.resize(len);
        if (len)
            read_exact(in, ch.label.data(), len);
        ch.kind = kind_from_code(read_value<std::uint8_t>(in));
        const auto has_pos = read_value<std::uint8_t>(in);
        const double x = read_value<double>(in);
        const double y = read_value<double>(in);
        if (has_pos)
            ch.position = ScalpPosition{x, y};
        rec.channels.push_back(std::move(ch));
    }
    const auto header_size = static_cast<std::size_t>(in.tellg());
    const std::size_t payload = file_size - header_size;
    const std::size_t row_bytes = sizeof(float) * std::max<std::size_t>(n_channels, 1);
    if (payload % row_bytes != 0)
        throw Error(Errc::Format, "MBR1: payload is not a whole number of samples");
    const std::size_t n_samples = n_channels ? payload / row_bytes : 0;

    rec.data.resize(n_channels, static_cast<Eigen::Index>(n_samples));
    std::vector<float> row(n_samples);
    for (Eigen::Index r = 0; r < n_channels; ++r) {
        read_exact(in, row.data(), n_samples * sizeof(float));
        for (std::size_t i = 0; i < n_samples; ++i)
            rec.data(r, static_cast<Eigen::Index>(i)) = row[i];
    }
    rec.validate();
    return rec;
}

std::string markers_to_jsonl(const MarkerList& markers)
{
    std::string out;
    for (const auto& ev : markers.events) {
        nlohmann::json j;
        j["t"] = ev.time_s;
        j["label"] = to_string(ev.label);
        out += j.dump();
        out += '\n';
    }
    return out;
}

MarkerList markers_from_jsonl(const std::string& text)
{
    MarkerList out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            const auto j = nlohmann::json::parse(line);
            out.events.push_back({j.at("t").get<double>(), event_label_from_string(j.at("label").get<std::string>())});
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::Format, "markers line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void write_markers_jsonl(const std::filesystem::path& path, const MarkerList& markers)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw Error(Errc::Io, "cannot open '" + path.string() + "' for writing");
    out << markers_to_jsonl(markers);
    if (!out)
        throw Error(Errc::Io, "write failed for '" + path.string() + "'");
}

MarkerList read_markers_jsonl(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::Io, "cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return markers_from_jsonl(ss.str());
}

}  // namespace mbci
