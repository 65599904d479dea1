#include "mbci/recorder.hpp"

#include "mbci/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mbci {

namespace {

double median(std::vector<double> v)
{
    if (v.empty())
        throw Error(Errc::Validation, "no frames to estimate a clock offset from");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (m + lower);
    }
    return m;
}

double clock_lag(const Transport& t)
{
    std::vector<double> d;
    d.reserve(t.size());
    for (const auto& f : t)
        if (f.frame.kind != FrameKind::End)
            d.push_back(f.frame.timestamp - f.arrival_s);
    return median(std::move(d));
}

}  // namespace

double estimate_clock_offset(const Transport& transport, const Transport& reference)
{
    return clock_lag(transport) - clock_lag(reference);
}

RecordedSession record_streams(const std::vector<Transport>& transports, const std::vector<DataStreamInfo>& streams)
{
    if (transports.empty())
        throw Error(Errc::Validation, "no streams to record");
    RecordedSession out;
    out.offsets_s.resize(transports.size(), 0.0);
    for (std::size_t i = 1; i < transports.size(); ++i)
        out.offsets_s[i] = estimate_clock_offset(transports[i], transports[0]);

    struct Chunk {
        double time;
        std::size_t transport;
        const StreamFrame* frame;
    };
    std::map<std::uint16_t, std::vector<Chunk>> data;
    struct PendingMarker {
        double time;
        std::uint16_t stream_id;
        std::string label;
    };
    std::vector<PendingMarker> markers;
    for (std::size_t t = 0; t < transports.size(); ++t) {
        for (const auto& rf : transports[t]) {
            const double time = rf.frame.timestamp - out.offsets_s[t];
            if (rf.frame.kind == FrameKind::Data)
                data[rf.frame.stream_id].push_back({time, t, &rf.frame});
            else if (rf.frame.kind == FrameKind::Marker)
                markers.push_back({time, rf.frame.stream_id, rf.frame.label});
        }
    }

    double origin = 0.0;
    bool have_origin = false;
    for (const auto& info : streams) {
        auto it = data.find(info.stream_id);
        if (it == data.end())
            throw Error(Errc::Validation, "no data for stream " + std::to_string(info.stream_id));
        auto& chunks = it->second;
        std::stable_sort(chunks.begin(), chunks.end(), [](const Chunk& a, const Chunk& b) { return a.time < b.time; });
        const std::size_t n_ch = chunks.front().frame->n_channels;
        if (!info.channels.empty() && info.channels.size() != n_ch)
            throw Error(Errc::Layout, "stream " + std::to_string(info.stream_id) + " channel count mismatch");

        // place every chunk at its timestamp; missing spans are zero-filled and reported
        const double t0 = chunks.front().time;
        std::size_t total = 0;
        std::vector<std::size_t> offsets;
        for (const auto& c : chunks) {
            const auto pos = static_cast<std::size_t>(std::max(0LL, std::llround((c.time - t0) * info.fs)));
            if (pos > total)
                out.gaps.push_back({info.stream_id, t0 + static_cast<double>(total) / info.fs, pos - total});
            offsets.push_back(pos);
            total = std::max(total, pos + c.frame->n_samples);
        }
        Recording rec;
        rec.fs = info.fs;
        rec.t0 = t0;
        rec.channels = info.channels;
        if (rec.channels.empty())
            for (std::size_t c = 0; c < n_ch; ++c)
                rec.channels.push_back({"ch" + std::to_string(c), ChannelKind::EEG, std::nullopt});
        rec.data = Matrix::Zero(static_cast<Eigen::Index>(n_ch), static_cast<Eigen::Index>(total));
        for (std::size_t k = 0; k < chunks.size(); ++k) {
            const auto& f = *chunks[k].frame;
            if (f.n_channels != n_ch)
                throw Error(Errc::Layout, "channel count changed within a stream");
            for (std::size_t c = 0; c < n_ch; ++c)
                for (std::size_t i = 0; i < f.n_samples; ++i)
                    rec.data(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(offsets[k] + i)) = f.sample(c, i);
        }
        if (!have_origin) {
            origin = t0;
            have_origin = true;
        }
        out.recordings.push_back(std::move(rec));
    }

    std::stable_sort(markers.begin(), markers.end(), [](const PendingMarker& a, const PendingMarker& b) {
        return a.time < b.time || (a.time == b.time && a.stream_id < b.stream_id);
    });
    for (const auto& m : markers)
        out.markers.events.push_back({m.time - origin, event_label_from_string(m.label)});
    return out;
}

}  // namespace mbci
