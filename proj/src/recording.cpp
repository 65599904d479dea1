#include "mbci/recording.hpp"

#include "mbci/error.hpp"

#include <cmath>
#include <set>

namespace mbci {

const char* to_string(ChannelKind kind) noexcept
{
    switch (kind) {
    case ChannelKind::EEG: return "EEG";
    case ChannelKind::EMG: return "EMG";
    case ChannelKind::EOG: return "EOG";
    }
    return "EEG";
}

ChannelKind channel_kind_from_string(std::string_view text)
{
    if (text == "EEG") return ChannelKind::EEG;
    if (text == "EMG") return ChannelKind::EMG;
    if (text == "EOG") return ChannelKind::EOG;
    throw Error(Errc::Format, "unknown channel kind '" + std::string(text) + "'");
}

void Recording::validate() const
{
    if (!(fs > 0.0) || !std::isfinite(fs))
        throw Error(Errc::Validation, "sampling rate must be positive");
    if (static_cast<std::size_t>(data.rows()) != channels.size())
        throw Error(Errc::Validation, "data rows do not match channel list");
    std::set<std::string> seen;
    for (const auto& ch : channels) {
        if (!seen.insert(ch.label).second)
            throw Error(Errc::Validation, "duplicate channel label '" + ch.label + "'");
    }
}

std::optional<std::size_t> Recording::find(std::string_view label) const
{
    for (std::size_t i = 0; i < channels.size(); ++i)
        if (channels[i].label == label)
            return i;
    return std::nullopt;
}

std::size_t Recording::index_of(std::string_view label) const
{
    if (auto idx = find(label))
        return *idx;
    throw Error(Errc::UnknownChannel, "no channel '" + std::string(label) + "'");
}

std::vector<std::size_t> Recording::indices_of(ChannelKind kind) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < channels.size(); ++i)
        if (channels[i].kind == kind)
            out.push_back(i);
    return out;
}

Recording Recording::select(std::span<const std::size_t> rows) const
{
    Recording out;
    out.fs = fs;
    out.t0 = t0;
    out.data.resize(static_cast<Eigen::Index>(rows.size()), data.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= channels.size())
            throw Error(Errc::UnknownChannel, "channel index out of range");
        out.data.row(static_cast<Eigen::Index>(r)) = data.row(static_cast<Eigen::Index>(rows[r]));
        out.channels.push_back(channels[rows[r]]);
    }
    return out;
}

Recording Recording::select(ChannelKind kind) const
{
    const auto rows = indices_of(kind);
    return select(rows);
}

const char* to_string(EventLabel label) noexcept
{
    switch (label) {
    case EventLabel::Left: return "LEFT";
    case EventLabel::Right: return "RIGHT";
    case EventLabel::Rest: return "REST";
    case EventLabel::TrialEnd: return "TRIAL_END";
    case EventLabel::Prep: return "PREP";
    case EventLabel::Cross: return "CROSS";
    }
    return "REST";
}

EventLabel event_label_from_string(std::string_view text)
{
    if (text == "LEFT") return EventLabel::Left;
    if (text == "RIGHT") return EventLabel::Right;
    if (text == "REST") return EventLabel::Rest;
    if (text == "TRIAL_END") return EventLabel::TrialEnd;
    if (text == "PREP") return EventLabel::Prep;
    if (text == "CROSS") return EventLabel::Cross;
    throw Error(Errc::Format, "unknown event label '" + std::string(text) + "'");
}

void MarkerList::validate(double duration_s) const
{
    double prev = -INFINITY;
    for (const auto& ev : events) {
        if (ev.time_s < prev)
            throw Error(Errc::Validation, "marker times must be non-decreasing");
        if (ev.time_s < 0.0 || ev.time_s > duration_s)
            throw Error(Errc::Validation, "marker outside the recording");
        prev = ev.time_s;
    }
}

MarkerList MarkerList::filter(EventLabel label) const
{
    MarkerList out;
    for (const auto& ev : events)
        if (ev.label == label)
            out.events.push_back(ev);
    return out;
}

MarkerList MarkerList::shifted(double dt) const
{
    MarkerList out = *this;
    for (auto& ev : out.events)
        ev.time_s += dt;
    return out;
}

std::vector<int> Epochs::label_codes() const
{
    std::vector<int> out;
    out.reserve(labels.size());
    for (auto l : labels)
        out.push_back(static_cast<int>(l));
    return out;
}

Epochs Epochs::subset(std::span<const std::size_t> trials) const
{
    Epochs out;
    out.tmin = tmin;
    out.tmax = tmax;
    out.fs = fs;
    out.channels = channels;
    for (auto t : trials) {
        out.data.push_back(data.at(t));
        out.labels.push_back(labels.at(t));
    }
    return out;
}

Epochs concat_epochs(std::span<const Epochs> parts)
{
    Epochs out;
    bool first = true;
    for (const auto& part : parts) {
        if (first) {
            out.tmin = part.tmin;
            out.tmax = part.tmax;
            out.fs = part.fs;
            out.channels = part.channels;
            first = false;
        } else if (part.channels != out.channels || part.fs != out.fs ||
                   (part.n_trials() && out.n_trials() && part.n_samples() != out.n_samples())) {
            throw Error(Errc::Layout, "epoch sets differ in layout");
        }
        out.data.insert(out.data.end(), part.data.begin(), part.data.end());
        out.labels.insert(out.labels.end(), part.labels.begin(), part.labels.end());
        out.dropped += part.dropped;
    }
    return out;
}

void quantize_to_float(Recording& recording)
{
    double* p = recording.data.data();
    const auto n = recording.data.size();
    for (Eigen::Index i = 0; i < n; ++i)
        p[i] = static_cast<double>(static_cast<float>(p[i]));
}

}  // namespace mbci
