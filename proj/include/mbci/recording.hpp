#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mbci {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ChannelKind { EEG, EMG, EOG };

const char* to_string(ChannelKind kind) noexcept;
ChannelKind channel_kind_from_string(std::string_view text);

struct ScalpPosition {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const ScalpPosition&) const = default;
};

struct ChannelInfo {
    std::string label;
    ChannelKind kind = ChannelKind::EEG;
    std::optional<ScalpPosition> position;
    bool operator==(const ChannelInfo&) const = default;
};

/// Continuous multichannel signal, channels x samples, in volts.
struct Recording {
    Matrix data;
    double fs = 0.0;
    std::vector<ChannelInfo> channels;
    double t0 = 0.0;

    std::size_t n_channels() const { return channels.size(); }
    std::size_t n_samples() const { return static_cast<std::size_t>(data.cols()); }
    double duration() const { return static_cast<double>(n_samples()) / fs; }

    /// Throws Errc::Validation when the invariants do not hold.
    void validate() const;

    std::optional<std::size_t> find(std::string_view label) const;
    /// Throws Errc::UnknownChannel.
    std::size_t index_of(std::string_view label) const;
    std::vector<std::size_t> indices_of(ChannelKind kind) const;

    /// New recording with the given channel rows (in the given order).
    Recording select(std::span<const std::size_t> rows) const;
    Recording select(ChannelKind kind) const;
};

enum class EventLabel { Left, Right, Rest, TrialEnd, Prep, Cross };

const char* to_string(EventLabel label) noexcept;
/// Throws Errc::Format for unknown names.
EventLabel event_label_from_string(std::string_view text);

struct Marker {
    double time_s = 0.0;  // relative to the recording start
    EventLabel label = EventLabel::Rest;
    bool operator==(const Marker&) const = default;
};

struct MarkerList {
    std::vector<Marker> events;

    /// Non-decreasing times inside [0, duration_s].
    void validate(double duration_s) const;
    MarkerList filter(EventLabel label) const;
    MarkerList shifted(double dt) const;
};

/// trials x channels x samples, stored as one channels x samples matrix per trial.
struct Epochs {
    std::vector<Matrix> data;
    std::vector<EventLabel> labels;
    double tmin = 0.0;
    double tmax = 0.0;
    double fs = 0.0;
    std::vector<ChannelInfo> channels;
    /// Markers whose window did not fit inside the recording.
    std::size_t dropped = 0;

    std::size_t n_trials() const { return data.size(); }
    std::size_t n_samples() const { return data.empty() ? 0 : static_cast<std::size_t>(data.front().cols()); }
    double time_of(std::size_t sample) const { return tmin + static_cast<double>(sample) / fs; }

    Epochs subset(std::span<const std::size_t> trials) const;
    /// Labels as integer class codes (the EventLabel enumerator values).
    std::vector<int> label_codes() const;
};

/// Concatenates trials from epoch sets that share the channel layout and length.
Epochs concat_epochs(std::span<const Epochs> parts);

/// Rounds every sample to single precision; this is what the MBR1 container
/// and the stream wire format carry.
void quantize_to_float(Recording& recording);

}  // namespace mbci
