#include "mbci/epochs.hpp"

#include "mbci/error.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace mbci {

Epochs epoch_extract(const Recording& recording, const MarkerList& markers, double tmin, double tmax,
                     std::span<const std::size_t> rows)
{
    if (!(tmin < tmax))
        throw Error(Errc::InvalidWindow, "epoch window needs tmin < tmax");
    const auto length = static_cast<long long>(std::llround((tmax - tmin) * recording.fs));
    const auto total = static_cast<long long>(recording.n_samples());

    Epochs out;
    out.tmin = tmin;
    out.tmax = tmax;
    out.fs = recording.fs;
    for (auto r : rows) {
        if (r >= recording.n_channels())
            throw Error(Errc::UnknownChannel, "channel index out of range");
        out.channels.push_back(recording.channels[r]);
    }
    for (const auto& ev : markers.events) {
        const auto start = static_cast<long long>(std::llround((ev.time_s + tmin) * recording.fs));
        if (start < 0 || start + length > total) {
            ++out.dropped;
            continue;
        }
        Matrix m(static_cast<Eigen::Index>(rows.size()), length);
        for (std::size_t i = 0; i < rows.size(); ++i)
            m.row(static_cast<Eigen::Index>(i)) =
                recording.data.row(static_cast<Eigen::Index>(rows[i])).segment(start, length);
        out.data.push_back(std::move(m));
        out.labels.push_back(ev.label);
    }
    return out;
}

Epochs epoch_extract(const Recording& recording, const MarkerList& markers, double tmin, double tmax)
{
    std::vector<std::size_t> all(recording.n_channels());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return epoch_extract(recording, markers, tmin, tmax, all);
}

RejectResult peak_to_peak_reject(const Epochs& epochs, double threshold_volts)
{
    if (!(threshold_volts > 0.0))
        throw Error(Errc::InvalidRequest, "peak-to-peak threshold must be positive");
    std::vector<Eigen::Index> eeg;
    for (std::size_t i = 0; i < epochs.channels.size(); ++i)
        if (epochs.channels[i].kind == ChannelKind::EEG)
            eeg.push_back(static_cast<Eigen::Index>(i));

    std::vector<std::size_t> keep;
    for (std::size_t t = 0; t < epochs.n_trials(); ++t) {
        bool bad = false;
        for (auto r : eeg) {
            const auto row = epochs.data[t].row(r);
            if (row.maxCoeff() - row.minCoeff() > threshold_volts) {
                bad = true;
                break;
            }
        }
        if (!bad)
            keep.push_back(t);
    }
    RejectResult out;
    out.kept = epochs.subset(keep);
    out.kept.dropped = epochs.dropped;
    out.rejected = epochs.n_trials() - keep.size();
    return out;
}

}  // namespace mbci
