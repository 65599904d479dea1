#include "mbci/reref.hpp"

#include "mbci/error.hpp"

#include <algorithm>

namespace mbci {

namespace {

std::vector<std::size_t> rows_of(const std::vector<ChannelInfo>& channels,
                                 std::initializer_list<ChannelKind> kinds)
{
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < channels.size(); ++i)
        if (std::find(kinds.begin(), kinds.end(), channels[i].kind) != kinds.end())
            rows.push_back(i);
    return rows;
}

struct LaplacianRows {
    Eigen::Index center;
    std::vector<Eigen::Index> neighbors;
};

LaplacianRows laplacian_rows(const std::vector<ChannelInfo>& channels, const std::string& center,
                             const std::vector<std::string>& neighbors)
{
    auto find = [&](const std::string& label) -> Eigen::Index {
        for (std::size_t i = 0; i < channels.size(); ++i) {
            if (channels[i].label == label) {
                if (channels[i].kind != ChannelKind::EEG)
                    throw Error(Errc::UnknownChannel, "'" + label + "' is not an EEG channel");
                return static_cast<Eigen::Index>(i);
            }
        }
        throw Error(Errc::UnknownChannel, "no channel '" + label + "'");
    };
    if (neighbors.empty())
        throw Error(Errc::UnknownChannel, "Laplacian needs at least one neighbour");
    LaplacianRows out{find(center), {}};
    for (const auto& n : neighbors)
        out.neighbors.push_back(find(n));
    return out;
}

}  // namespace

void common_average_reference_inplace(Recording& recording, std::initializer_list<ChannelKind> kinds)
{
    const auto rows = rows_of(recording.channels, kinds);
    if (rows.size() < 2)
        throw Error(Errc::InsufficientChannels, "common average reference needs at least 2 channels");
    const double inv = 1.0 / static_cast<double>(rows.size());
    const Eigen::Index n = recording.data.cols();
    for (Eigen::Index t = 0; t < n; ++t) {
        double sum = 0.0;
        for (auto r : rows)
            sum += recording.data(static_cast<Eigen::Index>(r), t);
        const double mean = sum * inv;
        for (auto r : rows)
            recording.data(static_cast<Eigen::Index>(r), t) -= mean;
    }
}

Recording common_average_reference(const Recording& recording, std::initializer_list<ChannelKind> kinds)
{
    Recording out = recording;
    common_average_reference_inplace(out, kinds);
    return out;
}

Vector surface_laplacian(const Recording& recording, const std::string& center,
                         const std::vector<std::string>& neighbors)
{
    const auto rows = laplacian_rows(recording.channels, center, neighbors);
    Vector mean = Vector::Zero(recording.data.cols());
    for (auto r : rows.neighbors)
        mean += recording.data.row(r).transpose();
    mean /= static_cast<double>(rows.neighbors.size());
    return recording.data.row(rows.center).transpose() - mean;
}

Epochs surface_laplacian(const Epochs& epochs, const std::string& center,
                         const std::vector<std::string>& neighbors)
{
    const auto rows = laplacian_rows(epochs.channels, center, neighbors);
    Epochs out;
    out.tmin = epochs.tmin;
    out.tmax = epochs.tmax;
    out.fs = epochs.fs;
    out.labels = epochs.labels;
    out.dropped = epochs.dropped;
    out.channels = {ChannelInfo{center + "_lap", ChannelKind::EEG, epochs.channels[static_cast<std::size_t>(rows.center)].position}};
    for (const auto& trial : epochs.data) {
        Matrix m(1, trial.cols());
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(trial.cols());
        for (auto r : rows.neighbors)
            mean += trial.row(r);
        mean /= static_cast<double>(rows.neighbors.size());
        m.row(0) = trial.row(rows.center) - mean;
        out.data.push_back(std::move(m));
    }
    return out;
}

}  // namespace mbci
