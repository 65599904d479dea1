#include "mbci/features.hpp"

#include "mbci/error.hpp"

namespace mbci {

Vector mean_power(const Eigen::Ref<const Matrix>& window)
{
    Vector out(window.rows());
    const double n = static_cast<double>(window.cols());
    for (Eigen::Index r = 0; r < window.rows(); ++r) {
        double acc = 0.0;
        for (Eigen::Index t = 0; t < window.cols(); ++t)
            acc += window(r, t) * window(r, t);
        out(r) = acc / n;
    }
    return out;
}

Matrix emg_mean_power_features(const Epochs& epochs)
{
    for (const auto& ch : epochs.channels)
        if (ch.kind != ChannelKind::EMG)
            throw Error(Errc::Layout, "EMG features require EMG-only epochs, found '" + ch.label + "'");
    if (epochs.channels.empty())
        throw Error(Errc::Layout, "no EMG channels");
    Matrix out(static_cast<Eigen::Index>(epochs.n_trials()), static_cast<Eigen::Index>(epochs.channels.size()));
    for (std::size_t t = 0; t < epochs.n_trials(); ++t)
        out.row(static_cast<Eigen::Index>(t)) = mean_power(epochs.data[t]).transpose();
    return out;
}

}  // namespace mbci
