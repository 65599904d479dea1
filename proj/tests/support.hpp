#pragma once

#include "mbci/recording.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace testing {

inline std::vector<mbci::ChannelInfo> channels(std::size_t n, mbci::ChannelKind kind = mbci::ChannelKind::EEG,
                                               const std::string& prefix = "E")
{
    std::vector<mbci::ChannelInfo> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({prefix + std::to_string(i), kind, std::nullopt});
    return out;
}

inline mbci::Recording recording(mbci::Matrix data, double fs, std::vector<mbci::ChannelInfo> chans = {})
{
    mbci::Recording r;
    if (chans.empty())
        chans = channels(static_cast<std::size_t>(data.rows()));
    r.channels = std::move(chans);
    r.data = std::move(data);
    r.fs = fs;
    return r;
}

inline std::vector<double> sine(std::size_t n, double freq, double fs, double amplitude = 1.0, double phase = 0.0)
{
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / fs + phase);
    return x;
}

inline double rms(const std::vector<double>& x, std::size_t from = 0, std::size_t to = 0)
{
    if (to == 0)
        to = x.size();
    double acc = 0.0;
    for (std::size_t i = from; i < to; ++i)
        acc += x[i] * x[i];
    return std::sqrt(acc / static_cast<double>(to - from));
}

inline mbci::Matrix row_matrix(const std::vector<double>& x)
{
    mbci::Matrix m(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        m(0, static_cast<Eigen::Index>(i)) = x[i];
    return m;
}

}  // namespace testing
