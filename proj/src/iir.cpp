#include "mbci/iir.hpp"

#include "mbci/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mbci {

using cdouble = std::complex<double>;

IirFilter::IirFilter(std::vector<Biquad> sections, IirDesign design)
    : m_sections(std::move(sections)), m_design(design)
{
}

cdouble IirFilter::response(double freq_hz) const
{
    const double w = 2.0 * std::numbers::pi * freq_hz / m_design.fs;
    const cdouble z1 = std::polar(1.0, -w);
    const cdouble z2 = z1 * z1;
    cdouble h{1.0, 0.0};
    for (const auto& s : m_sections)
        h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
    return h;
}

double IirFilter::magnitude_db(double freq_hz) const
{
    return 20.0 * std::log10(std::abs(response(freq_hz)));
}

double IirFilter::max_pole_radius() const
{
    double r = 0.0;
    for (const auto& s : m_sections) {
        // roots of z^2 + a1 z + a2
        const cdouble disc = std::sqrt(cdouble(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
        r = std::max({r, std::abs((-s.a1 + disc) / 2.0), std::abs((-s.a1 - disc) / 2.0)});
    }
    return r;
}

void IirFilter::reset()
{
    m_state.clear();
}

std::vector<double>& IirFilter::state(std::size_t channel)
{
    if (channel >= m_state.size())
        m_state.resize(channel + 1);
    auto& st = m_state[channel];
    if (st.size() != 2 * m_sections.size())
        st.assign(2 * m_sections.size(), 0.0);
    return st;
}

double IirFilter::step(std::size_t channel, double x)
{
    auto& st = state(channel);
    double* w = st.data();
    for (const auto& s : m_sections) {
        const double y = s.b0 * x + w[0];
        w[0] = s.b1 * x - s.a1 * y + w[1];
        w[1] = s.b2 * x - s.a2 * y;
        x = y;
        w += 2;
    }
    return x;
}

void IirFilter::process(std::size_t channel, std::span<double> samples)
{
    auto& st = state(channel);
    for (std::size_t k = 0; k < m_sections.size(); ++k) {
        const auto& s = m_sections[k];
        double w0 = st[2 * k];
        double w1 = st[2 * k + 1];
        for (double& v : samples) {
            const double x = v;
            const double y = s.b0 * x + w0;
            w0 = s.b1 * x - s.a1 * y + w1;
            w1 = s.b2 * x - s.a2 * y;
            v = y;
        }
        st[2 * k] = w0;
        st[2 * k + 1] = w1;
    }
}

namespace {

double prewarp(double f, double fs)
{
    return 2.0 * fs * std::tan(std::numbers::pi * f / fs);
}

void check_band(double low_hz, double high_hz, double fs)
{
    if (!(fs > 0.0))
        throw Error(Errc::InvalidBand, "sampling rate must be positive");
    if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < fs / 2.0))
        throw Error(Errc::InvalidBand, "band edges must satisfy 0 < low < high < fs/2");
}

}  // namespace

double butterworth_bandpass_analog_magnitude(int order, double low_hz, double high_hz, double fs,
                                             double freq_hz)
{
    const double wl = prewarp(low_hz, fs);
    const double wh = prewarp(high_hz, fs);
    const double w = prewarp(freq_hz, fs);
    const double ratio = (w * w - wl * wh) / (w * (wh - wl));
    return 1.0 / std::sqrt(1.0 + std::pow(ratio * ratio, order));
}

IirFilter design_butterworth_bandpass(int order, double low_hz, double high_hz, double fs)
{
    if (order <= 0 || order % 2 != 0 || order > 8)
        throw Error(Errc::UnsupportedOrder, "Butterworth order must be one of 2, 4, 6, 8");
    check_band(low_hz, high_hz, fs);

    const double wl = prewarp(low_hz, fs);
    const double wh = prewarp(high_hz, fs);
    const double bw = wh - wl;
    const double w0sq = wl * wh;
    const double k2 = 2.0 * fs;

    // centre frequency in the digital domain, where the cascade gain is one
    const double f0 = fs / std::numbers::pi * std::atan(std::sqrt(w0sq) / k2);
    const cdouble z1c = std::polar(1.0, -2.0 * std::numbers::pi * f0 / fs);
    const cdouble z2c = z1c * z1c;

    std::vector<Biquad> sections;
    sections.reserve(static_cast<std::size_t>(order));
    for (int k = 0; k < order / 2; ++k) {
        // prototype pole in the upper-left quadrant
        const cdouble p = std::polar(1.0, std::numbers::pi * (2.0 * k + order + 1.0) / (2.0 * order));
        const cdouble half = p * bw / 2.0;
        const cdouble root = std::sqrt(half * half - w0sq);
        for (const cdouble s : {half + root, half - root}) {
            const cdouble z = (k2 + s) / (k2 - s);
            Biquad bq;
            bq.a1 = -2.0 * z.real();
            bq.a2 = std::norm(z);
            bq.b0 = 1.0;
            bq.b1 = 0.0;
            bq.b2 = -1.0;
            const double g = std::abs((bq.b0 + bq.b2 * z2c) / (1.0 + bq.a1 * z1c + bq.a2 * z2c));
            bq.b0 /= g;
            bq.b2 /= g;
            sections.push_back(bq);
        }
    }

    IirDesign meta;
    meta.kind = IirKind::Bandpass;
    meta.order = order;
    meta.low_hz = low_hz;
    meta.high_hz = high_hz;
    meta.fs = fs;
    IirFilter filter(std::move(sections), meta);
    if (!filter.is_stable())
        throw Error(Errc::Numerical, "Butterworth design produced an unstable section");
    return filter;
}

IirFilter design_notch(double freq_hz, double quality, double fs)
{
    if (!(fs > 0.0) || !(freq_hz > 0.0) || !(freq_hz < fs / 2.0))
        throw Error(Errc::InvalidBand, "notch frequency must lie in (0, fs/2)");
    if (!(quality > 0.0))
        throw Error(Errc::InvalidRequest, "notch quality must be positive");

    const double w0 = 2.0 * std::numbers::pi * freq_hz / fs;
    const double bw = w0 / quality;
    const double beta = std::tan(bw / 2.0);
    const double gain = 1.0 / (1.0 + beta);

    Biquad bq;
    bq.b0 = gain;
    bq.b1 = -2.0 * gain * std::cos(w0);
    bq.b2 = gain;
    bq.a1 = -2.0 * gain * std::cos(w0);
    bq.a2 = 2.0 * gain - 1.0;

    IirDesign meta;
    meta.kind = IirKind::Notch;
    meta.order = 2;
    meta.low_hz = freq_hz;
    meta.high_hz = freq_hz;
    meta.quality = quality;
    meta.fs = fs;
    return IirFilter({bq}, meta);
}

void apply_iir_causal_inplace(IirFilter& filter, Recording& recording,
                              std::span<const std::size_t> channel_subset)
{
    const auto n = static_cast<std::size_t>(recording.data.cols());
    std::vector<double> row(n);
    for (auto ch : channel_subset) {
        if (ch >= recording.n_channels())
            throw Error(Errc::UnknownChannel, "channel index out of range");
        const auto r = static_cast<Eigen::Index>(ch);
        for (std::size_t i = 0; i < n; ++i)
            row[i] = recording.data(r, static_cast<Eigen::Index>(i));
        filter.process(ch, row);
        for (std::size_t i = 0; i < n; ++i)
            recording.data(r, static_cast<Eigen::Index>(i)) = row[i];
    }
}

Recording apply_iir_causal(IirFilter& filter, const Recording& recording,
                           std::span<const std::size_t> channel_subset,
                           std::vector<std::string>* warnings)
{
    Recording out = recording;
    if (channel_subset.empty()) {
        if (warnings)
            warnings->push_back("apply_iir_causal: empty channel subset, nothing filtered");
        return out;
    }
    apply_iir_causal_inplace(filter, out, channel_subset);
    return out;
}

}  // namespace mbci
