#include "mbci/fir.hpp"

#include "mbci/error.hpp"

#include "fft.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>

namespace mbci {

namespace {

using detail::RealFft;
using detail::fast_fft_size;

double sinc(double x)
{
    if (x == 0.0)
        return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

// Convolves many equal-length signals with one symmetric kernel.
class ZeroPhaseConvolver {
public:
    ZeroPhaseConvolver(const std::vector<double>& taps, std::size_t n_samples)
        : m_ntaps(taps.size()), m_half((taps.size() - 1) / 2), m_n(n_samples),
          m_fft(fast_fft_size(n_samples + 2 * (taps.size() - 1)))
    {
        const std::size_t nfft = m_fft.size();
        double* buf = m_fft.real();
        std::fill(buf, buf + nfft, 0.0);
        std::copy(taps.begin(), taps.end(), buf);
        m_fft.forward();
        m_kernel.resize(nfft / 2 + 1);
        for (std::size_t k = 0; k < m_kernel.size(); ++k)
            m_kernel[k] = {m_fft.spectrum()[k][0] / static_cast<double>(nfft),
                           m_fft.spectrum()[k][1] / static_cast<double>(nfft)};
    }

    void run(std::span<const double> in, std::span<double> out)
    {
        const std::size_t nfft = m_fft.size();
        const std::size_t n = m_n;
        const std::size_t pad = m_half;
        double* buf = m_fft.real();
        // odd reflection about the first and last samples
        for (std::size_t i = 0; i < pad; ++i)
            buf[i] = 2.0 * in[0] - in[pad - i];
        std::copy(in.begin(), in.end(), buf + pad);
        for (std::size_t i = 0; i < pad; ++i)
            buf[pad + n + i] = 2.0 * in[n - 1] - in[n - 2 - i];
        std::fill(buf + n + 2 * pad, buf + nfft, 0.0);
        m_fft.forward();
        fftw_complex* spec = m_fft.spectrum();
        for (std::size_t k = 0; k < m_kernel.size(); ++k) {
            const std::complex<double> v(spec[k][0], spec[k][1]);
            const auto r = v * m_kernel[k];
            spec[k][0] = r.real();
            spec[k][1] = r.imag();
        }
        m_fft.inverse();
        for (std::size_t i = 0; i < n; ++i)
            out[i] = buf[i + m_ntaps - 1];
    }

private:
    std::size_t m_ntaps;
    std::size_t m_half;
    std::size_t m_n;
    RealFft m_fft;
    std::vector<std::complex<double>> m_kernel;
};

void check_length(const FirFilter& filter, std::size_t n)
{
    const std::size_t half = (filter.taps.size() - 1) / 2;
    if (n < half + 1 || n < 2)
        throw Error(Errc::TooShort, "signal of " + std::to_string(n) +
                                        " samples is shorter than half the filter (" +
                                        std::to_string(filter.taps.size()) + " taps)");
}

}  // namespace

double FirFilter::gain_at(double freq_hz) const
{
    std::complex<double> acc{0.0, 0.0};
    const double w = 2.0 * std::numbers::pi * freq_hz / design.fs;
    for (std::size_t i = 0; i < taps.size(); ++i)
        acc += taps[i] * std::polar(1.0, -w * static_cast<double>(i));
    return std::abs(acc);
}

FirFilter design_fir_bandpass(double l_freq, double h_freq, double l_trans, double h_trans,
                              double length_s, double fs)
{
    if (!(fs > 0.0) || !(l_freq > 0.0 && l_freq < h_freq && h_freq < fs / 2.0))
        throw Error(Errc::InvalidBand, "pass band must satisfy 0 < l_freq < h_freq < fs/2");
    if (!(l_trans > 0.0) || !(h_trans > 0.0) || l_freq - l_trans < 0.0 || h_freq + h_trans > fs / 2.0)
        throw Error(Errc::InvalidBand, "transition bands must lie inside [0, fs/2]");
    if (!(length_s * fs >= 3.0))
        throw Error(Errc::InvalidRequest, "filter length must cover at least 3 samples");

    auto n = static_cast<std::size_t>(std::llround(length_s * fs));
    if (n % 2 == 0)
        ++n;

    FirFilter f;
    f.design = {l_freq, h_freq, l_trans, h_trans, length_s, fs, l_freq - l_trans / 2.0,
                h_freq + h_trans / 2.0};
    f.taps.assign(n, 0.0);
    const double lo = f.design.low_cutoff / fs;
    const double hi = f.design.high_cutoff / fs;
    const std::size_t mid = (n - 1) / 2;
    for (std::size_t i = 0; i <= mid; ++i) {
        const double m = static_cast<double>(i) - static_cast<double>(mid);
        const double window =
            0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
        const double ideal = 2.0 * hi * sinc(2.0 * hi * m) - 2.0 * lo * sinc(2.0 * lo * m);
        f.taps[i] = window * ideal;
        f.taps[n - 1 - i] = f.taps[i];
    }
    return f;
}

std::vector<double> fir_zero_phase(const FirFilter& filter, std::span<const double> signal)
{
    check_length(filter, signal.size());
    std::vector<double> out(signal.size());
    ZeroPhaseConvolver conv(filter.taps, signal.size());
    conv.run(signal, out);
    return out;
}

void apply_fir_zero_phase_inplace(const FirFilter& filter, Recording& recording,
                                  std::span<const std::size_t> channels)
{
    const std::size_t n = recording.n_samples();
    check_length(filter, n);
    if (channels.empty())
        return;
    ZeroPhaseConvolver conv(filter.taps, n);
    std::vector<double> in(n), out(n);
    for (auto ch : channels) {
        if (ch >= recording.n_channels())
            throw Error(Errc::UnknownChannel, "channel index out of range");
        const auto r = static_cast<Eigen::Index>(ch);
        for (std::size_t i = 0; i < n; ++i)
            in[i] = recording.data(r, static_cast<Eigen::Index>(i));
        conv.run(in, out);
        for (std::size_t i = 0; i < n; ++i)
            recording.data(r, static_cast<Eigen::Index>(i)) = out[i];
    }
}

Recording apply_fir_zero_phase(const FirFilter& filter, const Recording& recording)
{
    Recording out = recording;
    std::vector<std::size_t> all(recording.n_channels());
    std::iota(all.begin(), all.end(), std::size_t{0});
    apply_fir_zero_phase_inplace(filter, out, all);
    return out;
}

}  // namespace mbci
