#pragma once

#include "mbci/recording.hpp"

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace mbci {

/// One second-order section, a0 normalised to 1.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

enum class IirKind { Bandpass, Notch };

struct IirDesign {
    IirKind kind = IirKind::Bandpass;
    int order = 0;          // prototype order (Butterworth) or 2 (notch)
    double low_hz = 0.0;    // notch: centre frequency
    double high_hz = 0.0;   // notch: centre frequency
    double quality = 0.0;   // notch only
    double fs = 0.0;
};

/// Second-order-section cascade with per-channel streaming state
/// (transposed direct form II, two state words per section).
class IirFilter {
public:
    IirFilter() = default;
    IirFilter(std::vector<Biquad> sections, IirDesign design);

    const std::vector<Biquad>& sections() const { return m_sections; }
    const IirDesign& design() const { return m_design; }

    std::complex<double> response(double freq_hz) const;
    double magnitude_db(double freq_hz) const;
    /// Largest pole radius over all sections.
    double max_pole_radius() const;
    bool is_stable() const { return max_pole_radius() < 1.0; }

    void reset();
    /// Filters the samples of one logical channel in place, carrying state.
    void process(std::size_t channel, std::span<double> samples);
    double step(std::size_t channel, double x);

    /// Raw state words for a channel (2 per section). Exposed for tests.
    std::vector<double>& state(std::size_t channel);

private:
    std::vector<Biquad> m_sections;
    IirDesign m_design;
    std::vector<std::vector<double>> m_state;
};

/// Butterworth band-pass by bilinear transform with pre-warped edges.
/// `order` is the low-pass prototype order; the cascade has `order` sections.
IirFilter design_butterworth_bandpass(int order, double low_hz, double high_hz, double fs);

/// Second-order IIR notch with bandwidth freq/quality.
IirFilter design_notch(double freq_hz, double quality, double fs);

/// Analytic magnitude of the pre-warped analog band-pass prototype.
double butterworth_bandpass_analog_magnitude(int order, double low_hz, double high_hz, double fs,
                                             double freq_hz);

/// Causal filtering of the selected rows. State for row r lives in the
/// filter's channel r and is carried over to the next call. An empty subset
/// returns the input unchanged and appends a warning.
Recording apply_iir_causal(IirFilter& filter, const Recording& recording,
                           std::span<const std::size_t> channel_subset,
                           std::vector<std::string>* warnings = nullptr);

/// In-place variant used by the pipelines to avoid copying large recordings.
void apply_iir_causal_inplace(IirFilter& filter, Recording& recording,
                              std::span<const std::size_t> channel_subset);

}  // namespace mbci
