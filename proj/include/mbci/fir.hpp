#pragma once

#include "mbci/recording.hpp"

#include <span>
#include <vector>

namespace mbci {

struct FirDesign {
    double l_freq = 0.0;
    double h_freq = 0.0;
    double l_trans = 0.0;
    double h_trans = 0.0;
    double length_s = 0.0;
    double fs = 0.0;
    // -6 dB points of the windowed sinc, at the transition-band midpoints
    double low_cutoff = 0.0;
    double high_cutoff = 0.0;
};

struct FirFilter {
    std::vector<double> taps;
    FirDesign design;

    /// Magnitude of the tap DTFT at `freq_hz`.
    double gain_at(double freq_hz) const;
};

/// Hamming-windowed sinc band-pass; odd tap count round(length_s * fs) (+1 if even).
FirFilter design_fir_bandpass(double l_freq, double h_freq, double l_trans, double h_trans,
                              double length_s, double fs);

/// Zero-phase (delay compensated) application with odd-reflection edge padding.
/// Output has the same length as the input. Applies to every channel.
Recording apply_fir_zero_phase(const FirFilter& filter, const Recording& recording);

void apply_fir_zero_phase_inplace(const FirFilter& filter, Recording& recording,
                                  std::span<const std::size_t> channels);

/// Core routine on a single contiguous signal.
std::vector<double> fir_zero_phase(const FirFilter& filter, std::span<const double> signal);

}  // namespace mbci
