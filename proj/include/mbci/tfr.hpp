#pragma once

#include "mbci/recording.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mbci {

/// freqs x times power in V^2, no baseline correction.
struct TimeFrequencyMap {
    Matrix power;
    std::vector<double> freqs;
    std::vector<double> times;
    std::string channel;
    std::size_t n_trials = 0;
};

enum class PadMode {
    Data,     // the epochs already carry `pad_s` of real data at both ends
    Reflect,  // pad internally by even reflection
};

struct MultitaperOptions {
    double overlap = 0.5;
    double nw = 2.0;
    std::size_t n_tapers = 3;
    PadMode pad_mode = PadMode::Data;
};

/// Sliding-window multitaper power, averaged over tapers then trials, for
/// every channel of `epochs`. Window centres falling inside the padding are
/// discarded.
std::vector<TimeFrequencyMap> multitaper_tfr(const Epochs& epochs, std::span<const double> freqs,
                                             double window_s, double pad_s,
                                             const MultitaperOptions& options = {});

/// Frequency grid lo, lo+step, ..., hi.
std::vector<double> frequency_grid(double lo, double hi, double step);

/// Mean power over the grid points inside [f_lo, f_hi] x [t_lo, t_hi].
double band_power(const TimeFrequencyMap& map, double f_lo, double f_hi, double t_lo, double t_hi);
/// Mean power over [f_lo, f_hi] at every time point.
std::vector<double> band_power_course(const TimeFrequencyMap& map, double f_lo, double f_hi);

/// CSV with a header row of times and one row per frequency, plus a JSON
/// sidecar (<stem>.json) describing channel, units and grid.
void write_tfr_csv(const std::filesystem::path& csv_path, const TimeFrequencyMap& map);

}  // namespace mbci
