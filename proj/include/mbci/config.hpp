#pragma once

#include "mbci/synth.hpp"

#include <cstdint>
#include <string>

namespace mbci {

/// Processing parameters of the study pipelines.
struct PipelineParams {
    // EMG decoder
    int emg_order = 4;
    double emg_low_hz = 30.0;
    double emg_high_hz = 500.0;
    double notch_hz = 50.0;
    double notch_quality = 30.0;
    double emg_window_s = 0.2;
    double emit_period_s = 0.05;
    int emg_cv_folds = 10;
    double min_run_s = 3.75;

    // EEG preprocessing
    double fir_l_freq = 1.0;
    double fir_h_freq = 35.0;
    double fir_l_trans = 1.0;
    double fir_h_trans = 8.75;
    double fir_length_s = 3.3;
    int ica_components = 20;
    int ica_max_fit_samples = 20000;
    double ica_tolerance = 1e-6;
    int ica_max_iterations = 500;
    double eog_threshold = 0.7;
    double epoch_tmin = 1.25;
    double epoch_tmax = 5.0;
    double reject_uv = 100.0;

    // classification
    int n_csp = 6;
    /// Negative selects Ledoit-Wolf shrinkage.
    double csp_shrinkage = -1.0;
    double logistic_l2 = 1.0;
    int cv_folds = 5;
    int cv_repeats = 5;
    double threshold_fraction = 0.10;

    // time-frequency and slow potentials (cue frame)
    double tfr_fmin = 5.0;
    double tfr_fmax = 35.0;
    double tfr_fstep = 1.0;
    double tfr_tmin = -3.0;
    double tfr_tmax = 5.0;
    double tfr_window_s = 0.5;
    double tfr_pad_s = 0.5;
    int mrcp_order = 8;
    double mrcp_low_hz = 0.1;
    double mrcp_high_hz = 3.0;
    double mrcp_tmin = -3.0;
    double mrcp_tmax = 5.0;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::string out = "session";
    int laps = 5;
    int turns_per_side = 4;
    SynthSpec synth;
    PipelineParams pipeline;

    /// Throws Errc::Validation naming the offending field.
    void validate() const;
};

/// key = value lines, '#' starts a comment. Every field is written, numbers
/// with 17 significant digits, so parse(dump(c)) == c.
std::string config_to_string(const ExperimentConfig& config);
/// Unknown keys and malformed values throw Errc::Validation naming the key.
ExperimentConfig config_from_string(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Applies one assignment; throws Errc::Validation naming the key.
void config_set(ExperimentConfig& config, const std::string& key, const std::string& value);

}  // namespace mbci
