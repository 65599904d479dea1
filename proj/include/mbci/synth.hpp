#pragma once

#include "mbci/paradigm.hpp"
#include "mbci/recording.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace mbci {

/// Generative model of a session. Amplitudes are in volts (RMS for noise
/// and oscillations, peak for blinks and the slow potential).
struct SynthSpec {
    double fs = 2048.0;

    // sensorimotor rhythms
    double alpha_low_hz = 8.0;
    double alpha_high_hz = 12.0;
    double beta_low_hz = 12.5;
    double beta_high_hz = 30.0;
    double alpha_amplitude = 10e-6;
    double beta_amplitude = 4e-6;
    double occipital_alpha_amplitude = 8e-6;
    /// Amplitude drop of the contralateral rhythm during movement.
    double erd_drop = 0.5;
    double erd_ipsilateral_drop = 0.15;
    double beta_erd_drop = 0.3;
    /// Extra short beta dip centred on the movement onset.
    double beta_dip = 0.5;
    double beta_dip_width_s = 0.3;
    double erd_transition_s = 0.3;
    /// The desynchronisation is released over the last part of the hold.
    double erd_release_s = 0.5;
    double lead_calibration_s = 0.25;
    double lead_driving_s = 1.25;
    /// Log-amplitude fluctuation of the motor rhythms: a part shared by both
    /// hemispheres and an independent part per hemisphere.
    double fluctuation_common = 0.35;
    double fluctuation_local = 0.2;
    double fluctuation_tau_s = 2.0;
    /// LEFT movements desynchronise the left instead of the right hemisphere.
    bool swap_hemispheres = false;

    // slow cortical potential before the movement
    double cnv_amplitude = 20e-6;
    bool cnv_in_driving = false;

    // EMG
    double emg_low_hz = 30.0;
    double emg_high_hz = 500.0;
    double emg_amplitude = 50e-6;
    double emg_flexor_gain = 1.0;
    double emg_extensor_gain = 0.5;
    double emg_crosstalk = 0.1;
    double emg_trial_jitter = 0.15;
    double emg_background = 3e-6;
    double line_noise_amplitude = 5e-6;
    double line_freq_hz = 50.0;

    // eye blinks
    double blink_rate_hz = 0.2;
    double blink_amplitude = 150e-6;
    double blink_duration_s = 0.3;

    // noise
    int background_sources = 12;
    double background_amplitude = 6e-6;
    double sensor_pink_amplitude = 2e-6;
    double sensor_white_amplitude = 1e-6;

    // driving-session shift
    double driving_alpha_suppression = 0.7;
    double driving_extra_noise = 3e-6;
    double driving_lead_in_s = 5.0;
    double driving_tail_s = 3.0;
    double calibration_tail_s = 5.0;

    /// Throws Errc::Validation naming the offending field.
    void validate() const;
};

struct Command {
    EventLabel cls = EventLabel::Rest;
    double duration_s = 0.0;
    bool operator==(const Command&) const = default;
};

struct TruthPeriod {
    EventLabel cls = EventLabel::Rest;
    double start_s = 0.0;  // cue (calibration) or command start (driving)
    double onset_s = 0.0;  // movement onset
    double end_s = 0.0;
};

struct GroundTruth {
    std::string session;  // "calibration" or "driving"
    std::vector<std::string> source_names;
    /// Rows follow `mixed_channels` (EEG then EOG), columns the sources.
    Matrix mixing;
    std::vector<std::string> mixed_channels;
    std::size_t blink_source = 0;
    std::vector<TruthPeriod> periods;
    std::vector<double> blink_times_s;
    /// Source time courses, only filled when requested.
    Matrix sources;

    nlohmann::json to_json() const;
};

struct SynthSession {
    Recording recording;
    MarkerList markers;
    GroundTruth truth;
    CalibrationSchedule schedule;  // calibration sessions only
};

SynthSession generate_calibration_session(const SynthSpec& spec, std::uint64_t seed, bool keep_sources = false);

/// Throws Errc::Validation for an empty sequence or a non-positive duration.
SynthSession generate_driving_session(const SynthSpec& spec, std::uint64_t seed,
                                      const std::vector<Command>& commands, bool keep_sources = false);

/// Per lap: straights (REST, 5-10 s) interleaved with `turns_per_side` LEFT
/// and as many RIGHT turns (4-6 s) in shuffled order, starting and ending
/// with a straight.
std::vector<Command> default_track_sequence(int laps, std::uint64_t seed, int turns_per_side = 4);

/// Unit-RMS noise with a 1/f power spectrum above `f_min_hz`.
std::vector<double> pink_noise(std::size_t n, double fs, std::uint64_t seed, double f_min_hz = 0.1);

}  // namespace mbci
