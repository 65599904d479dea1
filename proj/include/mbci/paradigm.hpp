#pragma once

#include "mbci/recording.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace mbci {

// Calibration timing, seconds. Trial time zero is the directional cue.
inline constexpr double kPreparationS = 30.0;
inline constexpr double kCrossS = 3.0;
inline constexpr double kOnsetAfterCueS = 1.25;
inline constexpr double kTrialEndAfterCueS = 5.0;
inline constexpr double kMinRestGapS = 1.5;
inline constexpr double kMaxRestGapS = 3.5;
inline constexpr double kHoldS = kTrialEndAfterCueS - kOnsetAfterCueS;  // 3.75
inline constexpr double kRestOffsetS = 0.5;
inline constexpr double kRestWindowS = 4.0;
inline constexpr double kMinRunS = 3.75;
inline constexpr double kEmgCropS = 0.2;

struct TrialDescriptor {
    EventLabel cls = EventLabel::Left;
    double cross_onset_s = 0.0;
    double cue_onset_s = 0.0;
    double movement_onset_s = 0.0;
    double trial_end_s = 0.0;
    double rest_gap_s = 0.0;
};

struct CalibrationSchedule {
    double preparation_s = kPreparationS;
    std::vector<TrialDescriptor> trials;

    /// End of the last rest gap.
    double duration_s() const;
    /// PREP, then CROSS, LEFT/RIGHT (at the cue) and TRIAL_END per trial.
    MarkerList markers() const;
    /// The LEFT/RIGHT cue markers only.
    MarkerList cue_markers() const;
};

/// 30 s preparation, then a shuffled sequence of n_per_class LEFT and RIGHT
/// trials: cross 3 s, cue, onset at +1.25 s, end at +5 s, rest gap U(1.5, 3.5).
CalibrationSchedule make_calibration_schedule(std::uint64_t seed, std::size_t n_per_class = 20);

/// One REST marker per trial at trial_end + 0.5 s; its rest window runs to
/// trial_end + 4.5 s.
MarkerList extract_rest_markers(const CalibrationSchedule& schedule);

/// REST markers moved into the cue frame: placed 1.25 s before the rest
/// window start so that epoch time 1.25 s is the rest window start.
MarkerList rest_markers_cue_frame(const CalibrationSchedule& schedule);

/// 200 ms window centred on the middle of the hold phase (onset + 1.875 s).
std::pair<double, double> emg_crop_window(const TrialDescriptor& trial);

struct Prediction {
    double time_s = 0.0;
    EventLabel cls = EventLabel::Rest;
    bool operator==(const Prediction&) const = default;
};

struct DrivingRun {
    double onset_s = 0.0;
    double duration_s = 0.0;
    EventLabel cls = EventLabel::Rest;
    bool operator==(const DrivingRun&) const = default;
};

/// Every maximal constant-prediction run. A run of m predictions lasts m
/// periods. The runs tile [first time, last time + period).
std::vector<DrivingRun> prediction_runs(std::span<const Prediction> predictions, double period_s);

/// Maximal runs lasting at least 3.75 s.
std::vector<DrivingRun> segment_driving(std::span<const Prediction> predictions, double period_s,
                                        double min_duration_s = kMinRunS);

/// Period inferred from the stream (median spacing); 0 for fewer than two.
double prediction_period(std::span<const Prediction> predictions);

/// One marker per run at run onset - 1.25 s, so that the run start sits at
/// epoch time 1.25 s like a calibration movement onset.
MarkerList driving_trial_markers(std::span<const DrivingRun> runs);

}  // namespace mbci
