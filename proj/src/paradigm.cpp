#include "mbci/paradigm.hpp"

#include "mbci/error.hpp"
#include "mbci/random.hpp"

#include <algorithm>
#include <cmath>

namespace mbci {

double CalibrationSchedule::duration_s() const
{
    if (trials.empty())
        return preparation_s;
    return trials.back().trial_end_s + trials.back().rest_gap_s;
}

MarkerList CalibrationSchedule::markers() const
{
    MarkerList out;
    out.events.push_back({0.0, EventLabel::Prep});
    for (const auto& t : trials) {
        out.events.push_back({t.cross_onset_s, EventLabel::Cross});
        out.events.push_back({t.cue_onset_s, t.cls});
        out.events.push_back({t.trial_end_s, EventLabel::TrialEnd});
    }
    return out;
}

MarkerList CalibrationSchedule::cue_markers() const
{
    MarkerList out;
    for (const auto& t : trials)
        out.events.push_back({t.cue_onset_s, t.cls});
    return out;
}

CalibrationSchedule make_calibration_schedule(std::uint64_t seed, std::size_t n_per_class)
{
    Rng rng(seed);
    std::vector<EventLabel> classes;
    classes.insert(classes.end(), n_per_class, EventLabel::Left);
    classes.insert(classes.end(), n_per_class, EventLabel::Right);
    rng.shuffle(std::span<EventLabel>(classes));

    CalibrationSchedule s;
    double t = s.preparation_s;
    for (auto cls : classes) {
        TrialDescriptor d;
        d.cls = cls;
        d.cross_onset_s = t;
        d.cue_onset_s = t + kCrossS;
        d.movement_onset_s = d.cue_onset_s + kOnsetAfterCueS;
        d.trial_end_s = d.cue_onset_s + kTrialEndAfterCueS;
        d.rest_gap_s = rng.uniform(kMinRestGapS, kMaxRestGapS);
        t = d.trial_end_s + d.rest_gap_s;
        s.trials.push_back(d);
    }
    return s;
}

MarkerList extract_rest_markers(const CalibrationSchedule& schedule)
{
    MarkerList out;
    for (const auto& t : schedule.trials)
        out.events.push_back({t.trial_end_s + kRestOffsetS, EventLabel::Rest});
    return out;
}

MarkerList rest_markers_cue_frame(const CalibrationSchedule& schedule)
{
    return extract_rest_markers(schedule).shifted(-kOnsetAfterCueS);
}

std::pair<double, double> emg_crop_window(const TrialDescriptor& trial)
{
    const double center = trial.movement_onset_s + 0.5 * kHoldS;
    return {center - 0.5 * kEmgCropS, center + 0.5 * kEmgCropS};
}

std::vector<DrivingRun> prediction_runs(std::span<const Prediction> predictions, double period_s)
{
    std::vector<DrivingRun> runs;
    if (predictions.empty())
        return runs;
    if (!(period_s > 0.0))
        throw Error(Errc::InvalidRequest, "prediction period must be positive");
    std::size_t start = 0;
    for (std::size_t i = 1; i <= predictions.size(); ++i) {
        if (i < predictions.size()) {
            if (predictions[i].time_s < predictions[i - 1].time_s)
                throw Error(Errc::Validation, "predictions must be chronological");
            if (predictions[i].cls == predictions[start].cls)
                continue;
        }
        runs.push_back({predictions[start].time_s, static_cast<double>(i - start) * period_s, predictions[start].cls});
        start = i;
    }
    return runs;
}

std::vector<DrivingRun> segment_driving(std::span<const Prediction> predictions, double period_s,
                                        double min_duration_s)
{
    auto runs = prediction_runs(predictions, period_s);
    std::erase_if(runs, [&](const DrivingRun& r) { return r.duration_s < min_duration_s - 1e-9; });
    return runs;
}

double prediction_period(std::span<const Prediction> predictions)
{
    if (predictions.size() < 2)
        return 0.0;
    std::vector<double> d;
    d.reserve(predictions.size() - 1);
    for (std::size_t i = 1; i < predictions.size(); ++i)
        d.push_back(predictions[i].time_s - predictions[i - 1].time_s);
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
    return d[d.size() / 2];
}

MarkerList driving_trial_markers(std::span<const DrivingRun> runs)
{
    MarkerList out;
    for (const auto& r : runs)
        out.events.push_back({r.onset_s - kOnsetAfterCueS, r.cls});
    return out;
}

}  // namespace mbci
