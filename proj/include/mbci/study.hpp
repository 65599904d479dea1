#pragma once

#include "mbci/classifiers.hpp"
#include "mbci/config.hpp"
#include "mbci/csp.hpp"
#include "mbci/decoder.hpp"
#include "mbci/evaluation.hpp"
#include "mbci/ica.hpp"
#include "mbci/paradigm.hpp"
#include "mbci/recording.hpp"
#include "mbci/tfr.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace mbci {

struct SessionData {
    Recording recording;
    MarkerList markers;
};

struct StudyInputs {
    SessionData calibration;
    SessionData driving;
};

/// File names inside a session directory.
struct SessionFiles {
    std::filesystem::path calibration_recording;
    std::filesystem::path calibration_markers;
    std::filesystem::path driving_recording;
    std::filesystem::path driving_markers;
    std::filesystem::path ground_truth;
};
SessionFiles session_files(const std::filesystem::path& dir);

/// Generates both sessions in memory (calibration, then driving over the
/// default track sequence).
StudyInputs synthesize_study(const ExperimentConfig& config, nlohmann::json* ground_truth = nullptr);

/// Writes the session files into config.out.
void cmd_synth(const ExperimentConfig& config);
/// Throws Errc::Io when a file is missing.
StudyInputs load_session(const std::filesystem::path& dir);

EmgChainOptions emg_chain_options(const PipelineParams& params);

struct EmgTrainingSet {
    Matrix features;
    std::vector<int> labels;
};

/// Mean-power features of the 200 ms hold-centre crops (LEFT/RIGHT) and of
/// the rest-window centres (REST) after the causal EMG chain.
EmgTrainingSet emg_training_set(const ExperimentConfig& config, const SessionData& calibration);

struct EmgStageResult {
    LinearModel model;
    EvalReport cv;
    std::vector<std::size_t> emg_rows;
    std::vector<Prediction> predictions;  // over the driving session
    std::vector<DrivingRun> runs;
};

EmgStageResult run_emg_stage(const ExperimentConfig& config, const StudyInputs& inputs);

/// Calibration trials in the cue frame: LEFT/RIGHT at the cue, REST placed
/// so that epoch time 1.25 s is 0.5 s after the trial end.
MarkerList calibration_trial_markers(const MarkerList& session_markers);
MarkerList movement_markers(const MarkerList& trial_markers);

struct CleanEeg {
    Recording calibration;  // EEG + EOG rows after CAR, FIR and ICA
    Recording driving;
    IcaDecomposition ica;
};

/// CAR and FIR on both sessions, ICA fitted and marked on calibration and
/// applied to both.
CleanEeg prepare_eeg(const ExperimentConfig& config, const StudyInputs& inputs);

struct DecodingResult {
    EvalReport calibration;
    EvalReport driving;
    EvalReport transfer;
    RestThreshold threshold;
    SpatialFilterBank calibration_bank;
    SpatialFilterBank driving_bank;
    std::size_t calibration_trials = 0;
    std::size_t calibration_rejected = 0;
    std::size_t driving_trials = 0;
    std::size_t driving_rejected = 0;
};

/// CSP + logistic regression: repeated CV on each session and the transfer
/// scenario with rest-threshold calibration on the first driving trials.
DecodingResult run_decoding(const ExperimentConfig& config, const CleanEeg& eeg, const MarkerList& calibration_trials,
                            const MarkerList& driving_trials);

struct SmrMaps {
    // [session][class][channel], session 0 = calibration, class 0 = LEFT, channel 0 = C3
    std::vector<TimeFrequencyMap> maps;
    const TimeFrequencyMap& at(int session, int cls, int channel) const { return maps[static_cast<std::size_t>(session * 4 + cls * 2 + channel)]; }
};

SmrMaps run_smr(const ExperimentConfig& config, const CleanEeg& eeg, const MarkerList& calibration_movements,
                const MarkerList& driving_movements);

struct MrcpAverage {
    std::vector<double> times;
    // rows: LEFT C3, LEFT C4, RIGHT C3, RIGHT C4
    Matrix average;
    std::size_t n_trials = 0;
    /// Pre-onset negativity at C3/C4, volts.
    double cnv = 0.0;
};

/// Causal slow-potential band-pass, ICA cleaning and cue-locked averages.
MrcpAverage run_mrcp(const ExperimentConfig& config, const SessionData& session, const IcaDecomposition& ica,
                     const MarkerList& movements);

/// Mean over [-1, 0] s minus mean over [1.05, 1.25] s of the average of the
/// four C3/C4 traces (cue frame).
double cnv_negativity(const std::vector<double>& times, const Matrix& average);

struct StudySteps {
    bool decoding = true;
    bool smr = true;
    bool mrcp = true;
};

/// Runs the selected analyses on the session files in config.out, writes the
/// artifacts there and returns the report. The report is written to
/// report.json, or report_<steps>.json for a partial run.
nlohmann::json run_study(const ExperimentConfig& config, const StudySteps& steps = {});

struct StreamSimResult {
    bool equivalent = false;
    std::size_t n_predictions = 0;
    std::size_t first_mismatch = 0;
    std::vector<Prediction> online;
    std::vector<Prediction> offline;
};

struct StreamSimOptions {
    std::size_t chunk_samples = 32;
    double pacing = 0.0;
    bool tamper = false;
};

/// Producer and online decoder on separate threads over a byte pipe,
/// compared against the batch causal chain.
StreamSimResult stream_simulation(const ExperimentConfig& config, const StudyInputs& inputs, const LinearModel& model,
                                  const StreamSimOptions& options);

/// Loads the session, trains the EMG model, streams the driving session and
/// writes stream_predictions.csv into config.out.
StreamSimResult cmd_stream_sim(const ExperimentConfig& config, const StreamSimOptions& options);

}  // namespace mbci
