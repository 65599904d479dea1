#include "mbci/study.hpp"

#include "mbci/epochs.hpp"
#include "mbci/error.hpp"
#include "mbci/features.hpp"
#include "mbci/fir.hpp"
#include "mbci/iir.hpp"
#include "mbci/io.hpp"
#include "mbci/montage.hpp"
#include "mbci/pipe.hpp"
#include "mbci/producer.hpp"
#include "mbci/random.hpp"
#include "mbci/reref.hpp"
#include "mbci/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <thread>

namespace mbci {

namespace fs = std::filesystem;

namespace {

// seed tags for the analysis stages
enum : std::uint64_t {
    kTagTrack = 7001,
    kTagEmgCv = 7002,
    kTagCalibrationCv = 7003,
    kTagDrivingCv = 7004,
    kTagIca = 7005,
};

const std::vector<int> kClasses = {static_cast<int>(EventLabel::Left), static_cast<int>(EventLabel::Right),
                                   static_cast<int>(EventLabel::Rest)};
const std::vector<std::string> kClassNames = {"LEFT", "RIGHT", "REST"};

std::vector<std::size_t> rows_of(const Recording& rec, std::initializer_list<ChannelKind> kinds)
{
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < rec.n_channels(); ++i)
        if (std::find(kinds.begin(), kinds.end(), rec.channels[i].kind) != kinds.end())
            rows.push_back(i);
    return rows;
}

std::vector<std::string> eog_labels(const Recording& rec)
{
    std::vector<std::string> out;
    for (const auto& ch : rec.channels)
        if (ch.kind == ChannelKind::EOG)
            out.push_back(ch.label);
    return out;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(Errc::Io, "cannot write " + path.string());
    out << text;
    if (!out)
        throw Error(Errc::Io, "failed writing " + path.string());
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw Error(Errc::Io, "cannot create output directory " + dir.string());
}

std::vector<std::size_t> iota_n(std::size_t n)
{
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

CspOptions csp_options(const PipelineParams& p)
{
    CspOptions o;
    o.n_filters = static_cast<std::size_t>(p.n_csp);
    if (p.csp_shrinkage >= 0.0)
        o.shrinkage = p.csp_shrinkage;
    return o;
}

std::vector<std::string> labels_of(const Epochs& e)
{
    std::vector<std::string> out;
    for (const auto& ch : e.channels)
        out.push_back(ch.label);
    return out;
}

// EEG-only epochs of the selected trials with amplitude rejection.
RejectResult decoding_epochs(const PipelineParams& p, const Recording& rec, const MarkerList& trials)
{
    const auto eeg = rows_of(rec, {ChannelKind::EEG});
    const Epochs all = epoch_extract(rec, trials, p.epoch_tmin, p.epoch_tmax, eeg);
    return peak_to_peak_reject(all, p.reject_uv * kMicrovolt);
}

nlohmann::json runs_json(const std::vector<DrivingRun>& runs)
{
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : runs)
        j.push_back({{"onset_s", r.onset_s}, {"duration_s", r.duration_s}, {"class", to_string(r.cls)}});
    return j;
}

}  // namespace

SessionFiles session_files(const fs::path& dir)
{
    return {dir / "calibration.mbr", dir / "calibration.markers.jsonl", dir / "driving.mbr",
            dir / "driving.markers.jsonl", dir / "ground_truth.json"};
}

StudyInputs synthesize_study(const ExperimentConfig& config, nlohmann::json* ground_truth)
{
    config.validate();
    StudyInputs in;
    {
        auto cal = generate_calibration_session(config.synth, config.seed);
        if (ground_truth)
            (*ground_truth)["calibration"] = cal.truth.to_json();
        in.calibration = {std::move(cal.recording), std::move(cal.markers)};
    }
    const auto commands = default_track_sequence(config.laps, Rng::derive(config.seed, kTagTrack).next_u64(),
                                                 config.turns_per_side);
    auto drive = generate_driving_session(config.synth, config.seed, commands);
    if (ground_truth) {
        (*ground_truth)["driving"] = drive.truth.to_json();
        nlohmann::json cmds = nlohmann::json::array();
        for (const auto& c : commands)
            cmds.push_back({{"class", to_string(c.cls)}, {"duration_s", c.duration_s}});
        (*ground_truth)["commands"] = cmds;
        (*ground_truth)["seed"] = config.seed;
    }
    in.driving = {std::move(drive.recording), std::move(drive.markers)};
    return in;
}

void cmd_synth(const ExperimentConfig& config)
{
    config.validate();
    const fs::path dir(config.out);
    ensure_dir(dir);
    nlohmann::json truth;
    const auto in = synthesize_study(config, &truth);
    const auto files = session_files(dir);
    write_mbr1(files.calibration_recording, in.calibration.recording);
    write_markers_jsonl(files.calibration_markers, in.calibration.markers);
    write_mbr1(files.driving_recording, in.driving.recording);
    write_markers_jsonl(files.driving_markers, in.driving.markers);
    write_text(files.ground_truth, truth.dump(1) + "\n");
}

StudyInputs load_session(const fs::path& dir)
{
    const auto files = session_files(dir);
    for (const auto& p : {files.calibration_recording, files.calibration_markers, files.driving_recording,
                          files.driving_markers})
        if (!fs::exists(p))
            throw Error(Errc::Io, "missing session file " + p.string());
    StudyInputs in;
    in.calibration = {read_mbr1(files.calibration_recording), read_markers_jsonl(files.calibration_markers)};
    in.driving = {read_mbr1(files.driving_recording), read_markers_jsonl(files.driving_markers)};
    return in;
}

EmgChainOptions emg_chain_options(const PipelineParams& p)
{
    EmgChainOptions o;
    o.bandpass_order = p.emg_order;
    o.low_hz = p.emg_low_hz;
    o.high_hz = p.emg_high_hz;
    o.notch_hz = p.notch_hz;
    o.notch_quality = p.notch_quality;
    o.window_s = p.emg_window_s;
    o.emit_period_s = p.emit_period_s;
    return o;
}

EmgTrainingSet emg_training_set(const ExperimentConfig& config, const SessionData& calibration)
{
    const auto& p = config.pipeline;
    const auto emg_rows = rows_of(calibration.recording, {ChannelKind::EMG});
    Recording emg = calibration.recording.select(emg_rows);
    emg_causal_preprocess(emg, iota_n(emg.n_channels()), emg_chain_options(p));

    // crop start markers
    MarkerList crops;
    for (const auto& m : calibration.markers.events) {
        if (m.label == EventLabel::Left || m.label == EventLabel::Right) {
            TrialDescriptor t;
            t.cls = m.label;
            t.cue_onset_s = m.time_s;
            t.movement_onset_s = m.time_s + kOnsetAfterCueS;
            t.trial_end_s = m.time_s + kTrialEndAfterCueS;
            crops.events.push_back({emg_crop_window(t).first, m.label});
        } else if (m.label == EventLabel::TrialEnd) {
            const double center = m.time_s + kRestOffsetS + 0.5 * kRestWindowS;
            crops.events.push_back({center - 0.5 * p.emg_window_s, EventLabel::Rest});
        }
    }
    std::stable_sort(crops.events.begin(), crops.events.end(),
                     [](const Marker& a, const Marker& b) { return a.time_s < b.time_s; });
    const Epochs epochs = epoch_extract(emg, crops, 0.0, p.emg_window_s);
    EmgTrainingSet set;
    set.features = emg_mean_power_features(epochs);
    set.labels = epochs.label_codes();
    return set;
}

EmgStageResult run_emg_stage(const ExperimentConfig& config, const StudyInputs& inputs)
{
    const auto& p = config.pipeline;
    EmgStageResult out;
    const auto set = emg_training_set(config, inputs.calibration);
    FoldPipeline lda = [&](std::span<const std::size_t> train, std::span<const std::size_t> test) {
        Matrix xtr(static_cast<Eigen::Index>(train.size()), set.features.cols());
        std::vector<int> ytr;
        for (std::size_t i = 0; i < train.size(); ++i) {
            xtr.row(static_cast<Eigen::Index>(i)) = set.features.row(static_cast<Eigen::Index>(train[i]));
            ytr.push_back(set.labels[train[i]]);
        }
        Matrix xte(static_cast<Eigen::Index>(test.size()), set.features.cols());
        for (std::size_t i = 0; i < test.size(); ++i)
            xte.row(static_cast<Eigen::Index>(i)) = set.features.row(static_cast<Eigen::Index>(test[i]));
        return lda_fit(xtr, ytr).predict(xte);
    };
    out.cv = crossval(lda, set.labels, kClasses, p.emg_cv_folds, Rng::derive(config.seed, kTagEmgCv).next_u64(), 1,
                      kClassNames);
    out.model = lda_fit(set.features, set.labels);
    out.emg_rows = rows_of(inputs.driving.recording, {ChannelKind::EMG});
    out.predictions = offline_emg_predictions(inputs.driving.recording, out.emg_rows, out.model, emg_chain_options(p));
    out.runs = segment_driving(out.predictions, p.emit_period_s, p.min_run_s);
    return out;
}

MarkerList calibration_trial_markers(const MarkerList& session_markers)
{
    MarkerList out;
    for (const auto& m : session_markers.events) {
        if (m.label == EventLabel::Left || m.label == EventLabel::Right)
            out.events.push_back(m);
        else if (m.label == EventLabel::TrialEnd)
            out.events.push_back({m.time_s + kRestOffsetS - kOnsetAfterCueS, EventLabel::Rest});
    }
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const Marker& a, const Marker& b) { return a.time_s < b.time_s; });
    return out;
}

MarkerList movement_markers(const MarkerList& trial_markers)
{
    MarkerList out;
    for (const auto& m : trial_markers.events)
        if (m.label == EventLabel::Left || m.label == EventLabel::Right)
            out.events.push_back(m);
    return out;
}

CleanEeg prepare_eeg(const ExperimentConfig& config, const StudyInputs& inputs)
{
    const auto& p = config.pipeline;
    CleanEeg out;
    auto prepare = [&](const Recording& raw) {
        Recording rec = raw.select(rows_of(raw, {ChannelKind::EEG, ChannelKind::EOG}));
        common_average_reference_inplace(rec, {ChannelKind::EEG});
        const auto fir = design_fir_bandpass(p.fir_l_freq, p.fir_h_freq, p.fir_l_trans, p.fir_h_trans,
                                             p.fir_length_s, rec.fs);
        apply_fir_zero_phase_inplace(fir, rec, iota_n(rec.n_channels()));
        return rec;
    };
    out.calibration = prepare(inputs.calibration.recording);
    IcaOptions opts;
    opts.n_components = static_cast<std::size_t>(p.ica_components);
    opts.seed = Rng::derive(config.seed, kTagIca).next_u64();
    opts.max_fit_samples = static_cast<std::size_t>(p.ica_max_fit_samples);
    opts.tolerance = p.ica_tolerance;
    opts.max_iterations = p.ica_max_iterations;
    out.ica = fastica_fit(out.calibration, opts);
    out.ica.fitted_on = "calibration";
    out.ica = ica_mark_artifacts(std::move(out.ica), out.calibration, eog_labels(out.calibration), p.eog_threshold);
    ica_apply_inplace(out.ica, out.calibration);
    out.driving = prepare(inputs.driving.recording);
    ica_apply_inplace(out.ica, out.driving);
    return out;
}

DecodingResult run_decoding(const ExperimentConfig& config, const CleanEeg& eeg, const MarkerList& calibration_trials,
                            const MarkerList& driving_trials)
{
    const auto& p = config.pipeline;
    DecodingResult out;
    const auto cal = decoding_epochs(p, eeg.calibration, calibration_trials);
    const auto drv = decoding_epochs(p, eeg.driving, driving_trials);
    out.calibration_trials = cal.kept.n_trials();
    out.calibration_rejected = cal.rejected;
    out.driving_trials = drv.kept.n_trials();
    out.driving_rejected = drv.rejected;

    const auto csp = csp_options(p);
    LogisticOptions lopt;
    lopt.l2 = p.logistic_l2;
    const auto channel_labels = labels_of(cal.kept);

    auto cv_session = [&](const Epochs& e, std::uint64_t tag) {
        const auto scatters = trial_scatters(e);
        const auto labels = e.label_codes();
        FoldPipeline pipeline = [&](std::span<const std::size_t> train, std::span<const std::size_t> test) {
            const auto bank = csp_fit_from_scatters(scatters, labels, train, channel_labels, csp);
            std::vector<int> ytr;
            for (auto t : train)
                ytr.push_back(labels[t]);
            const auto model = logistic_fit(csp_log_bandpower(bank, scatters, train), ytr, lopt);
            return model.predict(csp_log_bandpower(bank, scatters, test));
        };
        return crossval(pipeline, labels, kClasses, p.cv_folds, Rng::derive(config.seed, tag).next_u64(),
                        p.cv_repeats, kClassNames);
    };
    out.calibration = cv_session(cal.kept, kTagCalibrationCv);
    out.driving = cv_session(drv.kept, kTagDrivingCv);

    // transfer: everything from calibration, rest threshold on the first driving trials
    {
        const auto scatters = trial_scatters(cal.kept);
        const auto labels = cal.kept.label_codes();
        const auto all = iota_n(cal.kept.n_trials());
        out.calibration_bank = csp_fit_from_scatters(scatters, labels, all, channel_labels, csp);
        const auto model = logistic_fit(csp_log_bandpower(out.calibration_bank, scatters, all), labels, lopt);
        const Matrix proba = logistic_predict_proba(model, csp_log_bandpower(out.calibration_bank, drv.kept));
        const auto dlabels = drv.kept.label_codes();
        const int rest = static_cast<int>(EventLabel::Rest);
        out.threshold = rest_threshold_calibrate(proba, dlabels, model.classes, rest, p.threshold_fraction);
        const auto n_cal = static_cast<Eigen::Index>(out.threshold.n_calibration);
        const Matrix eval_proba = proba.bottomRows(proba.rows() - n_cal);
        const auto pred = apply_rest_threshold(eval_proba, model.classes, rest, out.threshold.theta);
        const std::span<const int> eval_labels = std::span<const int>(dlabels).subspan(out.threshold.n_calibration);
        out.transfer = evaluate(eval_labels, pred, kClasses, kClassNames);
    }
    out.driving_bank = csp_fit_multiclass(drv.kept, csp);
    return out;
}

SmrMaps run_smr(const ExperimentConfig& config, const CleanEeg& eeg, const MarkerList& calibration_movements,
                const MarkerList& driving_movements)
{
    const auto& p = config.pipeline;
    SmrMaps out;
    const auto freqs = frequency_grid(p.tfr_fmin, p.tfr_fmax, p.tfr_fstep);
    const Recording* sessions[2] = {&eeg.calibration, &eeg.driving};
    const MarkerList* markers[2] = {&calibration_movements, &driving_movements};
    const EventLabel classes[2] = {EventLabel::Left, EventLabel::Right};
    const char* centers[2] = {"C3", "C4"};
    for (int s = 0; s < 2; ++s) {
        const auto rows = rows_of(*sessions[s], {ChannelKind::EEG});
        for (int c = 0; c < 2; ++c) {
            const Epochs all = epoch_extract(*sessions[s], markers[s]->filter(classes[c]), p.tfr_tmin - p.tfr_pad_s,
                                             p.tfr_tmax + p.tfr_pad_s, rows);
            const Epochs kept = peak_to_peak_reject(all, p.reject_uv * kMicrovolt).kept;
            for (int ch = 0; ch < 2; ++ch) {
                const Epochs lap = surface_laplacian(kept, centers[ch], laplacian_neighbors(centers[ch]));
                if (lap.n_trials() == 0) {
                    TimeFrequencyMap empty;
                    empty.channel = lap.channels.empty() ? std::string(centers[ch]) : lap.channels.front().label;
                    empty.freqs = freqs;
                    out.maps.push_back(std::move(empty));
                    continue;
                }
                auto maps = multitaper_tfr(lap, freqs, p.tfr_window_s, p.tfr_pad_s);
                out.maps.push_back(std::move(maps.front()));
            }
        }
    }
    return out;
}

double cnv_negativity(const std::vector<double>& times, const Matrix& average)
{
    double base = 0.0, late = 0.0;
    std::size_t nb = 0, nl = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double v = average.col(static_cast<Eigen::Index>(i)).mean();
        if (times[i] >= -1.0 && times[i] < 0.0) {
            base += v;
            ++nb;
        } else if (times[i] >= 1.05 && times[i] < 1.25) {
            late += v;
            ++nl;
        }
    }
    if (nb == 0 || nl == 0)
        throw Error(Errc::InvalidWindow, "average does not cover the negativity windows");
    return base / static_cast<double>(nb) - late / static_cast<double>(nl);
}

MrcpAverage run_mrcp(const ExperimentConfig& config, const SessionData& session, const IcaDecomposition& ica,
                     const MarkerList& movements)
{
    const auto& p = config.pipeline;
    Recording rec = session.recording.select(rows_of(session.recording, {ChannelKind::EEG, ChannelKind::EOG}));
    common_average_reference_inplace(rec, {ChannelKind::EEG});
    auto bp = design_butterworth_bandpass(p.mrcp_order, p.mrcp_low_hz, p.mrcp_high_hz, rec.fs);
    apply_iir_causal_inplace(bp, rec, iota_n(rec.n_channels()));
    ica_apply_inplace(ica, rec);

    const std::size_t c3 = rec.index_of("C3");
    const std::size_t c4 = rec.index_of("C4");
    const std::vector<std::size_t> rows = rows_of(rec, {ChannelKind::EEG});
    const Epochs all = epoch_extract(rec, movements, p.mrcp_tmin, p.mrcp_tmax, rows);
    const Epochs kept = peak_to_peak_reject(all, p.reject_uv * kMicrovolt).kept;

    MrcpAverage out;
    const auto n = static_cast<Eigen::Index>(all.n_samples() ? all.n_samples()
                                                             : static_cast<std::size_t>(std::llround((p.mrcp_tmax - p.mrcp_tmin) * rec.fs)));
    out.average = Matrix::Zero(4, n);
    for (Eigen::Index i = 0; i < n; ++i)
        out.times.push_back(p.mrcp_tmin + static_cast<double>(i) / rec.fs);
    auto local = [&](std::size_t row) {
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i] == row)
                return static_cast<Eigen::Index>(i);
        throw Error(Errc::UnknownChannel, "C3/C4 missing");
    };
    const Eigen::Index lc3 = local(c3), lc4 = local(c4);
    std::size_t counts[2] = {0, 0};
    for (std::size_t t = 0; t < kept.n_trials(); ++t) {
        const int cls = kept.labels[t] == EventLabel::Left ? 0 : 1;
        out.average.row(2 * cls) += kept.data[t].row(lc3);
        out.average.row(2 * cls + 1) += kept.data[t].row(lc4);
        ++counts[cls];
    }
    for (int cls = 0; cls < 2; ++cls)
        if (counts[cls] > 0)
            out.average.middleRows(2 * cls, 2) /= static_cast<double>(counts[cls]);
    out.n_trials = kept.n_trials();
    if (counts[0] == 0 || counts[1] == 0)
        throw Error(Errc::InsufficientData, "slow-potential averages need trials of both classes");
    out.cnv = cnv_negativity(out.times, out.average);
    return out;
}

namespace {

void write_mrcp_csv(const fs::path& path, const MrcpAverage& avg)
{
    std::ofstream out(path);
    if (!out)
        throw Error(Errc::Io, "cannot write " + path.string());
    out << "time_s,left_C3,left_C4,right_C3,right_C4\n";
    char buf[64];
    // one row per millisecond-scale step keeps the file plot-sized
    const std::size_t step = std::max<std::size_t>(1, avg.times.size() / 2000);
    for (std::size_t i = 0; i < avg.times.size(); i += step) {
        std::snprintf(buf, sizeof buf, "%.6f", avg.times[i]);
        out << buf;
        for (Eigen::Index r = 0; r < 4; ++r) {
            std::snprintf(buf, sizeof buf, ",%.9g", avg.average(r, static_cast<Eigen::Index>(i)));
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace

nlohmann::json run_study(const ExperimentConfig& config, const StudySteps& steps)
{
    config.validate();
    const fs::path dir(config.out);
    const auto inputs = load_session(dir);
    nlohmann::json report;

    const auto emg = run_emg_stage(config, inputs);
    report["emg"] = emg.cv.to_json();
    report["emg"]["n_runs"] = emg.runs.size();
    write_predictions_csv((dir / "emg_predictions.csv").string(), emg.predictions);
    write_text(dir / "driving_runs.json", runs_json(emg.runs).dump(1) + "\n");

    const MarkerList cal_trials = calibration_trial_markers(inputs.calibration.markers);
    const MarkerList drv_trials = driving_trial_markers(emg.runs);

    const CleanEeg eeg = prepare_eeg(config, inputs);
    nlohmann::json ica;
    ica["n_components"] = eeg.ica.n_components();
    ica["rejected"] = eeg.ica.rejected;
    ica["converged"] = eeg.ica.converged;
    ica["iterations"] = eeg.ica.iterations;
    report["ica"] = ica;

    if (steps.decoding) {
        const auto dec = run_decoding(config, eeg, cal_trials, drv_trials);
        report["calibration"] = dec.calibration.to_json();
        report["driving"] = dec.driving.to_json();
        report["transfer"] = dec.transfer.to_json();
        report["transfer"]["threshold"] = dec.threshold.theta;
        report["transfer"]["threshold_trials"] = dec.threshold.n_calibration;
        report["transfer"]["threshold_degenerate"] = dec.threshold.degenerate;
        report["trials"] = {{"calibration", dec.calibration_trials},
                            {"calibration_rejected", dec.calibration_rejected},
                            {"driving", dec.driving_trials},
                            {"driving_rejected", dec.driving_rejected}};
        write_patterns_csv((dir / "csp_patterns_calibration.csv").string(), dec.calibration_bank,
                           inputs.calibration.recording.channels);
        write_patterns_csv((dir / "csp_patterns_driving.csv").string(), dec.driving_bank,
                           inputs.driving.recording.channels);
    }

    if (steps.smr) {
        const auto maps = run_smr(config, eeg, movement_markers(cal_trials), movement_markers(drv_trials));
        const char* sessions[2] = {"calibration", "driving"};
        const char* classes[2] = {"left", "right"};
        const char* channels[2] = {"C3", "C4"};
        nlohmann::json smr = nlohmann::json::array();
        for (int s = 0; s < 2; ++s)
            for (int c = 0; c < 2; ++c)
                for (int ch = 0; ch < 2; ++ch) {
                    const auto& m = maps.at(s, c, ch);
                    const std::string name =
                        std::string("tfr_") + sessions[s] + "_" + classes[c] + "_" + channels[ch] + ".csv";
                    if (m.n_trials > 0)
                        write_tfr_csv(dir / name, m);
                    smr.push_back({{"file", name}, {"n_trials", m.n_trials}, {"n_freqs", m.freqs.size()}});
                }
        report["smr"] = smr;
    }

    if (steps.mrcp) {
        const auto cal = run_mrcp(config, inputs.calibration, eeg.ica, movement_markers(cal_trials));
        const auto drv = run_mrcp(config, inputs.driving, eeg.ica, movement_markers(drv_trials));
        write_mrcp_csv(dir / "mrcp_calibration.csv", cal);
        write_mrcp_csv(dir / "mrcp_driving.csv", drv);
        report["mrcp"] = {{"calibration", {{"cnv_v", cal.cnv}, {"n_trials", cal.n_trials}}},
                          {"driving", {{"cnv_v", drv.cnv}, {"n_trials", drv.n_trials}}}};
    }

    std::string name = "report";
    if (!(steps.decoding && steps.smr && steps.mrcp)) {
        if (steps.decoding)
            name += "_decoding";
        if (steps.smr)
            name += "_smr";
        if (steps.mrcp)
            name += "_mrcp";
    }
    write_text(dir / (name + ".json"), report.dump(2) + "\n");
    return report;
}

StreamSimResult stream_simulation(const ExperimentConfig& config, const StudyInputs& inputs, const LinearModel& model,
                                  const StreamSimOptions& options)
{
    const auto& rec = inputs.driving.recording;
    const auto emg_rows = rows_of(rec, {ChannelKind::EMG});
    const auto chain = emg_chain_options(config.pipeline);

    StreamSimResult out;
    out.offline = offline_emg_predictions(rec, emg_rows, model, chain);

    BytePipe pipe(1 << 20);
    ProducerOptions popts;
    popts.chunk_samples = options.chunk_samples;
    popts.pacing = options.pacing;
    std::exception_ptr producer_error;
    std::thread producer([&] {
        try {
            stream_producer(rec, inputs.driving.markers, popts, pipe);
        } catch (...) {
            producer_error = std::current_exception();
        }
    });
    OnlineEmgDecoder decoder(model, rec.fs, emg_rows, chain);
    std::exception_ptr consumer_error;
    try {
        bool first = true;
        while (auto frame = read_frame(pipe)) {
            decoder.consume(*frame);
            if (first && options.tamper && frame->kind == FrameKind::Data) {
                decoder.tamper();
                first = false;
            }
            if (decoder.finished())
                break;
        }
    } catch (...) {
        consumer_error = std::current_exception();
        pipe.fail();
    }
    producer.join();
    if (consumer_error)
        std::rethrow_exception(consumer_error);
    if (producer_error)
        std::rethrow_exception(producer_error);

    out.online = decoder.predictions();
    out.n_predictions = out.online.size();
    out.equivalent = out.online == out.offline;
    out.first_mismatch = 0;
    while (out.first_mismatch < std::min(out.online.size(), out.offline.size()) &&
           out.online[out.first_mismatch] == out.offline[out.first_mismatch])
        ++out.first_mismatch;
    return out;
}

StreamSimResult cmd_stream_sim(const ExperimentConfig& config, const StreamSimOptions& options)
{
    config.validate();
    const fs::path dir(config.out);
    const auto inputs = load_session(dir);
    const auto set = emg_training_set(config, inputs.calibration);
    const auto model = lda_fit(set.features, set.labels);
    auto result = stream_simulation(config, inputs, model, options);
    write_predictions_csv((dir / "stream_predictions.csv").string(), result.online);
    return result;
}

}  // namespace mbci
