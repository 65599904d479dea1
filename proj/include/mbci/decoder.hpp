#pragma once

#include "mbci/classifiers.hpp"
#include "mbci/frame.hpp"
#include "mbci/iir.hpp"
#include "mbci/paradigm.hpp"
#include "mbci/recording.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mbci {

/// The causal EMG chain: average reference over the EMG channels, band-pass,
/// notch, then mean power over a trailing window.
struct EmgChainOptions {
    int bandpass_order = 4;
    double low_hz = 30.0;
    double high_hz = 500.0;
    double notch_hz = 50.0;
    double notch_quality = 30.0;
    double window_s = 0.2;
    double emit_period_s = 0.05;
};

/// Class codes of an EMG model are EventLabel values.
class OnlineEmgDecoder {
public:
    OnlineEmgDecoder(LinearModel model, double fs, std::vector<std::size_t> emg_rows, EmgChainOptions options = {});

    /// DATA frames feed the chain, MARKER frames are ignored, END finishes.
    /// Throws Errc::Protocol for out-of-order data timestamps or a layout
    /// that does not contain the EMG rows.
    void consume(const StreamFrame& frame);
    void consume_sample(double time_s, std::span<const double> emg);

    const std::vector<Prediction>& predictions() const { return m_predictions; }
    bool finished() const { return m_finished; }
    std::size_t window_samples() const { return m_window; }

    /// Test hook: corrupts the band-pass state of the first channel.
    void tamper();

private:
    void emit(double time_s);

    LinearModel m_model;
    double m_fs;
    std::vector<std::size_t> m_rows;
    EmgChainOptions m_options;
    IirFilter m_bandpass;
    IirFilter m_notch;
    std::size_t m_window;
    std::vector<std::vector<double>> m_ring;  // squared filtered samples
    std::size_t m_ring_pos = 0;
    std::size_t m_consumed = 0;
    std::size_t m_next_emit = 1;
    std::optional<double> m_first_time;
    std::optional<double> m_last_frame_time;
    std::vector<Prediction> m_predictions;
    std::vector<double> m_scratch;
    bool m_finished = false;
};

/// Sample count at which the k-th prediction (k >= 1) is due.
std::size_t emit_sample(std::size_t k, double emit_period_s, double fs);

/// Batch form of the same causal chain over a whole recording.
std::vector<Prediction> offline_emg_predictions(const Recording& recording, std::span<const std::size_t> emg_rows,
                                                const LinearModel& model, const EmgChainOptions& options = {});

/// CAR + band-pass + notch applied causally to the EMG rows (in place), as
/// used for training the EMG model.
void emg_causal_preprocess(Recording& recording, std::span<const std::size_t> emg_rows,
                           const EmgChainOptions& options = {});

void write_predictions_csv(const std::string& path, std::span<const Prediction> predictions);

}  // namespace mbci
