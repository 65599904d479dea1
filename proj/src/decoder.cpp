#include "mbci/decoder.hpp"

#include "mbci/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace mbci {

namespace {

// Shared by the online and batch paths so both round identically.
double emg_average(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s * (1.0 / static_cast<double>(v.size()));
}

EventLabel predict_one(const LinearModel& model, std::span<const double> features)
{
    Matrix f(1, static_cast<Eigen::Index>(features.size()));
    for (std::size_t i = 0; i < features.size(); ++i)
        f(0, static_cast<Eigen::Index>(i)) = features[i];
    return static_cast<EventLabel>(model.predict(f).front());
}

std::size_t window_length(const EmgChainOptions& o, double fs)
{
    const auto w = static_cast<std::size_t>(std::llround(o.window_s * fs));
    if (w < 1)
        throw Error(Errc::InvalidRequest, "feature window shorter than one sample");
    return w;
}

}  // namespace

std::size_t emit_sample(std::size_t k, double emit_period_s, double fs)
{
    return static_cast<std::size_t>(std::llround(static_cast<double>(k) * emit_period_s * fs));
}

OnlineEmgDecoder::OnlineEmgDecoder(LinearModel model, double fs, std::vector<std::size_t> emg_rows,
                                   EmgChainOptions options)
    : m_model(std::move(model)), m_fs(fs), m_rows(std::move(emg_rows)), m_options(options),
      m_bandpass(design_butterworth_bandpass(options.bandpass_order, options.low_hz, options.high_hz, fs)),
      m_notch(design_notch(options.notch_hz, options.notch_quality, fs)), m_window(window_length(options, fs))
{
    if (m_rows.empty())
        throw Error(Errc::Layout, "decoder needs EMG channels");
    if (static_cast<std::size_t>(m_model.weights.cols()) != m_rows.size())
        throw Error(Errc::Layout, "model feature count does not match the EMG channels");
    if (!(options.emit_period_s > 0.0))
        throw Error(Errc::InvalidRequest, "emit period must be positive");
    m_ring.assign(m_rows.size(), std::vector<double>(m_window, 0.0));
    m_scratch.resize(m_rows.size());
}

void OnlineEmgDecoder::tamper()
{
    m_bandpass.state(0)[0] += 1.0;
}

void OnlineEmgDecoder::consume(const StreamFrame& frame)
{
    if (m_finished)
        throw Error(Errc::Protocol, "frame after END");
    if (frame.kind == FrameKind::End) {
        m_finished = true;
        return;
    }
    if (frame.kind != FrameKind::Data)
        return;
    if (m_last_frame_time && !(frame.timestamp > *m_last_frame_time))
        throw Error(Errc::Protocol, "data frames out of order");
    m_last_frame_time = frame.timestamp;
    for (auto r : m_rows)
        if (r >= frame.n_channels)
            throw Error(Errc::Protocol, "frame lacks the EMG channels");
    std::vector<double> v(m_rows.size());
    for (std::size_t i = 0; i < frame.n_samples; ++i) {
        for (std::size_t c = 0; c < m_rows.size(); ++c)
            v[c] = frame.sample(m_rows[c], i);
        consume_sample(frame.timestamp + static_cast<double>(i) / m_fs, v);
    }
}

void OnlineEmgDecoder::consume_sample(double time_s, std::span<const double> emg)
{
    if (!m_first_time)
        m_first_time = time_s;
    const double mean = emg_average(emg);
    for (std::size_t c = 0; c < m_rows.size(); ++c) {
        double y = m_bandpass.step(c, emg[c] - mean);
        y = m_notch.step(c, y);
        m_ring[c][m_ring_pos] = y * y;
    }
    m_ring_pos = (m_ring_pos + 1) % m_window;
    ++m_consumed;
    while (emit_sample(m_next_emit, m_options.emit_period_s, m_fs) <= m_consumed) {
        const std::size_t due = emit_sample(m_next_emit, m_options.emit_period_s, m_fs);
        ++m_next_emit;
        if (due < m_window || due != m_consumed)
            continue;
        emit(*m_first_time + static_cast<double>(due) / m_fs);
    }
}

void OnlineEmgDecoder::emit(double time_s)
{
    // ring position now points at the oldest sample
    for (std::size_t c = 0; c < m_rows.size(); ++c) {
        double s = 0.0;
        for (std::size_t j = 0; j < m_window; ++j)
            s += m_ring[c][(m_ring_pos + j) % m_window];
        m_scratch[c] = s / static_cast<double>(m_window);
    }
    m_predictions.push_back({time_s, predict_one(m_model, m_scratch)});
}

void emg_causal_preprocess(Recording& recording, std::span<const std::size_t> emg_rows, const EmgChainOptions& options)
{
    if (emg_rows.empty())
        throw Error(Errc::Layout, "no EMG channels");
    const auto n = static_cast<Eigen::Index>(recording.n_samples());
    std::vector<double> v(emg_rows.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < emg_rows.size(); ++c)
            v[c] = recording.data(static_cast<Eigen::Index>(emg_rows[c]), i);
        const double mean = emg_average(v);
        for (std::size_t c = 0; c < emg_rows.size(); ++c)
            recording.data(static_cast<Eigen::Index>(emg_rows[c]), i) = v[c] - mean;
    }
    auto bp = design_butterworth_bandpass(options.bandpass_order, options.low_hz, options.high_hz, recording.fs);
    auto notch = design_notch(options.notch_hz, options.notch_quality, recording.fs);
    std::vector<double> row(static_cast<std::size_t>(n));
    for (std::size_t c = 0; c < emg_rows.size(); ++c) {
        const auto r = static_cast<Eigen::Index>(emg_rows[c]);
        for (Eigen::Index i = 0; i < n; ++i)
            row[static_cast<std::size_t>(i)] = recording.data(r, i);
        bp.process(c, row);
        notch.process(c, row);
        for (Eigen::Index i = 0; i < n; ++i)
            recording.data(r, i) = row[static_cast<std::size_t>(i)];
    }
}

std::vector<Prediction> offline_emg_predictions(const Recording& recording, std::span<const std::size_t> emg_rows,
                                                const LinearModel& model, const EmgChainOptions& options)
{
    const std::size_t w = window_length(options, recording.fs);
    Recording emg = recording.select(emg_rows);
    std::vector<std::size_t> rows(emg_rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i] = i;
    emg_causal_preprocess(emg, rows, options);
    const std::size_t n = emg.n_samples();
    std::vector<std::vector<double>> sq(rows.size(), std::vector<double>(n));
    for (std::size_t c = 0; c < rows.size(); ++c)
        for (std::size_t i = 0; i < n; ++i) {
            const double y = emg.data(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i));
            sq[c][i] = y * y;
        }
    std::vector<Prediction> out;
    std::vector<double> feat(rows.size());
    for (std::size_t k = 1;; ++k) {
        const std::size_t due = emit_sample(k, options.emit_period_s, recording.fs);
        if (due > n)
            break;
        if (due < w)
            continue;
        for (std::size_t c = 0; c < rows.size(); ++c) {
            double s = 0.0;
            for (std::size_t j = due - w; j < due; ++j)
                s += sq[c][j];
            feat[c] = s / static_cast<double>(w);
        }
        out.push_back({recording.t0 + static_cast<double>(due) / recording.fs, predict_one(model, feat)});
    }
    return out;
}

void write_predictions_csv(const std::string& path, std::span<const Prediction> predictions)
{
    std::ofstream out(path);
    if (!out)
        throw Error(Errc::Io, "cannot write " + path);
    out << "time_s,class\n";
    char buf[64];
    for (const auto& p : predictions) {
        std::snprintf(buf, sizeof buf, "%.6f", p.time_s);
        out << buf << ',' << to_string(p.cls) << '\n';
    }
}

}  // namespace mbci
