#include "mbci/mbci.h"

#include "mbci/config.hpp"
#include "mbci/error.hpp"
#include "mbci/frame.hpp"
#include "mbci/iir.hpp"
#include "mbci/io.hpp"
#include "mbci/study.hpp"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

struct mbci_config {
    mbci::ExperimentConfig value;
};

struct mbci_recording {
    mbci::Recording value;
};

struct mbci_iir {
    mbci::IirFilter value;
};

struct mbci_frame {
    mbci::StreamFrame value;
};

namespace {

thread_local std::string g_last_error;

mbci_status status_of(mbci::Errc code)
{
    using mbci::Errc;
    switch (code) {
    case Errc::InvalidBand: return MBCI_E_INVALID_BAND;
    case Errc::UnsupportedOrder: return MBCI_E_UNSUPPORTED_ORDER;
    case Errc::InvalidWindow: return MBCI_E_INVALID_WINDOW;
    case Errc::InvalidRequest: return MBCI_E_INVALID_REQUEST;
    case Errc::TooShort: return MBCI_E_TOO_SHORT;
    case Errc::InsufficientChannels: return MBCI_E_INSUFFICIENT_CHANNELS;
    case Errc::InsufficientData: return MBCI_E_INSUFFICIENT_DATA;
    case Errc::UnknownChannel: return MBCI_E_UNKNOWN_CHANNEL;
    case Errc::Layout: return MBCI_E_LAYOUT;
    case Errc::Validation: return MBCI_E_VALIDATION;
    case Errc::Numerical: return MBCI_E_NUMERICAL;
    case Errc::Fold: return MBCI_E_FOLD;
    case Errc::CriterionUnavailable: return MBCI_E_CRITERION_UNAVAILABLE;
    case Errc::Io: return MBCI_E_IO;
    case Errc::Format: return MBCI_E_FORMAT;
    case Errc::Protocol: return MBCI_E_PROTOCOL;
    }
    return MBCI_E_INTERNAL;
}

mbci_status fail(mbci_status status, std::string message)
{
    g_last_error = std::move(message);
    return status;
}

template <class F>
mbci_status guarded(F&& body) noexcept
{
    g_last_error.clear();
    try {
        body();
        return MBCI_OK;
    } catch (const mbci::Error& e) {
        return fail(status_of(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(MBCI_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(MBCI_E_INTERNAL, e.what());
    } catch (...) {
        return fail(MBCI_E_INTERNAL, "unknown exception");
    }
}

char* duplicate(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

mbci_status null_argument(const char* name)
{
    return fail(MBCI_E_INVALID_ARGUMENT, std::string(name) + " must not be null");
}

mbci_status copy_encoded(const mbci::StreamFrame& frame, uint8_t* buffer, size_t capacity, size_t* written)
{
    const auto bytes = mbci::encode_frame(frame);
    *written = bytes.size();
    if (capacity < bytes.size())
        return fail(MBCI_E_INVALID_ARGUMENT, "buffer too small, need " + std::to_string(bytes.size()) + " bytes");
    if (buffer)
        std::memcpy(buffer, bytes.data(), bytes.size());
    return MBCI_OK;
}

}  // namespace

extern "C" {

const char* mbci_version(void) { return "1.0.0"; }

const char* mbci_last_error(void) { return g_last_error.c_str(); }

const char* mbci_status_name(mbci_status status)
{
    switch (status) {
    case MBCI_OK: return "ok";
    case MBCI_E_INVALID_ARGUMENT: return "invalid-argument";
    case MBCI_E_INVALID_BAND: return "invalid-band";
    case MBCI_E_UNSUPPORTED_ORDER: return "unsupported-order";
    case MBCI_E_INVALID_WINDOW: return "invalid-window";
    case MBCI_E_INVALID_REQUEST: return "invalid-request";
    case MBCI_E_TOO_SHORT: return "too-short";
    case MBCI_E_INSUFFICIENT_CHANNELS: return "insufficient-channels";
    case MBCI_E_INSUFFICIENT_DATA: return "insufficient-data";
    case MBCI_E_UNKNOWN_CHANNEL: return "unknown-channel";
    case MBCI_E_LAYOUT: return "layout";
    case MBCI_E_VALIDATION: return "validation";
    case MBCI_E_NUMERICAL: return "numerical";
    case MBCI_E_FOLD: return "fold";
    case MBCI_E_CRITERION_UNAVAILABLE: return "criterion-unavailable";
    case MBCI_E_IO: return "io";
    case MBCI_E_FORMAT: return "format";
    case MBCI_E_PROTOCOL: return "protocol";
    case MBCI_E_INTERNAL: return "internal";
    }
    return "unknown";
}

void mbci_string_free(char* s) { std::free(s); }

mbci_status mbci_config_new(mbci_config** out)
{
    if (!out)
        return null_argument("out");
    return guarded([&] { *out = new mbci_config{}; });
}

mbci_status mbci_config_load(const char* path, mbci_config** out)
{
    if (!path)
        return null_argument("path");
    if (!out)
        return null_argument("out");
    return guarded([&] { *out = new mbci_config{mbci::load_config(path)}; });
}

mbci_status mbci_config_parse(const char* text, mbci_config** out)
{
    if (!text)
        return null_argument("text");
    if (!out)
        return null_argument("out");
    return guarded([&] { *out = new mbci_config{mbci::config_from_string(text)}; });
}

mbci_status mbci_config_set(mbci_config* config, const char* key, const char* value)
{
    if (!config)
        return null_argument("config");
    if (!key || !value)
        return null_argument("key/value");
    return guarded([&] { mbci::config_set(config->value, key, value); });
}

mbci_status mbci_config_to_string(const mbci_config* config, char** out)
{
    if (!config)
        return null_argument("config");
    if (!out)
        return null_argument("out");
    return guarded([&] { *out = duplicate(mbci::config_to_string(config->value)); });
}

mbci_status mbci_config_validate(const mbci_config* config)
{
    if (!config)
        return null_argument("config");
    return guarded([&] { config->value.validate(); });
}

void mbci_config_free(mbci_config* config) { delete config; }

mbci_status mbci_synth(const mbci_config* config)
{
    if (!config)
        return null_argument("config");
    return guarded([&] { mbci::cmd_synth(config->value); });
}

mbci_status mbci_run_study(const mbci_config* config, unsigned steps, char** report_json)
{
    if (!config)
        return null_argument("config");
    return guarded([&] {
        mbci::StudySteps s;
        s.decoding = (steps & MBCI_STEP_DECODING) != 0;
        s.smr = (steps & MBCI_STEP_SMR) != 0;
        s.mrcp = (steps & MBCI_STEP_MRCP) != 0;
        const auto report = mbci::run_study(config->value, s);
        if (report_json)
            *report_json = duplicate(report.dump(2));
    });
}

mbci_status mbci_stream_sim(const mbci_config* config, size_t chunk_samples, double pacing, int tamper,
                            int* equivalent, size_t* n_predictions)
{
    if (!config)
        return null_argument("config");
    if (!equivalent)
        return null_argument("equivalent");
    if (chunk_samples == 0 || chunk_samples > 65535)
        return fail(MBCI_E_INVALID_ARGUMENT, "chunk_samples must be in [1, 65535]");
    if (!(pacing >= 0.0))
        return fail(MBCI_E_INVALID_ARGUMENT, "pacing must be non-negative");
    return guarded([&] {
        mbci::StreamSimOptions opts;
        opts.chunk_samples = chunk_samples;
        opts.pacing = pacing;
        opts.tamper = tamper != 0;
        const auto result = mbci::cmd_stream_sim(config->value, opts);
        *equivalent = result.equivalent ? 1 : 0;
        if (n_predictions)
            *n_predictions = result.n_predictions;
    });
}

mbci_status mbci_recording_read(const char* path, mbci_recording** out)
{
    if (!path)
        return null_argument("path");
    if (!out)
        return null_argument("out");
    return guarded([&] { *out = new mbci_recording{mbci::read_mbr1(path)}; });
}

size_t mbci_recording_channels(const mbci_recording* rec) { return rec ? rec->value.n_channels() : 0; }

size_t mbci_recording_samples(const mbci_recording* rec) { return rec ? rec->value.n_samples() : 0; }

double mbci_recording_fs(const mbci_recording* rec) { return rec ? rec->value.fs : 0.0; }

const char* mbci_recording_label(const mbci_recording* rec, size_t index)
{
    if (!rec || index >= rec->value.n_channels())
        return nullptr;
    return rec->value.channels[index].label.c_str();
}

mbci_status mbci_recording_copy_channel(const mbci_recording* rec, size_t index, double* out)
{
    if (!rec)
        return null_argument("rec");
    if (!out)
        return null_argument("out");
    if (index >= rec->value.n_channels())
        return fail(MBCI_E_INVALID_ARGUMENT, "channel index out of range");
    const auto& data = rec->value.data;
    const auto row = static_cast<Eigen::Index>(index);
    for (Eigen::Index i = 0; i < data.cols(); ++i)
        out[i] = data(row, i);
    return MBCI_OK;
}

void mbci_recording_free(mbci_recording* rec) { delete rec; }

mbci_status mbci_iir_butterworth_bandpass(int order, double low_hz, double high_hz, double fs, mbci_iir** out)
{
    if (!out)
        return null_argument("out");
    return guarded([&] { *out = new mbci_iir{mbci::design_butterworth_bandpass(order, low_hz, high_hz, fs)}; });
}

mbci_status mbci_iir_notch(double freq_hz, double quality, double fs, mbci_iir** out)
{
    if (!out)
        return null_argument("out");
    return guarded([&] { *out = new mbci_iir{mbci::design_notch(freq_hz, quality, fs)}; });
}

mbci_status mbci_iir_process(mbci_iir* filter, size_t channel, double* samples, size_t n)
{
    if (!filter)
        return null_argument("filter");
    if (!samples && n > 0)
        return null_argument("samples");
    return guarded([&] { filter->value.process(channel, std::span<double>(samples, n)); });
}

mbci_status mbci_iir_magnitude_db(const mbci_iir* filter, double freq_hz, double* out)
{
    if (!filter)
        return null_argument("filter");
    if (!out)
        return null_argument("out");
    return guarded([&] { *out = filter->value.magnitude_db(freq_hz); });
}

size_t mbci_iir_sections(const mbci_iir* filter) { return filter ? filter->value.sections().size() : 0; }

void mbci_iir_reset(mbci_iir* filter)
{
    if (filter)
        filter->value.reset();
}

void mbci_iir_free(mbci_iir* filter) { delete filter; }

mbci_status mbci_frame_encode_data(uint16_t stream_id, double timestamp, uint16_t n_channels, uint16_t n_samples,
                                   const float* samples, uint8_t* buffer, size_t capacity, size_t* written)
{
    if (!written)
        return null_argument("written");
    const std::size_t count = static_cast<std::size_t>(n_channels) * n_samples;
    if (!samples && count > 0)
        return null_argument("samples");
    mbci_status status = MBCI_OK;
    const auto guard = guarded([&] {
        const auto frame = mbci::make_data_frame(stream_id, timestamp, n_channels, n_samples,
                                                 std::vector<float>(samples, samples + count));
        status = copy_encoded(frame, buffer, capacity, written);
    });
    return guard != MBCI_OK ? guard : status;
}

mbci_status mbci_frame_encode_marker(uint16_t stream_id, double timestamp, const char* label, uint8_t* buffer,
                                     size_t capacity, size_t* written)
{
    if (!written)
        return null_argument("written");
    if (!label)
        return null_argument("label");
    mbci_status status = MBCI_OK;
    const auto guard = guarded([&] {
        status = copy_encoded(mbci::make_marker_frame(stream_id, timestamp, label), buffer, capacity, written);
    });
    return guard != MBCI_OK ? guard : status;
}

mbci_status mbci_frame_decode(const uint8_t* bytes, size_t n, mbci_frame** out)
{
    if (!bytes && n > 0)
        return null_argument("bytes");
    if (!out)
        return null_argument("out");
    return guarded([&] { *out = new mbci_frame{mbci::decode_frame(std::span<const std::uint8_t>(bytes, n))}; });
}

int mbci_frame_kind(const mbci_frame* frame) { return frame ? static_cast<int>(frame->value.kind) : -1; }

uint16_t mbci_frame_stream_id(const mbci_frame* frame) { return frame ? frame->value.stream_id : 0; }

double mbci_frame_timestamp(const mbci_frame* frame) { return frame ? frame->value.timestamp : 0.0; }

uint16_t mbci_frame_channels(const mbci_frame* frame) { return frame ? frame->value.n_channels : 0; }

uint16_t mbci_frame_samples(const mbci_frame* frame) { return frame ? frame->value.n_samples : 0; }

const float* mbci_frame_data(const mbci_frame* frame)
{
    return frame && !frame->value.samples.empty() ? frame->value.samples.data() : nullptr;
}

const char* mbci_frame_label(const mbci_frame* frame) { return frame ? frame->value.label.c_str() : nullptr; }

void mbci_frame_free(mbci_frame* frame) { delete frame; }

}  // extern "C"
