/* C interface of the mbci shared library.
 *
 * Every function returns an mbci_status. On failure a human-readable
 * message is available from mbci_last_error() on the calling thread until
 * the next call into the library from that thread. Handles are opaque and
 * must be released with the matching *_free function. Strings returned
 * through char** out-parameters are owned by the caller and released with
 * mbci_string_free().
 */
#ifndef MBCI_MBCI_H
#define MBCI_MBCI_H

#include <stddef.h>
#include <stdint.h>

#if defined(MBCI_BUILDING_LIBRARY)
#define MBCI_API __attribute__((visibility("default")))
#else
#define MBCI_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mbci_status {
    MBCI_OK = 0,
    MBCI_E_INVALID_ARGUMENT = 1,
    MBCI_E_INVALID_BAND = 2,
    MBCI_E_UNSUPPORTED_ORDER = 3,
    MBCI_E_INVALID_WINDOW = 4,
    MBCI_E_INVALID_REQUEST = 5,
    MBCI_E_TOO_SHORT = 6,
    MBCI_E_INSUFFICIENT_CHANNELS = 7,
    MBCI_E_INSUFFICIENT_DATA = 8,
    MBCI_E_UNKNOWN_CHANNEL = 9,
    MBCI_E_LAYOUT = 10,
    MBCI_E_VALIDATION = 11,
    MBCI_E_NUMERICAL = 12,
    MBCI_E_FOLD = 13,
    MBCI_E_CRITERION_UNAVAILABLE = 14,
    MBCI_E_IO = 15,
    MBCI_E_FORMAT = 16,
    MBCI_E_PROTOCOL = 17,
    MBCI_E_INTERNAL = 99
} mbci_status;

typedef struct mbci_config mbci_config;
typedef struct mbci_recording mbci_recording;
typedef struct mbci_iir mbci_iir;
typedef struct mbci_frame mbci_frame;

MBCI_API const char* mbci_version(void);
MBCI_API const char* mbci_last_error(void);
MBCI_API const char* mbci_status_name(mbci_status status);
MBCI_API void mbci_string_free(char* s);

/* Experiment configuration (key = value text form). */
MBCI_API mbci_status mbci_config_new(mbci_config** out);
MBCI_API mbci_status mbci_config_load(const char* path, mbci_config** out);
MBCI_API mbci_status mbci_config_parse(const char* text, mbci_config** out);
MBCI_API mbci_status mbci_config_set(mbci_config* config, const char* key, const char* value);
MBCI_API mbci_status mbci_config_to_string(const mbci_config* config, char** out);
MBCI_API mbci_status mbci_config_validate(const mbci_config* config);
MBCI_API void mbci_config_free(mbci_config* config);

/* Commands. All of them read or write the directory named by "out". */
MBCI_API mbci_status mbci_synth(const mbci_config* config);

#define MBCI_STEP_DECODING 1u
#define MBCI_STEP_SMR 2u
#define MBCI_STEP_MRCP 4u
#define MBCI_STEP_ALL 7u

/* Runs the selected analyses; report_json may be NULL. */
MBCI_API mbci_status mbci_run_study(const mbci_config* config, unsigned steps, char** report_json);

/* Streams the driving session through the online EMG decoder and compares
 * its predictions with the batch chain. *equivalent is 1 on a bit-exact
 * match. tamper != 0 perturbs the decoder state after the first frame. */
MBCI_API mbci_status mbci_stream_sim(const mbci_config* config, size_t chunk_samples, double pacing, int tamper,
                                     int* equivalent, size_t* n_predictions);

/* Recordings (MBR1 files). */
MBCI_API mbci_status mbci_recording_read(const char* path, mbci_recording** out);
MBCI_API size_t mbci_recording_channels(const mbci_recording* rec);
MBCI_API size_t mbci_recording_samples(const mbci_recording* rec);
MBCI_API double mbci_recording_fs(const mbci_recording* rec);
/* Label of channel `index`, valid for the lifetime of the handle. */
MBCI_API const char* mbci_recording_label(const mbci_recording* rec, size_t index);
/* Copies mbci_recording_samples() values of channel `index` into `out`. */
MBCI_API mbci_status mbci_recording_copy_channel(const mbci_recording* rec, size_t index, double* out);
MBCI_API void mbci_recording_free(mbci_recording* rec);

/* Causal IIR filters with per-channel state. */
MBCI_API mbci_status mbci_iir_butterworth_bandpass(int order, double low_hz, double high_hz, double fs,
                                                   mbci_iir** out);
MBCI_API mbci_status mbci_iir_notch(double freq_hz, double quality, double fs, mbci_iir** out);
MBCI_API mbci_status mbci_iir_process(mbci_iir* filter, size_t channel, double* samples, size_t n);
MBCI_API mbci_status mbci_iir_magnitude_db(const mbci_iir* filter, double freq_hz, double* out);
MBCI_API size_t mbci_iir_sections(const mbci_iir* filter);
MBCI_API void mbci_iir_reset(mbci_iir* filter);
MBCI_API void mbci_iir_free(mbci_iir* filter);

/* Stream frames. Encoding writes at most `capacity` bytes and always
 * reports the required size in *written. Data samples are channel-major. */
MBCI_API mbci_status mbci_frame_encode_data(uint16_t stream_id, double timestamp, uint16_t n_channels,
                                            uint16_t n_samples, const float* samples, uint8_t* buffer,
                                            size_t capacity, size_t* written);
MBCI_API mbci_status mbci_frame_encode_marker(uint16_t stream_id, double timestamp, const char* label,
                                              uint8_t* buffer, size_t capacity, size_t* written);
MBCI_API mbci_status mbci_frame_decode(const uint8_t* bytes, size_t n, mbci_frame** out);
/* 0 data, 1 marker, 2 end */
MBCI_API int mbci_frame_kind(const mbci_frame* frame);
MBCI_API uint16_t mbci_frame_stream_id(const mbci_frame* frame);
MBCI_API double mbci_frame_timestamp(const mbci_frame* frame);
MBCI_API uint16_t mbci_frame_channels(const mbci_frame* frame);
MBCI_API uint16_t mbci_frame_samples(const mbci_frame* frame);
/* Channel-major samples, n_channels * n_samples values. */
MBCI_API const float* mbci_frame_data(const mbci_frame* frame);
MBCI_API const char* mbci_frame_label(const mbci_frame* frame);
MBCI_API void mbci_frame_free(mbci_frame* frame);

#ifdef __cplusplus
}
#endif

#endif
