#include "mbci/synth.hpp"

#include "fft.hpp"
#include "mbci/error.hpp"
#include "mbci/iir.hpp"
#include "mbci/montage.hpp"
#include "mbci/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mbci {

namespace {

constexpr double kPi = std::numbers::pi;

// substream tags
enum : std::uint64_t {
    kTagMixing = 1,
    kTagSchedule = 2,
    kTagCalibration = 3,
    kTagDriving = 4,
    kTagAlphaLeft = 10,
    kTagAlphaRight,
    kTagBetaLeft,
    kTagBetaRight,
    kTagOccipital,
    kTagBlink,
    kTagFluctCommon,
    kTagFluctLeft,
    kTagFluctRight,
    kTagEmgJitter,
    kTagLine,
    kTagBackground = 100,
    kTagSensor = 200,
    kTagExtra = 300,
    kTagEmgBurst = 400,
    kTagEmgBackground = 410,
};

void require(bool ok, const char* field, const char* what)
{
    if (!ok)
        throw Error(Errc::Validation, std::string("synth.") + field + ": " + what);
}

double gauss_weight(const ScalpPosition& p, double cx, double cy, double sigma)
{
    const double dx = p.x - cx;
    const double dy = p.y - cy;
    return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

// Unit-RMS white noise through a Butterworth band-pass, start-up transient discarded.
std::vector<double> band_noise(std::size_t n, double lo, double hi, double fs, Rng rng)
{
    auto filter = design_butterworth_bandpass(2, lo, hi, fs);
    const auto warm = static_cast<std::size_t>(std::llround(2.0 * fs));
    std::vector<double> x(n + warm);
    for (auto& v : x)
        v = rng.normal();
    filter.process(0, x);
    x.erase(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(warm));
    double ss = 0.0;
    for (double v : x)
        ss += v * v;
    const double rms = std::sqrt(ss / static_cast<double>(std::max<std::size_t>(n, 1)));
    if (rms > 0.0)
        for (auto& v : x)
            v /= rms;
    return x;
}

// Unit-variance AR(1) process with time constant tau.
std::vector<double> slow_process(std::size_t n, double tau_s, double fs, Rng rng)
{
    const double a = std::exp(-1.0 / (tau_s * fs));
    const double b = std::sqrt(1.0 - a * a);
    std::vector<double> z(n);
    double s = rng.normal();
    for (auto& v : z) {
        s = a * s + b * rng.normal();
        v = s;
    }
    return z;
}

double raised_rise(double t, double a, double width)
{
    if (t <= a)
        return 0.0;
    if (t >= a + width)
        return 1.0;
    return 0.5 * (1.0 - std::cos(kPi * (t - a) / width));
}

struct Timeline {
    std::vector<TruthPeriod> periods;
    double duration_s = 0.0;
    double lead_s = 0.0;
    bool driving = false;
};

bool is_movement(EventLabel l) { return l == EventLabel::Left || l == EventLabel::Right; }

// Fills env[i] = max(env[i], depth * shape(t)) where shape rises around
// onset - lead and is released over the last `release` seconds of the period.
void add_erd(std::vector<double>& env, double fs, const TruthPeriod& p, double lead, double transition,
             double release, double depth)
{
    if (depth <= 0.0)
        return;
    const double rise_start = p.onset_s - lead - 0.5 * transition;
    const double fall_start = p.end_s - release;
    const auto n = static_cast<long long>(env.size());
    const long long i0 = std::max(0LL, static_cast<long long>(std::floor(rise_start * fs)));
    const long long i1 = std::min(n, static_cast<long long>(std::ceil(p.end_s * fs)) + 1);
    for (long long i = i0; i < i1; ++i) {
        const double t = static_cast<double>(i) / fs;
        const double up = raised_rise(t, rise_start, transition);
        const double down = 1.0 - raised_rise(t, fall_start, release);
        env[static_cast<std::size_t>(i)] = std::max(env[static_cast<std::size_t>(i)], depth * std::min(up, down));
    }
}

// Raised-cosine bump of full width `width` centred on `center`, scaled.
void add_bump(std::vector<double>& x, double fs, double center, double width, double scale)
{
    const auto n = static_cast<long long>(x.size());
    const long long i0 = std::max(0LL, static_cast<long long>(std::floor((center - 0.5 * width) * fs)));
    const long long i1 = std::min(n, static_cast<long long>(std::ceil((center + 0.5 * width) * fs)) + 1);
    for (long long i = i0; i < i1; ++i) {
        const double u = (static_cast<double>(i) / fs - center) / width;
        if (std::abs(u) < 0.5)
            x[static_cast<std::size_t>(i)] += scale * 0.5 * (1.0 + std::cos(2.0 * kPi * u));
    }
}

// Slow negativity: ramps to -1 over 0.75 s after `start`, holds until
// start + 1.25 s and returns to zero by start + 1.75 s.
// Negative shift: 0.2 s rise starting 0.6 s before onset, plateau until
// onset, 0.3 s return.
void add_cnv(std::vector<double>& x, double fs, double onset)
{
    const double start = onset - 0.6;
    const auto n = static_cast<long long>(x.size());
    const long long i0 = std::max(0LL, static_cast<long long>(std::floor(start * fs)));
    const long long i1 = std::min(n, static_cast<long long>(std::ceil((onset + 0.3) * fs)) + 1);
    for (long long i = i0; i < i1; ++i) {
        const double t = static_cast<double>(i) / fs - start;
        const double v = raised_rise(t, 0.0, 0.2) - raised_rise(t, 0.6, 0.3);
        x[static_cast<std::size_t>(i)] -= v;
    }
}

struct Layout {
    std::vector<ChannelInfo> channels;     // full recording layout
    std::vector<std::size_t> mixed_rows;   // EEG then EOG rows of the recording
    std::vector<ScalpPosition> positions;  // per mixed row
    std::vector<std::size_t> emg_rows;
};

Layout make_layout()
{
    Layout l;
    l.channels = full_montage();
    // virtual positions of the EOG electrodes, only used for background leakage
    const ScalpPosition eog_pos[4] = {{-0.45, 0.85}, {0.45, 0.85}, {-0.3, 0.95}, {-0.3, 0.55}};
    std::size_t eog = 0;
    for (std::size_t i = 0; i < l.channels.size(); ++i) {
        const auto& ch = l.channels[i];
        if (ch.kind == ChannelKind::EEG) {
            l.mixed_rows.push_back(i);
            l.positions.push_back(*ch.position);
        }
    }
    for (std::size_t i = 0; i < l.channels.size(); ++i) {
        const auto& ch = l.channels[i];
        if (ch.kind == ChannelKind::EOG) {
            l.mixed_rows.push_back(i);
            l.positions.push_back(eog_pos[eog++]);
        }
        if (ch.kind == ChannelKind::EMG)
            l.emg_rows.push_back(i);
    }
    return l;
}

enum Source : std::size_t {
    kAlphaLeft,
    kAlphaRight,
    kBetaLeft,
    kBetaRight,
    kOccipital,
    kCnv,
    kBlink,
    kFirstBackground
};

// Mixing depends on the subject seed only, so both sessions share it.
Matrix make_mixing(const SynthSpec& spec, const Layout& layout, std::uint64_t seed, std::vector<std::string>& names)
{
    const auto rows = static_cast<Eigen::Index>(layout.mixed_rows.size());
    const auto n_src = static_cast<Eigen::Index>(kFirstBackground + static_cast<std::size_t>(spec.background_sources));
    Matrix m = Matrix::Zero(rows, n_src);
    const std::size_t n_eeg = 32;
    names = {"alpha_left", "alpha_right", "beta_left", "beta_right", "alpha_occipital", "cnv", "blink"};

    auto blob = [&](Eigen::Index col, double cx, double cy, double sigma) {
        for (Eigen::Index r = 0; r < rows; ++r)
            m(r, col) = gauss_weight(layout.positions[static_cast<std::size_t>(r)], cx, cy, sigma);
    };
    blob(kAlphaLeft, -0.35, -0.05, 0.15);
    blob(kAlphaRight, 0.35, -0.05, 0.15);
    blob(kBetaLeft, -0.38, 0.02, 0.15);
    blob(kBetaRight, 0.38, 0.02, 0.15);
    blob(kOccipital, 0.0, -0.75, 0.25);

    // broad central blob, scaled to unit weight at C3/C4 after average reference
    blob(kCnv, 0.0, 0.0, 0.4);
    {
        double mean = 0.0;
        for (std::size_t r = 0; r < n_eeg; ++r)
            mean += m(static_cast<Eigen::Index>(r), kCnv);
        mean /= static_cast<double>(n_eeg);
        std::size_t c3 = 0, c4 = 0;
        for (std::size_t r = 0; r < n_eeg; ++r) {
            if (layout.channels[layout.mixed_rows[r]].label == "C3")
                c3 = r;
            if (layout.channels[layout.mixed_rows[r]].label == "C4")
                c4 = r;
        }
        const double at = 0.5 * (m(static_cast<Eigen::Index>(c3), kCnv) + m(static_cast<Eigen::Index>(c4), kCnv)) - mean;
        m.col(kCnv) /= at;
    }

    blob(kBlink, 0.0, 0.95, 0.25);
    for (std::size_t r = n_eeg; r < layout.mixed_rows.size(); ++r) {
        const auto& label = layout.channels[layout.mixed_rows[r]].label;
        double w = 0.2;
        if (label == "VEOG_U")
            w = 1.5;
        else if (label == "VEOG_D")
            w = -0.5;
        m(static_cast<Eigen::Index>(r), kBlink) = w;
    }

    Rng rng = Rng::derive(seed, kTagMixing);
    for (int b = 0; b < spec.background_sources; ++b) {
        double x, y;
        do {
            x = rng.uniform(-0.85, 0.85);
            y = rng.uniform(-0.85, 0.85);
        } while (x * x + y * y > 0.85 * 0.85);
        const double sigma = rng.uniform(0.25, 0.45);
        blob(static_cast<Eigen::Index>(kFirstBackground) + b, x, y, sigma);
        names.push_back("background_" + std::to_string(b));
    }
    return m;
}

std::vector<double> erd_envelope(const SynthSpec& spec, const Timeline& tl, std::size_t n, bool left_hemisphere,
                                 double contra_drop, double ipsi_drop)
{
    std::vector<double> env(n, 0.0);
    for (const auto& p : tl.periods) {
        if (!is_movement(p.cls))
            continue;
        // a LEFT movement desynchronises the right hemisphere
        bool contra = (p.cls == EventLabel::Left) != left_hemisphere;
        if (spec.swap_hemispheres)
            contra = !contra;
        add_erd(env, spec.fs, p, tl.lead_s, spec.erd_transition_s, spec.erd_release_s,
                contra ? contra_drop : ipsi_drop);
    }
    return env;
}

SynthSession synthesize(const SynthSpec& spec, std::uint64_t seed, const Timeline& tl, bool keep_sources)
{
    const Layout layout = make_layout();
    const double fs = spec.fs;
    const auto n = static_cast<std::size_t>(std::llround(tl.duration_s * fs));
    const auto ni = static_cast<Eigen::Index>(n);
    const std::uint64_t session_seed =
        Rng::derive(seed, tl.driving ? kTagDriving : kTagCalibration).next_u64();
    auto stream = [&](std::uint64_t tag) { return Rng::derive(session_seed, tag); };

    SynthSession out;
    out.truth.session = tl.driving ? "driving" : "calibration";
    out.truth.periods = tl.periods;
    out.truth.mixing = make_mixing(spec, layout, seed, out.truth.source_names);
    out.truth.blink_source = kBlink;
    for (auto r : layout.mixed_rows)
        out.truth.mixed_channels.push_back(layout.channels[r].label);
    const Eigen::Index n_src = out.truth.mixing.cols();

    Matrix sources(n_src, ni);
    auto set_source = [&](Eigen::Index k, const std::vector<double>& v) {
        for (Eigen::Index i = 0; i < ni; ++i)
            sources(k, i) = v[static_cast<std::size_t>(i)];
    };

    // amplitude fluctuation of the motor rhythms
    const double var = spec.fluctuation_common * spec.fluctuation_common + spec.fluctuation_local * spec.fluctuation_local;
    const auto zc = slow_process(n, spec.fluctuation_tau_s, fs, stream(kTagFluctCommon));
    const auto zl = slow_process(n, spec.fluctuation_tau_s, fs, stream(kTagFluctLeft));
    const auto zr = slow_process(n, spec.fluctuation_tau_s, fs, stream(kTagFluctRight));
    auto gain = [&](std::size_t i, bool left) {
        return std::exp(spec.fluctuation_common * zc[i] + spec.fluctuation_local * (left ? zl[i] : zr[i]) - var);
    };

    const double base_alpha = tl.driving ? spec.driving_alpha_suppression : 1.0;
    std::vector<double> dip(n, 0.0);
    for (const auto& p : tl.periods)
        if (is_movement(p.cls))
            add_bump(dip, fs, p.onset_s, spec.beta_dip_width_s, spec.beta_dip);

    for (int hemi = 0; hemi < 2; ++hemi) {
        const bool left = hemi == 0;
        auto alpha = band_noise(n, spec.alpha_low_hz, spec.alpha_high_hz, fs, stream(left ? kTagAlphaLeft : kTagAlphaRight));
        auto beta = band_noise(n, spec.beta_low_hz, spec.beta_high_hz, fs, stream(left ? kTagBetaLeft : kTagBetaRight));
        const auto erd_a = erd_envelope(spec, tl, n, left, spec.erd_drop, spec.erd_ipsilateral_drop);
        const auto erd_b = erd_envelope(spec, tl, n, left, spec.beta_erd_drop, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double g = gain(i, left);
            alpha[i] *= spec.alpha_amplitude * base_alpha * g * (1.0 - erd_a[i]);
            beta[i] *= spec.beta_amplitude * g * (1.0 - erd_b[i]) * std::max(0.0, 1.0 - dip[i]);
        }
        set_source(left ? kAlphaLeft : kAlphaRight, alpha);
        set_source(left ? kBetaLeft : kBetaRight, beta);
    }

    {
        auto occ = band_noise(n, spec.alpha_low_hz, spec.alpha_high_hz, fs, stream(kTagOccipital));
        for (auto& v : occ)
            v *= spec.occipital_alpha_amplitude * base_alpha;
        set_source(kOccipital, occ);
    }

    {
        std::vector<double> cnv(n, 0.0);
        if (!tl.driving || spec.cnv_in_driving)
            for (const auto& p : tl.periods)
                if (is_movement(p.cls))
                    add_cnv(cnv, fs, p.onset_s);
        for (auto& v : cnv)
            v *= spec.cnv_amplitude;
        set_source(kCnv, cnv);
    }

    {
        std::vector<double> blink(n, 0.0);
        Rng rng = stream(kTagBlink);
        if (spec.blink_rate_hz > 0.0) {
            double t = 0.0;
            for (;;) {
                t += -std::log(1.0 - rng.uniform()) / spec.blink_rate_hz;
                const double amp = rng.uniform(0.8, 1.2);
                if (t + spec.blink_duration_s >= tl.duration_s)
                    break;
                out.truth.blink_times_s.push_back(t);
                add_bump(blink, fs, t + 0.5 * spec.blink_duration_s, spec.blink_duration_s,
                         amp * spec.blink_amplitude);
            }
        }
        set_source(kBlink, blink);
    }

    for (int b = 0; b < spec.background_sources; ++b) {
        auto bg = pink_noise(n, fs, stream(kTagBackground + static_cast<std::uint64_t>(b)).next_u64());
        for (auto& v : bg)
            v *= spec.background_amplitude;
        set_source(static_cast<Eigen::Index>(kFirstBackground) + b, bg);
    }

    Recording& rec = out.recording;
    rec.fs = fs;
    rec.channels = layout.channels;
    rec.data = Matrix::Zero(static_cast<Eigen::Index>(layout.channels.size()), ni);
    {
        const Matrix mixed = out.truth.mixing * sources;
        for (std::size_t r = 0; r < layout.mixed_rows.size(); ++r)
            rec.data.row(static_cast<Eigen::Index>(layout.mixed_rows[r])) = mixed.row(static_cast<Eigen::Index>(r));
    }
    if (keep_sources)
        out.truth.sources = std::move(sources);
    else
        sources.resize(0, 0);

    // independent sensor noise
    for (std::size_t r = 0; r < layout.mixed_rows.size(); ++r) {
        const auto row = static_cast<Eigen::Index>(layout.mixed_rows[r]);
        Rng white = stream(kTagSensor + 2 * row);
        const auto pink = pink_noise(n, fs, stream(kTagSensor + 2 * row + 1).next_u64());
        for (Eigen::Index i = 0; i < ni; ++i)
            rec.data(row, i) += spec.sensor_white_amplitude * white.normal() +
                                spec.sensor_pink_amplitude * pink[static_cast<std::size_t>(i)];
        if (tl.driving && spec.driving_extra_noise > 0.0) {
            const auto extra = pink_noise(n, fs, stream(kTagExtra + row).next_u64(), 1.0);
            for (Eigen::Index i = 0; i < ni; ++i)
                rec.data(row, i) += spec.driving_extra_noise * extra[static_cast<std::size_t>(i)];
        }
    }

    // EMG: flexor and extensor bursts during the hold of the matching side
    {
        Rng jitter = stream(kTagEmgJitter);
        Rng line = stream(kTagLine);
        std::vector<std::vector<double>> gate(4, std::vector<double>(n, 0.0));
        const double ramp = 0.01;
        for (const auto& p : tl.periods) {
            if (!is_movement(p.cls))
                continue;
            const double s = spec.emg_trial_jitter;
            const double amp = spec.emg_amplitude * std::exp(s * jitter.normal() - 0.5 * s * s);
            const std::size_t side = p.cls == EventLabel::Left ? 0 : 2;
            const auto i0 = static_cast<std::size_t>(std::max(0.0, std::floor(p.onset_s * fs)));
            const auto i1 = std::min(n, static_cast<std::size_t>(std::ceil(p.end_s * fs)));
            for (std::size_t i = i0; i < i1; ++i) {
                const double t = static_cast<double>(i) / fs;
                const double w = std::min(raised_rise(t, p.onset_s, ramp), 1.0 - raised_rise(t, p.end_s - ramp, ramp));
                gate[side][i] = std::max(gate[side][i], amp * spec.emg_flexor_gain * w);
                gate[side + 1][i] = std::max(gate[side + 1][i], amp * spec.emg_extensor_gain * w);
            }
        }
        std::vector<std::vector<double>> burst(4);
        for (std::size_t c = 0; c < 4; ++c) {
            burst[c] = band_noise(n, spec.emg_low_hz, spec.emg_high_hz, fs, stream(kTagEmgBurst + c));
            for (std::size_t i = 0; i < n; ++i)
                burst[c][i] *= gate[c][i];
        }
        for (std::size_t c = 0; c < 4; ++c) {
            const auto row = static_cast<Eigen::Index>(layout.emg_rows[c]);
            const std::size_t pair = c ^ 1u;
            const auto bg = band_noise(n, spec.emg_low_hz, spec.emg_high_hz, fs, stream(kTagEmgBackground + c));
            const double line_amp = spec.line_noise_amplitude * line.uniform(0.5, 1.5);
            const double phase = line.uniform(0.0, 2.0 * kPi);
            const double w = 2.0 * kPi * spec.line_freq_hz / fs;
            for (std::size_t i = 0; i < n; ++i)
                rec.data(row, static_cast<Eigen::Index>(i)) = burst[c][i] + spec.emg_crosstalk * burst[pair][i] +
                                                              spec.emg_background * bg[i] +
                                                              line_amp * std::sin(w * static_cast<double>(i) + phase);
        }
    }

    quantize_to_float(rec);
    return out;
}

}  // namespace

void SynthSpec::validate() const
{
    require(fs > 0.0 && std::isfinite(fs), "fs", "must be positive");
    const double nyq = 0.5 * fs;
    require(alpha_low_hz > 0.0 && alpha_low_hz < alpha_high_hz && alpha_high_hz < nyq, "alpha_low_hz",
            "alpha band edges must satisfy 0 < low < high < fs/2");
    require(beta_low_hz > 0.0 && beta_low_hz < beta_high_hz && beta_high_hz < nyq, "beta_low_hz",
            "beta band edges must satisfy 0 < low < high < fs/2");
    require(emg_low_hz > 0.0 && emg_low_hz < emg_high_hz && emg_high_hz < nyq, "emg_low_hz",
            "EMG band edges must satisfy 0 < low < high < fs/2");
    require(line_freq_hz > 0.0 && line_freq_hz < nyq, "line_freq_hz", "must lie in (0, fs/2)");
    require(erd_drop > 0.0 && erd_drop < 1.0, "erd_drop", "must lie in (0,1)");
    require(erd_ipsilateral_drop >= 0.0 && erd_ipsilateral_drop < 1.0, "erd_ipsilateral_drop", "must lie in [0,1)");
    require(beta_erd_drop >= 0.0 && beta_erd_drop < 1.0, "beta_erd_drop", "must lie in [0,1)");
    require(beta_dip >= 0.0 && beta_dip <= 1.0, "beta_dip", "must lie in [0,1]");
    require(driving_alpha_suppression >= 0.0, "driving_alpha_suppression", "must be non-negative");
    const std::pair<const char*, double> non_negative[] = {
        {"alpha_amplitude", alpha_amplitude},
        {"beta_amplitude", beta_amplitude},
        {"occipital_alpha_amplitude", occipital_alpha_amplitude},
        {"fluctuation_common", fluctuation_common},
        {"fluctuation_local", fluctuation_local},
        {"cnv_amplitude", cnv_amplitude},
        {"emg_amplitude", emg_amplitude},
        {"emg_flexor_gain", emg_flexor_gain},
        {"emg_extensor_gain", emg_extensor_gain},
        {"emg_crosstalk", emg_crosstalk},
        {"emg_trial_jitter", emg_trial_jitter},
        {"emg_background", emg_background},
        {"line_noise_amplitude", line_noise_amplitude},
        {"blink_rate_hz", blink_rate_hz},
        {"blink_amplitude", blink_amplitude},
        {"background_amplitude", background_amplitude},
        {"sensor_pink_amplitude", sensor_pink_amplitude},
        {"sensor_white_amplitude", sensor_white_amplitude},
        {"driving_extra_noise", driving_extra_noise},
        {"lead_calibration_s", lead_calibration_s},
        {"lead_driving_s", lead_driving_s},
        {"driving_lead_in_s", driving_lead_in_s},
        {"driving_tail_s", driving_tail_s},
        {"calibration_tail_s", calibration_tail_s},
    };
    for (const auto& [name, value] : non_negative)
        require(value >= 0.0 && std::isfinite(value), name, "must be a finite non-negative number");
    const std::pair<const char*, double> positive[] = {
        {"beta_dip_width_s", beta_dip_width_s},
        {"erd_transition_s", erd_transition_s},
        {"erd_release_s", erd_release_s},
        {"fluctuation_tau_s", fluctuation_tau_s},
        {"blink_duration_s", blink_duration_s},
    };
    for (const auto& [name, value] : positive)
        require(value > 0.0 && std::isfinite(value), name, "must be positive");
    require(background_sources >= 0 && background_sources <= 256, "background_sources", "must lie in [0,256]");
}

nlohmann::json GroundTruth::to_json() const
{
    nlohmann::json j;
    j["session"] = session;
    j["source_names"] = source_names;
    j["mixed_channels"] = mixed_channels;
    nlohmann::json mix = nlohmann::json::array();
    for (Eigen::Index r = 0; r < mixing.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(mixing.cols()));
        for (Eigen::Index c = 0; c < mixing.cols(); ++c)
            row[static_cast<std::size_t>(c)] = mixing(r, c);
        mix.push_back(row);
    }
    j["mixing"] = mix;
    j["blink_source"] = blink_source;
    nlohmann::json periods = nlohmann::json::array();
    for (const auto& p : this->periods)
        periods.push_back({{"class", to_string(p.cls)}, {"start_s", p.start_s}, {"onset_s", p.onset_s}, {"end_s", p.end_s}});
    j["periods"] = periods;
    j["blink_times_s"] = blink_times_s;
    return j;
}

SynthSession generate_calibration_session(const SynthSpec& spec, std::uint64_t seed, bool keep_sources)
{
    spec.validate();
    Timeline tl;
    auto schedule = make_calibration_schedule(Rng::derive(seed, kTagSchedule).next_u64());
    for (const auto& t : schedule.trials)
        tl.periods.push_back({t.cls, t.cue_onset_s, t.movement_onset_s, t.trial_end_s});
    tl.duration_s = schedule.duration_s() + spec.calibration_tail_s;
    tl.lead_s = spec.lead_calibration_s;
    tl.driving = false;
    auto session = synthesize(spec, seed, tl, keep_sources);
    session.markers = schedule.markers();
    session.schedule = std::move(schedule);
    return session;
}

SynthSession generate_driving_session(const SynthSpec& spec, std::uint64_t seed, const std::vector<Command>& commands,
                                      bool keep_sources)
{
    spec.validate();
    if (commands.empty())
        throw Error(Errc::Validation, "driving command sequence is empty");
    Timeline tl;
    double t = spec.driving_lead_in_s;
    MarkerList markers;
    for (const auto& c : commands) {
        if (!(c.duration_s > 0.0) || !std::isfinite(c.duration_s))
            throw Error(Errc::Validation, "command durations must be positive");
        if (!is_movement(c.cls) && c.cls != EventLabel::Rest)
            throw Error(Errc::Validation, "commands must be LEFT, RIGHT or REST");
        tl.periods.push_back({c.cls, t, t, t + c.duration_s});
        markers.events.push_back({t, c.cls});
        t += c.duration_s;
    }
    tl.duration_s = t + spec.driving_tail_s;
    tl.lead_s = spec.lead_driving_s;
    tl.driving = true;
    auto session = synthesize(spec, seed, tl, keep_sources);
    session.markers = std::move(markers);
    return session;
}

std::vector<Command> default_track_sequence(int laps, std::uint64_t seed, int turns_per_side)
{
    if (laps < 1)
        throw Error(Errc::InvalidRequest, "at least one lap is required");
    if (turns_per_side < 1)
        throw Error(Errc::InvalidRequest, "at least one turn per side is required");
    Rng rng(seed);
    std::vector<Command> out;
    for (int lap = 0; lap < laps; ++lap) {
        std::vector<EventLabel> turns;
        turns.insert(turns.end(), static_cast<std::size_t>(turns_per_side), EventLabel::Left);
        turns.insert(turns.end(), static_cast<std::size_t>(turns_per_side), EventLabel::Right);
        rng.shuffle(std::span<EventLabel>(turns));
        for (auto turn : turns) {
            out.push_back({EventLabel::Rest, rng.uniform(5.0, 10.0)});
            out.push_back({turn, rng.uniform(4.0, 6.0)});
        }
    }
    out.push_back({EventLabel::Rest, rng.uniform(5.0, 10.0)});
    return out;
}

std::vector<double> pink_noise(std::size_t n, double fs, std::uint64_t seed, double f_min_hz)
{
    std::vector<double> out(n, 0.0);
    if (n < 2)
        return out;
    Rng rng(seed);
    detail::RealFft fft(detail::fast_fft_size(n));
    const std::size_t nfft = fft.size();
    fftw_complex* spec = fft.spectrum();
    spec[0][0] = 0.0;
    spec[0][1] = 0.0;
    for (std::size_t k = 1; k <= nfft / 2; ++k) {
        const double f = static_cast<double>(k) * fs / static_cast<double>(nfft);
        const double a = 1.0 / std::sqrt(std::max(f, f_min_hz));
        spec[k][0] = a * rng.normal();
        spec[k][1] = (nfft % 2 == 0 && k == nfft / 2) ? 0.0 : a * rng.normal();
    }
    fft.inverse();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        mean += fft.real()[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = fft.real()[i] - mean;
        ss += out[i] * out[i];
    }
    const double rms = std::sqrt(ss / static_cast<double>(n));
    if (rms > 0.0)
        for (auto& v : out)
            v /= rms;
    return out;
}

}  // namespace mbci
