#include "mbci/config.hpp"

#include "mbci/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mbci {

namespace {

template <class V>
void visit_fields(ExperimentConfig& c, V&& v)
{
    v("seed", c.seed);
    v("out", c.out);
    v("laps", c.laps);
    v("turns_per_side", c.turns_per_side);

    auto& s = c.synth;
    v("synth.fs", s.fs);
    v("synth.alpha_low_hz", s.alpha_low_hz);
    v("synth.alpha_high_hz", s.alpha_high_hz);
    v("synth.beta_low_hz", s.beta_low_hz);
    v("synth.beta_high_hz", s.beta_high_hz);
    v("synth.alpha_amplitude", s.alpha_amplitude);
    v("synth.beta_amplitude", s.beta_amplitude);
    v("synth.occipital_alpha_amplitude", s.occipital_alpha_amplitude);
    v("synth.erd_drop", s.erd_drop);
    v("synth.erd_ipsilateral_drop", s.erd_ipsilateral_drop);
    v("synth.beta_erd_drop", s.beta_erd_drop);
    v("synth.beta_dip", s.beta_dip);
    v("synth.beta_dip_width_s", s.beta_dip_width_s);
    v("synth.erd_transition_s", s.erd_transition_s);
    v("synth.erd_release_s", s.erd_release_s);
    v("synth.lead_calibration_s", s.lead_calibration_s);
    v("synth.lead_driving_s", s.lead_driving_s);
    v("synth.fluctuation_common", s.fluctuation_common);
    v("synth.fluctuation_local", s.fluctuation_local);
    v("synth.fluctuation_tau_s", s.fluctuation_tau_s);
    v("synth.swap_hemispheres", s.swap_hemispheres);
    v("synth.cnv_amplitude", s.cnv_amplitude);
    v("synth.cnv_in_driving", s.cnv_in_driving);
    v("synth.emg_low_hz", s.emg_low_hz);
    v("synth.emg_high_hz", s.emg_high_hz);
    v("synth.emg_amplitude", s.emg_amplitude);
    v("synth.emg_flexor_gain", s.emg_flexor_gain);
    v("synth.emg_extensor_gain", s.emg_extensor_gain);
    v("synth.emg_crosstalk", s.emg_crosstalk);
    v("synth.emg_trial_jitter", s.emg_trial_jitter);
    v("synth.emg_background", s.emg_background);
    v("synth.line_noise_amplitude", s.line_noise_amplitude);
    v("synth.line_freq_hz", s.line_freq_hz);
    v("synth.blink_rate_hz", s.blink_rate_hz);
    v("synth.blink_amplitude", s.blink_amplitude);
    v("synth.blink_duration_s", s.blink_duration_s);
    v("synth.background_sources", s.background_sources);
    v("synth.background_amplitude", s.background_amplitude);
    v("synth.sensor_pink_amplitude", s.sensor_pink_amplitude);
    v("synth.sensor_white_amplitude", s.sensor_white_amplitude);
    v("synth.driving_alpha_suppression", s.driving_alpha_suppression);
    v("synth.driving_extra_noise", s.driving_extra_noise);
    v("synth.driving_lead_in_s", s.driving_lead_in_s);
    v("synth.driving_tail_s", s.driving_tail_s);
    v("synth.calibration_tail_s", s.calibration_tail_s);

    auto& p = c.pipeline;
    v("pipeline.emg_order", p.emg_order);
    v("pipeline.emg_low_hz", p.emg_low_hz);
    v("pipeline.emg_high_hz", p.emg_high_hz);
    v("pipeline.notch_hz", p.notch_hz);
    v("pipeline.notch_quality", p.notch_quality);
    v("pipeline.emg_window_s", p.emg_window_s);
    v("pipeline.emit_period_s", p.emit_period_s);
    v("pipeline.emg_cv_folds", p.emg_cv_folds);
    v("pipeline.min_run_s", p.min_run_s);
    v("pipeline.fir_l_freq", p.fir_l_freq);
    v("pipeline.fir_h_freq", p.fir_h_freq);
    v("pipeline.fir_l_trans", p.fir_l_trans);
    v("pipeline.fir_h_trans", p.fir_h_trans);
    v("pipeline.fir_length_s", p.fir_length_s);
    v("pipeline.ica_components", p.ica_components);
    v("pipeline.ica_max_fit_samples", p.ica_max_fit_samples);
    v("pipeline.ica_tolerance", p.ica_tolerance);
    v("pipeline.ica_max_iterations", p.ica_max_iterations);
    v("pipeline.eog_threshold", p.eog_threshold);
    v("pipeline.epoch_tmin", p.epoch_tmin);
    v("pipeline.epoch_tmax", p.epoch_tmax);
    v("pipeline.reject_uv", p.reject_uv);
    v("pipeline.n_csp", p.n_csp);
    v("pipeline.csp_shrinkage", p.csp_shrinkage);
    v("pipeline.logistic_l2", p.logistic_l2);
    v("pipeline.cv_folds", p.cv_folds);
    v("pipeline.cv_repeats", p.cv_repeats);
    v("pipeline.threshold_fraction", p.threshold_fraction);
    v("pipeline.tfr_fmin", p.tfr_fmin);
    v("pipeline.tfr_fmax", p.tfr_fmax);
    v("pipeline.tfr_fstep", p.tfr_fstep);
    v("pipeline.tfr_tmin", p.tfr_tmin);
    v("pipeline.tfr_tmax", p.tfr_tmax);
    v("pipeline.tfr_window_s", p.tfr_window_s);
    v("pipeline.tfr_pad_s", p.tfr_pad_s);
    v("pipeline.mrcp_order", p.mrcp_order);
    v("pipeline.mrcp_low_hz", p.mrcp_low_hz);
    v("pipeline.mrcp_high_hz", p.mrcp_high_hz);
    v("pipeline.mrcp_tmin", p.mrcp_tmin);
    v("pipeline.mrcp_tmax", p.mrcp_tmax);
}

std::string format_value(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
std::string format_value(int v) { return std::to_string(v); }
std::string format_value(std::uint64_t v) { return std::to_string(v); }
std::string format_value(bool v) { return v ? "true" : "false"; }
std::string format_value(const std::string& v) { return v; }

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected)
{
    throw Error(Errc::Validation, key + ": cannot parse '" + value + "' as " + expected);
}

template <class T>
void parse_number(const std::string& key, const std::string& value, T& out, const char* expected)
{
    const char* first = value.data();
    const char* last = value.data() + value.size();
    T tmp{};
    auto [ptr, ec] = std::from_chars(first, last, tmp);
    if (ec != std::errc() || ptr != last)
        bad_value(key, value, expected);
    out = tmp;
}

void parse_value(const std::string& key, const std::string& value, double& out)
{
    parse_number(key, value, out, "a number");
    if (!std::isfinite(out))
        bad_value(key, value, "a finite number");
}
void parse_value(const std::string& key, const std::string& value, int& out)
{
    parse_number(key, value, out, "an integer");
}
void parse_value(const std::string& key, const std::string& value, std::uint64_t& out)
{
    parse_number(key, value, out, "an unsigned integer");
}
void parse_value(const std::string& key, const std::string& value, bool& out)
{
    if (value == "true" || value == "1")
        out = true;
    else if (value == "false" || value == "0")
        out = false;
    else
        bad_value(key, value, "a boolean");
}
void parse_value(const std::string&, const std::string& value, std::string& out) { out = value; }

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void require(bool ok, const char* key, const char* what)
{
    if (!ok)
        throw Error(Errc::Validation, std::string(key) + ": " + what);
}

}  // namespace

void config_set(ExperimentConfig& config, const std::string& key, const std::string& value)
{
    bool found = false;
    visit_fields(config, [&](const char* name, auto& field) {
        if (!found && key == name) {
            parse_value(key, value, field);
            found = true;
        }
    });
    if (!found)
        throw Error(Errc::Validation, key + ": unknown configuration key");
}

std::string config_to_string(const ExperimentConfig& config)
{
    std::ostringstream out;
    out << "# experiment configuration (key = value)\n";
    auto copy = config;
    visit_fields(copy, [&](const char* name, auto& field) { out << name << " = " << format_value(field) << '\n'; });
    return out.str();
}

ExperimentConfig config_from_string(const std::string& text)
{
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::Validation, "line " + std::to_string(lineno) + ": expected key = value");
        config_set(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::Io, "cannot read configuration " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_string(ss.str());
}

void ExperimentConfig::validate() const
{
    synth.validate();
    require(laps >= 1, "laps", "must be at least 1");
    require(turns_per_side >= 1, "turns_per_side", "must be at least 1");
    require(!out.empty(), "out", "must not be empty");
    const auto& p = pipeline;
    const double nyq = 0.5 * synth.fs;
    require(p.emg_order == 2 || p.emg_order == 4 || p.emg_order == 6 || p.emg_order == 8, "pipeline.emg_order",
            "must be 2, 4, 6 or 8");
    require(p.emg_low_hz > 0.0 && p.emg_low_hz < p.emg_high_hz && p.emg_high_hz < nyq, "pipeline.emg_low_hz",
            "band edges must satisfy 0 < low < high < fs/2");
    require(p.notch_hz > 0.0 && p.notch_hz < nyq, "pipeline.notch_hz", "must lie in (0, fs/2)");
    require(p.notch_quality > 0.0, "pipeline.notch_quality", "must be positive");
    require(p.emg_window_s > 0.0, "pipeline.emg_window_s", "must be positive");
    require(p.emit_period_s > 0.0, "pipeline.emit_period_s", "must be positive");
    require(p.emg_cv_folds >= 2, "pipeline.emg_cv_folds", "must be at least 2");
    require(p.min_run_s > 0.0, "pipeline.min_run_s", "must be positive");
    require(p.fir_l_freq > 0.0 && p.fir_l_freq < p.fir_h_freq && p.fir_h_freq < nyq, "pipeline.fir_l_freq",
            "band edges must satisfy 0 < low < high < fs/2");
    require(p.fir_l_trans > 0.0, "pipeline.fir_l_trans", "must be positive");
    require(p.fir_h_trans > 0.0, "pipeline.fir_h_trans", "must be positive");
    require(p.fir_length_s > 0.0, "pipeline.fir_length_s", "must be positive");
    require(p.ica_components >= 1 && p.ica_components <= 31, "pipeline.ica_components", "must lie in [1, 31]");
    require(p.ica_tolerance > 0.0 && p.ica_tolerance < 1.0, "pipeline.ica_tolerance", "must lie in (0, 1)");
    require(p.ica_max_iterations >= 1, "pipeline.ica_max_iterations", "must be at least 1");
    require(p.ica_max_fit_samples >= 100, "pipeline.ica_max_fit_samples", "must be at least 100");
    require(p.eog_threshold > 0.0 && p.eog_threshold < 1.0, "pipeline.eog_threshold", "must lie in (0,1)");
    require(p.epoch_tmin < p.epoch_tmax, "pipeline.epoch_tmin", "must be below pipeline.epoch_tmax");
    require(p.reject_uv > 0.0, "pipeline.reject_uv", "must be positive");
    require(p.n_csp >= 1 && p.n_csp <= 96, "pipeline.n_csp", "must lie in [1, 96]");
    require(p.csp_shrinkage <= 1.0, "pipeline.csp_shrinkage", "must be negative (automatic) or in [0,1]");
    require(p.logistic_l2 >= 0.0, "pipeline.logistic_l2", "must be non-negative");
    require(p.cv_folds >= 2, "pipeline.cv_folds", "must be at least 2");
    require(p.cv_repeats >= 1, "pipeline.cv_repeats", "must be at least 1");
    require(p.threshold_fraction > 0.0 && p.threshold_fraction < 1.0, "pipeline.threshold_fraction",
            "must lie in (0,1)");
    require(p.tfr_fmin > 0.0 && p.tfr_fmin <= p.tfr_fmax && p.tfr_fmax < nyq, "pipeline.tfr_fmin",
            "grid must satisfy 0 < fmin <= fmax < fs/2");
    require(p.tfr_fstep > 0.0, "pipeline.tfr_fstep", "must be positive");
    require(p.tfr_tmin < p.tfr_tmax, "pipeline.tfr_tmin", "must be below pipeline.tfr_tmax");
    require(p.tfr_window_s > 0.0, "pipeline.tfr_window_s", "must be positive");
    require(p.tfr_pad_s >= 0.0, "pipeline.tfr_pad_s", "must be non-negative");
    require(p.mrcp_order == 2 || p.mrcp_order == 4 || p.mrcp_order == 6 || p.mrcp_order == 8, "pipeline.mrcp_order",
            "must be 2, 4, 6 or 8");
    require(p.mrcp_low_hz > 0.0 && p.mrcp_low_hz < p.mrcp_high_hz && p.mrcp_high_hz < nyq, "pipeline.mrcp_low_hz",
            "band edges must satisfy 0 < low < high < fs/2");
    require(p.mrcp_tmin < -1.0 && p.mrcp_tmax > 1.75, "pipeline.mrcp_tmin",
            "window must cover [-1, 1.75] around the cue");
}

}  // namespace mbci
