#include "mbci/tfr.hpp"

#include "mbci/dpss.hpp"
#include "mbci/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace mbci {

std::vector<double> frequency_grid(double lo, double hi, double step)
{
    std::vector<double> out;
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long i = 0; i <= n; ++i)
        out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

std::vector<TimeFrequencyMap> multitaper_tfr(const Epochs& epochs, std::span<const double> freqs,
                                             double window_s, double pad_s,
                                             const MultitaperOptions& options)
{
    if (freqs.empty())
        throw Error(Errc::InvalidRequest, "empty frequency grid");
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (!(freqs[i] > 0.0 && freqs[i] < epochs.fs / 2.0))
            throw Error(Errc::InvalidBand, "TFR frequencies must lie in (0, fs/2)");
        if (i && !(freqs[i] > freqs[i - 1]))
            throw Error(Errc::InvalidRequest, "TFR frequencies must be strictly increasing");
    }
    if (!(pad_s >= 0.0))
        throw Error(Errc::InvalidRequest, "padding must be non-negative");

    const auto win = static_cast<Eigen::Index>(std::llround(window_s * epochs.fs));
    const auto pad = static_cast<Eigen::Index>(std::llround(pad_s * epochs.fs));
    const bool reflect = options.pad_mode == PadMode::Reflect;
    const auto raw_len = static_cast<Eigen::Index>(epochs.n_samples());
    const Eigen::Index total = reflect ? raw_len + 2 * pad : raw_len;
    if (win < 2 || win > total)
        throw Error(Errc::TooShort, "TFR window longer than the padded epoch");
    if (reflect && pad > 0 && pad >= raw_len)
        throw Error(Errc::TooShort, "epoch too short to reflect-pad");
    const auto step = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(static_cast<double>(win) * (1.0 - options.overlap))));

    // time of sample 0 of the (possibly reflect-padded) buffer
    const double t_start = reflect ? epochs.tmin - static_cast<double>(pad) / epochs.fs : epochs.tmin;
    const double keep_lo = reflect ? epochs.tmin : epochs.tmin + pad_s;
    const double keep_hi = reflect ? epochs.time_of(static_cast<std::size_t>(raw_len)) : epochs.tmin + static_cast<double>(raw_len) / epochs.fs - pad_s;

    std::vector<Eigen::Index> starts;
    std::vector<double> times;
    for (Eigen::Index s = 0; s + win <= total; s += step) {
        const double centre = t_start + (static_cast<double>(s) + static_cast<double>(win) / 2.0) / epochs.fs;
        if (centre >= keep_lo - 1e-9 && centre <= keep_hi + 1e-9) {
            starts.push_back(s);
            times.push_back(centre);
        }
    }
    if (starts.empty())
        throw Error(Errc::TooShort, "no TFR window fits inside the unpadded epoch");

    const auto basis = dpss_tapers(static_cast<std::size_t>(win), options.nw, options.n_tapers);
    const auto nf = static_cast<Eigen::Index>(freqs.size());
    Matrix cos_table(win, nf), sin_table(win, nf);
    for (Eigen::Index f = 0; f < nf; ++f) {
        const double w = 2.0 * std::numbers::pi * freqs[static_cast<std::size_t>(f)] / epochs.fs;
        for (Eigen::Index n = 0; n < win; ++n) {
            cos_table(n, f) = std::cos(w * static_cast<double>(n));
            sin_table(n, f) = std::sin(w * static_cast<double>(n));
        }
    }

    const auto nt = static_cast<Eigen::Index>(starts.size());
    const auto k = basis.tapers.rows();
    std::vector<TimeFrequencyMap> maps;
    Vector buf(total);
    Matrix tapered(k, win);
    for (std::size_t ch = 0; ch < epochs.channels.size(); ++ch) {
        TimeFrequencyMap map;
        map.power = Matrix::Zero(nf, nt);
        map.freqs.assign(freqs.begin(), freqs.end());
        map.times = times;
        map.channel = epochs.channels[ch].label;
        map.n_trials = epochs.n_trials();
        for (const auto& trial : epochs.data) {
            const auto row = trial.row(static_cast<Eigen::Index>(ch));
            if (reflect) {
                for (Eigen::Index i = 0; i < pad; ++i) {
                    buf(i) = row(pad - i);
                    buf(pad + raw_len + i) = row(raw_len - 2 - i);
                }
                buf.segment(pad, raw_len) = row.transpose();
            } else {
                buf = row.transpose();
            }
            for (Eigen::Index j = 0; j < nt; ++j) {
                const auto seg = buf.segment(starts[static_cast<std::size_t>(j)], win);
                tapered = basis.tapers.array().rowwise() * seg.transpose().array();
                const Matrix re = tapered * cos_table;
                const Matrix im = tapered * sin_table;
                map.power.col(j) += ((re.array().square() + im.array().square()).colwise().sum() /
                                     static_cast<double>(k))
                                        .transpose()
                                        .matrix();
            }
        }
        if (epochs.n_trials())
            map.power /= static_cast<double>(epochs.n_trials());
        maps.push_back(std::move(map));
    }
    return maps;
}

namespace {

std::pair<std::size_t, std::size_t> index_range(const std::vector<double>& grid, double lo, double hi)
{
    std::size_t a = grid.size(), b = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] >= lo - 1e-9 && grid[i] <= hi + 1e-9) {
            a = std::min(a, i);
            b = std::max(b, i + 1);
        }
    }
    if (a >= b)
        throw Error(Errc::InvalidRequest, "range selects no grid points");
    return {a, b};
}

}  // namespace

double band_power(const TimeFrequencyMap& map, double f_lo, double f_hi, double t_lo, double t_hi)
{
    const auto [fa, fb] = index_range(map.freqs, f_lo, f_hi);
    const auto [ta, tb] = index_range(map.times, t_lo, t_hi);
    return map.power
        .block(static_cast<Eigen::Index>(fa), static_cast<Eigen::Index>(ta), static_cast<Eigen::Index>(fb - fa),
               static_cast<Eigen::Index>(tb - ta))
        .mean();
}

std::vector<double> band_power_course(const TimeFrequencyMap& map, double f_lo, double f_hi)
{
    const auto [fa, fb] = index_range(map.freqs, f_lo, f_hi);
    std::vector<double> out(map.times.size());
    for (std::size_t t = 0; t < out.size(); ++t)
        out[t] = map.power.col(static_cast<Eigen::Index>(t))
                     .segment(static_cast<Eigen::Index>(fa), static_cast<Eigen::Index>(fb - fa))
                     .mean();
    return out;
}

void write_tfr_csv(const std::filesystem::path& csv_path, const TimeFrequencyMap& map)
{
    std::ofstream out(csv_path, std::ios::trunc);
    if (!out)
        throw Error(Errc::Io, "cannot open '" + csv_path.string() + "' for writing");
    char buf[64];
    out << "freq_hz";
    for (double t : map.times) {
        std::snprintf(buf, sizeof buf, ",%.6g", t);
        out << buf;
    }
    out << '\n';
    for (std::size_t f = 0; f < map.freqs.size(); ++f) {
        std::snprintf(buf, sizeof buf, "%.6g", map.freqs[f]);
        out << buf;
        for (std::size_t t = 0; t < map.times.size(); ++t) {
            std::snprintf(buf, sizeof buf, ",%.9g", map.power(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(t)));
            out << buf;
        }
        out << '\n';
    }
    if (!out)
        throw Error(Errc::Io, "write failed for '" + csv_path.string() + "'");

    nlohmann::json side;
    side["channel"] = map.channel;
    side["units"] = "V^2";
    side["baseline"] = "none";
    side["n_trials"] = map.n_trials;
    side["freqs_hz"] = map.freqs;
    side["times_s"] = map.times;
    auto json_path = csv_path;
    json_path.replace_extension(".json");
    std::ofstream js(json_path, std::ios::trunc);
    if (!js)
        throw Error(Errc::Io, "cannot open '" + json_path.string() + "' for writing");
    js << side.dump(2) << '\n';
}

}  // namespace mbci
