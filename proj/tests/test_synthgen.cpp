#include "mbci/epochs.hpp"
#include "mbci/error.hpp"
#include "mbci/paradigm.hpp"
#include "mbci/synth.hpp"
#include "mbci/tfr.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace mbci;

namespace {

// Small, fast sessions: low rate, EMG band scaled down with it.
SynthSpec fast_spec()
{
    SynthSpec s;
    s.fs = 256.0;
    s.emg_low_hz = 30.0;
    s.emg_high_hz = 100.0;
    return s;
}

// Only the motor alpha rhythms remain.
SynthSpec alpha_only()
{
    auto s = fast_spec();
    s.beta_amplitude = 0.0;
    s.occipital_alpha_amplitude = 0.0;
    s.cnv_amplitude = 0.0;
    s.blink_amplitude = 0.0;
    s.background_sources = 0;
    s.sensor_pink_amplitude = 0.0;
    s.sensor_white_amplitude = 0.0;
    s.driving_extra_noise = 0.0;
    s.fluctuation_common = 0.0;
    s.fluctuation_local = 0.0;
    return s;
}

Epochs rows_epochs(const Recording& rec, const MarkerList& m, double tmin, double tmax,
                   const std::vector<std::string>& labels)
{
    std::vector<std::size_t> rows;
    for (const auto& l : labels)
        rows.push_back(rec.index_of(l));
    return epoch_extract(rec, m, tmin, tmax, rows);
}

// Alpha power during the hold over alpha power in the rest windows, per channel.
std::pair<double, double> hold_over_rest(const SynthSession& s, EventLabel cls)
{
    const auto cues = s.schedule.cue_markers().filter(cls);
    const auto rest = extract_rest_markers(s.schedule);
    const auto freqs = frequency_grid(8.0, 12.0, 1.0);
    const auto hold = multitaper_tfr(rows_epochs(s.recording, cues, -0.5, 5.5, {"C3", "C4"}), freqs, 0.5, 0.5);
    const auto base = multitaper_tfr(rows_epochs(s.recording, rest, -0.5, 4.5, {"C3", "C4"}), freqs, 0.5, 0.5);
    auto ratio = [&](int c) {
        return band_power(hold[static_cast<std::size_t>(c)], 8.0, 12.0, 1.75, 4.3) /
               band_power(base[static_cast<std::size_t>(c)], 8.0, 12.0, 0.5, 3.5);
    };
    return {ratio(0), ratio(1)};
}

// Seconds before onset at which the trial-averaged power of `source` first
// falls half way from its baseline to its hold level.
double measured_lead(const SynthSession& s, std::size_t source, EventLabel cls)
{
    const double fs = s.recording.fs;
    const auto& x = s.truth.sources;
    const auto from = static_cast<long>(-3.0 * fs), to = static_cast<long>(2.0 * fs);
    std::vector<double> avg(static_cast<std::size_t>(to - from), 0.0);
    int n = 0;
    for (const auto& p : s.truth.periods) {
        if (p.cls != cls)
            continue;
        const long onset = std::lround(p.onset_s * fs);
        if (onset + from < 0 || onset + to > x.cols())
            continue;
        for (long i = from; i < to; ++i)
            avg[static_cast<std::size_t>(i - from)] += x(static_cast<Eigen::Index>(source), onset + i) *
                                                       x(static_cast<Eigen::Index>(source), onset + i);
        ++n;
    }
    REQUIRE(n > 5);
    const long half = static_cast<long>(0.1 * fs);
    std::vector<double> smooth(avg.size(), 0.0);
    for (long i = half; i + half < static_cast<long>(avg.size()); ++i) {
        double acc = 0.0;
        for (long j = i - half; j <= i + half; ++j)
            acc += avg[static_cast<std::size_t>(j)];
        smooth[static_cast<std::size_t>(i)] = acc / static_cast<double>(2 * half + 1);
    }
    auto mean_between = [&](double a, double b) {
        double acc = 0.0;
        int k = 0;
        for (long i = std::lround((a + 3.0) * fs); i < std::lround((b + 3.0) * fs); ++i, ++k)
            acc += smooth[static_cast<std::size_t>(i)];
        return acc / k;
    };
    const double baseline = mean_between(-2.9, -2.0);
    const double hold = mean_between(0.5, 1.8);
    const double level = 0.5 * (baseline + hold);
    for (long i = half; i + half < static_cast<long>(smooth.size()); ++i)
        if (smooth[static_cast<std::size_t>(i)] < level)
            return -(static_cast<double>(i) / fs - 3.0);
    FAIL("no crossing");
    return 0.0;
}

std::vector<Command> alternating_turns(int turns)
{
    std::vector<Command> c;
    for (int i = 0; i < turns; ++i) {
        c.push_back({EventLabel::Rest, 6.0});
        c.push_back({i % 2 ? EventLabel::Right : EventLabel::Left, 5.0});
    }
    c.push_back({EventLabel::Rest, 6.0});
    return c;
}

}  // namespace

TEST_SUITE("synthgen")
{
    TEST_CASE("same spec and seed give bit-identical sessions")
    {
        const auto spec = fast_spec();
        const auto a = generate_calibration_session(spec, 5);
        const auto b = generate_calibration_session(spec, 5);
        CHECK(a.recording.data == b.recording.data);
        CHECK(a.markers.events == b.markers.events);
        CHECK(a.truth.to_json() == b.truth.to_json());
        const auto c = generate_calibration_session(spec, 6);
        CHECK(c.recording.data != a.recording.data);

        const auto cmds = alternating_turns(3);
        CHECK(generate_driving_session(spec, 5, cmds).recording.data ==
              generate_driving_session(spec, 5, cmds).recording.data);
    }

    TEST_CASE("layout, markers and ground truth agree")
    {
        const auto s = generate_calibration_session(fast_spec(), 7);
        CHECK(s.recording.n_channels() == 40);
        CHECK(s.recording.indices_of(ChannelKind::EMG).size() == 4);
        CHECK(s.recording.indices_of(ChannelKind::EOG).size() == 4);
        CHECK_NOTHROW(s.recording.validate());
        CHECK_NOTHROW(s.markers.validate(s.recording.duration()));
        REQUIRE(s.truth.periods.size() == 40);
        const auto cues = s.schedule.cue_markers();
        for (std::size_t i = 0; i < 40; ++i) {
            CHECK(s.truth.periods[i].cls == cues.events[i].label);
            CHECK(s.truth.periods[i].onset_s == doctest::Approx(cues.events[i].time_s + 1.25));
        }
        CHECK(s.truth.source_names[s.truth.blink_source] == "blink");
        CHECK(s.truth.mixing.rows() == 36);
    }

    TEST_CASE("15 commands give 15 ground-truth periods; empty and non-positive sequences are rejected")
    {
        std::vector<Command> cmds;
        for (int i = 0; i < 15; ++i)
            cmds.push_back({static_cast<EventLabel>(i % 3), 4.0 + (i % 2)});
        const auto d = generate_driving_session(fast_spec(), 8, cmds);
        REQUIRE(d.truth.periods.size() == 15);
        for (std::size_t i = 0; i < 15; ++i)
            CHECK(d.truth.periods[i].cls == cmds[i].cls);
        CHECK(d.truth.session == "driving");

        try {
            generate_driving_session(fast_spec(), 8, {});
            FAIL("accepted");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::Validation);
        }
        try {
            generate_driving_session(fast_spec(), 8, {{EventLabel::Left, 0.0}});
            FAIL("accepted");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::Validation);
        }
    }

    TEST_CASE("invalid spec fields are named")
    {
        auto s = fast_spec();
        s.erd_drop = 1.5;
        try {
            s.validate();
            FAIL("accepted");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::Validation);
            CHECK(std::string(e.what()).find("erd_drop") != std::string::npos);
        }
        s = fast_spec();
        s.alpha_low_hz = 13.0;
        CHECK_THROWS_AS(s.validate(), Error);
        s = fast_spec();
        s.emg_flexor_gain = -1.0;
        CHECK_THROWS_AS(s.validate(), Error);
        s = fast_spec();
        s.emg_high_hz = 500.0;  // above Nyquist at 256 Hz
        CHECK_THROWS_AS(generate_calibration_session(s, 1), Error);
    }

    TEST_CASE("hold-phase alpha power follows (1 - drop)^2 and mirrors with swapped hemispheres")
    {
        auto spec = alpha_only();
        const double d = spec.erd_drop;
        const auto s = generate_calibration_session(spec, 9);
        const auto [c3_left, c4_left] = hold_over_rest(s, EventLabel::Left);
        const auto [c3_right, c4_right] = hold_over_rest(s, EventLabel::Right);
        const double expected = (1.0 - d) * (1.0 - d);
        CHECK(std::abs(c4_left / expected - 1.0) <= 0.2);
        CHECK(std::abs(c3_right / expected - 1.0) <= 0.2);
        const double ipsi = (1.0 - spec.erd_ipsilateral_drop) * (1.0 - spec.erd_ipsilateral_drop);
        CHECK(std::abs(c3_left / ipsi - 1.0) <= 0.2);

        spec.swap_hemispheres = true;
        const auto m = generate_calibration_session(spec, 9);
        const auto [c3_mirror, c4_mirror] = hold_over_rest(m, EventLabel::Left);
        CHECK(std::abs(c3_mirror / c4_left - 1.0) <= 0.2);
        CHECK(std::abs(c4_mirror / c3_left - 1.0) <= 0.2);
    }

    TEST_CASE("alpha desynchronisation leads by >= 1 s when driving and <= 0.5 s in calibration")
    {
        const auto spec = alpha_only();
        const auto cal = generate_calibration_session(spec, 10, true);
        const auto drv = generate_driving_session(spec, 10, alternating_turns(16), true);
        const std::size_t alpha_right = 1;
        REQUIRE(cal.truth.source_names[alpha_right] == "alpha_right");
        const double lead_cal = measured_lead(cal, alpha_right, EventLabel::Left);
        const double lead_drv = measured_lead(drv, alpha_right, EventLabel::Left);
        CAPTURE(lead_cal);
        CAPTURE(lead_drv);
        CHECK(lead_cal <= 0.5);
        CHECK(lead_drv >= 1.0);
    }

    TEST_CASE("track sequence: balanced, segmentable, deterministic")
    {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const auto seq = default_track_sequence(5, seed);
            int left = 0, right = 0;
            for (const auto& c : seq) {
                if (c.cls == EventLabel::Left)
                    ++left;
                if (c.cls == EventLabel::Right)
                    ++right;
                if (c.cls == EventLabel::Rest) {
                    CHECK(c.duration_s >= 5.0);
                    CHECK(c.duration_s <= 10.0);
                } else {
                    CHECK(c.duration_s >= 4.0);
                    CHECK(c.duration_s <= 6.0);
                    CHECK(c.duration_s >= kMinRunS);
                }
            }
            CHECK(left == right);
            CHECK(left == 20);
            CHECK(seq.front().cls == EventLabel::Rest);
            CHECK(seq.back().cls == EventLabel::Rest);
            for (std::size_t i = 1; i < seq.size(); ++i)
                CHECK_FALSE((seq[i].cls != EventLabel::Rest && seq[i - 1].cls != EventLabel::Rest));
            CHECK(default_track_sequence(5, seed) == seq);
        }
        CHECK(default_track_sequence(5, 1) != default_track_sequence(5, 2));
    }

    TEST_CASE("pink noise has unit RMS and falling power")
    {
        const auto x = pink_noise(1 << 16, 256.0, 4);
        double acc = 0.0;
        for (double v : x)
            acc += v * v;
        CHECK(std::sqrt(acc / static_cast<double>(x.size())) == doctest::Approx(1.0).epsilon(0.01));

        Epochs e;
        e.fs = 256.0;
        e.channels = {{"P", ChannelKind::EEG, std::nullopt}};
        for (std::size_t t = 0; t + 1024 <= x.size(); t += 1024) {
            Matrix m(1, 1024);
            for (Eigen::Index i = 0; i < 1024; ++i)
                m(0, i) = x[t + static_cast<std::size_t>(i)];
            e.data.push_back(m);
            e.labels.push_back(EventLabel::Rest);
        }
        e.tmin = 0.0;
        e.tmax = 4.0;
        const auto maps = multitaper_tfr(e, std::vector<double>{5.0, 10.0, 20.0, 40.0}, 0.5, 0.5, {0.5, 2.0, 3, PadMode::Reflect});
        const Vector p = maps[0].power.rowwise().mean();
        for (Eigen::Index i = 1; i < 4; ++i) {
            CHECK(p(i) < p(i - 1));
            CHECK(p(i - 1) / p(i) == doctest::Approx(2.0).epsilon(0.25));
        }
    }
}
