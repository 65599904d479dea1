#include "mbci/config.hpp"
#include "mbci/error.hpp"
#include "mbci/study.hpp"

#include <doctest.h>

#include <filesystem>
#include <string>

using namespace mbci;

namespace {

// Runs f and returns the Error it throws; fails the test if none is thrown.
template <class F>
Error thrown(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e;
    }
    FAIL("no error thrown");
    return Error(Errc::Validation, "");
}

bool mentions(const Error& e, const std::string& key)
{
    return std::string(e.what()).find(key) != std::string::npos;
}

}  // namespace

TEST_SUITE("config")
{
    TEST_CASE("dump then parse reproduces the configuration")
    {
        ExperimentConfig c;
        CHECK(config_to_string(config_from_string(config_to_string(c))) == config_to_string(c));

        c.seed = 987654321987ull;
        c.out = "some/dir";
        c.laps = 3;
        c.synth.erd_drop = 0.1 + 0.2;  // not exactly representable in short form
        c.pipeline.ica_tolerance = 3.3e-7;
        c.pipeline.csp_shrinkage = 0.25;
        const auto text = config_to_string(c);
        const auto back = config_from_string(text);
        CHECK(back.seed == c.seed);
        CHECK(back.out == c.out);
        CHECK(back.laps == 3);
        CHECK(back.synth.erd_drop == c.synth.erd_drop);
        CHECK(back.pipeline.ica_tolerance == c.pipeline.ica_tolerance);
        CHECK(config_to_string(back) == text);
    }

    TEST_CASE("comments and blank lines are ignored, missing keys keep defaults")
    {
        const auto c = config_from_string("# header\n\nseed = 5  # trailing\nsynth.fs = 512\n");
        CHECK(c.seed == 5);
        CHECK(c.synth.fs == 512.0);
        CHECK(c.pipeline.n_csp == ExperimentConfig{}.pipeline.n_csp);
    }

    TEST_CASE("unknown keys and malformed values name the key")
    {
        auto e = thrown([] { config_from_string("pipeline.no_such_thing = 1\n"); });
        CHECK(e.code() == Errc::Validation);
        CHECK(mentions(e, "pipeline.no_such_thing"));

        e = thrown([] { config_from_string("pipeline.n_csp = six\n"); });
        CHECK(e.code() == Errc::Validation);
        CHECK(mentions(e, "pipeline.n_csp"));

        ExperimentConfig c;
        e = thrown([&] { config_set(c, "synth.fs", "2048Hz"); });
        CHECK(e.code() == Errc::Validation);
        CHECK(mentions(e, "synth.fs"));
    }

    TEST_CASE("validation names the offending field")
    {
        struct Case {
            const char* key;
            const char* value;
        };
        for (const Case& k : {Case{"pipeline.n_csp", "0"}, Case{"pipeline.ica_tolerance", "0"},
                              Case{"pipeline.threshold_fraction", "1.5"}, Case{"pipeline.cv_folds", "1"},
                              Case{"laps", "0"}, Case{"synth.fs", "-1"}}) {
            CAPTURE(k.key);
            ExperimentConfig c;
            config_set(c, k.key, k.value);
            const auto e = thrown([&] { c.validate(); });
            CHECK(e.code() == Errc::Validation);
            CHECK(mentions(e, k.key));
        }
        CHECK_NOTHROW(ExperimentConfig{}.validate());
    }

    TEST_CASE("load_config reports a missing file as an I/O error")
    {
        const auto e = thrown([] { load_config("/nonexistent/mbci.cfg"); });
        CHECK(e.code() == Errc::Io);
    }
}

TEST_SUITE("study helpers")
{
    TEST_CASE("calibration trials place REST 0.5 s after the trial end in the cue frame")
    {
        const auto schedule = make_calibration_schedule(6);
        const auto trials = calibration_trial_markers(schedule.markers());
        REQUIRE(trials.events.size() == 80);
        CHECK(trials.filter(EventLabel::Rest).events.size() == 40);
        CHECK(trials.filter(EventLabel::Left).events.size() == 20);
        CHECK(trials.filter(EventLabel::Right).events.size() == 20);
        const auto rest = trials.filter(EventLabel::Rest);
        const auto expected = extract_rest_markers(schedule);
        for (std::size_t i = 0; i < 40; ++i)
            CHECK(rest.events[i].time_s + 1.25 == doctest::Approx(expected.events[i].time_s));
        for (std::size_t i = 1; i < trials.events.size(); ++i)
            CHECK(trials.events[i].time_s >= trials.events[i - 1].time_s);
        CHECK(movement_markers(trials).events.size() == 40);
    }

    TEST_CASE("negativity is the pre-cue mean minus the late window mean")
    {
        std::vector<double> times;
        for (int i = -300; i <= 500; ++i)
            times.push_back(i * 0.01);
        Matrix avg(4, static_cast<Eigen::Index>(times.size()));
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double t = times[i];
            double v = 0.0;
            if (t >= -1.0 && t < 0.0)
                v = -7e-6;
            else if (t >= 1.05 && t < 1.25)
                v = 3e-6;
            for (int r = 0; r < 4; ++r)
                avg(r, static_cast<Eigen::Index>(i)) = v + (r - 1.5) * 1e-6;  // row offsets cancel
        }
        CHECK(cnv_negativity(times, avg) == doctest::Approx(-10e-6).epsilon(1e-9));
        CHECK(cnv_negativity(times, avg * 2.0) == doctest::Approx(-20e-6).epsilon(1e-9));

        const std::vector<double> short_times(times.begin() + 400, times.end());
        const auto e = thrown([&] { cnv_negativity(short_times, avg.rightCols(static_cast<Eigen::Index>(short_times.size()))); });
        CHECK(e.code() == Errc::InvalidWindow);
    }

    TEST_CASE("session files and missing sessions")
    {
        const auto f = session_files("d");
        CHECK(f.calibration_recording == std::filesystem::path("d") / "calibration.mbr");
        CHECK(f.driving_markers == std::filesystem::path("d") / "driving.markers.jsonl");
        CHECK(f.ground_truth == std::filesystem::path("d") / "ground_truth.json");

        const auto dir = std::filesystem::temp_directory_path() / "mbci_empty_session";
        std::filesystem::create_directories(dir);
        const auto e = thrown([&] { load_session(dir); });
        CHECK(e.code() == Errc::Io);
        std::filesystem::remove_all(dir);
    }
}
