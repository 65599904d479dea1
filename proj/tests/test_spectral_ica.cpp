#include "oracles.hpp"
#include "support.hpp"

#include "mbci/dpss.hpp"
#include "mbci/error.hpp"
#include "mbci/fir.hpp"
#include "mbci/ica.hpp"
#include "mbci/random.hpp"
#include "mbci/synth.hpp"
#include "mbci/tfr.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace mbci;
using namespace testing;

namespace {

std::vector<std::string> labels(std::size_t n)
{
    std::vector<std::string> out;
    for (const auto& c : testing::channels(n))
        out.push_back(c.label);
    return out;
}

Epochs epochs_of(const std::vector<Matrix>& trials, double fs, double tmin)
{
    Epochs e;
    e.data = trials;
    e.labels.assign(trials.size(), EventLabel::Left);
    e.fs = fs;
    e.tmin = tmin;
    e.tmax = tmin + static_cast<double>(trials.front().cols()) / fs;
    e.channels = testing::channels(static_cast<std::size_t>(trials.front().rows()));
    return e;
}

}  // namespace

TEST_SUITE("dpss")
{
    TEST_CASE("(512, 4, 7) tapers are orthonormal")
    {
        const auto b = dpss_tapers(512, 4.0, 7);
        REQUIRE(b.tapers.rows() == 7);
        REQUIRE(b.tapers.cols() == 512);
        const Matrix gram = b.tapers * b.tapers.transpose();
        CHECK((gram - Matrix::Identity(7, 7)).cwiseAbs().maxCoeff() <= 1e-10);
    }

    TEST_CASE("first concentration matches quadrature")
    {
        const auto b = dpss_tapers(512, 4.0, 7);
        const Vector t0 = b.tapers.row(0).transpose();
        const double quad = concentration_quadrature(t0, 4.0);
        CHECK(quad > 0.9999);
        CHECK(std::abs(b.eigenvalues(0) - quad) <= 1e-6);
        CHECK(std::abs(dpss_concentration(t0, 4.0) - quad) <= 1e-6);
        for (Eigen::Index k = 1; k < 7; ++k) {
            CHECK(b.eigenvalues(k) <= b.eigenvalues(k - 1));
            CHECK(b.eigenvalues(k) >= 0.0);
            CHECK(b.eigenvalues(k) <= 1.0);
        }
    }

    TEST_CASE("parity and sign convention")
    {
        const auto b = dpss_tapers(512, 4.0, 7);
        for (Eigen::Index k = 0; k < 7; ++k) {
            const double parity = (k % 2 == 0) ? 1.0 : -1.0;
            double worst = 0.0;
            for (Eigen::Index n = 0; n < 512; ++n)
                worst = std::max(worst, std::abs(b.tapers(k, n) - parity * b.tapers(k, 511 - n)));
            CAPTURE(k);
            CHECK(worst < 1e-9);
            if (k % 2 == 0)
                CHECK(b.tapers.row(k).sum() > 0.0);
        }
    }

    TEST_CASE("more tapers than samples is rejected")
    {
        try {
            dpss_tapers(4, 1.0, 5);
            FAIL("accepted");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::InvalidRequest);
        }
    }
}

TEST_SUITE("tfr")
{
    const double fs = 256.0;

    TEST_CASE("5..35 Hz in 1 Hz steps gives 31 rows")
    {
        const auto freqs = frequency_grid(5.0, 35.0, 1.0);
        CHECK(freqs.size() == 31);
        const auto x = testing::sine(4 * 256, 10.0, fs);
        const auto maps = multitaper_tfr(epochs_of({testing::row_matrix(x)}, fs, -0.5), freqs, 0.5, 0.5);
        REQUIRE(maps.size() == 1);
        CHECK(maps[0].power.rows() == 31);
        for (std::size_t i = 1; i < maps[0].freqs.size(); ++i)
            CHECK(maps[0].freqs[i] > maps[0].freqs[i - 1]);
    }

    TEST_CASE("a 10 Hz sinusoid peaks at 10 Hz at every interior time")
    {
        const auto freqs = frequency_grid(5.0, 35.0, 1.0);
        const auto x = testing::sine(6 * 256, 10.0, fs, 1.0, 0.7);
        const auto maps = multitaper_tfr(epochs_of({testing::row_matrix(x)}, fs, -0.5), freqs, 0.5, 0.5);
        const auto& m = maps[0];
        REQUIRE(m.power.cols() > 0);
        for (Eigen::Index t = 0; t < m.power.cols(); ++t) {
            Eigen::Index best = 0;
            m.power.col(t).maxCoeff(&best);
            CHECK(m.freqs[static_cast<std::size_t>(best)] == 10.0);
        }
        // padding removed: times lie inside the unpadded window
        CHECK(m.times.front() >= 0.0);
        CHECK(m.times.back() <= 5.0);
    }

    TEST_CASE("zero epochs give zero power, and power ignores sign")
    {
        const auto freqs = frequency_grid(5.0, 35.0, 1.0);
        const auto zero = multitaper_tfr(epochs_of({Matrix::Zero(1, 3 * 256)}, fs, -0.5), freqs, 0.5, 0.5);
        CHECK(zero[0].power.cwiseAbs().maxCoeff() == 0.0);

        Rng rng(8);
        Matrix x(2, 3 * 256);
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x(i) = rng.normal();
        const auto pos = multitaper_tfr(epochs_of({x}, fs, -0.5), freqs, 0.5, 0.5);
        const auto neg = multitaper_tfr(epochs_of({Matrix(-x)}, fs, -0.5), freqs, 0.5, 0.5);
        REQUIRE(pos.size() == 2);
        for (std::size_t c = 0; c < 2; ++c) {
            CHECK(pos[c].power.minCoeff() >= 0.0);
            CHECK(pos[c].power == neg[c].power);
        }
    }

    TEST_CASE("white noise power is flat within 10%")
    {
        const auto freqs = frequency_grid(5.0, 35.0, 1.0);
        Rng rng(12);
        std::vector<Matrix> trials;
        for (int t = 0; t < 200; ++t) {
            Matrix x(1, 4 * 256);
            for (Eigen::Index i = 0; i < x.size(); ++i)
                x(i) = rng.normal();
            trials.push_back(x);
        }
        const auto maps = multitaper_tfr(epochs_of(trials, fs, -0.5), freqs, 0.5, 0.5);
        const Vector spectrum = maps[0].power.rowwise().mean();
        const double mean = spectrum.mean();
        CHECK((spectrum.array() / mean - 1.0).abs().maxCoeff() < 0.10);
    }

    TEST_CASE("window longer than the padded epoch is too short")
    {
        const auto freqs = frequency_grid(5.0, 35.0, 1.0);
        try {
            multitaper_tfr(epochs_of({Matrix::Zero(1, 64)}, fs, 0.0), freqs, 0.5, 0.0);
            FAIL("accepted");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::TooShort);
        }
    }

    TEST_CASE("CSV export with sidecar")
    {
        TimeFrequencyMap m;
        m.power = Matrix::Constant(2, 3, 1.5);
        m.freqs = {5.0, 6.0};
        m.times = {0.0, 0.25, 0.5};
        m.channel = "C3_lap";
        const auto dir = std::filesystem::temp_directory_path() / "mbci_tfr_test";
        std::filesystem::create_directories(dir);
        write_tfr_csv(dir / "map.csv", m);
        std::ifstream in(dir / "map.csv");
        std::string line;
        int rows = 0;
        while (std::getline(in, line))
            ++rows;
        CHECK(rows == 3);
        CHECK(std::filesystem::exists(dir / "map.json"));
        std::filesystem::remove_all(dir);
    }
}

TEST_SUITE("ica")
{
    TEST_CASE("Amari index below 0.05 for at least 9 of 10 seeds")
    {
        int good = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto b = four_sources(seed);
            IcaOptions opt;
            opt.seed = seed;
            const auto ica = fastica_fit(b.mixed, labels(4), opt);
            const double ai = amari_index(ica.unmixing * b.mixing);
            CAPTURE(seed);
            CAPTURE(ai);
            if (ai < 0.05)
                ++good;
        }
        CHECK(good >= 9);
    }

    TEST_CASE("whitening, mixing identity and deterministic fit")
    {
        const auto b = four_sources(3);
        IcaOptions opt;
        opt.seed = 42;
        const auto ica = fastica_fit(b.mixed, labels(4), opt);
        const Matrix centred = b.mixed.colwise() - b.mixed.rowwise().mean();
        const Matrix z = ica.whitener * centred;
        const Matrix cov = z * z.transpose() / static_cast<double>(z.cols());
        CHECK((cov - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((ica.unmixing * ica.mixing - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((ica.rotation * ica.rotation.transpose() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);

        const auto again = fastica_fit(b.mixed, labels(4), opt);
        CHECK(again.unmixing == ica.unmixing);
    }

    TEST_CASE("too many components")
    {
        const auto b = four_sources(1, 2000);
        IcaOptions opt;
        opt.n_components = 5;
        try {
            fastica_fit(b.mixed, labels(4), opt);
            FAIL("accepted");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::InvalidRequest);
        }
    }

    TEST_CASE("round trip without rejection is the identity")
    {
        const auto b = four_sources(5, 5000);
        const auto rec = testing::recording(b.mixed, 100.0);
        const auto ica = fastica_fit(rec, IcaOptions{});
        CHECK(ica_apply(ica, rec).data == rec.data);
        const Matrix rebuilt = (ica.mixing * ica.sources(rec.data)).colwise() + ica.mean;
        CHECK((rebuilt - rec.data).norm() / rec.data.norm() <= 1e-8);

        // rejecting one component removes exactly its back-projection
        auto one = ica;
        one.rejected = {2};
        const Matrix s = ica.sources(rec.data);
        const Matrix expected = rec.data - ica.mixing.col(2) * s.row(2);
        CHECK((ica_apply(one, rec).data - expected).norm() / rec.data.norm() <= 1e-10);

        auto all = ica;
        all.rejected = {0, 1, 2, 3};
        const Matrix residual = ica_apply(all, rec).data.colwise() - ica.mean;
        CHECK(residual.norm() / rec.data.norm() <= 1e-8);
    }

    TEST_CASE("layout mismatch and missing EOG")
    {
        const auto b = four_sources(6, 3000);
        const auto rec = testing::recording(b.mixed, 100.0);
        const auto ica = fastica_fit(rec, IcaOptions{});
        auto renamed = rec;
        renamed.channels[2].label = "Z9";
        try {
            ica_apply(ica, renamed);
            FAIL("accepted");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::Layout);
        }
        try {
            ica_mark_artifacts(ica, rec, {});
            FAIL("accepted");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::CriterionUnavailable);
        }
    }

    TEST_CASE("correlation threshold is strict")
    {
        const auto b = four_sources(7, 5000);
        Matrix data(5, b.mixed.cols());
        data.topRows(4) = b.mixed;
        // EOG copy of one source plus noise
        Rng rng(70);
        const Matrix sources = b.mixing.inverse() * b.mixed;
        for (Eigen::Index t = 0; t < data.cols(); ++t)
            data(4, t) = sources(2, t) + 0.3 * rng.normal();
        auto chans = testing::channels(4);
        chans.push_back({"VEOG", ChannelKind::EOG, std::nullopt});
        const auto rec = testing::recording(data, 100.0, chans);
        IcaOptions opt;
        opt.seed = 1;
        const auto ica = fastica_fit(rec, opt);
        const Matrix r = ica_eog_correlations(ica, rec, {"VEOG"});
        Eigen::Index best = 0;
        const double top = r.col(0).maxCoeff(&best);
        CHECK(top > 0.9);
        CHECK((r.col(0).array() < 0.2).count() == 3);

        CHECK(ica_mark_artifacts(ica, rec, {"VEOG"}, top).rejected.empty());
        const auto marked = ica_mark_artifacts(ica, rec, {"VEOG"}, std::nextafter(top, 0.0));
        REQUIRE(marked.rejected.size() == 1);
        CHECK(marked.rejected[0] == static_cast<std::size_t>(best));
        CHECK(ica_mark_artifacts(ica, rec, {"VEOG"}, 0.7).rejected == marked.rejected);
    }

    TEST_CASE("blink removal on a synthetic session, fitted on calibration and applied to driving")
    {
        SynthSpec spec;
        spec.fs = 256.0;
        spec.emg_high_hz = 100.0;
        spec.line_noise_amplitude = 0.0;
        spec.blink_rate_hz = 0.5;
        auto blink_free = spec;
        blink_free.blink_amplitude = 0.0;

        const auto with = generate_calibration_session(spec, 21);
        const auto without = generate_calibration_session(blink_free, 21);
        REQUIRE(!with.truth.blink_times_s.empty());

        std::vector<std::size_t> rows = with.recording.indices_of(ChannelKind::EEG);
        for (auto r : with.recording.indices_of(ChannelKind::EOG))
            rows.push_back(r);
        // fitted on band-passed data, as in the study pipeline
        const auto fir = design_fir_bandpass(1.0, 35.0, 1.0, 8.75, 3.3, spec.fs);
        const auto rec = apply_fir_zero_phase(fir, with.recording.select(rows));
        const auto ref = apply_fir_zero_phase(fir, without.recording.select(rows));

        IcaOptions opt;
        opt.n_components = 20;
        opt.seed = 3;
        std::vector<std::string> eog;
        for (const auto& c : rec.channels)
            if (c.kind == ChannelKind::EOG)
                eog.push_back(c.label);
        const auto ica = ica_mark_artifacts(fastica_fit(rec, opt), rec, eog);
        CHECK(ica.rejected.size() >= 1);
        const auto cleaned = ica_apply(ica, rec);

        double before = 0.0, after = 0.0, clean_energy = 0.0, ref_energy = 0.0;
        for (const char* label : {"Fp1", "Fp2"}) {
            const auto row = static_cast<Eigen::Index>(rec.index_of(label));
            for (double t : with.truth.blink_times_s) {
                const auto from = static_cast<Eigen::Index>(t * spec.fs);
                const auto len = static_cast<Eigen::Index>(spec.blink_duration_s * spec.fs);
                if (from + len > rec.data.cols())
                    continue;
                const auto blink = rec.data.row(row).segment(from, len) - ref.data.row(row).segment(from, len);
                const auto residual = cleaned.data.row(row).segment(from, len) - ref.data.row(row).segment(from, len);
                before += blink.squaredNorm();
                after += residual.squaredNorm();
            }
            clean_energy += cleaned.data.row(row).squaredNorm();
            ref_energy += ref.data.row(row).squaredNorm();
        }
        CHECK(std::sqrt(after / before) <= 0.10);
        CHECK(std::abs(std::sqrt(clean_energy / ref_energy) - 1.0) <= 0.10);

        // transfer path
        const auto driving = generate_driving_session(spec, 22, {{EventLabel::Rest, 20.0}});
        CHECK_NOTHROW(ica_apply(ica, apply_fir_zero_phase(fir, driving.recording.select(rows))));
    }
}
