#include "oracles.hpp"
#include "support.hpp"

#include "mbci/classifiers.hpp"
#include "mbci/csp.hpp"
#include "mbci/error.hpp"
#include "mbci/evaluation.hpp"
#include "mbci/features.hpp"
#include "mbci/mutual_info.hpp"
#include "mbci/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

using namespace mbci;
using namespace testing;

namespace {

Errc code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Errc::Validation;
}

Epochs labelled_epochs(std::vector<Matrix> trials, std::vector<EventLabel> labels)
{
    Epochs e;
    e.fs = 100.0;
    e.tmin = 0.0;
    e.tmax = static_cast<double>(trials.front().cols()) / 100.0;
    e.channels = testing::channels(static_cast<std::size_t>(trials.front().rows()));
    e.data = std::move(trials);
    e.labels = std::move(labels);
    return e;
}

const std::vector<int> kLrr = {0, 1, 2};

}  // namespace

TEST_SUITE("features")
{
    TEST_CASE("mean power of constants, sinusoids and zeros")
    {
        Epochs e;
        e.fs = 1000.0;
        e.channels = testing::channels(2, ChannelKind::EMG, "M");
        Matrix t(2, 1000);
        t.row(0).setConstant(3.0);
        const auto s = testing::sine(1000, 10.0, 1000.0, 2.0);
        for (Eigen::Index i = 0; i < 1000; ++i)
            t(1, i) = s[static_cast<std::size_t>(i)];
        e.data = {t, Matrix::Zero(2, 1000)};
        e.labels = {EventLabel::Left, EventLabel::Rest};
        const auto f = emg_mean_power_features(e);
        CHECK(f(0, 0) == doctest::Approx(9.0).epsilon(1e-12));
        CHECK(std::abs(f(0, 1) / 2.0 - 1.0) < 0.01);
        CHECK(f(1, 0) == 0.0);
        CHECK(f(1, 1) == 0.0);
    }

    TEST_CASE("non-EMG channels are a layout error")
    {
        Epochs e;
        e.fs = 100.0;
        e.channels = testing::channels(2);
        e.data = {Matrix::Zero(2, 10)};
        e.labels = {EventLabel::Left};
        CHECK(code_of([&] { emg_mean_power_features(e); }) == Errc::Layout);
    }
}

TEST_SUITE("lda")
{
    TEST_CASE("symmetric 1-D classes split at zero")
    {
        Rng rng(1);
        Matrix x(400, 1);
        std::vector<int> y(400);
        for (int i = 0; i < 200; ++i) {
            const double d = rng.normal();
            x(i, 0) = -1.0 + d;
            x(200 + i, 0) = 1.0 - d;  // mirrored, so the pooled statistics are symmetric
            y[static_cast<std::size_t>(i)] = 0;
            y[static_cast<std::size_t>(200 + i)] = 1;
        }
        const auto m = lda_fit(x, y);
        const double w = m.weights(1, 0) - m.weights(0, 0);
        const double b = m.intercepts(1) - m.intercepts(0);
        CHECK(std::abs(-b / w) < 1e-6);
    }

    TEST_CASE("weights follow the closed form")
    {
        Rng rng(2);
        const Eigen::Index n0 = 150, n1 = 250;
        Matrix x(n0 + n1, 4);
        Vector shift(4);
        shift << 1.0, -0.5, 0.3, 2.0;
        const Matrix mix = gaussian(rng, 4, 4);
        std::vector<int> y;
        for (Eigen::Index i = 0; i < n0 + n1; ++i) {
            Vector z = mix * gaussian(rng, 4, 1);
            if (i >= n0)
                z += shift;
            x.row(i) = z.transpose();
            y.push_back(i < n0 ? 0 : 1);
        }
        const Vector mu0 = x.topRows(n0).colwise().mean().transpose();
        const Vector mu1 = x.bottomRows(n1).colwise().mean().transpose();
        const Matrix c0 = x.topRows(n0).rowwise() - mu0.transpose();
        const Matrix c1 = x.bottomRows(n1).rowwise() - mu1.transpose();
        Matrix pooled = (c0.transpose() * c0 + c1.transpose() * c1) / static_cast<double>(n0 + n1 - 2);
        pooled.diagonal().array() += 1e-9 * pooled.trace() / 4.0;  // the documented ridge
        const Vector direct = pooled.ldlt().solve(mu1 - mu0);

        const auto m = lda_fit(x, y);
        const Vector w = (m.weights.row(1) - m.weights.row(0)).transpose();
        CHECK((w - direct).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, direct.cwiseAbs().maxCoeff()));
        const double prior = std::log(static_cast<double>(n1) / static_cast<double>(n0));
        const double b = -0.5 * mu1.dot(pooled.ldlt().solve(mu1)) + 0.5 * mu0.dot(pooled.ldlt().solve(mu0)) + prior;
        CHECK(std::abs((m.intercepts(1) - m.intercepts(0)) - b) < 1e-6);
    }

    TEST_CASE("separable data, score shifts and ties")
    {
        Matrix x(6, 2);
        x << 0, 0, 0.1, 0.2, -0.1, 0.1, 5, 5, 5.2, 4.9, 4.8, 5.1;
        const std::vector<int> y = {0, 0, 0, 1, 1, 1};
        auto m = lda_fit(x, y);
        CHECK(lda_predict(m, x) == y);
        m.intercepts.array() += 123.0;
        CHECK(lda_predict(m, x) == y);

        LinearModel tie;
        tie.weights = Matrix::Zero(3, 2);
        tie.intercepts = Vector::Zero(3);
        tie.classes = {0, 1, 2};
        CHECK(tie.predict(x) == std::vector<int>(6, 0));
    }

    TEST_CASE("a class with one sample")
    {
        Matrix x(3, 1);
        x << 0, 1, 2;
        const std::vector<int> y = {0, 0, 1};
        CHECK(code_of([&] { lda_fit(x, y); }) == Errc::InsufficientData);
    }
}

TEST_SUITE("logistic")
{
    TEST_CASE("zero-weight model is uniform")
    {
        LinearModel m;
        m.kind = ModelKind::Logistic;
        m.weights = Matrix::Zero(3, 4);
        m.intercepts = Vector::Zero(3);
        m.classes = {0, 1, 2};
        Rng rng(3);
        const auto p = logistic_predict_proba(m, gaussian(rng, 5, 4));
        CHECK((p.array() - 1.0 / 3.0).abs().maxCoeff() < 1e-15);
    }

    TEST_CASE("gradient matches central differences at 10 random points")
    {
        Rng rng(4);
        const Matrix x = gaussian(rng, 30, 3);
        std::vector<int> t(30);
        for (std::size_t i = 0; i < t.size(); ++i)
            t[i] = static_cast<int>(i % 3);
        const Eigen::Index np = 3 * 4;
        for (int point = 0; point < 10; ++point) {
            const Vector params = gaussian(rng, np, 1);
            const auto lg = logistic_loss(params, x, t, 3, 0.7);
            const double eps = 1e-5;
            double worst = 0.0;
            for (Eigen::Index i = 0; i < np; ++i) {
                Vector up = params, down = params;
                up(i) += eps;
                down(i) -= eps;
                const double fd =
                    (logistic_loss(up, x, t, 3, 0.7).loss - logistic_loss(down, x, t, 3, 0.7).loss) / (2 * eps);
                worst = std::max(worst, std::abs(fd - lg.gradient(i)));
            }
            CHECK(worst < 1e-6);
        }
    }

    TEST_CASE("fit: separable data, normalised probabilities, logit shifts")
    {
        Rng rng(5);
        Matrix x(60, 2);
        std::vector<int> y;
        for (Eigen::Index i = 0; i < 60; ++i) {
            const int c = static_cast<int>(i % 3);
            x(i, 0) = 4.0 * c + 0.3 * rng.normal();
            x(i, 1) = 0.3 * rng.normal();
            y.push_back(c);
        }
        auto m = logistic_fit(x, y);
        const auto p = logistic_predict_proba(m, x);
        CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-9);
        CHECK(m.predict(x) == y);
        const auto before = m.predict(x);
        m.intercepts.array() -= 7.0;
        CHECK(m.predict(x) == before);
        CHECK((logistic_predict_proba(m, x) - p).cwiseAbs().maxCoeff() < 1e-12);

        // converged: penalised gradient is small at the solution
        Vector params(3 * 3);
        for (Eigen::Index c = 0; c < 3; ++c) {
            params.segment(c * 3, 2) = m.weights.row(c).transpose();
            params(c * 3 + 2) = m.intercepts(c) + 7.0;
        }
        CHECK(logistic_loss(params, x, y, 3, 1.0).gradient.norm() < 1e-6);
    }

    TEST_CASE("non-finite features")
    {
        Matrix x = Matrix::Zero(4, 1);
        x(2, 0) = std::numeric_limits<double>::quiet_NaN();
        const std::vector<int> y = {0, 1, 0, 1};
        CHECK(code_of([&] { logistic_fit(x, y); }) == Errc::Validation);
    }
}

TEST_SUITE("csp")
{
    TEST_CASE("default fit on three classes gives six unit filters")
    {
        Rng rng(6);
        std::vector<Matrix> trials;
        std::vector<EventLabel> labels;
        for (int i = 0; i < 30; ++i) {
            Matrix t = gaussian(rng, 8, 200);
            t.row(i % 3) *= 3.0;
            trials.push_back(t);
            labels.push_back(static_cast<EventLabel>(i % 3));
        }
        const auto bank = csp_fit_multiclass(labelled_epochs(trials, labels));
        CHECK(bank.n_filters() == 6);
        CHECK(bank.patterns.rows() == 8);
        CHECK(bank.patterns.cols() == 6);
        for (Eigen::Index r = 0; r < 6; ++r)
            CHECK(std::abs(bank.filters.row(r).norm() - 1.0) < 1e-12);
        auto order = bank.mi_order;
        std::sort(order.begin(), order.end());
        for (std::size_t i = 0; i < order.size(); ++i)
            CHECK(order[i] == i);
        for (double s : bank.shrinkage) {
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
    }

    TEST_CASE("identical class covariances give eigenvalues of one half")
    {
        Rng rng(7);
        std::vector<Matrix> trials;
        std::vector<EventLabel> labels;
        for (int i = 0; i < 10; ++i) {
            const Matrix t = gaussian(rng, 5, 300);
            trials.push_back(t);
            trials.push_back(t);
            labels.push_back(EventLabel::Left);
            labels.push_back(EventLabel::Right);
        }
        CspOptions opt;
        opt.n_filters = 10;
        const auto bank = csp_fit_multiclass(labelled_epochs(trials, labels), opt);
        CHECK((bank.eigenvalues.array() - 0.5).abs().maxCoeff() < 1e-6);
    }

    TEST_CASE("top filter beats 10000 random directions on the 10x-variance axis")
    {
        Rng rng(8);
        const Eigen::Index c = 6;
        std::vector<Matrix> trials;
        std::vector<EventLabel> labels;
        for (int i = 0; i < 40; ++i) {
            Matrix t = gaussian(rng, c, 500);
            if (i % 2 == 0)
                t.row(0) *= std::sqrt(10.0);
            trials.push_back(t);
            labels.push_back(i % 2 == 0 ? EventLabel::Left : EventLabel::Right);
        }
        const auto epochs = labelled_epochs(trials, labels);
        Matrix sa = Matrix::Zero(c, c), sb = Matrix::Zero(c, c);
        for (std::size_t i = 0; i < trials.size(); ++i) {
            const Matrix z = trials[i].colwise() - trials[i].rowwise().mean();
            (i % 2 == 0 ? sa : sb) += z * z.transpose();
        }
        for (const std::optional<double> shrinkage : {std::optional<double>{}, std::optional<double>{0.0}}) {
            CspOptions opt;
            opt.n_filters = 2;
            opt.shrinkage = shrinkage;
            const auto bank = csp_fit_multiclass(epochs, opt);
            REQUIRE(bank.filter_class[0] == static_cast<int>(EventLabel::Left));
            const Vector top = bank.filters.row(0).transpose();
            CHECK(std::abs(top(0)) > 0.99);
            const double ratio = variance_ratio(top, sa, sb);
            double best = 0.0;
            Rng dirs(80);
            for (int k = 0; k < 10000; ++k) {
                Vector v = gaussian(dirs, c, 1);
                v.normalize();
                best = std::max(best, variance_ratio(v, sa, sb));
            }
            CHECK(ratio >= best);
        }
    }

    TEST_CASE("log band power: scaling, zero floor, white noise, global scale invariance")
    {
        Rng rng(9);
        std::vector<Matrix> trials;
        std::vector<EventLabel> labels;
        for (int i = 0; i < 12; ++i) {
            Matrix t = gaussian(rng, 4, 20000);
            t.row(i % 2) *= 2.0;
            trials.push_back(t);
            labels.push_back(i % 2 ? EventLabel::Right : EventLabel::Left);
        }
        const auto e = labelled_epochs(trials, labels);
        const auto bank = csp_fit_multiclass(e, CspOptions{2, std::nullopt});
        const auto base = csp_log_bandpower(bank, e);

        auto doubled = e;
        for (auto& t : doubled.data)
            t *= 2.0;
        const auto up = csp_log_bandpower(bank, doubled);
        CHECK(((up - base).array() - std::log(4.0)).abs().maxCoeff() < 1e-9);

        auto zero = e;
        for (auto& t : zero.data)
            t.setZero();
        CHECK((csp_log_bandpower(bank, zero).array() - std::log(1e-12)).abs().maxCoeff() < 1e-12);

        std::vector<Matrix> white = {gaussian(rng, 4, 50000)};
        SpatialFilterBank unit = bank;
        unit.filters = Matrix::Zero(1, 4);
        unit.filters(0, 2) = 1.0;
        CHECK(std::abs(csp_log_bandpower(unit, labelled_epochs(white, {EventLabel::Left}))(0, 0)) < 0.1);

        const auto scaled = csp_fit_multiclass(doubled, CspOptions{2, std::nullopt});
        for (Eigen::Index r = 0; r < 2; ++r)
            CHECK(std::abs(std::abs(scaled.filters.row(r).dot(bank.filters.row(r))) - 1.0) < 1e-9);
    }

    TEST_CASE("layout mismatch")
    {
        Rng rng(10);
        std::vector<Matrix> trials;
        std::vector<EventLabel> labels;
        for (int i = 0; i < 6; ++i) {
            trials.push_back(gaussian(rng, 3, 100));
            labels.push_back(i % 2 ? EventLabel::Right : EventLabel::Left);
        }
        auto e = labelled_epochs(trials, labels);
        const auto bank = csp_fit_multiclass(e, CspOptions{2, 0.1});
        e.channels[0].label = "other";
        CHECK(code_of([&] { csp_log_bandpower(bank, e); }) == Errc::Layout);
    }
}

TEST_SUITE("mutual information")
{
    TEST_CASE("independent feature carries under 0.05 bits")
    {
        Rng rng(11);
        std::vector<double> f(1000);
        std::vector<int> y(1000);
        for (std::size_t i = 0; i < f.size(); ++i) {
            f[i] = rng.normal();
            y[i] = static_cast<int>(rng.below(3));
        }
        CHECK(mutual_information_bits(f, y) < 0.05);
    }

    TEST_CASE("separating feature ranks first; ranking survives monotone transforms")
    {
        Rng rng(12);
        Matrix x(90, 3);
        std::vector<int> y(90);
        for (Eigen::Index i = 0; i < 90; ++i) {
            y[static_cast<std::size_t>(i)] = static_cast<int>(i % 3);
            x(i, 0) = rng.normal();
            x(i, 1) = 10.0 * (i % 3) + rng.normal();
            x(i, 2) = 0.5 * (i % 3) + rng.normal();
        }
        const auto order = mi_order(x, y);
        CHECK(order[0] == 1);
        Matrix t = x;
        t.col(0) = x.col(0).array().exp().matrix();
        t.col(2) = x.col(2).array().cube().matrix();
        CHECK(mi_order(t, y) == order);
        const auto bins = equal_frequency_bins(std::vector<double>(x.col(0).data(), x.col(0).data() + 90));
        for (int b = 0; b < 8; ++b) {
            const auto count = std::count(bins.begin(), bins.end(), b);
            CHECK(count >= 11);
            CHECK(count <= 12);
        }
    }
}

TEST_SUITE("evaluation")
{
    TEST_CASE("hand-computed F1 of 7/9")
    {
        const std::vector<int> t = {0, 1, 1, 2}, p = {0, 0, 1, 2};
        const auto r = evaluate(t, p, kLrr);
        CHECK(r.per_class_f1[0] == doctest::Approx(2.0 / 3.0));
        CHECK(r.per_class_f1[1] == doctest::Approx(2.0 / 3.0));
        CHECK(r.per_class_f1[2] == doctest::Approx(1.0));
        CHECK(r.macro_f1 == doctest::Approx(7.0 / 9.0));
        CHECK(r.confusion(1, 0) == 1);
        CHECK(r.confusion.row(1).sum() == 2);
    }

    TEST_CASE("perfect, empty predicted class, unknown label")
    {
        const std::vector<int> t = {0, 1, 2, 2};
        const auto perfect = evaluate(t, t, kLrr);
        CHECK(perfect.macro_f1 == 1.0);
        CHECK(perfect.confusion.diagonal().sum() == 4);
        const std::vector<int> p = {0, 0, 2, 2};
        CHECK(evaluate(t, p, kLrr).per_class_f1[1] == 0.0);
        const std::vector<int> bad = {0, 7, 2, 2};
        CHECK(code_of([&] { evaluate(t, bad, kLrr); }) == Errc::Validation);
        const auto norm = evaluate(t, p, kLrr).confusion_normalized();
        for (Eigen::Index r = 0; r < 3; ++r)
            CHECK(norm.row(r).sum() == doctest::Approx(1.0));
    }

    TEST_CASE("random predictions: confusion rows sum to class counts, F1 in [0,1]")
    {
        Rng rng(13);
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<int> t(50), p(50);
            for (std::size_t i = 0; i < 50; ++i) {
                t[i] = static_cast<int>(rng.below(3));
                p[i] = static_cast<int>(rng.below(3));
            }
            const auto r = evaluate(t, p, kLrr);
            for (int c = 0; c < 3; ++c) {
                CHECK(r.confusion.row(c).sum() == std::count(t.begin(), t.end(), c));
                CHECK(r.per_class_f1[static_cast<std::size_t>(c)] >= 0.0);
                CHECK(r.per_class_f1[static_cast<std::size_t>(c)] <= 1.0);
            }
            CHECK(r.macro_f1 == doctest::Approx(macro_f1(t, p, kLrr)));
        }
    }

    TEST_CASE("5 folds on 40 trials cover every trial exactly once")
    {
        std::vector<int> y(40);
        for (std::size_t i = 0; i < 40; ++i)
            y[i] = static_cast<int>(i % 2);
        std::vector<int> seen(40, 0);
        const auto r = crossval(
            [&](std::span<const std::size_t>, std::span<const std::size_t> test) {
                std::vector<int> out;
                for (auto i : test) {
                    ++seen[i];
                    out.push_back(y[i]);
                }
                return out;
            },
            y, std::vector<int>{0, 1}, 5, 99);
        CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
        CHECK(r.macro_f1 == 1.0);

        const auto a = stratified_folds(y, 5, 1), b = stratified_folds(y, 5, 2);
        CHECK(a != b);
        for (const auto& f : {a, b})
            for (int k = 0; k < 5; ++k)
                CHECK(std::count(f.begin(), f.end(), k) == 8);
        CHECK(stratified_folds(y, 5, 1) == a);
    }

    TEST_CASE("more folds than class members")
    {
        const std::vector<int> y = {0, 0, 0, 1, 1, 1};
        CHECK(code_of([&] { stratified_folds(y, 4, 1); }) == Errc::Fold);
    }

    TEST_CASE("repeated folds average the repeats")
    {
        std::vector<int> y(30);
        for (std::size_t i = 0; i < 30; ++i)
            y[i] = static_cast<int>(i % 3);
        const auto r = crossval([&](std::span<const std::size_t>,
                                    std::span<const std::size_t> test) { return std::vector<int>(test.size(), 0); },
                                y, kLrr, 5, 3, 5);
        CHECK(r.repeat_macro_f1.size() == 5);
        CHECK(r.predictions.size() == 5);
        CHECK(r.macro_f1_variance == doctest::Approx(0.0));
    }
}

TEST_SUITE("rest threshold")
{
    // trials x {LEFT, RIGHT, REST}
    Matrix random_proba(Rng& rng, const std::vector<int>& y, double signal)
    {
        Matrix p(static_cast<Eigen::Index>(y.size()), 3);
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            Eigen::Vector3d logits(rng.normal(), rng.normal(), rng.normal());
            logits(y[static_cast<std::size_t>(i)]) += signal;
            const Eigen::Vector3d e = logits.array().exp();
            p.row(i) = (e / e.sum()).transpose();
        }
        return p;
    }

    TEST_CASE("decision rule")
    {
        Matrix p(3, 3);
        p << 0.5, 0.1, 0.4, 0.2, 0.3, 0.5, 0.3, 0.4, 0.3;
        CHECK(apply_rest_threshold(p, kLrr, 2, 0.4) == std::vector<int>{2, 2, 1});
        CHECK(apply_rest_threshold(p, kLrr, 2, 0.41) == std::vector<int>{0, 2, 1});
    }

    TEST_CASE("N = 100 calibrates on the first 10 trials, matching the exhaustive grid")
    {
        Rng rng(14);
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<int> y(100);
            for (std::size_t i = 0; i < y.size(); ++i)
                y[i] = static_cast<int>(i % 3);
            const auto p = random_proba(rng, y, 1.0);
            const auto r = rest_threshold_calibrate(p, y, kLrr, 2);
            CHECK(r.n_calibration == 10);
            CHECK_FALSE(r.degenerate);

            const std::vector<int> yc(y.begin(), y.begin() + 10);
            const Matrix pc = p.topRows(10);
            double best = -1.0;
            for (int g = 0; g <= 100; ++g) {
                const double f = macro_f1(yc, apply_rest_threshold(pc, kLrr, 2, g / 100.0), kLrr);
                CHECK(r.grid_f1[static_cast<std::size_t>(g)] == doctest::Approx(f));
                best = std::max(best, f);
            }
            CHECK(r.calibration_macro_f1 == doctest::Approx(best));
            CHECK(macro_f1(yc, apply_rest_threshold(pc, kLrr, 2, r.theta), kLrr) == doctest::Approx(best));

            // trial 11 onwards does not influence the threshold
            Matrix changed = p;
            changed.bottomRows(90).setConstant(1.0 / 3.0);
            CHECK(rest_threshold_calibrate(changed, y, kLrr, 2).theta == r.theta);
        }
        std::vector<int> y101(101);
        for (std::size_t i = 0; i < y101.size(); ++i)
            y101[i] = static_cast<int>(i % 3);
        CHECK(rest_threshold_calibrate(random_proba(rng, y101, 1.0), y101, kLrr, 2).n_calibration == 11);
    }

    TEST_CASE("perfect probabilities give F1 of one")
    {
        std::vector<int> y(50);
        Matrix p = Matrix::Zero(50, 3);
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = static_cast<int>(i % 3);
            p(static_cast<Eigen::Index>(i), y[i]) = 1.0;
        }
        const auto r = rest_threshold_calibrate(p, y, kLrr, 2);
        CHECK(r.calibration_macro_f1 == 1.0);
        CHECK(r.theta > 0.0);
        CHECK(r.theta <= 1.0);
    }

    TEST_CASE("calibration split missing a class falls back to one half")
    {
        std::vector<int> y(100, 0);
        for (std::size_t i = 50; i < 100; ++i)
            y[i] = static_cast<int>(i % 3);
        Rng rng(15);
        const auto r = rest_threshold_calibrate(random_proba(rng, y, 1.0), y, kLrr, 2);
        CHECK(r.degenerate);
        CHECK(r.theta == 0.5);
    }
}
