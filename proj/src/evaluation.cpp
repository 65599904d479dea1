#include "mbci/evaluation.hpp"

#include "mbci/error.hpp"
#include "mbci/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mbci {

namespace {

std::size_t class_position(std::span<const int> classes, int label)
{
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i] == label)
            return i;
    throw Error(Errc::Validation, "unknown label " + std::to_string(label));
}

std::vector<std::string> default_names(std::span<const int> classes, std::vector<std::string> names)
{
    if (names.size() == classes.size())
        return names;
    names.clear();
    for (int c : classes)
        names.push_back(std::to_string(c));
    return names;
}

}  // namespace

Matrix EvalReport::confusion_normalized() const
{
    Matrix out = confusion.cast<double>();
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        const double s = out.row(r).sum();
        if (s > 0.0)
            out.row(r) /= s;
    }
    return out;
}

nlohmann::json EvalReport::to_json() const
{
    nlohmann::json j;
    j["macro_f1"] = macro_f1;
    j["accuracy"] = accuracy;
    j["macro_f1_mean"] = macro_f1_mean;
    j["macro_f1_variance"] = macro_f1_variance;
    nlohmann::json per = nlohmann::json::object();
    for (std::size_t i = 0; i < classes.size(); ++i)
        per[class_names[i]] = per_class_f1[i];
    j["per_class_f1"] = per;
    nlohmann::json conf = nlohmann::json::array();
    for (Eigen::Index r = 0; r < confusion.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < confusion.cols(); ++c)
            row.push_back(confusion(r, c));
        conf.push_back(row);
    }
    j["confusion"] = conf;
    j["classes"] = class_names;
    j["n_trials"] = n_trials;
    if (repeat_macro_f1.size() > 1)
        j["repeat_macro_f1"] = repeat_macro_f1;
    return j;
}

EvalReport evaluate(std::span<const int> y_true, std::span<const int> y_pred, std::span<const int> classes,
                    std::vector<std::string> class_names)
{
    if (y_true.size() != y_pred.size())
        throw Error(Errc::Validation, "true and predicted labels differ in length");
    const auto k = static_cast<Eigen::Index>(classes.size());
    EvalReport rep;
    rep.classes.assign(classes.begin(), classes.end());
    rep.class_names = default_names(classes, std::move(class_names));
    rep.confusion = Eigen::MatrixXi::Zero(k, k);
    for (std::size_t i = 0; i < y_true.size(); ++i)
        rep.confusion(static_cast<Eigen::Index>(class_position(classes, y_true[i])),
                      static_cast<Eigen::Index>(class_position(classes, y_pred[i]))) += 1;
    rep.per_class_f1.resize(classes.size());
    for (Eigen::Index c = 0; c < k; ++c) {
        const double tp = rep.confusion(c, c);
        const double fp = rep.confusion.col(c).sum() - tp;
        const double fn = rep.confusion.row(c).sum() - tp;
        const double denom = 2.0 * tp + fp + fn;
        rep.per_class_f1[static_cast<std::size_t>(c)] = (tp > 0.0 && denom > 0.0) ? 2.0 * tp / denom : 0.0;
    }
    rep.macro_f1 = k > 0 ? std::accumulate(rep.per_class_f1.begin(), rep.per_class_f1.end(), 0.0) / static_cast<double>(k)
                         : 0.0;
    rep.accuracy = y_true.empty() ? 0.0 : static_cast<double>(rep.confusion.trace()) / static_cast<double>(y_true.size());
    rep.macro_f1_mean = rep.macro_f1;
    rep.repeat_macro_f1 = {rep.macro_f1};
    rep.n_trials = y_true.size();
    rep.y_true.assign(y_true.begin(), y_true.end());
    rep.predictions.emplace_back(y_pred.begin(), y_pred.end());
    return rep;
}

EvalReport merge_reports(std::span<const EvalReport> reports)
{
    if (reports.empty())
        throw Error(Errc::InvalidRequest, "nothing to merge");
    EvalReport out = reports.front();
    out.predictions.clear();
    out.folds.clear();
    out.repeat_macro_f1.clear();
    out.confusion.setZero();
    std::fill(out.per_class_f1.begin(), out.per_class_f1.end(), 0.0);
    out.n_trials = 0;
    out.accuracy = 0.0;
    for (const auto& r : reports) {
        out.accuracy += r.accuracy / static_cast<double>(reports.size());
        if (r.classes != out.classes)
            throw Error(Errc::Validation, "reports use different classes");
        out.confusion += r.confusion;
        for (std::size_t c = 0; c < out.per_class_f1.size(); ++c)
            out.per_class_f1[c] += r.per_class_f1[c] / static_cast<double>(reports.size());
        out.repeat_macro_f1.insert(out.repeat_macro_f1.end(), r.repeat_macro_f1.begin(), r.repeat_macro_f1.end());
        out.predictions.insert(out.predictions.end(), r.predictions.begin(), r.predictions.end());
        out.folds.insert(out.folds.end(), r.folds.begin(), r.folds.end());
        out.n_trials += r.n_trials;
    }
    const double n = static_cast<double>(out.repeat_macro_f1.size());
    out.macro_f1_mean = std::accumulate(out.repeat_macro_f1.begin(), out.repeat_macro_f1.end(), 0.0) / n;
    double var = 0.0;
    for (double v : out.repeat_macro_f1)
        var += (v - out.macro_f1_mean) * (v - out.macro_f1_mean);
    out.macro_f1_variance = var / n;
    out.macro_f1 = out.macro_f1_mean;
    return out;
}

std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed)
{
    if (k < 2)
        throw Error(Errc::Fold, "at least two folds are required");
    std::vector<int> classes(labels.begin(), labels.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    Rng rng(seed);
    std::vector<int> fold(labels.size(), -1);
    int offset = 0;
    for (int c : classes) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == c)
                members.push_back(i);
        if (static_cast<int>(members.size()) < k)
            throw Error(Errc::Fold, "fold count " + std::to_string(k) + " exceeds the size of class " +
                                        std::to_string(c) + " (" + std::to_string(members.size()) + ")");
        rng.shuffle(std::span<std::size_t>(members));
        // continue dealing where the previous class stopped to balance fold sizes
        for (std::size_t j = 0; j < members.size(); ++j)
            fold[members[j]] = static_cast<int>((static_cast<std::size_t>(offset) + j) % static_cast<std::size_t>(k));
        offset = static_cast<int>((static_cast<std::size_t>(offset) + members.size()) % static_cast<std::size_t>(k));
    }
    return fold;
}

EvalReport crossval(const FoldPipeline& pipeline, std::span<const int> labels, std::span<const int> classes, int k,
                    std::uint64_t seed, int repeats, std::vector<std::string> class_names)
{
    if (repeats < 1)
        throw Error(Errc::InvalidRequest, "repeats must be positive");
    std::vector<EvalReport> runs;
    for (int r = 0; r < repeats; ++r) {
        const auto fold = stratified_folds(labels, k, Rng::derive(seed, static_cast<std::uint64_t>(r)).next_u64());
        std::vector<int> pred(labels.size(), 0);
        std::vector<int> seen(labels.size(), 0);
        for (int f = 0; f < k; ++f) {
            std::vector<std::size_t> train, test;
            for (std::size_t i = 0; i < labels.size(); ++i)
                (fold[i] == f ? test : train).push_back(i);
            const auto p = pipeline(train, test);
            if (p.size() != test.size())
                throw Error(Errc::Validation, "pipeline returned the wrong number of predictions");
            for (std::size_t j = 0; j < test.size(); ++j) {
                pred[test[j]] = p[j];
                ++seen[test[j]];
            }
        }
        for (int s : seen)
            if (s != 1)
                throw Error(Errc::Fold, "fold assignment is not a partition");
        auto rep = evaluate(labels, pred, classes, class_names);
        rep.folds.push_back(fold);
        runs.push_back(std::move(rep));
    }
    auto out = merge_reports(runs);
    out.n_trials = labels.size();
    out.y_true.assign(labels.begin(), labels.end());
    return out;
}

std::vector<int> apply_rest_threshold(const Matrix& proba, std::span<const int> classes, int rest_class, double theta)
{
    if (static_cast<std::size_t>(proba.cols()) != classes.size())
        throw Error(Errc::Layout, "probability columns do not match the classes");
    const auto rest = static_cast<Eigen::Index>(class_position(classes, rest_class));
    std::vector<int> out(static_cast<std::size_t>(proba.rows()));
    for (Eigen::Index i = 0; i < proba.rows(); ++i) {
        if (proba(i, rest) >= theta) {
            out[static_cast<std::size_t>(i)] = rest_class;
            continue;
        }
        Eigen::Index best = -1;
        for (Eigen::Index c = 0; c < proba.cols(); ++c)
            if (c != rest && (best < 0 || proba(i, c) > proba(i, best)))
                best = c;
        out[static_cast<std::size_t>(i)] = classes[static_cast<std::size_t>(best)];
    }
    return out;
}

RestThreshold rest_threshold_calibrate(const Matrix& proba, std::span<const int> labels, std::span<const int> classes,
                                       int rest_class, double fraction)
{
    if (static_cast<std::size_t>(proba.rows()) != labels.size())
        throw Error(Errc::Validation, "probabilities and labels differ in length");
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw Error(Errc::InvalidRequest, "calibration fraction must lie in (0,1]");
    class_position(classes, rest_class);
    RestThreshold out;
    out.n_calibration = std::min(labels.size(), static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(labels.size()) - 1e-9)));
    const auto n_cal = out.n_calibration;
    const std::span<const int> cal_labels = labels.first(n_cal);
    for (int c : classes) {
        if (std::find(cal_labels.begin(), cal_labels.end(), c) == cal_labels.end()) {
            out.degenerate = true;
            out.theta = 0.5;
        }
    }
    const Matrix cal = proba.topRows(static_cast<Eigen::Index>(n_cal));
    out.grid_f1.resize(101);
    for (int g = 0; g <= 100; ++g) {
        const auto pred = apply_rest_threshold(cal, classes, rest_class, g / 100.0);
        out.grid_f1[static_cast<std::size_t>(g)] = evaluate(cal_labels, pred, classes).macro_f1;
    }
    if (!out.degenerate) {
        const double best = *std::max_element(out.grid_f1.begin(), out.grid_f1.end());
        int first = 0;
        while (out.grid_f1[static_cast<std::size_t>(first)] != best)
            ++first;
        int last = first;
        while (last + 1 <= 100 && out.grid_f1[static_cast<std::size_t>(last + 1)] == best)
            ++last;
        out.theta = ((first + last) / 2) / 100.0;
    }
    out.calibration_macro_f1 = out.grid_f1[static_cast<std::size_t>(std::lround(out.theta * 100.0))];
    return out;
}

}  // namespace mbci
