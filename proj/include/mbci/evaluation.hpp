#pragma once

#include "mbci/recording.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace mbci {

struct EvalReport {
    std::vector<int> classes;
    std::vector<std::string> class_names;
    std::vector<double> per_class_f1;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
    /// Across repeats (or subjects); variance 0 for a single evaluation.
    double macro_f1_mean = 0.0;
    double macro_f1_variance = 0.0;
    std::vector<double> repeat_macro_f1;
    /// rows = true class, columns = predicted class
    Eigen::MatrixXi confusion;
    std::size_t n_trials = 0;
    std::vector<int> y_true;
    /// One prediction vector per repeat, indexed by trial.
    std::vector<std::vector<int>> predictions;
    /// Fold of every trial, per repeat.
    std::vector<std::vector<int>> folds;

    Matrix confusion_normalized() const;
    nlohmann::json to_json() const;
};

/// Per-class F1 (0 when undefined), macro F1 and the confusion matrix.
EvalReport evaluate(std::span<const int> y_true, std::span<const int> y_pred, std::span<const int> classes,
                    std::vector<std::string> class_names = {});

/// Merge reports of independent runs: confusion summed, per-class F1 and
/// macro F1 averaged, variance of the macro F1 across runs.
EvalReport merge_reports(std::span<const EvalReport> reports);

/// Fold index per trial; each class is shuffled and dealt round-robin.
std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

/// Fits on `train` and returns one prediction per entry of `test`.
using FoldPipeline =
    std::function<std::vector<int>(std::span<const std::size_t> train, std::span<const std::size_t> test)>;

/// Repeated stratified k-fold cross-validation. Repeat r uses folds drawn
/// from Rng::derive(seed, r).
EvalReport crossval(const FoldPipeline& pipeline, std::span<const int> labels, std::span<const int> classes, int k,
                    std::uint64_t seed, int repeats = 1, std::vector<std::string> class_names = {});

struct RestThreshold {
    double theta = 0.5;
    std::size_t n_calibration = 0;
    double calibration_macro_f1 = 0.0;
    /// Calibration split lacked a class; theta fell back to 0.5.
    bool degenerate = false;
    std::vector<double> grid_f1;
};

/// REST iff p(REST) >= theta, otherwise the most probable other class.
std::vector<int> apply_rest_threshold(const Matrix& proba, std::span<const int> classes, int rest_class, double theta);

/// Chooses theta on a 101-point grid over [0,1] maximising macro F1 on the
/// first ceil(fraction*N) trials. Among equal maxima the centre of the first
/// maximal run of grid points is taken.
RestThreshold rest_threshold_calibrate(const Matrix& proba, std::span<const int> labels, std::span<const int> classes,
                                       int rest_class, double fraction = 0.10);

}  // namespace mbci
