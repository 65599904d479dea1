#pragma once

#include "mbci/recording.hpp"

#include <span>
#include <vector>

namespace mbci {

enum class ModelKind { Lda, Logistic };

/// Linear scores = weights * x + intercepts, one row per class.
struct LinearModel {
    Matrix weights;      // classes x features
    Vector intercepts;   // classes
    ModelKind kind = ModelKind::Lda;
    std::vector<int> classes;  // ascending, unique

    std::size_t n_classes() const { return classes.size(); }
    /// trials x classes.
    Matrix scores(const Matrix& features) const;
    /// argmax of the scores; ties go to the lowest class index.
    std::vector<int> predict(const Matrix& features) const;
};

/// Sorted unique labels.
std::vector<int> unique_classes(std::span<const int> labels);

/// Closed-form LDA with pooled within-class covariance (plus a 1e-9 relative
/// ridge) and class-frequency priors.
LinearModel lda_fit(const Matrix& features, std::span<const int> labels);
std::vector<int> lda_predict(const LinearModel& model, const Matrix& features);

struct LogisticOptions {
    double l2 = 1.0;
    double gradient_tolerance = 1e-6;
    int max_iterations = 100;
};

/// Multinomial logistic regression, L2 on the weights (not the intercepts),
/// fitted by damped Newton iterations.
LinearModel logistic_fit(const Matrix& features, std::span<const int> labels, const LogisticOptions& options = {});
Matrix logistic_predict_proba(const LinearModel& model, const Matrix& features);

struct LossAndGradient {
    double loss = 0.0;
    Vector gradient;
};

/// Penalised negative log-likelihood at `params`, laid out class-major as
/// [w_c (features), b_c] for each class. `targets` are class indices.
LossAndGradient logistic_loss(const Vector& params, const Matrix& features, std::span<const int> targets,
                              std::size_t n_classes, double l2);

}  // namespace mbci
