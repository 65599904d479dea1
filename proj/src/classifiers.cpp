#include "mbci/classifiers.hpp"

#include "mbci/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mbci {

std::vector<int> unique_classes(std::span<const int> labels)
{
    std::set<int> s(labels.begin(), labels.end());
    return {s.begin(), s.end()};
}

Matrix LinearModel::scores(const Matrix& features) const
{
    if (features.cols() != weights.cols())
        throw Error(Errc::Layout, "feature count does not match the model");
    return (features * weights.transpose()).rowwise() + intercepts.transpose();
}

std::vector<int> LinearModel::predict(const Matrix& features) const
{
    const Matrix s = scores(features);
    std::vector<int> out(static_cast<std::size_t>(s.rows()));
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < s.cols(); ++c)
            if (s(i, c) > s(i, best))
                best = c;
        out[static_cast<std::size_t>(i)] = classes[static_cast<std::size_t>(best)];
    }
    return out;
}

namespace {

std::vector<int> class_indices(std::span<const int> labels, const std::vector<int>& classes)
{
    std::vector<int> idx(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto it = std::lower_bound(classes.begin(), classes.end(), labels[i]);
        if (it == classes.end() || *it != labels[i])
            throw Error(Errc::Validation, "label not among the model classes");
        idx[i] = static_cast<int>(it - classes.begin());
    }
    return idx;
}

void check_inputs(const Matrix& features, std::span<const int> labels)
{
    if (static_cast<std::size_t>(features.rows()) != labels.size())
        throw Error(Errc::Validation, "feature rows and labels differ in length");
    if (!features.allFinite())
        throw Error(Errc::Validation, "features must be finite");
}

}  // namespace

LinearModel lda_fit(const Matrix& features, std::span<const int> labels)
{
    check_inputs(features, labels);
    LinearModel model;
    model.kind = ModelKind::Lda;
    model.classes = unique_classes(labels);
    const auto k = static_cast<Eigen::Index>(model.classes.size());
    if (k < 2)
        throw Error(Errc::InsufficientData, "LDA needs at least two classes");
    const auto idx = class_indices(labels, model.classes);
    const Eigen::Index d = features.cols();
    const Eigen::Index n = features.rows();

    Matrix means = Matrix::Zero(k, d);
    Vector counts = Vector::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
        means.row(idx[static_cast<std::size_t>(i)]) += features.row(i);
        counts(idx[static_cast<std::size_t>(i)]) += 1.0;
    }
    for (Eigen::Index c = 0; c < k; ++c) {
        if (counts(c) < 2.0)
            throw Error(Errc::InsufficientData, "every class needs at least two samples");
        means.row(c) /= counts(c);
    }
    Matrix pooled = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector r = (features.row(i) - means.row(idx[static_cast<std::size_t>(i)])).transpose();
        pooled.noalias() += r * r.transpose();
    }
    pooled /= static_cast<double>(n - k);
    const double scale = std::max(pooled.trace() / static_cast<double>(d), 1e-300);
    pooled.diagonal().array() += 1e-9 * scale;

    const Eigen::LDLT<Matrix> solver(pooled);
    if (solver.info() != Eigen::Success)
        throw Error(Errc::Numerical, "pooled covariance is not invertible");
    model.weights.resize(k, d);
    model.intercepts.resize(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const Vector mu = means.row(c).transpose();
        const Vector w = solver.solve(mu);
        model.weights.row(c) = w.transpose();
        model.intercepts(c) = -0.5 * mu.dot(w) + std::log(counts(c) / static_cast<double>(n));
    }
    return model;
}

std::vector<int> lda_predict(const LinearModel& model, const Matrix& features)
{
    return model.predict(features);
}

namespace {

Matrix softmax_rows(const Matrix& logits)
{
    Matrix p(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        double z = 0.0;
        for (Eigen::Index c = 0; c < logits.cols(); ++c) {
            p(i, c) = std::exp(logits(i, c) - m);
            z += p(i, c);
        }
        p.row(i) /= z;
    }
    return p;
}

// Augmented design [x, 1].
Matrix augment(const Matrix& features)
{
    Matrix xa(features.rows(), features.cols() + 1);
    xa.leftCols(features.cols()) = features;
    xa.col(features.cols()).setOnes();
    return xa;
}

}  // namespace

LossAndGradient logistic_loss(const Vector& params, const Matrix& features, std::span<const int> targets,
                              std::size_t n_classes, double l2)
{
    const Eigen::Index d = features.cols();
    const auto k = static_cast<Eigen::Index>(n_classes);
    const Eigen::Index stride = d + 1;
    if (params.size() != k * stride)
        throw Error(Errc::Validation, "parameter vector has the wrong size");
    const Matrix xa = augment(features);
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> theta(
        params.data(), k, stride);
    const Matrix logits = xa * theta.transpose();

    LossAndGradient out;
    Matrix resid(logits.rows(), k);
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
        const int y = targets[static_cast<std::size_t>(i)];
        out.loss += lse - logits(i, y);
        for (Eigen::Index c = 0; c < k; ++c)
            resid(i, c) = std::exp(logits(i, c) - lse) - (c == y ? 1.0 : 0.0);
    }
    const Matrix grad = resid.transpose() * xa;  // k x stride
    out.gradient.resize(k * stride);
    for (Eigen::Index c = 0; c < k; ++c) {
        const auto w = theta.row(c).head(d);
        out.loss += 0.5 * l2 * w.squaredNorm();
        out.gradient.segment(c * stride, stride) = grad.row(c).transpose();
        out.gradient.segment(c * stride, d) += l2 * w.transpose();
    }
    return out;
}

LinearModel logistic_fit(const Matrix& features, std::span<const int> labels, const LogisticOptions& options)
{
    check_inputs(features, labels);
    LinearModel model;
    model.kind = ModelKind::Logistic;
    model.classes = unique_classes(labels);
    if (model.classes.size() < 2)
        throw Error(Errc::InsufficientData, "logistic regression needs at least two classes");
    const auto targets = class_indices(labels, model.classes);
    const auto k = static_cast<Eigen::Index>(model.classes.size());
    const Eigen::Index d = features.cols();
    const Eigen::Index stride = d + 1;
    const Eigen::Index np = k * stride;
    const Matrix xa = augment(features);

    Vector theta = Vector::Zero(np);
    auto current = logistic_loss(theta, features, targets, model.classes.size(), options.l2);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (current.gradient.norm() < options.gradient_tolerance)
            break;
        const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> th(
            theta.data(), k, stride);
        const Matrix p = softmax_rows(xa * th.transpose());
        Matrix hess = Matrix::Zero(np, np);
        for (Eigen::Index i = 0; i < xa.rows(); ++i) {
            const Matrix outer = xa.row(i).transpose() * xa.row(i);
            for (Eigen::Index a = 0; a < k; ++a) {
                for (Eigen::Index b = a; b < k; ++b) {
                    const double wgt = (a == b ? p(i, a) : 0.0) - p(i, a) * p(i, b);
                    hess.block(a * stride, b * stride, stride, stride) += wgt * outer;
                }
            }
        }
        for (Eigen::Index a = 0; a < k; ++a) {
            for (Eigen::Index b = a + 1; b < k; ++b)
                hess.block(b * stride, a * stride, stride, stride) = hess.block(a * stride, b * stride, stride, stride);
            hess.block(a * stride, a * stride, d, d).diagonal().array() += options.l2;
        }
        // the intercept-sum direction is flat; a tiny ridge keeps the system regular
        hess.diagonal().array() += 1e-10;
        const Vector step = hess.ldlt().solve(-current.gradient);

        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            const Vector trial = theta + t * step;
            auto next = logistic_loss(trial, features, targets, model.classes.size(), options.l2);
            if (next.loss <= current.loss + 1e-4 * t * current.gradient.dot(step)) {
                theta = trial;
                current = std::move(next);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted)
            break;
    }

    model.weights.resize(k, d);
    model.intercepts.resize(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        model.weights.row(c) = theta.segment(c * stride, d).transpose();
        model.intercepts(c) = theta(c * stride + d);
    }
    return model;
}

Matrix logistic_predict_proba(const LinearModel& model, const Matrix& features)
{
    if (!features.allFinite())
        throw Error(Errc::Validation, "features must be finite");
    return softmax_rows(model.scores(features));
}

}  // namespace mbci
