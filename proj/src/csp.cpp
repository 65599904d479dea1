#include "mbci/csp.hpp"

#include "mbci/classifiers.hpp"
#include "mbci/error.hpp"
#include "mbci/mutual_info.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace mbci {

TrialScatter trial_scatter(const Matrix& trial)
{
    TrialScatter s;
    const Vector mean = trial.rowwise().mean();
    const Matrix centered = trial.colwise() - mean;
    s.scatter = centered * centered.transpose();
    s.n_samples = static_cast<double>(trial.cols());
    for (Eigen::Index t = 0; t < centered.cols(); ++t) {
        const double sq = centered.col(t).squaredNorm();
        s.fourth_moment += sq * sq;
    }
    return s;
}

std::vector<TrialScatter> trial_scatters(const Epochs& epochs)
{
    std::vector<TrialScatter> out;
    out.reserve(epochs.n_trials());
    for (const auto& t : epochs.data)
        out.push_back(trial_scatter(t));
    return out;
}

double ledoit_wolf_shrinkage(const Matrix& scatter, double n, double fourth_moment)
{
    const double p = static_cast<double>(scatter.rows());
    const Matrix emp = scatter / n;
    const double mu = emp.trace() / p;
    const double delta_sq = emp.squaredNorm();
    double beta = (fourth_moment / n - delta_sq) / (p * n);
    const double delta = (delta_sq - 2.0 * mu * emp.trace() + p * mu * mu) / p;
    beta = std::min(beta, delta);
    if (beta <= 0.0 || delta <= 0.0)
        return 0.0;
    return beta / delta;
}

namespace {

Matrix shrunk_covariance(const Matrix& scatter, double n, double fourth, std::optional<double> fixed, double* used)
{
    const double s = fixed ? *fixed : ledoit_wolf_shrinkage(scatter, n, fourth);
    *used = s;
    Matrix cov = scatter / n;
    const double mu = cov.trace() / static_cast<double>(cov.rows());
    cov *= (1.0 - s);
    cov.diagonal().array() += s * mu;
    return cov;
}

}  // namespace

SpatialFilterBank csp_fit_from_scatters(std::span<const TrialScatter> scatters, std::span<const int> labels,
                                        std::span<const std::size_t> trials,
                                        const std::vector<std::string>& channel_labels, const CspOptions& options)
{
    if (scatters.size() != labels.size())
        throw Error(Errc::Validation, "trial statistics and labels differ in length");
    if (trials.empty())
        throw Error(Errc::InsufficientData, "no trials for CSP");
    if (options.shrinkage && (*options.shrinkage < 0.0 || *options.shrinkage > 1.0))
        throw Error(Errc::InvalidRequest, "shrinkage must lie in [0,1]");
    std::vector<int> sel_labels;
    for (auto t : trials)
        sel_labels.push_back(labels[t]);
    SpatialFilterBank bank;
    bank.classes = unique_classes(sel_labels);
    bank.channel_labels = channel_labels;
    const std::size_t k = bank.classes.size();
    if (k < 2)
        throw Error(Errc::InsufficientData, "CSP needs at least two classes");
    const Eigen::Index c = scatters[trials.front()].scatter.rows();
    if (options.n_filters == 0 || options.n_filters > k * static_cast<std::size_t>(c))
        throw Error(Errc::InvalidRequest, "invalid number of CSP filters");

    std::vector<Matrix> cov(k);
    std::vector<std::size_t> counts(k, 0);
    bank.shrinkage.assign(k, 0.0);
    for (std::size_t ci = 0; ci < k; ++ci) {
        Matrix s = Matrix::Zero(c, c);
        double n = 0.0;
        double fourth = 0.0;
        for (auto t : trials) {
            if (labels[t] != bank.classes[ci])
                continue;
            s += scatters[t].scatter;
            n += scatters[t].n_samples;
            fourth += scatters[t].fourth_moment;
            ++counts[ci];
        }
        if (counts[ci] < 2)
            throw Error(Errc::InsufficientData, "CSP needs at least two trials per class");
        cov[ci] = shrunk_covariance(s, n, fourth, options.shrinkage, &bank.shrinkage[ci]);
    }

    // filters per class: an even share, remainder to the first classes
    std::vector<std::size_t> per_class(k, options.n_filters / k);
    for (std::size_t i = 0; i < options.n_filters % k; ++i)
        ++per_class[i];

    bank.filters.resize(static_cast<Eigen::Index>(options.n_filters), c);
    bank.eigenvalues.resize(static_cast<Eigen::Index>(options.n_filters));
    Eigen::Index row = 0;
    for (std::size_t ci = 0; ci < k; ++ci) {
        Matrix rest = Matrix::Zero(c, c);
        for (std::size_t o = 0; o < k; ++o)
            if (o != ci)
                rest += cov[o];
        rest /= static_cast<double>(k - 1);
        const Matrix composite = cov[ci] + rest;
        Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(cov[ci], composite);
        if (solver.info() != Eigen::Success)
            throw Error(Errc::Numerical, "composite covariance is singular");
        for (std::size_t j = 0; j < per_class[ci]; ++j) {
            const Eigen::Index col = c - 1 - static_cast<Eigen::Index>(j);
            Vector v = solver.eigenvectors().col(col);
            v.normalize();
            Eigen::Index imax = 0;
            v.cwiseAbs().maxCoeff(&imax);
            if (v(imax) < 0.0)
                v = -v;
            bank.filters.row(row) = v.transpose();
            bank.eigenvalues(row) = solver.eigenvalues()(col);
            bank.filter_class.push_back(bank.classes[ci]);
            ++row;
        }
    }
    bank.patterns = bank.filters.completeOrthogonalDecomposition().pseudoInverse();

    bank.mi_order.resize(options.n_filters);
    std::iota(bank.mi_order.begin(), bank.mi_order.end(), std::size_t{0});
    if (trials.size() >= 10) {
        const Matrix feats = csp_log_bandpower(bank, scatters, trials);
        bank.mi_order = mi_order(feats, sel_labels);
    }
    return bank;
}

SpatialFilterBank csp_fit_multiclass(const Epochs& epochs, const CspOptions& options)
{
    const auto scatters = trial_scatters(epochs);
    std::vector<std::size_t> all(epochs.n_trials());
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::string> labels;
    for (const auto& ch : epochs.channels)
        labels.push_back(ch.label);
    return csp_fit_from_scatters(scatters, epochs.label_codes(), all, labels, options);
}

Matrix csp_log_bandpower(const SpatialFilterBank& bank, const Epochs& epochs)
{
    if (static_cast<Eigen::Index>(epochs.channels.size()) != bank.filters.cols())
        throw Error(Errc::Layout, "epoch channels do not match the filter bank");
    for (std::size_t i = 0; i < epochs.channels.size() && i < bank.channel_labels.size(); ++i)
        if (epochs.channels[i].label != bank.channel_labels[i])
            throw Error(Errc::Layout, "epoch channel order does not match the filter bank");
    Matrix out(static_cast<Eigen::Index>(epochs.n_trials()), bank.filters.rows());
    for (std::size_t t = 0; t < epochs.n_trials(); ++t) {
        const Matrix proj = bank.filters * epochs.data[t];
        for (Eigen::Index f = 0; f < proj.rows(); ++f) {
            const double mean = proj.row(f).mean();
            const double var = (proj.row(f).array() - mean).square().mean();
            out(static_cast<Eigen::Index>(t), f) = std::log(var + 1e-12);
        }
    }
    return out;
}

Matrix csp_log_bandpower(const SpatialFilterBank& bank, std::span<const TrialScatter> scatters,
                         std::span<const std::size_t> trials)
{
    Matrix out(static_cast<Eigen::Index>(trials.size()), bank.filters.rows());
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const auto& s = scatters[trials[i]];
        if (s.scatter.rows() != bank.filters.cols())
            throw Error(Errc::Layout, "trial statistics do not match the filter bank");
        for (Eigen::Index f = 0; f < bank.filters.rows(); ++f) {
            const Vector w = bank.filters.row(f).transpose();
            const double var = w.dot(s.scatter * w) / s.n_samples;
            out(static_cast<Eigen::Index>(i), f) = std::log(std::max(var, 0.0) + 1e-12);
        }
    }
    return out;
}

void write_patterns_csv(const std::string& path, const SpatialFilterBank& bank, const std::vector<ChannelInfo>& channels)
{
    std::ofstream out(path);
    if (!out)
        throw Error(Errc::Io, "cannot write " + path);
    out.precision(10);
    out << "channel,x,y";
    // columns follow the mutual-information order
    for (auto f : bank.mi_order)
        out << ",filter_" << f << "_class_" << bank.filter_class[f];
    out << '\n';
    for (std::size_t ch = 0; ch < bank.channel_labels.size(); ++ch) {
        double x = 0.0, y = 0.0;
        for (const auto& info : channels) {
            if (info.label == bank.channel_labels[ch] && info.position) {
                x = info.position->x;
                y = info.position->y;
            }
        }
        out << bank.channel_labels[ch] << ',' << x << ',' << y;
        for (auto f : bank.mi_order)
            out << ',' << bank.patterns(static_cast<Eigen::Index>(ch), static_cast<Eigen::Index>(f));
        out << '\n';
    }
}

}  // namespace mbci
