#include "mbci/ica.hpp"

#include "mbci/error.hpp"
#include "mbci/random.hpp"

#include <algorithm>
#include <cmath>

namespace mbci {

namespace {

constexpr Eigen::Index kBlock = 65536;

Matrix symmetric_decorrelation(const Matrix& w)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(w * w.transpose());
    const Vector inv_sqrt = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose() * w;
}

std::vector<Eigen::Index> fit_rows(const std::vector<ChannelInfo>& channels, std::vector<std::string>& labels)
{
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        if (channels[i].kind == ChannelKind::EEG) {
            rows.push_back(static_cast<Eigen::Index>(i));
            labels.push_back(channels[i].label);
        }
    }
    return rows;
}

std::vector<Eigen::Index> layout_rows(const IcaDecomposition& ica, const Recording& recording)
{
    std::vector<Eigen::Index> rows;
    for (const auto& label : ica.channel_labels) {
        auto idx = recording.find(label);
        if (!idx)
            throw Error(Errc::Layout, "recording lacks fitted channel '" + label + "'");
        rows.push_back(static_cast<Eigen::Index>(*idx));
    }
    return rows;
}

}  // namespace

Matrix IcaDecomposition::sources(const Matrix& data) const
{
    return unmixing * (data.colwise() - mean);
}

IcaDecomposition fastica_fit(const Matrix& data, std::vector<std::string> channel_labels,
                             const IcaOptions& options)
{
    const Eigen::Index n_ch = data.rows();
    const Eigen::Index n_total = data.cols();
    const auto n_comp = static_cast<Eigen::Index>(options.n_components ? options.n_components
                                                                       : static_cast<std::size_t>(n_ch));
    if (n_comp > n_ch)
        throw Error(Errc::InvalidRequest, "n_components exceeds the channel count");
    if (n_comp < 1 || n_total < 2 * n_ch)
        throw Error(Errc::InsufficientData, "not enough samples for ICA");
    if (static_cast<Eigen::Index>(channel_labels.size()) != n_ch)
        throw Error(Errc::Layout, "channel labels do not match data rows");

    Eigen::Index stride = 1;
    if (options.max_fit_samples && static_cast<std::size_t>(n_total) > options.max_fit_samples)
        stride = (n_total + static_cast<Eigen::Index>(options.max_fit_samples) - 1) /
                 static_cast<Eigen::Index>(options.max_fit_samples);
    const Eigen::Index n = (n_total + stride - 1) / stride;

    Matrix x(n_ch, n);
    for (Eigen::Index j = 0; j < n; ++j)
        x.col(j) = data.col(j * stride);
    const Vector mean = x.rowwise().mean();
    x.colwise() -= mean;

    // PCA whitening
    const Matrix cov = (x * x.transpose()) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Matrix> pca(cov);
    if (pca.info() != Eigen::Success)
        throw Error(Errc::Numerical, "covariance eigendecomposition failed");
    const Vector evals = pca.eigenvalues().reverse();
    const Matrix evecs = pca.eigenvectors().rowwise().reverse();
    if (!(evals(n_comp - 1) > 1e-12 * evals(0)))
        throw Error(Errc::Numerical, "data rank is below the requested number of components");
    const Vector d = evals.head(n_comp);
    const Matrix e = evecs.leftCols(n_comp);
    const Matrix whitener = d.cwiseSqrt().cwiseInverse().asDiagonal() * e.transpose();
    const Matrix z = whitener * x;
    x.resize(0, 0);

    Rng rng(options.seed);
    Matrix w(n_comp, n_comp);
    for (Eigen::Index i = 0; i < n_comp; ++i)
        for (Eigen::Index j = 0; j < n_comp; ++j)
            w(i, j) = rng.normal();
    w = symmetric_decorrelation(w);

    const double inv_n = 1.0 / static_cast<double>(n);
    bool converged = false;
    int iter = 0;
    Matrix g(n_comp, n);
    for (iter = 1; iter <= options.max_iterations; ++iter) {
        g.noalias() = w * z;
        Vector g_prime_mean(n_comp);
        for (Eigen::Index i = 0; i < n_comp; ++i) {
            double acc = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                const double t = std::tanh(g(i, j));
                g(i, j) = t;
                acc += 1.0 - t * t;
            }
            g_prime_mean(i) = acc * inv_n;
        }
        Matrix w_new = (g * z.transpose()) * inv_n - g_prime_mean.asDiagonal() * w;
        w_new = symmetric_decorrelation(w_new);
        const double change = ((w_new * w.transpose()).diagonal().cwiseAbs().array() - 1.0).abs().maxCoeff();
        w = std::move(w_new);
        if (change < options.tolerance) {
            converged = true;
            break;
        }
    }

    IcaDecomposition ica;
    ica.rotation = w;
    ica.whitener = whitener;
    ica.unmixing = w * whitener;
    ica.mixing = e * d.cwiseSqrt().asDiagonal() * w.transpose();
    ica.mean = mean;
    ica.channel_labels = std::move(channel_labels);
    ica.converged = converged;
    ica.iterations = std::min(iter, options.max_iterations);
    ica.fit_samples = static_cast<std::size_t>(n);
    return ica;
}

IcaDecomposition fastica_fit(const Recording& recording, const IcaOptions& options)
{
    std::vector<std::string> labels;
    const auto rows = fit_rows(recording.channels, labels);
    if (rows.empty())
        throw Error(Errc::Layout, "recording has no EEG channels");
    if (options.n_components > rows.size())
        throw Error(Errc::InvalidRequest, "n_components exceeds the channel count");

    // decimate while gathering so the full EEG block is never copied
    IcaOptions opts = options;
    const auto n_total = static_cast<Eigen::Index>(recording.n_samples());
    Eigen::Index stride = 1;
    if (options.max_fit_samples && static_cast<std::size_t>(n_total) > options.max_fit_samples)
        stride = (n_total + static_cast<Eigen::Index>(options.max_fit_samples) - 1) /
                 static_cast<Eigen::Index>(options.max_fit_samples);
    const Eigen::Index n = (n_total + stride - 1) / stride;
    Matrix x(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (Eigen::Index j = 0; j < n; ++j)
            x(static_cast<Eigen::Index>(r), j) = recording.data(rows[r], j * stride);
    opts.max_fit_samples = 0;
    auto ica = fastica_fit(x, std::move(labels), opts);
    ica.fitted_on = "recording";
    return ica;
}

IcaDecomposition fastica_fit(const Epochs& epochs, const IcaOptions& options)
{
    std::vector<std::string> labels;
    const auto rows = fit_rows(epochs.channels, labels);
    if (rows.empty() || epochs.n_trials() == 0)
        throw Error(Errc::InsufficientData, "no EEG epochs to fit");
    const auto len = static_cast<Eigen::Index>(epochs.n_samples());
    Matrix x(static_cast<Eigen::Index>(rows.size()), len * static_cast<Eigen::Index>(epochs.n_trials()));
    for (std::size_t t = 0; t < epochs.n_trials(); ++t)
        for (std::size_t r = 0; r < rows.size(); ++r)
            x.row(static_cast<Eigen::Index>(r)).segment(static_cast<Eigen::Index>(t) * len, len) =
                epochs.data[t].row(rows[r]);
    auto ica = fastica_fit(x, std::move(labels), options);
    ica.fitted_on = "epochs";
    return ica;
}

Matrix ica_eog_correlations(const IcaDecomposition& ica, const Recording& recording,
                            const std::vector<std::string>& eog_labels)
{
    std::vector<Eigen::Index> eog_rows;
    for (const auto& label : eog_labels) {
        auto idx = recording.find(label);
        if (!idx)
            throw Error(Errc::CriterionUnavailable, "EOG channel '" + label + "' not present");
        eog_rows.push_back(static_cast<Eigen::Index>(*idx));
    }
    if (eog_rows.empty())
        throw Error(Errc::CriterionUnavailable, "no EOG channels given");
    const auto rows = layout_rows(ica, recording);

    const Eigen::Index nc = ica.unmixing.rows();
    const auto ne = static_cast<Eigen::Index>(eog_rows.size());
    const Eigen::Index n = recording.data.cols();
    Vector s_sum = Vector::Zero(nc), s_sq = Vector::Zero(nc);
    Vector e_sum = Vector::Zero(ne), e_sq = Vector::Zero(ne);
    Matrix cross = Matrix::Zero(nc, ne);
    Matrix x(static_cast<Eigen::Index>(rows.size()), kBlock);
    Matrix e(ne, kBlock);
    for (Eigen::Index start = 0; start < n; start += kBlock) {
        const Eigen::Index len = std::min(kBlock, n - start);
        x.resize(static_cast<Eigen::Index>(rows.size()), len);
        e.resize(ne, len);
        for (std::size_t r = 0; r < rows.size(); ++r)
            x.row(static_cast<Eigen::Index>(r)) = recording.data.row(rows[r]).segment(start, len);
        for (Eigen::Index r = 0; r < ne; ++r)
            e.row(r) = recording.data.row(eog_rows[static_cast<std::size_t>(r)]).segment(start, len);
        const Matrix s = ica.unmixing * (x.colwise() - ica.mean);
        s_sum += s.rowwise().sum();
        s_sq += s.array().square().rowwise().sum().matrix();
        e_sum += e.rowwise().sum();
        e_sq += e.array().square().rowwise().sum().matrix();
        cross.noalias() += s * e.transpose();
    }
    const double dn = static_cast<double>(n);
    Matrix r(nc, ne);
    for (Eigen::Index i = 0; i < nc; ++i) {
        for (Eigen::Index j = 0; j < ne; ++j) {
            const double cov = cross(i, j) - s_sum(i) * e_sum(j) / dn;
            const double vs = s_sq(i) - s_sum(i) * s_sum(i) / dn;
            const double ve = e_sq(j) - e_sum(j) * e_sum(j) / dn;
            r(i, j) = (vs > 0.0 && ve > 0.0) ? std::abs(cov / std::sqrt(vs * ve)) : 0.0;
        }
    }
    return r;
}

IcaDecomposition ica_mark_artifacts(IcaDecomposition ica, const Recording& recording,
                                    const std::vector<std::string>& eog_labels, double threshold)
{
    const Matrix r = ica_eog_correlations(ica, recording, eog_labels);
    ica.rejected.clear();
    for (Eigen::Index i = 0; i < r.rows(); ++i)
        if (r.row(i).maxCoeff() > threshold)
            ica.rejected.push_back(static_cast<std::size_t>(i));
    return ica;
}

void ica_apply_inplace(const IcaDecomposition& ica, Recording& recording)
{
    const auto rows = layout_rows(ica, recording);
    for (auto c : ica.rejected)
        if (c >= ica.n_components())
            throw Error(Errc::InvalidRequest, "rejected component index out of range");
    if (ica.rejected.empty())
        return;

    const auto nr = static_cast<Eigen::Index>(ica.rejected.size());
    Matrix a_rej(ica.mixing.rows(), nr), u_rej(nr, ica.unmixing.cols());
    for (Eigen::Index k = 0; k < nr; ++k) {
        const auto c = static_cast<Eigen::Index>(ica.rejected[static_cast<std::size_t>(k)]);
        a_rej.col(k) = ica.mixing.col(c);
        u_rej.row(k) = ica.unmixing.row(c);
    }
    const Matrix projector = a_rej * u_rej;
    const Eigen::Index n = recording.data.cols();
    Matrix x(static_cast<Eigen::Index>(rows.size()), kBlock);
    for (Eigen::Index start = 0; start < n; start += kBlock) {
        const Eigen::Index len = std::min(kBlock, n - start);
        x.resize(static_cast<Eigen::Index>(rows.size()), len);
        for (std::size_t r = 0; r < rows.size(); ++r)
            x.row(static_cast<Eigen::Index>(r)) = recording.data.row(rows[r]).segment(start, len);
        const Matrix removed = projector * (x.colwise() - ica.mean);
        for (std::size_t r = 0; r < rows.size(); ++r)
            recording.data.row(rows[r]).segment(start, len) -= removed.row(static_cast<Eigen::Index>(r));
    }
}

Recording ica_apply(const IcaDecomposition& ica, const Recording& recording)
{
    Recording out = recording;
    ica_apply_inplace(ica, out);
    return out;
}

}  // namespace mbci
