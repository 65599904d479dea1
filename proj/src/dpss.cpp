#include "mbci/dpss.hpp"

#include "mbci/error.hpp"

#include <cmath>
#include <numbers>

namespace mbci {

double dpss_concentration(const Eigen::Ref<const Vector>& taper, double nw)
{
    const Eigen::Index n = taper.size();
    const double w = nw / static_cast<double>(n);
    double lambda = 2.0 * w * taper.squaredNorm();
    for (Eigen::Index d = 1; d < n; ++d) {
        const double kernel = std::sin(2.0 * std::numbers::pi * w * static_cast<double>(d)) /
                              (std::numbers::pi * static_cast<double>(d));
        const double acf = taper.head(n - d).dot(taper.tail(n - d));
        lambda += 2.0 * kernel * acf;
    }
    return lambda;
}

DpssBasis dpss_tapers(std::size_t n_samples, double nw, std::size_t k)
{
    if (k == 0 || k > n_samples)
        throw Error(Errc::InvalidRequest, "taper count must be in [1, n_samples]");
    if (!(nw > 0.0) || nw >= static_cast<double>(n_samples) / 2.0)
        throw Error(Errc::InvalidRequest, "time-half-bandwidth must be in (0, n/2)");

    const auto n = static_cast<Eigen::Index>(n_samples);
    const double w = nw / static_cast<double>(n_samples);
    Vector diag(n);
    Vector sub(std::max<Eigen::Index>(n - 1, 0));
    const double c = std::cos(2.0 * std::numbers::pi * w);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = (static_cast<double>(n - 1) - 2.0 * static_cast<double>(i)) / 2.0;
        diag(i) = h * h * c;
    }
    for (Eigen::Index i = 1; i < n; ++i)
        sub(i - 1) = static_cast<double>(i) * static_cast<double>(n - i) / 2.0;

    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw Error(Errc::Numerical, "tridiagonal eigensolver failed");

    DpssBasis basis;
    basis.nw = nw;
    basis.tapers.resize(static_cast<Eigen::Index>(k), n);
    basis.eigenvalues.resize(static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) {
        // eigenvalues come out ascending
        Vector v = solver.eigenvectors().col(n - 1 - static_cast<Eigen::Index>(j));
        v.normalize();
        double sign_ref = 0.0;
        if (j % 2 == 0) {
            sign_ref = v.sum();
        } else {
            const double floor = 1e-10 * v.cwiseAbs().maxCoeff();
            for (Eigen::Index i = 0; i < n; ++i) {
                if (std::abs(v(i)) > floor) {
                    sign_ref = v(i);
                    break;
                }
            }
        }
        if (sign_ref < 0.0)
            v = -v;
        basis.tapers.row(static_cast<Eigen::Index>(j)) = v.transpose();
        basis.eigenvalues(static_cast<Eigen::Index>(j)) = dpss_concentration(v, nw);
    }
    return basis;
}

}  // namespace mbci
