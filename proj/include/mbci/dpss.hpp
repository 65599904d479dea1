#pragma once

#include "mbci/recording.hpp"

#include <cstddef>

namespace mbci {

/// Discrete prolate spheroidal sequences.
struct DpssBasis {
    Matrix tapers;       // k x n, unit-norm rows
    Vector eigenvalues;  // concentration in [-W, W], descending
    double nw = 0.0;
};

/// First `k` Slepian tapers of length `n` with time-half-bandwidth `nw`,
/// from the symmetric tridiagonal commuting matrix. Even tapers have a
/// positive sum; odd tapers have a positive first significant sample.
DpssBasis dpss_tapers(std::size_t n_samples, double nw, std::size_t k);

/// Energy fraction of `taper` inside |f| <= nw / n (cycles/sample), using the
/// sinc-kernel quadratic form.
double dpss_concentration(const Eigen::Ref<const Vector>& taper, double nw);

}  // namespace mbci
