#pragma once

// Test-only brute-force oracles, independent of the library's recovery path.

#include <algorithm>
#include <random>

#include <Eigen/Dense>

namespace semac::testing {

inline Eigen::MatrixXcd random_unit_spectrum_psd(int q, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXcd a(q, q);
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) a(i, j) = std::complex<double>(g(rng), g(rng));
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd qmat = qr.householderQ();
    Eigen::VectorXd vals(q);
    for (int i = 0; i < q; ++i) vals[i] = u(rng);
    return qmat * vals.asDiagonal() * qmat.adjoint();
}

inline double frobenius_objective(const Eigen::MatrixXcd& w, const Eigen::MatrixXcd& x) {
    return (w - x * x.adjoint()).squaredNorm();
}

inline void project_columns(Eigen::MatrixXcd& x) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double n = x.col(c).norm();
        if (n > 1.0) x.col(c) /= n;
    }
}

// Projected gradient descent on ||W - X X^H||_F^2 over column-capped X,
// with backtracking line search. Returns the attained objective.
inline double projected_gradient_run(const Eigen::MatrixXcd& w, Eigen::MatrixXcd x,
                                     int iters = 4000) {
    project_columns(x);
    double f = frobenius_objective(w, x);
    double step = 0.25 / std::max(1.0, w.norm());
    for (int it = 0; it < iters; ++it) {
        Eigen::MatrixXcd grad = -4.0 * (w - x * x.adjoint()) * x;
        double gn = grad.norm();
        if (gn < 1e-13) break;
        bool moved = false;
        double s = step;
        for (int bt = 0; bt < 40; ++bt) {
            Eigen::MatrixXcd xt = x - s * grad;
            project_columns(xt);
            const double ft = frobenius_objective(w, xt);
            if (ft < f - 1e-16) {
                x = xt;
                f = ft;
                step = s * 1.3;
                moved = true;
                break;
            }
            s *= 0.5;
        }
        if (!moved) break;
    }
    return f;
}

// Multi-start oracle: random starts plus a spectral start.
inline double projected_gradient_oracle(const Eigen::MatrixXcd& w, int l, std::mt19937_64& rng,
                                        int restarts = 8) {
    const int q = static_cast<int>(w.rows());
    std::normal_distribution<double> g;
    double best = std::numeric_limits<double>::infinity();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w);
    Eigen::MatrixXcd xs = Eigen::MatrixXcd::Zero(q, l);
    for (int i = 0; i < l && i < q; ++i) {
        const double lam = std::max(0.0, es.eigenvalues()[q - 1 - i]);
        xs.col(i) = std::sqrt(std::min(lam, 1.0)) * es.eigenvectors().col(q - 1 - i);
    }
    best = std::min(best, projected_gradient_run(w, xs));

    for (int r = 0; r < restarts; ++r) {
        Eigen::MatrixXcd x0(q, l);
        for (int i = 0; i < q; ++i) {
            for (int j = 0; j < l; ++j) x0(i, j) = 0.7 * std::complex<double>(g(rng), g(rng));
        }
        best = std::min(best, projected_gradient_run(w, x0));
    }
    return best;
}

inline double best_of_random_candidates(const Eigen::MatrixXcd& w, int l, int count,
                                        std::mt19937_64& rng) {
    const int q = static_cast<int>(w.rows());
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < count; ++c) {
        Eigen::MatrixXcd x(q, l);
        for (int i = 0; i < q; ++i) {
            for (int j = 0; j < l; ++j) x(i, j) = std::complex<double>(g(rng), g(rng));
        }
        for (int j = 0; j < l; ++j) {
            const double n = x.col(j).norm();
            if (n > 0) x.col(j) *= u(rng) / n;  // random radius inside the cap
        }
        best = std::min(best, frobenius_objective(w, x));
    }
    return best;
}

}  // namespace semac::testing
