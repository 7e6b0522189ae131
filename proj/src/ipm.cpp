#include "ipm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace semac::conic::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd sym(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Largest alpha with X + alpha*D >= 0, given the Cholesky factor L of X.
double max_step(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& d) {
    const Eigen::MatrixXd l = llt.matrixL();
    Eigen::MatrixXd b = l.triangularView<Eigen::Lower>().solve(d);
    b = l.triangularView<Eigen::Lower>().solve(b.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym(b), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    return lmin >= -1e-14 ? kInf : -1.0 / lmin;
}

double max_step_diag(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) {
    double a = kInf;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (dx[i] < 0.0) a = std::min(a, -x[i] / dx[i]);
    }
    return a;
}

}  // namespace

IpmResult solve_real_sdp(const RealBlockProblem& prob, const IpmOptions& opt) {
    const int nblocks = static_cast<int>(prob.dims.size());
    const int m = static_cast<int>(prob.rows.size());
    const int p = prob.diag_size;

    double nu = static_cast<double>(p);
    for (int d : prob.dims) nu += d;

    IpmResult res;
    res.X.resize(nblocks);
    res.S.resize(nblocks);

    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) b[i] = prob.rows[i].b;

    // No constraints: X = 0 is optimal whenever every C_b is PSD.
    if (m == 0) {
        for (int bi = 0; bi < nblocks; ++bi) {
            res.X[bi] = Eigen::MatrixXd::Zero(prob.dims[bi], prob.dims[bi]);
            res.S[bi] = prob.C[bi];
        }
        res.x_diag = Eigen::VectorXd::Zero(p);
        res.s_diag = prob.c_diag;
        res.y = Eigen::VectorXd::Zero(0);
        res.converged = true;
        for (int bi = 0; bi < nblocks; ++bi) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(prob.C[bi], Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() < -1e-12) res.converged = false;
        }
        if (p > 0 && prob.c_diag.minCoeff() < -1e-12) res.converged = false;
        res.rel_gap = 0.0;
        res.primal_inf = 0.0;
        res.dual_inf = 0.0;
        return res;
    }

    // Initial point scale, SDPT3-flavored.
    double xi = 10.0, eta = 10.0;
    double cnorm = p > 0 ? prob.c_diag.lpNorm<Eigen::Infinity>() : 0.0;
    for (int bi = 0; bi < nblocks; ++bi) {
        cnorm = std::max(cnorm, prob.C[bi].norm());
        xi = std::max(xi, std::sqrt(static_cast<double>(prob.dims[bi])));
    }
    for (int i = 0; i < m; ++i) {
        double anorm = 0.0;
        for (const auto& [bi, mat] : prob.rows[i].mats) anorm += mat.squaredNorm();
        for (const auto& [di, v] : prob.rows[i].diag) anorm += v * v;
        anorm = std::sqrt(anorm);
        xi = std::max(xi, std::abs(b[i]) / (1.0 + anorm));
        eta = std::max(eta, anorm);
    }
    eta = std::max(eta, cnorm);
    eta = std::min(eta, 1e4);
    xi = std::min(xi, 1e6);

    for (int bi = 0; bi < nblocks; ++bi) {
        res.X[bi] = xi * Eigen::MatrixXd::Identity(prob.dims[bi], prob.dims[bi]);
        res.S[bi] = eta * Eigen::MatrixXd::Identity(prob.dims[bi], prob.dims[bi]);
    }
    res.x_diag = Eigen::VectorXd::Constant(p, xi);
    res.s_diag = Eigen::VectorXd::Constant(p, eta);
    res.y = Eigen::VectorXd::Zero(m);

    auto apply_A = [&](const std::vector<Eigen::MatrixXd>& xb, const Eigen::VectorXd& xd) {
        Eigen::VectorXd out(m);
        for (int i = 0; i < m; ++i) {
            double v = 0.0;
            for (const auto& [bi, mat] : prob.rows[i].mats) v += mat.cwiseProduct(xb[bi]).sum();
            for (const auto& [di, c] : prob.rows[i].diag) v += c * xd[di];
            out[i] = v;
        }
        return out;
    };

    const double bnorm = 1.0 + b.lpNorm<Eigen::Infinity>();
    const double cnorm1 = 1.0 + cnorm;

    std::vector<Eigen::MatrixXd> Rd(nblocks), Sinv(nblocks), dXaff(nblocks), dSaff(nblocks),
        dX(nblocks), dS(nblocks);
    std::vector<Eigen::LLT<Eigen::MatrixXd>> lltX(nblocks), lltS(nblocks);
    Eigen::VectorXd rd_diag(p), dxa_diag(p), dsa_diag(p), dx_diag(p), ds_diag(p);

    int stall = 0;
    for (int iter = 0; iter < opt.max_iter; ++iter) {
        res.iterations = iter;

        // Residuals and objective values.
        Eigen::VectorXd rp = b - apply_A(res.X, res.x_diag);
        double pobj = p > 0 ? prob.c_diag.dot(res.x_diag) : 0.0;
        for (int bi = 0; bi < nblocks; ++bi) pobj += prob.C[bi].cwiseProduct(res.X[bi]).sum();
        double dobj = b.dot(res.y);
        double gap_inner = p > 0 ? res.x_diag.dot(res.s_diag) : 0.0;
        for (int bi = 0; bi < nblocks; ++bi)
            gap_inner += res.X[bi].cwiseProduct(res.S[bi]).sum();
        const double mu = gap_inner / nu;

        double dual_inf = 0.0;
        for (int bi = 0; bi < nblocks; ++bi) {
            Rd[bi] = prob.C[bi] - res.S[bi];
            for (int i = 0; i < m; ++i) {
                for (const auto& [bj, mat] : prob.rows[i].mats) {
                    if (bj == bi) Rd[bi].noalias() -= res.y[i] * mat;
                }
            }
            dual_inf = std::max(dual_inf, Rd[bi].lpNorm<Eigen::Infinity>());
        }
        if (p > 0) {
            rd_diag = prob.c_diag - res.s_diag;
            for (int i = 0; i < m; ++i) {
                for (const auto& [di, c] : prob.rows[i].diag) rd_diag[di] -= res.y[i] * c;
            }
            dual_inf = std::max(dual_inf, rd_diag.lpNorm<Eigen::Infinity>());
        }

        res.pobj = pobj;
        res.dobj = dobj;
        res.mu = mu;
        res.primal_inf = rp.lpNorm<Eigen::Infinity>() / bnorm;
        res.dual_inf = dual_inf / cnorm1;
        res.rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

        if (opt.verbose) {
            std::printf("it %2d  mu %.2e  pinf %.2e  dinf %.2e  gap %.2e  pobj % .8e\n", iter, mu,
                        res.primal_inf, res.dual_inf, res.rel_gap, pobj);
        }

        if (res.primal_inf <= opt.tol_feas && res.dual_inf <= opt.tol_feas &&
            (res.rel_gap <= opt.tol_gap || mu / (1.0 + std::abs(pobj)) <= opt.tol_gap)) {
            res.converged = true;
            return res;
        }

        // Factor current iterates.
        bool fact_ok = true;
        for (int bi = 0; bi < nblocks; ++bi) {
            lltX[bi].compute(res.X[bi]);
            lltS[bi].compute(res.S[bi]);
            if (lltX[bi].info() != Eigen::Success || lltS[bi].info() != Eigen::Success) {
                fact_ok = false;
                break;
            }
            Sinv[bi] = lltS[bi].solve(Eigen::MatrixXd::Identity(prob.dims[bi], prob.dims[bi]));
        }
        if (!fact_ok) break;

        // Schur complement M_ij = sum_b <A_i, X A_j Sinv> + sum_d a_i a_j x/s.
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
        for (int j = 0; j < m; ++j) {
            std::vector<std::pair<int, Eigen::MatrixXd>> Tj;
            Tj.reserve(prob.rows[j].mats.size());
            for (const auto& [bj, mat] : prob.rows[j].mats) {
                Tj.emplace_back(bj, sym(res.X[bj] * mat * Sinv[bj]));
            }
            for (int i = 0; i <= j; ++i) {
                double v = 0.0;
                for (const auto& [bi, mat] : prob.rows[i].mats) {
                    for (const auto& [bj, t] : Tj) {
                        if (bi == bj) v += mat.cwiseProduct(t).sum();
                    }
                }
                M(i, j) = v;
            }
        }
        if (p > 0) {
            for (int j = 0; j < m; ++j) {
                for (const auto& [dj, cj] : prob.rows[j].diag) {
                    const double w = res.x_diag[dj] / res.s_diag[dj];
                    for (int i = 0; i <= j; ++i) {
                        for (const auto& [di, ci] : prob.rows[i].diag) {
                            if (di == dj) M(i, j) += ci * cj * w;
                        }
                    }
                }
            }
        }
        M = M.selfadjointView<Eigen::Upper>();

        Eigen::LLT<Eigen::MatrixXd> lltM(M);
        if (lltM.info() != Eigen::Success) {
            const double reg = 1e-12 * (1.0 + M.diagonal().maxCoeff());
            M += reg * Eigen::MatrixXd::Identity(m, m);
            lltM.compute(M);
            if (lltM.info() != Eigen::Success) break;
        }

        // rhs common part: rp + A(X) + A(sym(X Rd Sinv)), plus diag analogue.
        Eigen::VectorXd h = rp;
        {
            std::vector<Eigen::MatrixXd> G(nblocks);
            for (int bi = 0; bi < nblocks; ++bi) {
                G[bi] = res.X[bi] + sym(res.X[bi] * Rd[bi] * Sinv[bi]);
            }
            Eigen::VectorXd gd;
            if (p > 0) {
                gd = res.x_diag.array() +
                     res.x_diag.array() * rd_diag.array() / res.s_diag.array();
            }
            for (int i = 0; i < m; ++i) {
                double v = 0.0;
                for (const auto& [bi, mat] : prob.rows[i].mats)
                    v += mat.cwiseProduct(G[bi]).sum();
                for (const auto& [di, c] : prob.rows[i].diag) v += c * gd[di];
                h[i] += v;
            }
        }

        // Predictor.
        Eigen::VectorXd dy = lltM.solve(h);
        for (int bi = 0; bi < nblocks; ++bi) {
            dSaff[bi] = Rd[bi];
            for (int i = 0; i < m; ++i) {
                for (const auto& [bj, mat] : prob.rows[i].mats) {
                    if (bj == bi) dSaff[bi].noalias() -= dy[i] * mat;
                }
            }
            dXaff[bi] = -res.X[bi] - sym(res.X[bi] * dSaff[bi] * Sinv[bi]);
        }
        if (p > 0) {
            dsa_diag = rd_diag;
            for (int i = 0; i < m; ++i) {
                for (const auto& [di, c] : prob.rows[i].diag) dsa_diag[di] -= dy[i] * c;
            }
            dxa_diag = -res.x_diag.array() -
                       res.x_diag.array() * dsa_diag.array() / res.s_diag.array();
        }

        double ap = 1.0, ad = 1.0;
        for (int bi = 0; bi < nblocks; ++bi) {
            ap = std::min(ap, max_step(lltX[bi], dXaff[bi]));
            ad = std::min(ad, max_step(lltS[bi], dSaff[bi]));
        }
        if (p > 0) {
            ap = std::min(ap, max_step_diag(res.x_diag, dxa_diag));
            ad = std::min(ad, max_step_diag(res.s_diag, dsa_diag));
        }

        double gap_aff = 0.0;
        for (int bi = 0; bi < nblocks; ++bi) {
            gap_aff += (res.X[bi] + ap * dXaff[bi]).cwiseProduct(res.S[bi] + ad * dSaff[bi]).sum();
        }
        if (p > 0) {
            gap_aff += (res.x_diag + ap * dxa_diag).dot(res.s_diag + ad * dsa_diag);
        }
        const double mu_aff = gap_aff / nu;
        double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
        sigma = std::min(1.0, sigma);
        const double tau = sigma * mu;

        // Corrector: add tau*Sinv - sym(dXaff dSaff Sinv) terms to the rhs.
        Eigen::VectorXd h2 = h;
        {
            std::vector<Eigen::MatrixXd> G(nblocks);
            for (int bi = 0; bi < nblocks; ++bi) {
                G[bi] = tau * Sinv[bi] - sym(dXaff[bi] * dSaff[bi] * Sinv[bi]);
            }
            Eigen::VectorXd gd;
            if (p > 0) {
                gd = (tau - dxa_diag.array() * dsa_diag.array()) / res.s_diag.array();
            }
            for (int i = 0; i < m; ++i) {
                double v = 0.0;
                for (const auto& [bi, mat] : prob.rows[i].mats)
                    v += mat.cwiseProduct(G[bi]).sum();
                for (const auto& [di, c] : prob.rows[i].diag) v += c * gd[di];
                h2[i] -= v;
            }
        }
        // Combined direction from the corrected right-hand side.
        dy = lltM.solve(h2);
        for (int bi = 0; bi < nblocks; ++bi) {
            dS[bi] = Rd[bi];
            for (int i = 0; i < m; ++i) {
                for (const auto& [bj, mat] : prob.rows[i].mats) {
                    if (bj == bi) dS[bi].noalias() -= dy[i] * mat;
                }
            }
            dX[bi] = tau * Sinv[bi] - res.X[bi] - sym(dXaff[bi] * dSaff[bi] * Sinv[bi]) -
                     sym(res.X[bi] * dS[bi] * Sinv[bi]);
        }
        if (p > 0) {
            ds_diag = rd_diag;
            for (int i = 0; i < m; ++i) {
                for (const auto& [di, c] : prob.rows[i].diag) ds_diag[di] -= dy[i] * c;
            }
            dx_diag = (tau - dxa_diag.array() * dsa_diag.array()).matrix().cwiseQuotient(res.s_diag) -
                      res.x_diag -
                      (res.x_diag.array() * ds_diag.array() / res.s_diag.array()).matrix();
        }

        ap = kInf;
        ad = kInf;
        for (int bi = 0; bi < nblocks; ++bi) {
            ap = std::min(ap, max_step(lltX[bi], dX[bi]));
            ad = std::min(ad, max_step(lltS[bi], dS[bi]));
        }
        if (p > 0) {
            ap = std::min(ap, max_step_diag(res.x_diag, dx_diag));
            ad = std::min(ad, max_step_diag(res.s_diag, ds_diag));
        }
        const double frac = std::min(0.998, opt.step_frac + 0.01 * (iter > 20));
        ap = std::min(1.0, frac * ap);
        ad = std::min(1.0, frac * ad);

        if (ap < 1e-8 && ad < 1e-8) {
            if (++stall >= 2) break;
        } else {
            stall = 0;
        }

        for (int bi = 0; bi < nblocks; ++bi) {
            res.X[bi] = sym(res.X[bi] + ap * dX[bi]);
            res.S[bi] = sym(res.S[bi] + ad * dS[bi]);
        }
        if (p > 0) {
            res.x_diag += ap * dx_diag;
            res.s_diag += ad * ds_diag;
        }
        res.y += ad * dy;
    }

    res.converged = false;
    return res;
}

}  // namespace semac::conic::detail
