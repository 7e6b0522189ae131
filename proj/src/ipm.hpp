#pragma once

// Internal dense interior-point solver for block-structured real SDPs in
// standard equality form:
//
//   min  sum_b <C_b, X_b> + c_diag . x_diag
//   s.t. sum_b <A_ib, X_b> + a_i . x_diag = b_i,   X_b >= 0,  x_diag >= 0
//
// Dense symmetric blocks plus one nonnegative diagonal block holding slack and
// split-scalar entries. Mehrotra predictor-corrector with the HKM direction.

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace semac::conic::detail {

struct RealBlockProblem {
    std::vector<int> dims;
    std::vector<Eigen::MatrixXd> C;  // per block, symmetric
    int diag_size = 0;
    Eigen::VectorXd c_diag;  // size diag_size

    struct Row {
        std::vector<std::pair<int, Eigen::MatrixXd>> mats;  // (block, symmetric coeff)
        std::vector<std::pair<int, double>> diag;           // (diag index, coeff)
        double b = 0.0;
    };
    std::vector<Row> rows;
};

struct IpmOptions {
    int max_iter = 100;
    double tol_gap = 5e-10;
    double tol_feas = 5e-10;
    double step_frac = 0.98;
    bool verbose = false;
};

struct IpmResult {
    std::vector<Eigen::MatrixXd> X;
    std::vector<Eigen::MatrixXd> S;
    Eigen::VectorXd x_diag, s_diag;
    Eigen::VectorXd y;
    double pobj = 0.0, dobj = 0.0;
    double rel_gap = 1.0, primal_inf = 1.0, dual_inf = 1.0, mu = 1.0;
    int iterations = 0;
    bool converged = false;
};

IpmResult solve_real_sdp(const RealBlockProblem& problem, const IpmOptions& options = {});

}  // namespace semac::conic::detail
