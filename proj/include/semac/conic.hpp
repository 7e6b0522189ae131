#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semac/errors.hpp"

namespace semac::conic {

/// One Hermitian coefficient matrix attached to a matrix variable.
struct MatrixTerm {
    int var = 0;
    Eigen::MatrixXcd coeff;
};

enum class Sense { Ge, Le, Eq };

/// Affine scalar constraint: sum_v <coeff_v, V_v>  (sense)  bound.
struct LinearConstraint {
    std::vector<MatrixTerm> terms;
    Sense sense = Sense::Ge;
    double bound = 0.0;
};

/// Dense conic program over Hermitian matrix variables.
///
/// Objective is minimize sum_v <C_v, V_v> (empty objective = feasibility with
/// zero objective). Variables flagged psd are cone-constrained; a variable with
/// psd=false must be 1x1 and is treated as a free real scalar.
struct ConicProgram {
    std::vector<int> dims;
    std::vector<bool> psd;
    std::vector<MatrixTerm> objective;
    std::vector<LinearConstraint> constraints;

    int add_variable(int dim, bool psd_flag = true) {
        dims.push_back(dim);
        psd.push_back(psd_flag);
        return static_cast<int>(dims.size()) - 1;
    }
    void add_objective(int var, Eigen::MatrixXcd coeff) {
        objective.push_back({var, std::move(coeff)});
    }
    void add_constraint(LinearConstraint c) { constraints.push_back(std::move(c)); }
};

struct Tolerances {
    double feas = 1e-7;
    double psd = 1e-8;
    double gap = 1e-7;
    int max_iter = 100;
};

enum class SolveStatus { Optimal, Infeasible, Inaccurate };

std::string to_string(SolveStatus s);

struct ConicSolution {
    std::vector<Eigen::MatrixXcd> values;
    double objective = 0.0;
    SolveStatus status = SolveStatus::Inaccurate;
    /// Residuals from an independent replay of the raw constraint list.
    double max_violation = 0.0;
    /// Smallest eigenvalue across PSD variables (>= -psd tol when optimal).
    double min_eigenvalue = 0.0;
    /// Relative duality gap estimate from the interior-point run.
    double gap = 0.0;
    int iterations = 0;
    std::string message;
};

/// Hermitian H -> real symmetric [[Re H, -Im H], [Im H, Re H]]. Inner products
/// satisfy <embed(A), embed(V)> = 2 <A, V> for Hermitian A, V.
Eigen::MatrixXd embed_hermitian(const Eigen::MatrixXcd& h);

/// Inverse of embed_hermitian. Averages over the embedding's structure group
/// first, so any feasible real solution maps back to a Hermitian matrix with
/// identical inner products against embedded coefficients.
Eigen::MatrixXcd extract_hermitian(const Eigen::MatrixXd& s);

/// A complex program rewritten over real symmetric variables. Bounds and
/// objective pick up the embedding's factor 2; `scale` records it.
struct EmbeddedProgram {
    ConicProgram program;        // all coefficient matrices real
    std::vector<int> orig_dims;  // per variable, pre-embedding
    double scale = 2.0;
};

EmbeddedProgram embed_complex(const ConicProgram& program);

/// Maps a solution of the embedded program back onto the original variables.
std::vector<Eigen::MatrixXcd> extract_solution(const EmbeddedProgram& embedded,
                                               const std::vector<Eigen::MatrixXcd>& values);

/// Solves the program with a dense primal-dual interior-point method after
/// Hermitian->real embedding. Residuals in the returned solution come from an
/// independent re-check against the original constraint list, not from solver
/// internals. Infeasible problems are certified through a max-slack phase-1
/// solve and report the best attainable violation.
ConicSolution solve(const ConicProgram& program, const Tolerances& tol = {});

}  // namespace semac::conic
