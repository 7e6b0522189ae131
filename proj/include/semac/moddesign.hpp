#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "semac/conic.hpp"
#include "semac/funcspace.hpp"

namespace semac {

/// Per-node Q x L modulation matrices; row q is the symbol sequence for input
/// value q, column l is the constellation pattern of slot l.
struct ModulationDesign {
    int Q = 0;
    int K = 0;
    int L = 0;
    bool shared = false;
    std::vector<Eigen::MatrixXcd> nodes;  // K matrices, all equal when shared

    /// Vertical stack [X_1; ...; X_K], N x L.
    Eigen::MatrixXcd stacked() const;
};

/// Solution of the lifted separation problem: W plays the role of X X^H.
struct LiftedSolution {
    int Q = 0;
    int K = 0;
    int L = 0;
    bool shared = false;
    Eigen::MatrixXcd W;  // Q x Q when shared, N x N otherwise
    double margin = 0.0; // optimal worst slack over all separation classes
    conic::SolveStatus status = conic::SolveStatus::Inaccurate;
    double max_violation = 0.0;
    double min_eigenvalue = 0.0;
    double gap = 0.0;

    /// Diagonal block W_k (the shared block for every k in shared mode).
    Eigen::MatrixXcd block(int k) const;
};

struct NodeSpectrum {
    Eigen::MatrixXcd u;     // orthonormal columns, descending eigenvalue order
    Eigen::VectorXd sigma;  // clipped at zero
    Eigen::VectorXd s;      // min(sqrt(sigma), 1)
    int effective_rank = 0;
};

struct SpectralFactorization {
    std::vector<NodeSpectrum> nodes;
    double rank_tol = 1e-8;
};

/// The design instance: domain, enumerated combinations and their constraints.
struct DesignProblem {
    InputDomain domain;
    std::vector<Combination> combinations;
    ConstraintSet constraints;
};

struct DesignOptions {
    conic::Tolerances tol;
    double rank_tol = 1e-8;
    double tie_tol = 1e-9;
    double merge_tol = 1e-6;
    // Lazy constraint generation: solve with at most this many active rows,
    // then pull in violated classes until the worst margin is attained.
    std::size_t direct_rows = 512;
    std::size_t add_per_round = 128;
    int max_rounds = 64;
};

/// D_ij = (a_i - a_j)(a_i - a_j)^T: rank <= 1, PSD, zero iff the selectors match.
Eigen::MatrixXd difference_outer(const Eigen::VectorXd& a_i, const Eigen::VectorXd& a_j);

/// Solves the max-margin lifted design: maximize t subject to
/// <W, D_ij> >= delta_f_ij + t, per-node trace caps Tr(W_k) <= L and W PSD.
/// A negative margin means no modulation with these resources separates every
/// output pair at scale epsilon; the solution is still returned and the
/// decoder's merging path handles the overlaps.
LiftedSolution solve_lifted_design(const DesignProblem& problem, int L,
                                   const DesignOptions& options = {});

/// Closed-form rank-constrained recovery: X_k = sum_i s_ki u_ki e_i^T over the
/// leading min(L, rank W_k) eigenpairs, with s = min(sqrt(sigma), 1).
/// Eigenvalue ties and phases are canonicalized so results are reproducible.
std::pair<ModulationDesign, SpectralFactorization> recover_modulation(
    const LiftedSolution& lifted, int L, const DesignOptions& options = {});

struct SeparationReport {
    struct Entry {
        int i = 0;
        int j = 0;
        double delta_f = 0.0;
        double margin = 0.0;  // ||(a_i - a_j)^T X||^2 - delta_f
    };
    std::vector<Entry> violations;  // margin below -merge_tol
    double worst_margin = 0.0;
    std::size_t classes_checked = 0;

    bool clean() const { return violations.empty(); }
};

/// Replays every separation class against the recovered design.
SeparationReport verify_separation(const ModulationDesign& design, const DesignProblem& problem,
                                   double merge_tol = 1e-9);

struct DesignResult {
    ModulationDesign design;
    LiftedSolution lifted;
    SpectralFactorization spectrum;
    SeparationReport report;
    double epsilon = 0.0;
};

/// Full pipeline: lifted solve, closed-form recovery, cross-node phase
/// alignment against the global factor (full mode), separation verification.
DesignResult design_modulation(const DesignProblem& problem, int L,
                               const DesignOptions& options = {});

}  // namespace semac
