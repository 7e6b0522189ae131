#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "semac/conic.hpp"
#include "semac/funcspace.hpp"

namespace semac {

/// A fixed per-slot constellation shared by all nodes (hardware-given, e.g.
/// QAM). Each node's Q-point block is normalized to unit mean symbol energy.
struct FixedModulation {
    std::string name;
    int Q = 0;
    int L = 0;
    Eigen::MatrixXcd pattern;  // Q x L, column l = constellation of slot l

    /// Square/rectangular QAM grid in row-major index order.
    static FixedModulation qam(int Q, int L);
    /// Parses "bpsk", "qpsk", "4-qam", "16-qam", ...
    static FixedModulation from_name(const std::string& name, int L);

    /// Node-major stacked slot pattern x~_l in C^{QK}.
    Eigen::VectorXcd stacked_slot(int slot, int K) const;
};

/// B_l = (diag(h_l) (x) I_Q) diag(x~_l) (I_K (x) 1_Q): column k holds node k's
/// faded constellation block, zeros elsewhere.
Eigen::MatrixXcd build_B(const Eigen::VectorXcd& h_slot, const Eigen::VectorXcd& x_slot, int Q,
                         int K);

/// C_l^{ij} = B^H (a_i - a_j)(a_i - a_j)^T B: K x K Hermitian, rank <= 1.
Eigen::MatrixXcd build_C(const Eigen::MatrixXcd& B, const Eigen::VectorXd& a_i,
                         const Eigen::VectorXd& a_j);

/// Separation constraints for the power problem, grouped by the per-node
/// symbol-difference tuple. Two combination pairs with the same per-node
/// differences impose the same quadratic form for every channel, so each
/// group keeps only its largest delta_f. Storage is digit-compressed: class g
/// has per-node difference ids digits[g*K + k] into `diffs`.
class PowerClassSet {
  public:
    int K = 0;
    int L = 0;
    std::vector<Eigen::VectorXcd> diffs;        // id -> length-L difference tuple
    std::vector<std::pair<int, int>> rep_pair;  // id -> one (a, b) index pair with that tuple
    std::vector<std::uint16_t> digits;          // nclasses * K
    std::vector<double> delta_f;

    std::size_t size() const { return delta_f.size(); }
    /// Materializes the K x L symbol-difference matrix of class g.
    Eigen::MatrixXcd delta(std::size_t g) const;
    /// A combination-index pair belonging to class g (for diagnostics).
    std::pair<std::vector<int>, std::vector<int>> witness(std::size_t g) const;
};

/// Builds classes from an explicit constraint pair list (small instances and
/// arbitrary pair sets).
PowerClassSet build_power_classes(const std::vector<Combination>& combinations,
                                  const ConstraintSet& constraints, const InputDomain& domain,
                                  const FixedModulation& mod);

/// Builds classes for the full enumeration without materializing the pair
/// list: a parallel scan over all combination pairs accumulates the largest
/// output gap per difference tuple. Equivalent to build_constraint_set
/// followed by grouping, but runs at Q^K scale.
PowerClassSet build_power_classes_scan(const std::vector<Combination>& combinations,
                                       const InputDomain& domain, const FixedModulation& mod,
                                       double epsilon, int threads = 0);

struct PowerOptions {
    conic::Tolerances tol;
    std::size_t direct_rows = 256;
    std::size_t add_per_round = 96;
    int max_rounds = 64;
    int n_samples = 100;  // Gaussian randomization candidates
    double c_max = 1e3;   // feasibility scaling cap
    double rank_tol = 1e-8;
    int threads = 0;
};

struct PowerSdpResult {
    std::vector<Eigen::MatrixXcd> P;  // per slot, K x K Hermitian PSD
    double optimum = 0.0;             // sum of traces
    conic::SolveStatus status = conic::SolveStatus::Inaccurate;
    double max_violation = 0.0;
    double min_eigenvalue = 0.0;
    double gap = 0.0;
    std::vector<std::size_t> active;  // classes that entered the working set
};

struct PowerPlan {
    int K = 0;
    int L = 0;
    std::vector<Eigen::VectorXcd> p;  // per-slot complex power vectors
    double total_power = 0.0;
    std::vector<Eigen::MatrixXcd> lifted;  // P_l*, kept for diagnostics
    std::string method;                    // "rank1" or "randomized"
    double sdp_optimum = 0.0;
    double worst_margin = 0.0;  // min over classes of (separation - delta_f)
};

/// Per-class separation values sum_l |u_l^T p_l|^2 with u_l = h_l o delta_l.
Eigen::VectorXd power_margins(const PowerClassSet& classes, const Eigen::MatrixXcd& h,
                              const std::vector<Eigen::VectorXcd>& p);
/// Lifted analogue sum_l <P_l, C_l> - delta_f.
Eigen::VectorXd power_margins_lifted(const PowerClassSet& classes, const Eigen::MatrixXcd& h,
                                     const std::vector<Eigen::MatrixXcd>& P);

/// Minimizes sum_l Tr(P_l) subject to the summed separation constraints via
/// the conic engine with lazy constraint generation over the classes.
/// Throws InfeasibleError when a class has an identically zero form but a
/// positive delta_f (a dead channel direction), naming a witness pair.
PowerSdpResult solve_power_sdp(const PowerClassSet& classes, const Eigen::MatrixXcd& h,
                               const PowerOptions& options = {});

/// Rank-1 factorization when every P_l* is rank one (optimal up to phase);
/// otherwise Gaussian randomization with joint scaling, keeping the cheapest
/// feasible candidate. Throws RandomizationFailureError when no candidate
/// reaches feasibility within c_max.
PowerPlan recover_power(const PowerSdpResult& sdp, const PowerClassSet& classes,
                        const Eigen::MatrixXcd& h, std::mt19937_64& rng,
                        const PowerOptions& options = {});

/// solve_power_sdp + recover_power.
PowerPlan adapt_power(const PowerClassSet& classes, const Eigen::MatrixXcd& h,
                      std::mt19937_64& rng, const PowerOptions& options = {});

}  // namespace semac
