#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semac/errors.hpp"

namespace semac {

/// Shared input alphabet: Q = 2^b distinct real values, K transmitting nodes.
struct InputDomain {
    int Q = 0;
    int bits = 0;
    int K = 0;
    std::vector<double> values;

    /// Builds a domain from the value list; Q must be a power of two >= 2.
    static InputDomain make(int K, std::vector<double> values);

    int N() const { return Q * K; }
};

enum class FunctionKind { Sum, Product, Max, Custom };

FunctionKind function_kind_from_string(const std::string& s);
std::string to_string(FunctionKind k);

/// The function the computation point wants, together with its range statistics.
///
/// Sum/product/max depend only on the input histogram; a custom function is a
/// dense table over index tuples in row-major node order (node 0 slowest).
class TargetFunction {
  public:
    static TargetFunction make(FunctionKind kind, const InputDomain& domain,
                               std::size_t cap = kDefaultCombinationCap);
    static TargetFunction make_custom(const InputDomain& domain, std::vector<double> table,
                                      std::size_t cap = kDefaultCombinationCap);

    FunctionKind kind() const { return kind_; }
    bool symmetric() const { return kind_ != FunctionKind::Custom; }

    double evaluate(const InputDomain& domain, std::span<const int> indices) const;
    double evaluate_histogram(const InputDomain& domain, std::span<const int> histogram) const;

    /// Number of distinct outputs over the whole domain.
    int M() const { return M_; }
    double f_min() const { return f_min_; }
    double f_max() const { return f_max_; }

    static constexpr std::size_t kDefaultCombinationCap = 1'000'000;

  private:
    FunctionKind kind_ = FunctionKind::Sum;
    std::vector<double> table_;  // custom only, size Q^K
    int M_ = 0;
    double f_min_ = 0.0;
    double f_max_ = 0.0;
};

/// One input combination: per-node alphabet indices, canonical histogram and output.
/// In symmetric-shared mode `indices` holds the sorted canonical representative.
struct Combination {
    std::vector<int> indices;    // length K, entries in [0, Q)
    std::vector<int> histogram;  // length Q, sums to K
    double output = 0.0;
};

enum class EnumerationMode { Full, SymmetricShared };

EnumerationMode enumeration_mode_from_string(const std::string& s);
std::string to_string(EnumerationMode m);

/// Enumerates input combinations.
///
/// Full mode yields all Q^K tuples in row-major order; symmetric-shared mode
/// yields one canonical combination per histogram, C(K+Q-1, Q-1) of them.
/// Throws CombinatorialOverflowError beyond `cap`.
std::vector<Combination> enumerate_combinations(const InputDomain& domain,
                                                const TargetFunction& function,
                                                EnumerationMode mode,
                                                std::size_t cap = TargetFunction::kDefaultCombinationCap);

/// One-hot selector a in {0,1}^N: K blocks of length Q, block k marks indices[k].
Eigen::VectorXd selector_vector(const Combination& combination, const InputDomain& domain);

/// Unordered pair of combinations whose outputs differ, with its required
/// squared separation delta_f = epsilon * |f_i - f_j|.
struct ConstraintPair {
    int i = 0;
    int j = 0;
    double delta_f = 0.0;
};

struct ConstraintSet {
    double epsilon = 1.0;
    EnumerationMode mode = EnumerationMode::Full;
    std::vector<ConstraintPair> pairs;

    bool empty() const { return pairs.empty(); }
};

/// Default separation scale: 1 / max|f_i - f_j|, so the largest required
/// squared distance is exactly 1. Returns 1.0 for constant functions.
double default_epsilon(const std::vector<Combination>& combinations);

/// Builds every unordered pair with distinct outputs. Pairs with equal outputs
/// are vacuous and omitted; a constant function yields an empty set.
ConstraintSet build_constraint_set(const std::vector<Combination>& combinations,
                                   EnumerationMode mode, double epsilon);

/// A group of constraint pairs sharing one selector difference d = a_i - a_j
/// (or histogram difference in symmetric-shared mode). All pairs in a group
/// impose the same quadratic form, so only the largest delta_f binds.
struct SeparationClass {
    Eigen::VectorXd d;    // canonical sign: first nonzero entry positive
    double delta_f = 0.0; // epsilon * max |f_i - f_j| over the group
    int rep_i = 0;        // pair attaining the max, for diagnostics
    int rep_j = 0;
};

/// Collapses a pair list into separation classes. `dimension` is N in full
/// mode and Q in symmetric-shared mode.
std::vector<SeparationClass> build_separation_classes(const std::vector<Combination>& combinations,
                                                      const ConstraintSet& constraints,
                                                      const InputDomain& domain);

}  // namespace semac
