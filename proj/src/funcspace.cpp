#include "semac/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

namespace semac {

namespace {

bool is_power_of_two(int q) { return q >= 2 && (q & (q - 1)) == 0; }

std::size_t integer_pow(std::size_t base, int exp, std::size_t cap) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > cap / base) return cap + 1;
        r *= base;
    }
    return r;
}

std::size_t histogram_count(int Q, int K) {
    // C(K + Q - 1, Q - 1)
    std::size_t r = 1;
    for (int i = 1; i <= Q - 1; ++i) {
        r = r * static_cast<std::size_t>(K + i) / static_cast<std::size_t>(i);
    }
    return r;
}

// Visits all length-Q nonnegative histograms summing to K.
void for_each_histogram(int Q, int K, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> h(Q, 0);
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == Q - 1) {
            h[pos] = remaining;
            fn(h);
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            h[pos] = c;
            rec(pos + 1, remaining - c);
        }
    };
    rec(0, K);
}

std::vector<int> indices_from_histogram(const std::vector<int>& h) {
    std::vector<int> idx;
    for (int q = 0; q < static_cast<int>(h.size()); ++q) {
        idx.insert(idx.end(), h[q], q);
    }
    return idx;
}

}  // namespace

InputDomain InputDomain::make(int K, std::vector<double> values) {
    const int Q = static_cast<int>(values.size());
    if (!is_power_of_two(Q)) {
        throw ConstructionError("InputDomain: alphabet size must be a power of two >= 2, got " +
                                std::to_string(Q));
    }
    if (K < 1) throw ConstructionError("InputDomain: node count must be >= 1");
    std::set<double> distinct(values.begin(), values.end());
    if (static_cast<int>(distinct.size()) != Q) {
        throw ConstructionError("InputDomain: alphabet values must be distinct");
    }
    InputDomain d;
    d.Q = Q;
    d.bits = static_cast<int>(std::round(std::log2(static_cast<double>(Q))));
    d.K = K;
    d.values = std::move(values);
    return d;
}

FunctionKind function_kind_from_string(const std::string& s) {
    if (s == "sum") return FunctionKind::Sum;
    if (s == "product") return FunctionKind::Product;
    if (s == "max") return FunctionKind::Max;
    if (s == "custom") return FunctionKind::Custom;
    throw ConfigError("unknown function kind '" + s + "'");
}

std::string to_string(FunctionKind k) {
    switch (k) {
        case FunctionKind::Sum: return "sum";
        case FunctionKind::Product: return "product";
        case FunctionKind::Max: return "max";
        case FunctionKind::Custom: return "custom";
    }
    return "?";
}

EnumerationMode enumeration_mode_from_string(const std::string& s) {
    if (s == "full") return EnumerationMode::Full;
    if (s == "symmetric-shared") return EnumerationMode::SymmetricShared;
    throw ConfigError("unknown enumeration mode '" + s + "'");
}

std::string to_string(EnumerationMode m) {
    return m == EnumerationMode::Full ? "full" : "symmetric-shared";
}

double TargetFunction::evaluate(const InputDomain& domain, std::span<const int> indices) const {
    if (static_cast<int>(indices.size()) != domain.K) {
        throw ConstructionError("evaluate: expected " + std::to_string(domain.K) + " indices");
    }
    switch (kind_) {
        case FunctionKind::Sum: {
            double s = 0.0;
            for (int q : indices) s += domain.values[q];
            return s;
        }
        case FunctionKind::Product: {
            double p = 1.0;
            for (int q : indices) p *= domain.values[q];
            return p;
        }
        case FunctionKind::Max: {
            double m = domain.values[indices[0]];
            for (int q : indices) m = std::max(m, domain.values[q]);
            return m;
        }
        case FunctionKind::Custom: {
            std::size_t flat = 0;
            for (int q : indices) flat = flat * static_cast<std::size_t>(domain.Q) + q;
            return table_[flat];
        }
    }
    return 0.0;
}

double TargetFunction::evaluate_histogram(const InputDomain& domain,
                                          std::span<const int> histogram) const {
    if (!symmetric()) {
        throw ConstructionError("evaluate_histogram: custom functions are not symmetric");
    }
    switch (kind_) {
        case FunctionKind::Sum: {
            double s = 0.0;
            for (int q = 0; q < domain.Q; ++q) s += histogram[q] * domain.values[q];
            return s;
        }
        case FunctionKind::Product: {
            double p = 1.0;
            for (int q = 0; q < domain.Q; ++q) p *= std::pow(domain.values[q], histogram[q]);
            return p;
        }
        case FunctionKind::Max: {
            double m = 0.0;
            bool first = true;
            for (int q = 0; q < domain.Q; ++q) {
                if (histogram[q] > 0) {
                    m = first ? domain.values[q] : std::max(m, domain.values[q]);
                    first = false;
                }
            }
            return m;
        }
        default: break;
    }
    return 0.0;
}

TargetFunction TargetFunction::make(FunctionKind kind, const InputDomain& domain, std::size_t cap) {
    if (kind == FunctionKind::Custom) {
        throw ConstructionError("use make_custom for custom functions");
    }
    TargetFunction f;
    f.kind_ = kind;
    // Symmetric kinds: range statistics from the histogram enumeration.
    if (histogram_count(domain.Q, domain.K) > cap) {
        throw CombinatorialOverflowError("histogram count exceeds cap");
    }
    std::set<double> outputs;
    for_each_histogram(domain.Q, domain.K, [&](const std::vector<int>& h) {
        outputs.insert(f.evaluate_histogram(domain, h));
    });
    f.M_ = static_cast<int>(outputs.size());
    f.f_min_ = *outputs.begin();
    f.f_max_ = *outputs.rbegin();
    return f;
}

TargetFunction TargetFunction::make_custom(const InputDomain& domain, std::vector<double> table,
                                           std::size_t cap) {
    const std::size_t total = integer_pow(domain.Q, domain.K, cap);
    if (total > cap) throw CombinatorialOverflowError("custom table size exceeds cap");
    if (table.size() != total) {
        throw ConstructionError("custom table must have Q^K = " + std::to_string(total) +
                                " entries, got " + std::to_string(table.size()));
    }
    TargetFunction f;
    f.kind_ = FunctionKind::Custom;
    f.table_ = std::move(table);
    std::set<double> outputs(f.table_.begin(), f.table_.end());
    f.M_ = static_cast<int>(outputs.size());
    f.f_min_ = *outputs.begin();
    f.f_max_ = *outputs.rbegin();
    return f;
}

std::vector<Combination> enumerate_combinations(const InputDomain& domain,
                                                const TargetFunction& function,
                                                EnumerationMode mode, std::size_t cap) {
    std::vector<Combination> out;
    if (mode == EnumerationMode::SymmetricShared) {
        if (!function.symmetric()) {
            throw ConstructionError("symmetric-shared enumeration requires a symmetric function");
        }
        const std::size_t count = histogram_count(domain.Q, domain.K);
        if (count > cap) {
            throw CombinatorialOverflowError("combination count " + std::to_string(count) +
                                             " exceeds cap " + std::to_string(cap));
        }
        out.reserve(count);
        for_each_histogram(domain.Q, domain.K, [&](const std::vector<int>& h) {
            Combination c;
            c.histogram = h;
            c.indices = indices_from_histogram(h);
            c.output = function.evaluate_histogram(domain, h);
            out.push_back(std::move(c));
        });
        return out;
    }

    const std::size_t count = integer_pow(domain.Q, domain.K, cap);
    if (count > cap) {
        throw CombinatorialOverflowError("combination count exceeds cap " + std::to_string(cap));
    }
    out.reserve(count);
    std::vector<int> idx(domain.K, 0);
    for (std::size_t n = 0; n < count; ++n) {
        Combination c;
        c.indices = idx;
        c.histogram.assign(domain.Q, 0);
        for (int q : idx) ++c.histogram[q];
        c.output = function.evaluate(domain, idx);
        out.push_back(std::move(c));
        // row-major increment, node 0 slowest
        for (int k = domain.K - 1; k >= 0; --k) {
            if (++idx[k] < domain.Q) break;
            idx[k] = 0;
        }
    }
    return out;
}

Eigen::VectorXd selector_vector(const Combination& combination, const InputDomain& domain) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(domain.N());
    if (static_cast<int>(combination.indices.size()) != domain.K) {
        throw ConstructionError("selector_vector: combination has wrong node count");
    }
    for (int k = 0; k < domain.K; ++k) {
        const int q = combination.indices[k];
        if (q < 0 || q >= domain.Q) throw ConstructionError("selector_vector: index out of range");
        a[k * domain.Q + q] = 1.0;
    }
    return a;
}

double default_epsilon(const std::vector<Combination>& combinations) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& c : combinations) {
        if (first) {
            lo = hi = c.output;
            first = false;
        } else {
            lo = std::min(lo, c.output);
            hi = std::max(hi, c.output);
        }
    }
    const double span = hi - lo;
    return span > 0.0 ? 1.0 / span : 1.0;
}

ConstraintSet build_constraint_set(const std::vector<Combination>& combinations,
                                   EnumerationMode mode, double epsilon) {
    if (epsilon <= 0.0) throw ConstructionError("epsilon must be positive");
    ConstraintSet cs;
    cs.epsilon = epsilon;
    cs.mode = mode;
    const int n = static_cast<int>(combinations.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double gap = std::abs(combinations[i].output - combinations[j].output);
            if (gap > 0.0) {
                cs.pairs.push_back({i, j, epsilon * gap});
            }
        }
    }
    return cs;
}

std::vector<SeparationClass> build_separation_classes(const std::vector<Combination>& combinations,
                                                      const ConstraintSet& constraints,
                                                      const InputDomain& domain) {
    const bool shared = constraints.mode == EnumerationMode::SymmetricShared;
    const int dim = shared ? domain.Q : domain.N();

    // Key a difference vector by its canonical-sign integer entries.
    auto key_of = [&](const Combination& a, const Combination& b, int& sign) {
        std::vector<int> key(dim, 0);
        if (shared) {
            for (int q = 0; q < dim; ++q) key[q] = a.histogram[q] - b.histogram[q];
        } else {
            for (int k = 0; k < domain.K; ++k) {
                key[k * domain.Q + a.indices[k]] += 1;
                key[k * domain.Q + b.indices[k]] -= 1;
            }
        }
        sign = 1;
        for (int v : key) {
            if (v != 0) {
                sign = v > 0 ? 1 : -1;
                break;
            }
        }
        if (sign < 0) {
            for (int& v : key) v = -v;
        }
        return key;
    };

    std::map<std::vector<int>, SeparationClass> classes;
    for (const auto& p : constraints.pairs) {
        int sign = 1;
        auto key = key_of(combinations[p.i], combinations[p.j], sign);
        auto it = classes.find(key);
        if (it == classes.end()) {
            SeparationClass sc;
            sc.d = Eigen::VectorXd(dim);
            for (int t = 0; t < dim; ++t) sc.d[t] = static_cast<double>(key[t]);
            sc.delta_f = p.delta_f;
            sc.rep_i = p.i;
            sc.rep_j = p.j;
            classes.emplace(std::move(key), std::move(sc));
        } else if (p.delta_f > it->second.delta_f) {
            it->second.delta_f = p.delta_f;
            it->second.rep_i = p.i;
            it->second.rep_j = p.j;
        }
    }

    std::vector<SeparationClass> out;
    out.reserve(classes.size());
    for (auto& [k, v] : classes) out.push_back(std::move(v));
    return out;
}

}  // namespace semac
