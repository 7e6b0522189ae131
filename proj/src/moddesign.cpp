#include "semac/moddesign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace semac {

namespace {

using conic::ConicProgram;
using conic::LinearConstraint;
using conic::Sense;

Eigen::VectorXd class_margins(const Eigen::MatrixXcd& w,
                              const std::vector<SeparationClass>& classes) {
    Eigen::VectorXd m(classes.size());
    for (std::size_t g = 0; g < classes.size(); ++g) {
        const Eigen::VectorXd& d = classes[g].d;
        m[g] = std::real(d.cast<std::complex<double>>().dot(w * d.cast<std::complex<double>>())) -
               classes[g].delta_f;
    }
    return m;
}

}  // namespace

Eigen::MatrixXcd ModulationDesign::stacked() const {
    Eigen::MatrixXcd x(Q * K, L);
    for (int k = 0; k < K; ++k) x.middleRows(k * Q, Q) = nodes[k];
    return x;
}

Eigen::MatrixXcd LiftedSolution::block(int k) const {
    if (shared) return W;
    return W.block(k * Q, k * Q, Q, Q);
}

Eigen::MatrixXd difference_outer(const Eigen::VectorXd& a_i, const Eigen::VectorXd& a_j) {
    if (a_i.size() != a_j.size()) {
        throw ConstructionError("difference_outer: selector length mismatch");
    }
    Eigen::VectorXd d = a_i - a_j;
    return d * d.transpose();
}

LiftedSolution solve_lifted_design(const DesignProblem& problem, int L,
                                   const DesignOptions& options) {
    if (L < 1) throw ConstructionError("solve_lifted_design: L must be >= 1");
    const auto& domain = problem.domain;
    const bool shared = problem.constraints.mode == EnumerationMode::SymmetricShared;
    const int dim = shared ? domain.Q : domain.N();

    LiftedSolution out;
    out.Q = domain.Q;
    out.K = domain.K;
    out.L = L;
    out.shared = shared;

    auto classes = build_separation_classes(problem.combinations, problem.constraints, domain);
    if (classes.empty()) {
        // Constant function: W = 0 trivially satisfies everything.
        out.W = Eigen::MatrixXcd::Zero(dim, dim);
        out.margin = 0.0;
        out.status = conic::SolveStatus::Optimal;
        return out;
    }

    double max_df = 0.0;
    for (const auto& c : classes) max_df = std::max(max_df, c.delta_f);
    const double shift = max_df + 1.0;  // t = t_pos - shift; W = 0 gives t = -max_df

    std::vector<std::size_t> active;
    std::vector<char> in_active(classes.size(), 0);
    {
        std::vector<std::size_t> order(classes.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        // Seed with the classes hardest to satisfy per unit of trace budget.
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double ra = classes[a].delta_f / classes[a].d.squaredNorm();
            const double rb = classes[b].delta_f / classes[b].d.squaredNorm();
            return ra > rb;
        });
        for (std::size_t t = 0; t < order.size() && t < options.direct_rows; ++t) {
            active.push_back(order[t]);
            in_active[order[t]] = 1;
        }
    }

    auto add_trace_caps = [&](ConicProgram& prog, int w) {
        if (shared) {
            LinearConstraint cap;
            cap.terms.push_back({w, Eigen::MatrixXcd::Identity(dim, dim)});
            cap.sense = Sense::Le;
            cap.bound = static_cast<double>(L);
            prog.add_constraint(std::move(cap));
        } else {
            for (int k = 0; k < domain.K; ++k) {
                Eigen::MatrixXcd sel = Eigen::MatrixXcd::Zero(dim, dim);
                sel.block(k * domain.Q, k * domain.Q, domain.Q, domain.Q) =
                    Eigen::MatrixXcd::Identity(domain.Q, domain.Q);
                LinearConstraint cap;
                cap.terms.push_back({w, std::move(sel)});
                cap.sense = Sense::Le;
                cap.bound = static_cast<double>(L);
                prog.add_constraint(std::move(cap));
            }
        }
    };

    // Active-set loop: a class outside the active set can only lower the
    // worst margin, so re-solving after pulling in violated classes reaches
    // the global optimum in finitely many rounds.
    conic::ConicSolution sol;
    Eigen::VectorXd margins;
    for (int round = 0; round < options.max_rounds; ++round) {
        ConicProgram prog;
        const int w = prog.add_variable(dim, true);
        const int t_pos = prog.add_variable(1, true);
        prog.add_objective(t_pos, -Eigen::MatrixXcd::Identity(1, 1));
        add_trace_caps(prog, w);
        for (std::size_t g : active) {
            const Eigen::VectorXd& d = classes[g].d;
            LinearConstraint row;
            row.terms.push_back({w, (d * d.transpose()).cast<std::complex<double>>()});
            row.terms.push_back({t_pos, -Eigen::MatrixXcd::Identity(1, 1)});
            row.sense = Sense::Ge;
            row.bound = classes[g].delta_f - shift;
            prog.add_constraint(std::move(row));
        }

        sol = conic::solve(prog, options.tol);
        out.W = sol.values[0];
        const double floor = sol.values[1](0, 0).real() - shift;

        margins = class_margins(out.W, classes);
        std::vector<std::size_t> violated;
        for (std::size_t g = 0; g < classes.size(); ++g) {
            if (!in_active[g] && margins[g] < floor - 1e-9) violated.push_back(g);
        }
        if (violated.empty()) break;
        std::sort(violated.begin(), violated.end(),
                  [&](std::size_t a, std::size_t b) { return margins[a] < margins[b]; });
        const std::size_t take = std::min(options.add_per_round, violated.size());
        for (std::size_t t = 0; t < take; ++t) {
            active.push_back(violated[t]);
            in_active[violated[t]] = 1;
        }
    }

    out.margin = margins.minCoeff();
    out.status = sol.status;
    out.max_violation = sol.max_violation;
    out.min_eigenvalue = sol.min_eigenvalue;
    out.gap = sol.gap;
    if (sol.status == conic::SolveStatus::Optimal && out.margin < -options.tol.feas) {
        out.status = conic::SolveStatus::Infeasible;  // separation unattainable at this epsilon
    }
    return out;
}

namespace {

// Eigen returns ascending eigenvalues with arbitrary per-vector phases; put
// them in descending order with deterministic tie-breaks and make each
// vector's largest-magnitude entry real positive.
NodeSpectrum canonical_spectrum(const Eigen::MatrixXcd& wk, double rank_tol, double tie_tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(wk);
    const int q = static_cast<int>(wk.rows());
    Eigen::VectorXd vals = es.eigenvalues().reverse();
    Eigen::MatrixXcd vecs = es.eigenvectors().rowwise().reverse();

    const double top = std::max(vals.size() > 0 ? vals[0] : 0.0, 0.0);
    for (int i = 0; i < vals.size(); ++i) vals[i] = std::max(vals[i], 0.0);

    auto anchor_row = [&](int col) {
        int arg = 0;
        double best = -1.0;
        for (int r = 0; r < q; ++r) {
            const double mag = std::abs(vecs(r, col));
            if (mag > best + 1e-12) {
                best = mag;
                arg = r;
            }
        }
        return arg;
    };

    // Stable tie-break inside groups of equal eigenvalues.
    std::vector<int> order(q);
    std::iota(order.begin(), order.end(), 0);
    const double tie = tie_tol * std::max(top, 1.0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (std::abs(vals[a] - vals[b]) > tie) return vals[a] > vals[b];
        return anchor_row(a) < anchor_row(b);
    });

    NodeSpectrum ns;
    ns.sigma = Eigen::VectorXd(q);
    ns.u = Eigen::MatrixXcd(q, q);
    for (int i = 0; i < q; ++i) {
        ns.sigma[i] = vals[order[i]];
        Eigen::VectorXcd u = vecs.col(order[i]);
        int arg = 0;
        double best = -1.0;
        for (int r = 0; r < q; ++r) {
            if (std::abs(u[r]) > best + 1e-12) {
                best = std::abs(u[r]);
                arg = r;
            }
        }
        const std::complex<double> a = u[arg];
        if (std::abs(a) > 0) u *= std::conj(a) / std::abs(a);
        ns.u.col(i) = u;
    }
    ns.s = ns.sigma.array().sqrt().min(1.0);
    ns.effective_rank = 0;
    for (int i = 0; i < q; ++i) {
        if (ns.sigma[i] > rank_tol * std::max(top, std::numeric_limits<double>::min())) {
            ++ns.effective_rank;
        }
    }
    return ns;
}

}  // namespace

std::pair<ModulationDesign, SpectralFactorization> recover_modulation(
    const LiftedSolution& lifted, int L, const DesignOptions& options) {
    ModulationDesign design;
    design.Q = lifted.Q;
    design.K = lifted.K;
    design.L = L;
    design.shared = lifted.shared;

    SpectralFactorization fact;
    fact.rank_tol = options.rank_tol;

    const int nspectra = lifted.shared ? 1 : lifted.K;
    std::vector<Eigen::MatrixXcd> xs;
    for (int k = 0; k < nspectra; ++k) {
        NodeSpectrum ns = canonical_spectrum(lifted.block(k), options.rank_tol, options.tie_tol);
        Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(lifted.Q, L);
        const int r = std::min(L, ns.effective_rank);
        for (int i = 0; i < r; ++i) x.col(i) = ns.s[i] * ns.u.col(i);
        xs.push_back(std::move(x));
        fact.nodes.push_back(std::move(ns));
    }
    design.nodes.assign(lifted.K, xs[0]);
    if (!lifted.shared) {
        for (int k = 0; k < lifted.K; ++k) design.nodes[k] = xs[k];
    }
    return {design, fact};
}

SeparationReport verify_separation(const ModulationDesign& design, const DesignProblem& problem,
                                   double merge_tol) {
    SeparationReport rep;
    auto classes = build_separation_classes(problem.combinations, problem.constraints,
                                            problem.domain);
    rep.classes_checked = classes.size();
    if (classes.empty()) return rep;

    const bool shared = problem.constraints.mode == EnumerationMode::SymmetricShared;
    // In shared mode d is a histogram difference acting on X_0; otherwise a
    // selector difference acting on the full stack.
    const Eigen::MatrixXcd x = shared ? design.nodes[0] : design.stacked();

    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& c : classes) {
        const double sep = (c.d.cast<std::complex<double>>().transpose() * x).squaredNorm();
        const double margin = sep - c.delta_f;
        rep.worst_margin = std::min(rep.worst_margin, margin);
        if (margin < -merge_tol) {
            rep.violations.push_back({c.rep_i, c.rep_j, c.delta_f, margin});
        }
    }
    std::sort(rep.violations.begin(), rep.violations.end(),
              [](const auto& a, const auto& b) { return a.margin < b.margin; });
    return rep;
}

namespace {

// Right-multiplying each X_k by a unitary preserves X_k X_k^H, the recovery
// objective and the per-column norm caps, so we can spend that freedom to
// align cross-node phases with the global factor of W.
void align_to_global_factor(ModulationDesign& design, const LiftedSolution& lifted) {
    const int L = design.L;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(lifted.W);
    Eigen::VectorXd vals = es.eigenvalues().reverse();
    Eigen::MatrixXcd vecs = es.eigenvectors().rowwise().reverse();
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(lifted.W.rows(), L);
    for (int i = 0; i < L && i < vals.size(); ++i) {
        if (vals[i] > 0) g.col(i) = std::sqrt(vals[i]) * vecs.col(i);
    }
    for (int k = 0; k < design.K; ++k) {
        const Eigen::MatrixXcd gk = g.middleRows(k * design.Q, design.Q);
        const Eigen::MatrixXcd& pk = design.nodes[k];
        if (pk.norm() < 1e-12) continue;
        Eigen::MatrixXcd m = pk.completeOrthogonalDecomposition().pseudoInverse() * gk;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::MatrixXcd r = svd.matrixU() * svd.matrixV().adjoint();
        design.nodes[k] = pk * r;
    }
}

}  // namespace

DesignResult design_modulation(const DesignProblem& problem, int L, const DesignOptions& options) {
    DesignResult res;
    res.epsilon = problem.constraints.epsilon;
    res.lifted = solve_lifted_design(problem, L, options);
    auto [design, fact] = recover_modulation(res.lifted, L, options);
    res.spectrum = std::move(fact);

    if (!design.shared && design.K > 1) {
        ModulationDesign aligned = design;
        align_to_global_factor(aligned, res.lifted);
        const auto rep_plain = verify_separation(design, problem, options.merge_tol);
        const auto rep_aligned = verify_separation(aligned, problem, options.merge_tol);
        if (rep_aligned.worst_margin >= rep_plain.worst_margin) {
            res.design = std::move(aligned);
            res.report = rep_aligned;
        } else {
            res.design = std::move(design);
            res.report = rep_plain;
        }
    } else {
        res.report = verify_separation(design, problem, options.merge_tol);
        res.design = std::move(design);
    }
    return res;
}

}  // namespace semac
