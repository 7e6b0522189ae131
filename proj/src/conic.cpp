#include "semac/conic.hpp"

#include <algorithm>
#include <cmath>

#include "ipm.hpp"

namespace semac::conic {

namespace {

using detail::RealBlockProblem;

Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& a) { return 0.5 * (a + a.adjoint()); }

void check_program(const ConicProgram& prog) {
    const int nvars = static_cast<int>(prog.dims.size());
    if (static_cast<int>(prog.psd.size()) != nvars) {
        throw ConstructionError("conic: dims/psd size mismatch");
    }
    for (int v = 0; v < nvars; ++v) {
        if (prog.dims[v] < 1) throw ConstructionError("conic: variable dimension must be >= 1");
        if (!prog.psd[v] && prog.dims[v] != 1) {
            throw ConstructionError("conic: free variables must be scalars (dim 1)");
        }
    }
    auto check_terms = [&](const std::vector<MatrixTerm>& terms, const char* where) {
        for (const auto& t : terms) {
            if (t.var < 0 || t.var >= nvars) {
                throw ConstructionError(std::string("conic: bad variable index in ") + where);
            }
            if (t.coeff.rows() != prog.dims[t.var] || t.coeff.cols() != prog.dims[t.var]) {
                throw ConstructionError(std::string("conic: coefficient dimension mismatch in ") +
                                        where);
            }
            const double scale = std::max(1.0, t.coeff.norm());
            if ((t.coeff - t.coeff.adjoint()).norm() > 1e-10 * scale) {
                throw ConstructionError(std::string("conic: coefficient not Hermitian in ") +
                                        where);
            }
        }
    };
    check_terms(prog.objective, "objective");
    for (const auto& c : prog.constraints) check_terms(c.terms, "constraint");
}

// Replays the raw constraint list against a candidate solution.
double replay_violation(const ConicProgram& prog, const std::vector<Eigen::MatrixXcd>& values) {
    double worst = 0.0;
    for (const auto& c : prog.constraints) {
        double lhs = 0.0;
        for (const auto& t : c.terms) {
            lhs += std::real(t.coeff.cwiseProduct(values[t.var].conjugate()).sum());
        }
        double v = 0.0;
        switch (c.sense) {
            case Sense::Ge: v = std::max(0.0, c.bound - lhs); break;
            case Sense::Le: v = std::max(0.0, lhs - c.bound); break;
            case Sense::Eq: v = std::abs(lhs - c.bound); break;
        }
        worst = std::max(worst, v);
    }
    return worst;
}

double min_psd_eigenvalue(const ConicProgram& prog, const std::vector<Eigen::MatrixXcd>& values) {
    double lo = 0.0;
    bool any = false;
    for (std::size_t v = 0; v < values.size(); ++v) {
        if (!prog.psd[v]) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(values[v], Eigen::EigenvaluesOnly);
        const double e = es.eigenvalues().minCoeff();
        lo = any ? std::min(lo, e) : e;
        any = true;
    }
    return any ? lo : 0.0;
}

double objective_value(const ConicProgram& prog, const std::vector<Eigen::MatrixXcd>& values) {
    double obj = 0.0;
    for (const auto& t : prog.objective) {
        obj += std::real(t.coeff.cwiseProduct(values[t.var].conjugate()).sum());
    }
    return obj;
}

// Standard-form layout: PSD variables become embedded dense blocks; free
// scalars split into two diagonal entries; every inequality gets one slack
// diagonal entry.
struct StandardForm {
    RealBlockProblem prob;
    std::vector<int> block_of_var;   // -1 for free scalars
    std::vector<int> diag_of_var;    // first of the (plus, minus) pair
    std::vector<int> slack_of_row;   // -1 for equality rows
};

StandardForm to_standard_form(const EmbeddedProgram& emb) {
    StandardForm sf;
    const ConicProgram& rp = emb.program;
    const int nvars = static_cast<int>(rp.dims.size());
    sf.block_of_var.assign(nvars, -1);
    sf.diag_of_var.assign(nvars, -1);

    int ndiag = 0;
    for (int v = 0; v < nvars; ++v) {
        if (rp.psd[v]) {
            sf.block_of_var[v] = static_cast<int>(sf.prob.dims.size());
            sf.prob.dims.push_back(rp.dims[v]);
        } else {
            sf.diag_of_var[v] = ndiag;
            ndiag += 2;
        }
    }
    const int nrows = static_cast<int>(rp.constraints.size());
    sf.slack_of_row.assign(nrows, -1);
    for (int i = 0; i < nrows; ++i) {
        if (rp.constraints[i].sense != Sense::Eq) sf.slack_of_row[i] = ndiag++;
    }

    sf.prob.diag_size = ndiag;
    sf.prob.c_diag = Eigen::VectorXd::Zero(ndiag);
    sf.prob.C.resize(sf.prob.dims.size());
    for (std::size_t b = 0; b < sf.prob.dims.size(); ++b) {
        sf.prob.C[b] = Eigen::MatrixXd::Zero(sf.prob.dims[b], sf.prob.dims[b]);
    }
    for (const auto& t : rp.objective) {
        if (rp.psd[t.var]) {
            sf.prob.C[sf.block_of_var[t.var]] += t.coeff.real();
        } else {
            const double c = t.coeff(0, 0).real();
            sf.prob.c_diag[sf.diag_of_var[t.var]] += c;
            sf.prob.c_diag[sf.diag_of_var[t.var] + 1] -= c;
        }
    }

    sf.prob.rows.reserve(nrows);
    for (int i = 0; i < nrows; ++i) {
        const auto& c = rp.constraints[i];
        RealBlockProblem::Row row;
        row.b = c.bound;
        for (const auto& t : c.terms) {
            if (rp.psd[t.var]) {
                row.mats.emplace_back(sf.block_of_var[t.var], t.coeff.real());
            } else {
                const double a = t.coeff(0, 0).real();
                row.diag.emplace_back(sf.diag_of_var[t.var], a);
                row.diag.emplace_back(sf.diag_of_var[t.var] + 1, -a);
            }
        }
        if (c.sense == Sense::Ge) row.diag.emplace_back(sf.slack_of_row[i], -1.0);
        if (c.sense == Sense::Le) row.diag.emplace_back(sf.slack_of_row[i], 1.0);
        sf.prob.rows.push_back(std::move(row));
    }
    return sf;
}

std::vector<Eigen::MatrixXcd> values_from_real(const EmbeddedProgram& emb, const StandardForm& sf,
                                               const detail::IpmResult& r) {
    const int nvars = static_cast<int>(emb.program.dims.size());
    std::vector<Eigen::MatrixXcd> embedded(nvars);
    for (int v = 0; v < nvars; ++v) {
        if (emb.program.psd[v]) {
            embedded[v] = r.X[sf.block_of_var[v]].cast<std::complex<double>>();
        } else {
            const double t = r.x_diag[sf.diag_of_var[v]] - r.x_diag[sf.diag_of_var[v] + 1];
            embedded[v] = Eigen::MatrixXcd::Constant(1, 1, t);
        }
    }
    return extract_solution(emb, embedded);
}

// Max-slack feasibility program: maximize t such that every >= row holds with
// margin t, every <= row with margin -t, capped at t <= 1. Equality rows pass
// through unchanged. A negative optimum certifies infeasibility of the
// inequality system.
ConicProgram phase1_program(const ConicProgram& prog, double& shift) {
    ConicProgram p1 = prog;
    p1.objective.clear();
    // Model the margin as t = t_pos - shift with t_pos a PSD scalar. X = 0 with
    // t = -max|b| - 1 slackens every inequality strictly, so t_pos keeps an
    // interior whenever shift exceeds that, and the optimum t* may be negative.
    shift = 2.0;
    for (const auto& c : prog.constraints) shift = std::max(shift, 2.0 + std::abs(c.bound));
    const int t_var = p1.add_variable(1, true);
    Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(1, 1);
    p1.add_objective(t_var, -one);
    for (auto& c : p1.constraints) {
        if (c.sense == Sense::Ge) {
            c.terms.push_back({t_var, -one});
            c.bound -= shift;
        } else if (c.sense == Sense::Le) {
            c.terms.push_back({t_var, one});
            c.bound += shift;
        }
    }
    LinearConstraint cap;  // t <= 1
    cap.terms.push_back({t_var, one});
    cap.sense = Sense::Le;
    cap.bound = shift + 1.0;
    p1.add_constraint(cap);
    return p1;
}

}  // namespace

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Inaccurate: return "inaccurate";
    }
    return "?";
}

Eigen::MatrixXd embed_hermitian(const Eigen::MatrixXcd& h) {
    const Eigen::Index n = h.rows();
    Eigen::MatrixXd e(2 * n, 2 * n);
    e.topLeftCorner(n, n) = h.real();
    e.topRightCorner(n, n) = -h.imag();
    e.bottomLeftCorner(n, n) = h.imag();
    e.bottomRightCorner(n, n) = h.real();
    return e;
}

Eigen::MatrixXcd extract_hermitian(const Eigen::MatrixXd& s) {
    if (s.rows() % 2 != 0 || s.rows() != s.cols()) {
        throw ConstructionError("extract_hermitian: matrix must be square with even dimension");
    }
    const Eigen::Index n = s.rows() / 2;
    // Average the two structure-equivalent copies; for structured inputs this
    // is exact, for arbitrary feasible points it preserves all embedded inner
    // products and positive semidefiniteness.
    Eigen::MatrixXd re = 0.5 * (s.topLeftCorner(n, n) + s.bottomRightCorner(n, n));
    Eigen::MatrixXd im = 0.5 * (s.bottomLeftCorner(n, n) - s.topRightCorner(n, n));
    Eigen::MatrixXcd h = re.cast<std::complex<double>>() +
                         std::complex<double>(0, 1) * im.cast<std::complex<double>>();
    return hermitize(h);
}

EmbeddedProgram embed_complex(const ConicProgram& program) {
    check_program(program);
    EmbeddedProgram emb;
    emb.orig_dims = program.dims;
    emb.scale = 2.0;
    ConicProgram& rp = emb.program;
    const int nvars = static_cast<int>(program.dims.size());
    for (int v = 0; v < nvars; ++v) {
        if (program.psd[v]) {
            rp.add_variable(2 * program.dims[v], true);
        } else {
            rp.add_variable(1, false);
        }
    }
    auto embed_terms = [&](const std::vector<MatrixTerm>& terms) {
        std::vector<MatrixTerm> out;
        out.reserve(terms.size());
        for (const auto& t : terms) {
            Eigen::MatrixXcd h = hermitize(t.coeff);
            if (program.psd[t.var]) {
                out.push_back({t.var, embed_hermitian(h).cast<std::complex<double>>()});
            } else {
                // Scalars pick up the same factor 2 so rows stay proportional.
                out.push_back({t.var, emb.scale * h.real().cast<std::complex<double>>()});
            }
        }
        return out;
    };
    rp.objective = embed_terms(program.objective);
    for (const auto& c : program.constraints) {
        LinearConstraint rc;
        rc.terms = embed_terms(c.terms);
        rc.sense = c.sense;
        rc.bound = emb.scale * c.bound;
        rp.add_constraint(std::move(rc));
    }
    return emb;
}

std::vector<Eigen::MatrixXcd> extract_solution(const EmbeddedProgram& embedded,
                                               const std::vector<Eigen::MatrixXcd>& values) {
    std::vector<Eigen::MatrixXcd> out(values.size());
    for (std::size_t v = 0; v < values.size(); ++v) {
        if (embedded.program.psd[v]) {
            out[v] = extract_hermitian(values[v].real());
        } else {
            out[v] = values[v];
        }
    }
    return out;
}

ConicSolution solve(const ConicProgram& program, const Tolerances& tol) {
    check_program(program);
    EmbeddedProgram emb = embed_complex(program);
    StandardForm sf = to_standard_form(emb);

    detail::IpmOptions opts;
    opts.max_iter = tol.max_iter;
    opts.tol_gap = std::min(5e-10, 0.01 * tol.gap);
    opts.tol_feas = std::min(5e-10, 0.01 * tol.feas);

    detail::IpmResult r = detail::solve_real_sdp(sf.prob, opts);

    ConicSolution sol;
    sol.iterations = r.iterations;
    sol.values = values_from_real(emb, sf, r);
    sol.objective = objective_value(program, sol.values);
    sol.max_violation = replay_violation(program, sol.values);
    sol.min_eigenvalue = min_psd_eigenvalue(program, sol.values);
    sol.gap = r.rel_gap;

    const bool clean = sol.max_violation <= tol.feas && sol.min_eigenvalue >= -tol.psd &&
                       r.rel_gap <= tol.gap;
    if (r.converged && clean) {
        sol.status = SolveStatus::Optimal;
        return sol;
    }

    // Certify (in)feasibility through the max-slack program before giving up.
    double shift = 0.0;
    ConicProgram p1 = phase1_program(program, shift);
    EmbeddedProgram emb1 = embed_complex(p1);
    StandardForm sf1 = to_standard_form(emb1);
    detail::IpmResult r1 = detail::solve_real_sdp(sf1.prob, opts);
    if (r1.converged) {
        const auto vals1 = values_from_real(emb1, sf1, r1);
        const double t_star = vals1.back()(0, 0).real() - shift;
        if (t_star < -tol.feas) {
            sol.status = SolveStatus::Infeasible;
            sol.max_violation = -t_star;  // best attainable margin deficit
            sol.message = "phase-1 margin " + std::to_string(t_star);
            return sol;
        }
    }
    sol.status = SolveStatus::Inaccurate;
    sol.message = "iteration limit or stall; residuals populated";
    return sol;
}

}  // namespace semac::conic
