#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "semac/conic.hpp"

using namespace semac;
using namespace semac::conic;
using cd = std::complex<double>;

namespace {

Eigen::MatrixXcd random_hermitian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = cd(g(rng), g(rng));
    }
    return 0.5 * (a + a.adjoint());
}

double inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return std::real(a.cwiseProduct(b.conjugate()).sum());
}

}  // namespace

TEST_SUITE_BEGIN("conic");

TEST_CASE("embedding of a real scalar is diag(v, v)") {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Constant(1, 1, cd(3.5, 0.0));
    Eigen::MatrixXd e = embed_hermitian(h);
    CHECK(e.rows() == 2);
    CHECK(e(0, 0) == doctest::Approx(3.5));
    CHECK(e(1, 1) == doctest::Approx(3.5));
    CHECK(e(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("embedded inner product carries the factor 2") {
    // Purely imaginary Hermitian A = i*[[0, s], [-s, 0]].
    Eigen::MatrixXcd a(2, 2);
    a << cd(0, 0), cd(0, 0.7), cd(0, -0.7), cd(0, 0);
    std::mt19937_64 rng(7);
    Eigen::MatrixXcd v = random_hermitian(2, rng);
    CHECK(inner(embed_hermitian(a).cast<cd>(), embed_hermitian(v).cast<cd>()) ==
          doctest::Approx(2.0 * inner(a, v)).epsilon(1e-12));

    for (int trial = 0; trial < 5; ++trial) {
        Eigen::MatrixXcd a3 = random_hermitian(3, rng);
        Eigen::MatrixXcd v3 = random_hermitian(3, rng);
        const double direct = inner(a3, v3);
        const double embedded =
            inner(embed_hermitian(a3).cast<cd>(), embed_hermitian(v3).cast<cd>());
        CHECK(std::abs(embedded / 2.0 - direct) < 1e-12 * (1.0 + std::abs(direct)));
    }
}

TEST_CASE("extract round-trips the embedding") {
    std::mt19937_64 rng(11);
    Eigen::MatrixXcd h = random_hermitian(4, rng);
    CHECK((extract_hermitian(embed_hermitian(h)) - h).norm() < 1e-14);
}

TEST_CASE("forced 1x1 problem: min Tr(V) with <I,V> >= 1") {
    ConicProgram p;
    int v = p.add_variable(1);
    p.add_objective(v, Eigen::MatrixXcd::Identity(1, 1));
    p.add_constraint({{{v, Eigen::MatrixXcd::Identity(1, 1)}}, Sense::Ge, 1.0});
    auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.values[0](0, 0).real() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("feasibility: 2x2 with trace cap and separation floor") {
    Eigen::MatrixXcd d(2, 2);
    d << cd(1), cd(-1), cd(-1), cd(1);
    ConicProgram p;
    int v = p.add_variable(2);
    p.add_constraint({{{v, Eigen::MatrixXcd::Identity(2, 2)}}, Sense::Le, 1.0});
    p.add_constraint({{{v, d}}, Sense::Ge, 1.0});
    auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.max_violation <= 1e-7);
    CHECK(sol.min_eigenvalue >= -1e-8);
    // The hand-checkable point [[0.25,-0.25],[-0.25,0.25]] is feasible; zero
    // objective means our solution must match its objective value (0).
    Eigen::MatrixXcd w(2, 2);
    w << cd(0.25), cd(-0.25), cd(-0.25), cd(0.25);
    CHECK(inner(d, w) == doctest::Approx(1.0));
    CHECK(w.trace().real() == doctest::Approx(0.5));
}

TEST_CASE("infeasible: <I,V> >= 1 with Tr(V) <= 0.5") {
    ConicProgram p;
    int v = p.add_variable(1);
    p.add_constraint({{{v, Eigen::MatrixXcd::Identity(1, 1)}}, Sense::Ge, 1.0});
    p.add_constraint({{{v, Eigen::MatrixXcd::Identity(1, 1)}}, Sense::Le, 0.5});
    auto sol = solve(p);
    CHECK(sol.status == SolveStatus::Infeasible);
    CHECK(sol.max_violation == doctest::Approx(0.25).epsilon(1e-4));
}

TEST_CASE("lambda-max oracle: max <A,V> with Tr(V) <= 1 equals the top eigenvalue") {
    std::mt19937_64 rng(23);
    for (int n : {2, 3, 5}) {
        for (int trial = 0; trial < 4; ++trial) {
            Eigen::MatrixXcd a = random_hermitian(n, rng);
            ConicProgram p;
            int v = p.add_variable(n);
            p.add_objective(v, -a);  // maximize <A, V>
            p.add_constraint({{{v, Eigen::MatrixXcd::Identity(n, n)}}, Sense::Le, 1.0});
            auto sol = solve(p);
            REQUIRE(sol.status == SolveStatus::Optimal);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
            const double lmax = std::max(0.0, es.eigenvalues().maxCoeff());
            CHECK(-sol.objective == doctest::Approx(lmax).epsilon(1e-6));
            CHECK(sol.max_violation <= 1e-7);
            CHECK(sol.min_eigenvalue >= -1e-8);
        }
    }
}

TEST_CASE("duplicated constraint leaves the optimum unchanged") {
    std::mt19937_64 rng(5);
    Eigen::MatrixXcd a = random_hermitian(3, rng);
    auto build = [&](bool dup) {
        ConicProgram p;
        int v = p.add_variable(3);
        p.add_objective(v, Eigen::MatrixXcd::Identity(3, 3));
        p.add_constraint({{{v, a * a.adjoint() + Eigen::MatrixXcd::Identity(3, 3)}}, Sense::Ge, 2.0});
        if (dup) {
            p.add_constraint(
                {{{v, a * a.adjoint() + Eigen::MatrixXcd::Identity(3, 3)}}, Sense::Ge, 2.0});
        }
        return solve(p);
    };
    auto s1 = build(false);
    auto s2 = build(true);
    REQUIRE(s1.status == SolveStatus::Optimal);
    REQUIRE(s2.status == SolveStatus::Optimal);
    CHECK(s1.objective == doctest::Approx(s2.objective).epsilon(1e-6));
}

TEST_CASE("free scalar split: max t subject to t <= 3, t >= -5") {
    ConicProgram p;
    int t = p.add_variable(1, false);
    p.add_objective(t, -Eigen::MatrixXcd::Identity(1, 1));
    p.add_constraint({{{t, Eigen::MatrixXcd::Identity(1, 1)}}, Sense::Le, 3.0});
    p.add_constraint({{{t, Eigen::MatrixXcd::Identity(1, 1)}}, Sense::Ge, -5.0});
    auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.values[0](0, 0).real() == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("known feasible point bounds the minimum") {
    // min Tr(V) s.t. <D,V> >= 1 with D = dd^H has optimum 1/||d||^2 at the
    // scaled rank-1 point; compare against the feasible point d d^H / ||d||^4.
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    Eigen::VectorXcd d(3);
    for (int i = 0; i < 3; ++i) d[i] = cd(g(rng), g(rng));
    Eigen::MatrixXcd D = d * d.adjoint();
    ConicProgram p;
    int v = p.add_variable(3);
    p.add_objective(v, Eigen::MatrixXcd::Identity(3, 3));
    p.add_constraint({{{v, D}}, Sense::Ge, 1.0});
    auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    const double n2 = d.squaredNorm();
    Eigen::MatrixXcd feas = D / (n2 * n2);
    CHECK(inner(D, feas) == doctest::Approx(1.0));
    const double obj_feas = feas.trace().real();
    CHECK(sol.objective <= obj_feas + 1e-7 * (1.0 + std::abs(obj_feas)));
    CHECK(sol.objective == doctest::Approx(1.0 / n2).epsilon(1e-6));
}

TEST_CASE("two-variable program with equality row") {
    // min Tr(V1) + Tr(V2) s.t. <I,V1> - <I,V2> = 1, <I,V2> >= 2.
    ConicProgram p;
    int v1 = p.add_variable(2);
    int v2 = p.add_variable(2);
    p.add_objective(v1, Eigen::MatrixXcd::Identity(2, 2));
    p.add_objective(v2, Eigen::MatrixXcd::Identity(2, 2));
    p.add_constraint({{{v1, Eigen::MatrixXcd::Identity(2, 2)},
                       {v2, -Eigen::MatrixXcd::Identity(2, 2)}},
                      Sense::Eq,
                      1.0});
    p.add_constraint({{{v2, Eigen::MatrixXcd::Identity(2, 2)}}, Sense::Ge, 2.0});
    auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(sol.max_violation <= 1e-7);
}

TEST_SUITE_END();
