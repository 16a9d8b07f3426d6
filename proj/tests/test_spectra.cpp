#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ctwave/field.hpp"
#include "ctwave/spectra.hpp"

using namespace ctwave;
using Catch::Approx;

TEST_CASE("dirichlet_length closed form") {
    CHECK(dirichlet_length(1.0, 0.0, 0.75) == Approx(2.0 * M_PI).epsilon(1e-13));
    CHECK(dirichlet_length(1.0, 1.0, 0.5) == Approx(2.0 * M_PI).epsilon(1e-13));
    // lambda_D(L) = a - c^2/4 - pi^2/L^2 recovers lambda0 at the constructed L.
    for (auto [a, c, l0] : {std::tuple{1.0, 0.0, 0.75}, {2.0, 1.0, 0.5}, {1.0, 0.5, 0.2}}) {
        const double L = dirichlet_length(a, c, l0);
        CHECK(a - 0.25 * c * c - M_PI * M_PI / (L * L) == Approx(l0).epsilon(1e-12));
    }
    SECTION("L diverges as lambda0 approaches a - c^2/4") {
        CHECK(dirichlet_length(1.0, 0.0, 1.0 - 1e-10) > 1e4);
    }
    CHECK_THROWS_AS(dirichlet_length(1.0, 0.0, 1.5), domain_error);
    CHECK_THROWS_AS(dirichlet_length(1.0, -1.0, 0.5), domain_error);
}

TEST_CASE("neumann_dirichlet_length and its eigenfunction") {
    const double a = 1.0, c = -1.0, l0 = 0.9;
    const double L = neumann_dirichlet_length(a, c, l0);
    CHECK(L == Approx(2.663879).margin(2e-5));
    SECTION("the explicit eigenfunction satisfies the boundary data") {
        const double h = 1e-6;
        const double d0 = (neumann_dirichlet_eigenfunction(a, c, l0, h) -
                           neumann_dirichlet_eigenfunction(a, c, l0, -h)) /
                          (2.0 * h);
        CHECK(std::abs(d0) < 1e-8);
        CHECK(neumann_dirichlet_eigenfunction(a, c, l0, L) == Approx(0.0).margin(1e-10));
        for (double t : {0.1, 0.3, 0.5, 0.7, 0.9})
            CHECK(neumann_dirichlet_eigenfunction(a, c, l0, t * L) > 0.0);
    }
    CHECK_THROWS_AS(neumann_dirichlet_length(1.0, 1.0, 0.9), domain_error);
    CHECK_THROWS_AS(neumann_dirichlet_length(1.0, -1.0, 1.5), domain_error);
    CHECK_THROWS_AS(neumann_dirichlet_length(1.0, -10.0, 0.0), domain_error);
}

TEST_CASE("principal_eigen matches closed forms") {
    SECTION("Dirichlet base case") {
        EigenProblem prob{1.0, 0.0, 2.0 * M_PI, nullptr, nullptr, EigenBC::DirichletDirichlet};
        const EigenPair pair = principal_eigen(prob, 2000);
        CHECK(pair.lambda == Approx(0.75).margin(1e-4));
        CHECK(pair.positive);
    }
    SECTION("closed form across several (a, c, L)") {
        for (auto [a, c, L] : {std::tuple{1.0, 0.0, 3.0}, {2.0, 1.0, 5.0}, {0.5, 0.25, 4.0}}) {
            EigenProblem prob{a, c, L, nullptr, nullptr, EigenBC::DirichletDirichlet};
            const int n = 1500;
            const double h = L / (n - 1);
            const EigenPair pair = principal_eigen(prob, n);
            const double exact = a - 0.25 * c * c - M_PI * M_PI / (L * L);
            CHECK(pair.lambda == Approx(exact).margin(10.0 * h * h));
        }
    }
    SECTION("Neumann-Dirichlet construction is recovered numerically") {
        const double a = 1.0, c = -1.0, l0 = 0.9;
        const double L = neumann_dirichlet_length(a, c, l0);
        EigenProblem prob{a, c, L, nullptr, nullptr, EigenBC::NeumannDirichlet};
        const EigenPair pair = principal_eigen(prob, 2000);
        CHECK(pair.lambda == Approx(l0).margin(1e-3));
        CHECK(pair.positive);
    }
}

TEST_CASE("constant zeroth-order perturbation shifts the eigenvalue exactly") {
    EigenProblem base{1.0, 0.5, 4.0, nullptr, nullptr, EigenBC::DirichletDirichlet};
    const double l_base = principal_eigen(base, 1200).lambda;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        EigenProblem shifted = base;
        shifted.b2 = [eps](double) { return -eps; };
        CHECK(principal_eigen(shifted, 1200).lambda == Approx(l_base - eps).margin(1e-10));
    }
}

TEST_CASE("perturbation continuity and monotonicity") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    EigenProblem base{1.0, 0.0, 2.0 * M_PI, nullptr, nullptr, EigenBC::DirichletDirichlet};
    const double l_base = principal_eigen(base, 1200).lambda;

    SECTION("small coefficients move the eigenvalue little") {
        double prev_dev = kInf;
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            const double r1 = unit(rng), r2 = unit(rng);
            EigenProblem prob = base;
            prob.b1 = [eps, r1](double x) { return eps * r1 * std::sin(x); };
            prob.b2 = [eps, r2](double x) { return eps * r2 * std::cos(2.0 * x); };
            const double dev = std::abs(principal_eigen(prob, 1200).lambda - l_base);
            CHECK(dev <= 5.0 * eps);
            CHECK(dev <= prev_dev + 1e-12);
            prev_dev = dev;
        }
    }
    SECTION("pointwise larger b2 gives a larger eigenvalue") {
        for (int trial = 0; trial < 3; ++trial) {
            const double k = 1.0 + trial;
            EigenProblem lo_prob = base;
            lo_prob.b2 = [k](double x) { return 0.3 * std::sin(k * x); };
            EigenProblem hi_prob = base;
            hi_prob.b2 = [k](double x) { return 0.3 * std::sin(k * x) + 0.2; };
            CHECK(principal_eigen(hi_prob, 1200).lambda >=
                  principal_eigen(lo_prob, 1200).lambda - 1e-10);
        }
    }
}

TEST_CASE("time-integration characterization agrees with the eigensolve") {
    SECTION("Dirichlet") {
        EigenProblem prob{1.0, 0.0, 2.0 * M_PI, nullptr, nullptr, EigenBC::DirichletDirichlet};
        const double lam = principal_eigen(prob, 1500).lambda;
        CHECK(growth_rate_estimate(prob, 1500) == Approx(lam).margin(1e-4));
    }
    SECTION("Neumann-Dirichlet") {
        const double L = neumann_dirichlet_length(1.0, -1.0, 0.9);
        EigenProblem prob{1.0, -1.0, L, nullptr, nullptr, EigenBC::NeumannDirichlet};
        const double lam = principal_eigen(prob, 1500).lambda;
        CHECK(growth_rate_estimate(prob, 1500) == Approx(lam).margin(1e-4));
    }
}

TEST_CASE("a nonpositive-residual positive test function certifies lambda <= 0") {
    // With b2 = -K the closed form gives lambda = a - K - c^2/4 - pi^2/L^2 < 0,
    // and phi = e^{-c x/2} sin(pi x / L) realizes the test-function hypotheses.
    const double a = 1.0, c = 0.5, L = 4.0, K = 2.0;
    EigenProblem prob{a, c, L, nullptr, [K](double) { return -K; },
                      EigenBC::DirichletDirichlet};
    const double exact = a - K - 0.25 * c * c - M_PI * M_PI / (L * L);
    REQUIRE(exact < 0.0);
    const double lam = principal_eigen(prob, 1200).lambda;
    CHECK(lam == Approx(exact).margin(1e-3));
    CHECK(lam <= 0.0);
}

namespace {

struct FakeWave {
    Profile U, V, Vp;
};

FakeWave make_fake_wave(const ModelParams& p, double c, double steep = 1.0) {
    const Grid g = Grid::uniform(-40.0, 40.0, 4001);
    FakeWave f;
    f.U = Profile::sample(g, [&](double x) {
        return 0.5 * (p.a / p.b) * (1.0 - std::tanh(steep * x));
    });
    f.V = solve_field_ode(f.U, p.tau, c);
    f.Vp = field_derivative(f.V);
    return f;
}

}  // namespace

TEST_CASE("nonexistence certificate on a synthetic profile") {
    ModelParams p{1.0, 1.0, 0.1, 0.5};
    SECTION("speed below 2 sqrt(a), Dirichlet route") {
        const FakeWave f = make_fake_wave(p, 1.0);
        const NonexistenceReport rep =
            nonexistence_certificate(f.U, f.V, f.Vp, 1.0, p);
        REQUIRE(rep.applicable);
        CHECK(rep.route == 'D');
        CHECK(rep.lambda_unperturbed == Approx(rep.lambda0).margin(1e-3));
        REQUIRE(rep.runs.size() == 2);
        for (const auto& run : rep.runs) {
            CHECK_FALSE(run.inconclusive);
            CHECK(run.lambda_eps > 0.0);
            CHECK(run.positive_on_window);
            CHECK(run.contradiction);
        }
        CHECK(rep.contradiction_all);
        // The fake is not stationary: its residual on the window is visibly nonzero.
        CHECK(rep.runs[0].residual_sup > 1e-4);
    }
    SECTION("negative speed, Neumann-Dirichlet route") {
        const FakeWave f = make_fake_wave(p, -0.5);
        const NonexistenceReport rep =
            nonexistence_certificate(f.U, f.V, f.Vp, -0.5, p);
        REQUIRE(rep.applicable);
        CHECK(rep.route == 'N');
        CHECK(rep.contradiction_all);
    }
    SECTION("gating: certificate does not apply at admissible speeds") {
        const FakeWave f = make_fake_wave(p, 2.5);
        const NonexistenceReport rep =
            nonexistence_certificate(f.U, f.V, f.Vp, 2.5, p);
        CHECK_FALSE(rep.applicable);
    }
    SECTION("non-decaying profile is inconclusive") {
        const Grid g = Grid::uniform(-40.0, 40.0, 2001);
        const Profile flat = Profile::sample(g, [](double) { return 1.0; });
        const Profile V = solve_field_ode(flat, p.tau, 1.0);
        const NonexistenceReport rep =
            nonexistence_certificate(flat, V, field_derivative(V), 1.0, p);
        REQUIRE(rep.applicable);
        for (const auto& run : rep.runs) CHECK(run.inconclusive);
        CHECK_FALSE(rep.contradiction_all);
    }
}
