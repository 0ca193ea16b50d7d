#include "lvwigner/classical.hpp"
#include "lvwigner/error.hpp"
#include "lvwigner/gaussian.hpp"
#include "lvwigner/thermo.hpp"
#include "lvwigner/wignerflow.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace lvw;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

// Largest fifth central difference quotient of f along one axis on the grid,
// an estimate of max|f^(5)| for the O(h^4) truncation bound.
double fifth_derivative(const PhaseGrid& g, const std::function<double(PhasePoint)>& f, bool along_x)
{
    const double h = along_x ? g.dx() : g.dk();
    double m = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nk; ++j) {
            const PhasePoint p = g.point(i, j);
            auto at = [&](int s) { return along_x ? f({p.x + s * h, p.k}) : f({p.x, p.k + s * h}); };
            const double d5 = (at(3) - 4 * at(2) + 5 * at(1) - 5 * at(-1) + 4 * at(-2) - at(-3)) / (2 * std::pow(h, 5));
            m = std::max(m, std::abs(d5));
        }
    return m;
}

double continuity_bound(const PhaseGrid& g, const FlowSampler& s)
{
    const double mx = fifth_derivative(g, [&](PhasePoint p) { return s(p).Jx; }, true);
    const double mk = fifth_derivative(g, [&](PhasePoint p) { return s(p).Jk; }, false);
    return 2.0 * (std::pow(g.dx(), 4) * mx + std::pow(g.dk(), 4) * mk) / 30.0;
}

double interior_max(const ScalarField& f)
{
    double m = 0.0;
    for (std::size_t n = 0; n < f.values.size(); ++n)
        if (!f.masked(n))
            m = std::max(m, std::abs(f.values[n]));
    return m;
}

} // namespace

TEST_CASE("series coefficient is (-1/4)^eta / (2 eta + 1)!")
{
    CHECK(series_coefficient(0) == 1.0);
    CHECK(series_coefficient(1) == doctest::Approx(-1.0 / 24.0).epsilon(1e-15));
    CHECK(series_coefficient(2) == doctest::Approx(1.0 / (16.0 * 120.0)).epsilon(1e-15));
    CHECK(series_coefficient(3) == doctest::Approx(-1.0 / (64.0 * 5040.0)).epsilon(1e-15));
}

TEST_CASE("series_currents at eta_max = 0 reproduce the classical currents")
{
    const GaussianParams G{0.9, 0.0};
    const auto E = gaussian_ensemble(G);
    const PhaseGrid g = PhaseGrid::square(3.0, 31);
    for (const auto& H : {lv_hamiltonian(1.0), lv_hamiltonian(2.5), camouflage_hamiltonian(tuned_camouflage(1.0, 2.0, 0.0)),
                          quartic_test_hamiltonian()}) {
        const auto S = series_currents(H, E, g, 0);
        const auto C = classical_flow(H, E.value, g);
        for (std::size_t n = 0; n < g.size(); ++n) {
            CHECK(S.Jx[n] == C.Jx[n]);
            CHECK(S.Jk[n] == C.Jk[n]);
            CHECK(S.W[n] == C.W[n]);
        }
    }
}

TEST_CASE("quartic test model: exact truncation matches the hand-expanded series")
{
    const auto H = quartic_test_hamiltonian();
    const double alpha = 1.3;
    const auto E = gaussian_ensemble({alpha, 0.0});
    for (double x : {-1.1, 0.4, 0.9})
        for (double k : {-0.7, 0.2, 1.4}) {
            const PhasePoint p{x, k};
            const double W = E.value(p);
            const double Wkk = W * (4 * std::pow(alpha, 4) * k * k - 2 * alpha * alpha);
            // K = k^2: only eta = 0 survives.  V = x^4: eta = 0 and eta = 1 with
            // coefficient -1/24 on the third derivative 24 x.
            const double jx = 2 * k * W;
            const double jk = -(4 * x * x * x * W - x * Wkk);
            const Vec2 j0 = series_current_at(H, E, p, 0);
            for (int eta : {1, 2, 5, 20}) {
                const Vec2 j = series_current_at(H, E, p, eta);
                CHECK(j.x == doctest::Approx(j0.x).epsilon(1e-15));
                CHECK(j.x == doctest::Approx(jx).epsilon(1e-13));
                CHECK(j.k == doctest::Approx(jk).epsilon(1e-13));
            }
            CHECK(std::abs(j0.k - jk) > 1e-6 * std::abs(x * Wkk) * 0.5);
        }
}

TEST_CASE("series current at eta_max = 40 equals the erf closed form")
{
    const auto H = lv_hamiltonian(1.0);
    const GaussianParams G{1.0, 0.0};
    const auto E = gaussian_ensemble(G);
    const Vec2 s = series_current_at(H, E, {1.0, 1.0}, 40);
    const Vec2 c = lv_currents(G, 1.0, {1.0, 1.0});
    CHECK(std::abs(s.x - c.x) <= 1e-8);
    CHECK(std::abs(s.k - c.k) <= 1e-8);
}

TEST_CASE("series order is range checked")
{
    const auto E = gaussian_ensemble({1.0, 0.0});
    CHECK_THROWS_AS(series_current_at(lv_hamiltonian(1.0), E, {0.0, 0.0}, 61), DomainError);
    CHECK_THROWS_AS(series_current_at(lv_hamiltonian(1.0), E, {0.0, 0.0}, -1), DomainError);
}

TEST_CASE("series terms that blow up are reported as overflow")
{
    // cosh(nu x) derivatives grow like nu^(2 eta + 1); with nu = 40 the
    // truncated sum diverges long before eta = 60.
    const CamouflageParams c{40.0, 1.0, 40.0, 1.0, 0.0, 0.0};
    const auto E = gaussian_ensemble({1.0, 0.0});
    CHECK_THROWS_AS(series_current_at(camouflage_hamiltonian(c), E, {0.5, 0.5}, 60), OverflowError);
}

TEST_CASE("stationarity_series examples")
{
    const ThermoParams P{1.0, 1.0};
    const auto H = lv_hamiltonian(1.0);
    const auto W0 = td_ensemble(P, Which::classical);
    const PhaseGrid g = PhaseGrid::square(3.0, 25);
    const auto zero = stationarity_series(H, W0, g, 0);
    CHECK(zero.max_abs() <= 1e-15);

    const auto c = tuned_camouflage(1.0, 2.0, 0.0);
    const auto Hc = camouflage_hamiltonian(c);
    const auto G = gaussian_ensemble({1.0, 0.0});
    const auto st = stationarity_series(Hc, G, PhaseGrid::square(4.0, 41), 40);
    CHECK(st.max_abs() <= 1e-8);

    const GaussianParams G1{1.0, 0.0};
    const double v = stationarity_at(H, G, {1.0, 0.0}, 40);
    const Vec2 d = lv_divergences(G1, 1.0, {1.0, 0.0});
    CHECK(std::abs(v) > 1e-3);
    CHECK(std::abs(v + (d.x + d.k)) <= 1e-8);
}

TEST_CASE("property: stationarity equals minus the analytic divergence of the same truncation")
{
    const PhaseGrid g = PhaseGrid::square(3.0, 13);
    const auto G = gaussian_ensemble({0.8, 0.0});
    const auto T = td_ensemble({1.5, 2.0}, Which::corrected);
    for (int eta : {0, 1, 3, 10}) {
        for (const auto* E : {&G, &T}) {
            const auto H = lv_hamiltonian(2.0);
            const auto st = stationarity_series(H, *E, g, eta);
            const auto dv = series_divergence(H, *E, g, eta);
            for (std::size_t n = 0; n < g.size(); ++n)
                CHECK(std::abs(st.values[n] + dv.values[n]) <= 1e-10);
        }
    }
}

TEST_CASE("liouvillian_series examples")
{
    const auto H = lv_hamiltonian(1.0);
    const auto G = gaussian_ensemble({1.0, 0.0});
    const PhaseGrid g = PhaseGrid::square(3.0, 25);
    const auto z = liouvillian_series(H, G, g, 0);
    CHECK(z.max_abs() == 0.0);

    // At O(hbar^2) the series built on W0 equals minus the generic closed form,
    // which for a = 1 coincides with the LV closed form.
    for (double a : {0.5, 1.0, 2.0}) {
        const ThermoParams P{1.2, a};
        const auto Ha = lv_hamiltonian(a);
        const auto W0 = td_ensemble(P, Which::classical);
        for (double x : {-1.0, 0.0, 0.7})
            for (double k : {-0.5, 0.3, 1.2}) {
                const auto s = liouvillian_at(Ha, W0, {x, k}, 1, 1e-300);
                REQUIRE(s.has_value());
                CHECK(std::abs(*s + td_liouvillian_general(Ha, P, {x, k})) <= 1e-8);
                if (a == 1.0)
                    CHECK(std::abs(*s + td_liouvillian(P, {x, k})) <= 1e-8);
            }
    }

    const ThermoParams P{1.0, 1.0};
    const auto W0 = td_ensemble(P, Which::classical);
    for (double t : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
        CHECK(std::abs(td_liouvillian(P, {t, t})) <= 1e-15);
        CHECK(std::abs(*liouvillian_at(H, W0, {t, t}, 1, 1e-300)) <= 1e-12);
    }
}

TEST_CASE("liouvillian_series masks points below the floor")
{
    const auto H = lv_hamiltonian(1.0);
    const auto G = gaussian_ensemble({2.0, 0.0});
    const PhaseGrid g = PhaseGrid::square(6.0, 25);
    const auto f = liouvillian_series(H, G, g, 3);
    CHECK(f.masked_count() > 0);
    CHECK(f.masked_count() < g.size());
    CHECK_FALSE(liouvillian_at(H, G, {6.0, 6.0}, 3, 1e-12).has_value());
}

TEST_CASE("continuity_residual examples")
{
    const PhaseGrid g = PhaseGrid::square(3.0, 121);
    auto zero = sample_scalar(g, [](PhasePoint) { return 0.0; }, "zero");

    {
        const ThermoParams P{1.0, 1.0};
        const auto H = lv_hamiltonian(1.0);
        const FlowSampler s = [&](PhasePoint p) {
            const double w = classical_weight(P, p);
            const Vec2 v = classical_velocity(H, p);
            return FlowSample{w, v.x * w, v.k * w};
        };
        const auto F = sample_flow(g, s, "classical");
        const auto r = continuity_residual(F, zero);
        CHECK(r.masked_count() == g.size() - 117 * 117);
        CHECK(interior_max(r) <= continuity_bound(g, s));
        CHECK(interior_max(r) > 0.0);
    }
    {
        const GaussianParams G{1.0, 0.0};
        const auto s = lv_gaussian_sampler(G, 0.7);
        const auto F = sample_flow(g, s, "gaussian");
        const auto dW = sample_scalar(g, [&](PhasePoint p) { const Vec2 d = lv_divergences(G, 0.7, p); return -(d.x + d.k); },
                                      "closed form");
        CHECK(interior_max(continuity_residual(F, dW)) <= continuity_bound(g, s));
    }
    {
        const auto Hc = camouflage_hamiltonian(tuned_camouflage(1.0, 2.0, 0.0));
        const auto s = series_sampler(Hc, gaussian_ensemble({1.0, 0.0}), 30);
        const PhaseGrid gc = PhaseGrid::square(3.0, 61);
        const auto F = sample_flow(gc, s, "series");
        auto z = sample_scalar(gc, [](PhasePoint) { return 0.0; }, "zero");
        CHECK(interior_max(continuity_residual(F, z)) <= continuity_bound(gc, s));
    }
}

TEST_CASE("quantum_velocity examples")
{
    const PhaseGrid g = PhaseGrid::square(1.0, 3);
    FlowField F{g, std::vector<double>(9, 0.5), std::vector<double>(9, 0.2), std::vector<double>(9, -0.1), "hand"};
    F.W[0] = 0.0;
    const auto w = quantum_velocity(F, 1e-12);
    CHECK(w.x[4] == doctest::Approx(0.4));
    CHECK(w.k[4] == doctest::Approx(-0.2));
    CHECK(w.masked_count() == 1);
    CHECK(w.masked(0));
    CHECK_THROWS_AS(quantum_velocity(F, 0.0), DomainError);

    const auto H = lv_hamiltonian(1.3);
    const PhaseGrid g2 = PhaseGrid::square(3.0, 31);
    const auto C = classical_flow(H, [](PhasePoint p) { return std::exp(-p.x * p.x - p.k * p.k); }, g2);
    const auto wc = quantum_velocity(C, default_w_floor(C));
    for (int i = 0; i < g2.nx; ++i)
        for (int j = 0; j < g2.nk; ++j) {
            const auto n = g2.index(i, j);
            if (wc.masked(n))
                continue;
            const Vec2 v = classical_velocity(H, g2.point(i, j));
            CHECK(wc.x[n] == doctest::Approx(v.x).epsilon(1e-14).scale(1.0));
            CHECK(wc.k[n] == doctest::Approx(v.k).epsilon(1e-14).scale(1.0));
        }
}

TEST_CASE("property: gaussian quantum velocity approaches the classical one as alpha^2")
{
    const auto H = lv_hamiltonian(1.0);
    const PhaseGrid g = PhaseGrid::square(1.0, 21);
    std::vector<double> dev;
    for (double alpha : {0.2, 0.1, 0.05}) {
        const GaussianParams G{alpha, 0.0};
        double m = 0.0;
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.nk; ++j) {
                const PhasePoint p = g.point(i, j);
                const Vec2 w = gaussian_velocity(G, 1.0, p, default_gaussian_floor(G));
                const Vec2 v = classical_velocity(H, p);
                m = std::max({m, std::abs(w.x - v.x), std::abs(w.k - v.k)});
            }
        dev.push_back(m);
    }
    for (int n = 0; n + 1 < 3; ++n) {
        const double slope = std::log(dev[n] / dev[n + 1]) / std::log(2.0);
        CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
    }
}

TEST_CASE("purity examples and property")
{
    for (double alpha : {0.5, 1.0 / kSqrt2, 1.0, kSqrt2}) {
        const GaussianParams G{alpha, 0.0};
        const auto r = purity(gaussian_ensemble(G), gaussian_recommended_grid(G));
        CAPTURE(alpha);
        CHECK(std::abs(r.value - alpha * alpha) <= 1e-8);
        CHECK_FALSE(r.boundary_warning);
    }
    const GaussianParams one{1.0, 0.0}, half{0.5, 0.0}, big{kSqrt2, 0.0};
    CHECK(purity(gaussian_ensemble(one), gaussian_recommended_grid(one)).value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(purity(gaussian_ensemble(half), gaussian_recommended_grid(half)).value == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(purity(gaussian_ensemble(big), gaussian_recommended_grid(big)).value == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(big.unphysical());
    CHECK_FALSE(one.unphysical());

    // A grid that cuts into the tails raises the boundary warning.
    CHECK(purity(gaussian_ensemble(half), PhaseGrid::square(2.0, 41)).boundary_warning);
}

TEST_CASE("expectation examples")
{
    const GaussianParams G{1.0, 0.0};
    const auto E = gaussian_ensemble(G);
    const auto g = gaussian_recommended_grid(G);
    CHECK(std::abs(expectation(E, [](PhasePoint) { return 1.0; }, g).value - 1.0) <= 1e-8);
    CHECK(std::abs(expectation(E, [](PhasePoint p) { return p.x; }, g).value) <= 1e-10);
    CHECK(std::abs(expectation(E, [](PhasePoint p) { return p.x * p.x; }, g).value - 0.5) <= 1e-8);
}

TEST_CASE("property: normalization on each recommended grid")
{
    for (double alpha : {0.5, 1.0, 2.0}) {
        const GaussianParams G{alpha, 0.0};
        const auto r = expectation(gaussian_ensemble(G), [](PhasePoint) { return 1.0; }, gaussian_recommended_grid(G));
        CHECK(std::abs(r.value - 1.0) <= 1e-8);
    }
    for (double a : {0.5, 1.0, 4.0})
        for (double beta : {0.5, 1.0, 2.0}) {
            const ThermoParams P{beta, a};
            const auto r = expectation(td_ensemble(P, Which::classical), [](PhasePoint) { return 1.0; }, recommended_grid(P));
            CAPTURE(a);
            CAPTURE(beta);
            CHECK(std::abs(r.value - 1.0) <= 1e-8);
        }
}

TEST_CASE("property: series truncations converge monotonically beyond eta_max = 10")
{
    for (double alpha : {0.5, 1.0, kSqrt2}) {
        const auto E = gaussian_ensemble({alpha, 0.0});
        const auto H = lv_hamiltonian(1.0);
        const PhaseGrid g = PhaseGrid::square(3.0, 13);
        double previous = 1e300;
        for (int eta = 10; eta + 5 <= 40; eta += 5) {
            double m = 0.0;
            for (int i = 0; i < g.nx; ++i)
                for (int j = 0; j < g.nk; ++j) {
                    const Vec2 a = series_current_at(H, E, g.point(i, j), eta);
                    const Vec2 b = series_current_at(H, E, g.point(i, j), eta + 5);
                    m = std::max({m, std::abs(a.x - b.x), std::abs(a.k - b.k)});
                }
            CAPTURE(alpha);
            CAPTURE(eta);
            // Once the difference sits at rounding level it can no longer shrink.
            CHECK((m < previous || m <= 1e-15));
            previous = m;
        }
    }
}

TEST_CASE("find_stagnation: classical LV flow has the single fixed point")
{
    const auto H = lv_hamiltonian(1.0);
    const ThermoParams P{1.0, 1.0};
    const auto F = classical_flow(H, [&](PhasePoint p) { return classical_weight(P, p); }, PhaseGrid::square(3.0, 121));
    const auto rep = find_stagnation(F, 1e-10);
    REQUIRE(rep.points.size() == 1);
    CHECK(std::hypot(rep.points[0].p.x, rep.points[0].p.k) <= 1e-8);
    CHECK(rep.points[0].residual <= 1e-10);
    CHECK(rep.non_converged.empty());
    CHECK_THROWS_AS(find_stagnation(F, 0.0), DomainError);
}

TEST_CASE("find_stagnation: gaussian ensembles have only the shifted centre on the diagonal")
{
    // The erf currents vanish where Jx = Jk = 0 on x = k; that point sits near
    // (ln S, ln S) with S slightly above one, so it is a genuine stagnation
    // point of the flow.
    for (double alpha : {1.0 / kSqrt2, 1.0, kSqrt2}) {
        const GaussianParams G{alpha, 0.0};
        const auto s = lv_gaussian_sampler(G, 1.0);
        const auto F = sample_flow(PhaseGrid{}, s, "erf");
        const auto rep = find_stagnation(F, 1e-10, s, default_gaussian_floor(G));
        CAPTURE(alpha);
        int vortices = 0;
        for (const auto& q : rep.points) {
            CHECK(q.residual <= 1e-10);
            if (classify_critical_point(s, q.p).type == CriticalType::vortex) {
                ++vortices;
                CHECK(q.p.x == doctest::Approx(q.p.k).epsilon(1e-9));
                CHECK(q.p.x > 0.0);
                CHECK(q.p.x < 0.25);
            }
        }
        CHECK(vortices == 1);
    }
}

TEST_CASE("find_stagnation: thermodynamic flow at beta = 5 has nontrivial crossings")
{
    const ThermoParams P{5.0, 1.0};
    const auto s = td_sampler(P);
    const auto F = sample_flow(PhaseGrid::square(3.0, 241), s, "td");
    const auto rep = find_stagnation(F, 1e-10, s);
    int nontrivial = 0;
    for (const auto& q : rep.points)
        if (std::hypot(q.p.x, q.p.k) > 0.25)
            ++nontrivial;
    CHECK(nontrivial >= 1);
}

TEST_CASE("winding_number examples")
{
    const auto H = lv_hamiltonian(1.0);
    const ThermoParams P{1.0, 1.0};
    const FlowSampler classical = [&](PhasePoint p) {
        const double w = classical_weight(P, p);
        const Vec2 v = classical_velocity(H, p);
        return FlowSample{w, v.x * w, v.k * w};
    };
    // Counter-clockwise loop away from any zero.
    CHECK(winding_number(classical, circle_loop({1.5, 1.5}, 0.5)).winding == 0);
    // The classical centre: J turns once, in the same sense as the loop.
    for (double r : {0.05, 0.3, 1.0}) {
        const auto w = winding_number(classical, circle_loop({0.0, 0.0}, r));
        CHECK(w.winding == 1);
        CHECK(w.residual <= 0.05);
    }
    // The circulation itself is clockwise.
    const auto info = classify_critical_point(classical, {0.0, 0.0});
    CHECK(info.type == CriticalType::vortex);
    CHECK(info.sense == -1);

    // Gridded form agrees with the sampler form.
    const auto F = sample_flow(PhaseGrid::square(2.0, 81), classical, "classical");
    CHECK(winding_number(F, circle_loop({0.0, 0.0}, 0.5)).winding == 1);
}

TEST_CASE("winding_number around a thermodynamic saddle is -1")
{
    const ThermoParams P{5.0, 1.0};
    const auto s = td_sampler(P);
    const auto F = sample_flow(PhaseGrid::square(3.0, 241), s, "td");
    const auto rep = find_stagnation(F, 1e-10, s);
    int saddles = 0;
    for (const auto& q : rep.points) {
        const auto info = classify_critical_point(s, q.p);
        if (info.type != CriticalType::saddle)
            continue;
        ++saddles;
        CHECK(winding_number(s, circle_loop(q.p, 0.01)).winding == -1);
    }
    CHECK(saddles >= 1);
}

TEST_CASE("winding_number refuses loops through a zero")
{
    const FlowSampler s = [](PhasePoint p) { return FlowSample{1.0, p.k, -p.x}; };
    CHECK_THROWS_AS(winding_number(s, circle_loop({1.0, 0.0}, 1.0)), IllConditioned);
    CHECK_THROWS_AS(winding_number(s, std::vector<PhasePoint>{{0, 0}, {1, 0}}), DomainError);
}
