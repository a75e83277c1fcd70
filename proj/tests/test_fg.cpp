#include <catch2/catch_amalgamated.hpp>

#include "lovelock/fg_expansion.hpp"
#include "test_support.hpp"

using namespace lovelock;
using lovelock::testing::Rng;

namespace {

bool sym2_zero_to(const Sym2<ScalarJet>& s, int d) {
    for (const auto& e : s.v)
        if (!e.truncated(d < 0 ? 0 : d).is_zero()) return false;
    return true;
}

}  // namespace

TEST_CASE("fg expansion parity and schouten coefficient") {
    Rng rng(5);
    for (int n : {3, 4}) {
        int cap = 6;
        auto h0 = rng.boundary_metric(n, cap, 3);
        CouplingVector cv(n, {Rat(1)});
        auto res = fg_solve(h0, cv, n);
        CHECK(res.h[1].is_zero());
        CHECK(res.h[3].is_zero());
        auto p = boundary_schouten(h0, n);
        CHECK(sym2_zero_to(res.h[2] + p, cap - 4));
    }
}

TEST_CASE("fg residual vanishes to the solved order") {
    Rng rng(9);
    int n = 3, cap = 6;
    auto h0 = rng.boundary_metric(n, cap, 3);
    // a two-term coupling with the same asymptotics
    CouplingVector cv(n, {Rat(1)});
    auto res = fg_solve(h0, cv, n);
    auto ords = fg_residual_orders(res, cv, n);
    CHECK(ords[0] >= n + 1);
    CHECK(ords[1] >= n);  // off-diagonal block: one order is not imposed
    CHECK(ords[2] >= n + 1);
    // n odd: no log term and tr(h_n) = 0 forces h_n = 0 entirely
    CHECK_FALSE(res.has_log);
    CHECK(res.obstruction.is_zero());
    CHECK(res.h[n].is_zero());
}

TEST_CASE("fg log term appears at n=4 and the log-ring residual closes") {
    Rng rng(13);
    int n = 4, cap = 6;
    auto h0 = rng.boundary_metric(n, cap, 2);
    for (auto& al : std::vector<std::vector<Rat>>{{Rat(1)}, {Rat(1), rat(1, 2)}}) {
        CouplingVector cv(n, al);
        auto res = fg_solve(h0, cv, n);
        CHECK(res.has_log);
        CHECK_FALSE(res.obstruction.is_zero());
        CHECK(fg_verify_log(res, cv) == -1);
        // h_{n,1} is trace-free against h_0 within its valid degree
        Sym2<ScalarJet> h0bulk = res.h[0];
        h0bulk.at(0, 0) = ring_one(h0bulk.v[0]);
        auto h0up = sym2_inverse(h0bulk);
        CHECK(fgdetail::boundary_trace(h0up, res.hlog, n + 1)
                  .truncated(cap - 2 - n)
                  .is_zero());
    }
}

TEST_CASE("fg coefficients scale like h_k -> c^(2-k) h_k") {
    Rng rng(17);
    int n = 4, cap = 6;
    auto h0 = rng.boundary_metric(n, cap, 2);
    CouplingVector cv(n, {Rat(1), rat(-1, 3)});
    auto res = fg_solve(h0, cv, n);
    Rat c2 = 4;  // c = 2
    Sym2<ScalarJet> h0s = h0;
    for (auto& e : h0s.v) e = c2 * e;
    auto ress = fg_solve(h0s, cv, n);
    for (int k = 0; k <= n; ++k) {
        Rat factor = c2 / rat_pow(Rat(2), k);  // c^(2-k)
        Sym2<ScalarJet> expect = res.h[k];
        for (auto& e : expect.v) e = factor * e;
        CHECK(sym2_zero_to(ress.h[k] - expect, cap - 2 - k));
    }
    Sym2<ScalarJet> expect_log = res.hlog;
    for (auto& e : expect_log.v) e = (c2 / rat_pow(Rat(2), n)) * e;
    CHECK(sym2_zero_to(ress.hlog - expect_log, cap - 2 - n));
}

TEST_CASE("obstruction tensor is trace and divergence free") {
    Rng rng(21);
    int n = 4, m = 5, cap = 8;
    auto h0 = rng.boundary_metric(n, cap, 2, 2);
    CouplingVector cv(n, {Rat(1), Rat(1)});
    auto res = fg_solve(h0, cv, n);
    REQUIRE_FALSE(res.obstruction.is_zero());

    Sym2<ScalarJet> h0bulk = res.h[0];
    h0bulk.at(0, 0) = ring_one(h0bulk.v[0]);
    auto h0up = sym2_inverse(h0bulk);
    int valid = cap - 2 - n;
    CHECK(fgdetail::boundary_trace(h0up, res.obstruction, m).truncated(valid).is_zero());

    // divergence against h_0, computed through the product-collar connection
    MetricJet<ScalarJet> gb(h0bulk);
    auto gam = christoffel(gb);
    auto div = gauge_delta(gb, gam, res.obstruction);
    for (int i = 1; i < m; ++i) CHECK(div[i].truncated(valid - 1).is_zero());
}

TEST_CASE("obstruction vanishes for a conformally flat boundary") {
    Rng rng(29);
    int n = 4, m = 5, cap = 6;
    // h_0 = (1 + w)^2 delta with a sparse boundary polynomial w
    ScalarJet w(m, cap);
    w.set_coeff({0, 1, 1, 0, 0}, rat(1, 4));
    w.set_coeff({0, 0, 0, 2, 1}, rat(-1, 5));
    w.set_coeff({0, 1, 0, 0, 0}, rat(1, 3));
    ScalarJet conf = (ScalarJet::constant(m, cap, 1) + w);
    conf = conf * conf;
    Sym2<ScalarJet> h0(m, ScalarJet(m, cap));
    for (int i = 1; i < m; ++i) h0.at(i, i) = conf;
    CouplingVector cv(n, {Rat(1), rat(1, 2)});
    auto res = fg_solve(h0, cv, n);
    CHECK(sym2_zero_to(res.obstruction, cap - 2 - n));
    CHECK_FALSE(res.has_log);
}

TEST_CASE("einstein oracle for the pure q=1 coupling") {
    Rng rng(35);
    for (int trial = 0; trial < 3; ++trial) {
        int n = 3, m = 4, cap = 6;
        auto h0 = rng.boundary_metric(n, cap, 2);
        CouplingVector cv(n, {Rat(1)});
        auto res = fg_solve(h0, cv, n);
        // E = x Ric(gbar) + (n-1) Hess x + (tr Hess x) gbar vanishes iff
        // x^{-2} gbar is Einstein with Ric = -n g
        Sym2<ScalarJet> gbar = fgdetail::assemble(m, res.h);
        MetricJet<ScalarJet> g(gbar);
        ScalarJet x = ScalarJet::variable(m, cap, 0);
        auto gam = christoffel(g);
        auto ric = form_to_sym2(ricci_2q_from_rm(riemann(g, gam), g.up, 1));
        auto hx = hessian(g, gam, x);
        ScalarJet lap(m, cap);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) lap = lap + g.up[a][b] * hx.at(a, b);
        Sym2<ScalarJet> e(m, ScalarJet(m, cap));
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j)
                e.at(i, j) = x * ric.at(i, j) + Rat(n - 1) * hx.at(i, j) +
                             lap * gbar.at(i, j);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                ScalarJet comp = e.at(i, j);
                for (int s = 0; s <= n; ++s) {
                    // orders involving the unsolved coefficients h_{n+1}, ...
                    if (s == n || (i == 0 && j > 0 && s >= n - 1)) continue;
                    int valid = cap - 3 - s;
                    CHECK(comp.coeff_of_power(0, s).truncated(valid < 0 ? 0 : valid).is_zero());
                }
            }
    }
}
