#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "lovelock/doubleform.hpp"
#include "test_support.hpp"

using namespace lovelock;
using lovelock::testing::Rng;

using DF = DoubleForm<Rat>;
using Mat = std::vector<std::vector<Rat>>;

namespace {

Mat identity(int m) {
    Mat g(m, std::vector<Rat>(m, Rat(0)));
    for (int i = 0; i < m; ++i) g[i][i] = 1;
    return g;
}

Mat random_posdef(Rng& rng, int m) {
    // identity plus a small symmetric perturbation: stays positive definite
    Mat g = identity(m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            Rat d = rng.ratval(1, 5);
            if (i == j)
                g[i][j] += d * d;
            else
                g[i][j] = g[j][i] = d * rat(1, 4);
        }
    return g;
}

Mat invert(const Mat& g) {
    int m = int(g.size());
    Mat a = g, inv = identity(m);
    for (int col = 0; col < m; ++col) {
        int piv = col;
        while (piv < m && a[piv][col] == 0) ++piv;
        REQUIRE(piv < m);
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        Rat f = Rat(1) / a[col][col];
        for (int j = 0; j < m; ++j) {
            a[col][j] *= f;
            inv[col][j] *= f;
        }
        for (int r = 0; r < m; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rat s = a[r][col];
            for (int j = 0; j < m; ++j) {
                a[r][j] -= s * a[col][j];
                inv[r][j] -= s * inv[col][j];
            }
        }
    }
    return inv;
}

DF random_form(Rng& rng, int m, int p, int q) {
    DF f(m, p, q, Rat(0));
    if (f.trivial()) return f;
    const auto& cp = detail::combs(m, p).masks;
    const auto& cq = detail::combs(m, q).masks;
    for (int a : cp)
        for (int b : cq) f.at(a, b) = rng.ratval();
    return f;
}

DF random_symmetric_form(Rng& rng, int m, int p) {
    DF f = random_form(rng, m, p, p);
    const auto& cp = detail::combs(m, p).masks;
    for (int a : cp)
        for (int b : cp) f.at(b, a) = f.at(a, b);
    return f;
}

std::vector<int> mask_to_list(int mask) {
    std::vector<int> v;
    for (int i = 0; i < 8; ++i)
        if (mask & (1 << i)) v.push_back(i);
    return v;
}

int perm_sign(const std::vector<int>& perm) {
    int s = 1;
    for (size_t i = 0; i < perm.size(); ++i)
        for (size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) s = -s;
    return s;
}

// Brute-force Kulkarni-Nomizu product: the displayed antisymmetrized sum with
// the 1/(p!q!r!s!) normalization, evaluated over all permutations.
DF oracle_kn(const DF& w, const DF& e) {
    int m = w.m(), p = w.p(), q = w.q(), r = e.p(), s = e.q();
    DF out(m, p + r, q + s, Rat(0));
    if (out.trivial()) return out;
    Rat norm = Rat(1) / (rat_factorial(p) * rat_factorial(q) * rat_factorial(r) * rat_factorial(s));
    const auto& CA = detail::combs(m, p + r).masks;
    const auto& CB = detail::combs(m, q + s).masks;
    for (int A : CA)
        for (int B : CB) {
            auto xs = mask_to_list(A), ys = mask_to_list(B);
            Rat acc = 0;
            std::vector<int> sigma(xs.size());
            std::iota(sigma.begin(), sigma.end(), 0);
            do {
                std::vector<int> tau(ys.size());
                std::iota(tau.begin(), tau.end(), 0);
                do {
                    std::vector<int> wI, wK, eI, eK;
                    for (int i = 0; i < p; ++i) wI.push_back(xs[sigma[i]]);
                    for (int i = p; i < p + r; ++i) eI.push_back(xs[sigma[i]]);
                    for (int j = 0; j < q; ++j) wK.push_back(ys[tau[j]]);
                    for (int j = q; j < q + s; ++j) eK.push_back(ys[tau[j]]);
                    acc += Rat(perm_sign(sigma) * perm_sign(tau)) * w.comp(wI, wK) * e.comp(eI, eK);
                } while (std::next_permutation(tau.begin(), tau.end()));
            } while (std::next_permutation(sigma.begin(), sigma.end()));
            out.at(A, B) = norm * acc;
        }
    return out;
}

// Orthonormal-frame contraction oracle for a general metric: Gram-Schmidt
// orthogonal frame f_i with <f_i,f_i> = d_i, then sum (1/d_i) w(f_i^,V; f_i^,W).
DF oracle_contract(const DF& w, const Mat& g) {
    int m = w.m(), p = w.p(), q = w.q();
    if (p == 0 || q == 0) return DF(m, 0, 0, Rat(0));
    DF out(m, p - 1, q - 1, Rat(0));
    if (w.trivial()) return out;
    // Gram-Schmidt in coordinates
    std::vector<std::vector<Rat>> f(m, std::vector<Rat>(m, Rat(0)));
    std::vector<Rat> d(m);
    for (int i = 0; i < m; ++i) {
        f[i][i] = 1;
        for (int j = 0; j < i; ++j) {
            Rat ip = 0;
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) ip += f[i][a] * g[a][b] * f[j][b];
            for (int a = 0; a < m; ++a) f[i][a] -= ip / d[j] * f[j][a];
        }
        Rat nn = 0;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) nn += f[i][a] * g[a][b] * f[i][b];
        d[i] = nn;
        REQUIRE(nn != 0);
    }
    const auto& CI = detail::combs(m, p - 1).masks;
    const auto& CJ = detail::combs(m, q - 1).masks;
    for (int I : CI)
        for (int J : CJ) {
            auto vi = mask_to_list(I), vj = mask_to_list(J);
            Rat acc = 0;
            for (int i = 0; i < m; ++i) {
                Rat inner = 0;
                for (int a = 0; a < m; ++a) {
                    if (f[i][a] == 0) continue;
                    for (int b = 0; b < m; ++b) {
                        if (f[i][b] == 0) continue;
                        std::vector<int> Iu{a}, Ju{b};
                        Iu.insert(Iu.end(), vi.begin(), vi.end());
                        Ju.insert(Ju.end(), vj.begin(), vj.end());
                        inner += f[i][a] * f[i][b] * w.comp(Iu, Ju);
                    }
                }
                acc += inner / d[i];
            }
            out.at(I, J) = acc;
        }
    return out;
}

}  // namespace

TEST_CASE("kn_product: g.g for the identity metric, m=3") {
    int m = 3;
    DF g = form_from_sym2(m, identity(m));
    DF g2 = kn_product(g, g);
    // components 2(g_ik g_jl - g_il g_jk)
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    if (i == j || k == l) continue;
                    Rat expect = 2 * (Rat(i == k) * Rat(j == l) - Rat(i == l) * Rat(j == k));
                    CHECK(g2.comp({i, j}, {k, l}) == expect);
                }
    CHECK(g2 == oracle_kn(g, g));
}

TEST_CASE("kn_product bilinearity and commutativity on (1,1) forms") {
    Rng rng(11);
    int m = 3;
    DF z(m, 1, 1, Rat(0));
    DF w = random_form(rng, m, 1, 1);
    CHECK(kn_product(w, z).is_zero());
    DF e = random_form(rng, m, 1, 1);
    CHECK(kn_product(w, e) == kn_product(e, w));
    CHECK(kn_product(w, e) == oracle_kn(w, e));
}

TEST_CASE("kn_product matches the permutation oracle on random bidegrees") {
    Rng rng(12);
    for (auto [m, p, q, r, s] : {std::array<int, 5>{3, 1, 1, 1, 1},
                                 {4, 2, 2, 1, 1},
                                 {4, 1, 2, 2, 1},
                                 {5, 2, 2, 2, 2},
                                 {4, 0, 1, 2, 1},
                                 {3, 2, 1, 0, 2}}) {
        DF w = random_form(rng, m, p, q), e = random_form(rng, m, r, s);
        CHECK(kn_product(w, e) == oracle_kn(w, e));
    }
}

TEST_CASE("contract basics") {
    int m = 4;
    DF g = form_from_sym2(m, identity(m));
    Mat ginv = identity(m);
    DF tg = contract(g, ginv);
    CHECK(tg.at(0, 0) == Rat(m));

    // ctr(g^2) = (2m-2) g
    DF g2 = kn_product(g, g);
    CHECK(contract(g2, ginv) == Rat(2 * m - 2) * g);

    // ctr of a (0,q) form is zero by convention
    Rng rng(13);
    DF w = random_form(rng, m, 0, 2);
    CHECK(contract(w, ginv).trivial() == false);
    CHECK(contract(w, ginv).is_zero());
}

TEST_CASE("general-metric contraction equals the orthonormal-frame oracle") {
    Rng rng(14);
    for (int trial = 0; trial < 8; ++trial) {
        int m = rng.intval(3, 5);
        Mat g = random_posdef(rng, m);
        Mat ginv = invert(g);
        int p = rng.intval(1, 2), q = rng.intval(1, 2);
        DF w = random_form(rng, m, p, q);
        CHECK(contract(w, ginv) == oracle_contract(w, g));
    }
    // and ctr(g^2) = (2m-2) g holds for non-flat g too
    int m = 4;
    Mat g = random_posdef(rng, m);
    DF gf = form_from_sym2(m, g);
    CHECK(contract(kn_product(gf, gf), invert(g)) == Rat(2 * m - 2) * gf);
}

TEST_CASE("contraction formula vs iterated contraction") {
    Rng rng(15);
    for (int trial = 0; trial < 30; ++trial) {
        int m = rng.intval(2, 4);
        bool flat = rng.intval(0, 1) == 0;
        Mat g = flat ? identity(m) : random_posdef(rng, m);
        Mat ginv = invert(g);
        DF gf = form_from_sym2(m, g);
        int k = rng.intval(0, 2), l = rng.intval(0, std::min(3 - k, 2) + (k == 0));
        if (k + l > 3) l = 3 - k;
        int p = rng.intval(0, 2), q = rng.intval(0, 2);
        DF w = random_form(rng, m, p, q);
        DF lhs = contract_pow(kn_product(kn_power(gf, k), w), ginv, l);
        DF rhs = contract_power_formula(k, l, w, gf, ginv);
        CHECK(lhs == rhs);
    }
    // identity case k=0, l=0
    DF w = random_form(rng, 3, 1, 1);
    CHECK(contract_power_formula(0, 0, w, form_from_sym2(3, identity(3)), identity(3)) == w);
}

TEST_CASE("-1 contraction propositions") {
    Rng rng(16);
    for (int m = 3; m <= 5; ++m) {
        Mat id = identity(m);
        DF gf = form_from_sym2(m, id);
        for (int l = 1; l <= 2 && l <= m - 1; ++l) {
            // (1,1) eta:  ctr^l(g^l eta) = (m-2)! l!/(m-l-1)! [(m-l-1) eta + l ctr(eta) g]
            DF eta = random_form(rng, m, 1, 1);
            DF lhs = contract_pow(kn_product(kn_power(gf, l), eta), id, l);
            Rat cf = rat_factorial(m - 2) * rat_factorial(l) / rat_factorial(m - l - 1);
            DF tr_eta_g = contract(eta, id).at(0, 0) * gf;
            DF rhs = cf * (Rat(m - l - 1) * eta + Rat(l) * tr_eta_g);
            CHECK(lhs == rhs);

            // (2,2) omega: ctr^l(g^(l-1) omega)
            //   = (m-3)! l!/(m-l-1)! [(m-l-1) ctr(omega) + (l-1)/2 ctr^2(omega) g]
            if (m >= 4) {
                DF om = random_symmetric_form(rng, m, 2);
                DF lhs2 = contract_pow(kn_product(kn_power(gf, l - 1), om), id, l);
                Rat cf2 = rat_factorial(m - 3) * rat_factorial(l) / rat_factorial(m - l - 1);
                DF rhs2 = cf2 * (Rat(m - l - 1) * contract(om, id) +
                                 rat(l - 1, 2) * (contract_pow(om, id, 2).at(0, 0) * gf));
                CHECK(lhs2 == rhs2);
            }
        }
    }
}

TEST_CASE("full contraction proposition") {
    Rng rng(17);
    for (int m = 4; m <= 5; ++m) {
        Mat id = identity(m);
        for (int l : {2, 3}) {
            if (l > m - 1) continue;
            DF tau = random_symmetric_form(rng, m, l);
            DF eta = random_form(rng, m, 1, 1);
            Rat lhs = contract_pow(kn_product(tau, eta), id, l + 1).at(0, 0);
            Rat t1 = contract_pow(tau, id, l).at(0, 0) * contract(eta, id).at(0, 0);
            Rat t2 = contract_pow(kn_product(contract_pow(tau, id, l - 1), eta), id, 2).at(0, 0);
            Rat rhs = Rat(-(l + 1) * (l - 1)) * t1 + rat((l + 1) * l, 2) * t2;
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("kn_product associativity and symmetry flags") {
    Rng rng(18);
    int m = 4;
    DF a = random_symmetric_form(rng, m, 1);
    DF b = random_symmetric_form(rng, m, 1);
    DF c = random_symmetric_form(rng, m, 1);
    CHECK(kn_product(kn_product(a, b), c) == kn_product(a, kn_product(b, c)));
    CHECK(kn_product(a, b).is_symmetric());
    CHECK(kn_product(a, b) == kn_product(b, a));
}

TEST_CASE("generalized Kronecker delta") {
    CHECK(generalized_kronecker({1}, {1}) == 1);
    CHECK(generalized_kronecker({1, 2}, {2, 1}) == -1);
    CHECK(generalized_kronecker({1, 2, 2}, {1, 2, 2}) == 0);  // repeated value
    CHECK(generalized_kronecker({1, 2, 3}, {1, 2, 3}) == 1);
    CHECK(generalized_kronecker({1, 2, 3}, {3, 1, 2}) == 1);   // even cycle
    CHECK(generalized_kronecker({1, 2, 3}, {1, 3, 2}) == -1);
    CHECK(generalized_kronecker({1, 2, 3}, {1, 2, 4}) == 0);
}
