#pragma once

// Curvature of metric jets: Riemann as a jet-valued (2,2) double form,
// Lovelock Ricci-(2q)/scalar-(2q) curvatures, the Lovelock tensor F_alpha
// (plain and conformally compact), the gauge operators and the modified
// Lovelock tensor Q_alpha, and exact linearization utilities.
//
// Conventions, fixed project-wide:
//  * Rm(e_i^e_j; e_k^e_l) = <R(e_i,e_j) e_l, e_k>, so that a space of
//    constant sectional curvature s has Rm = (s/2) g^2. "Constant curvature
//    kappa" in all Lovelock formulas means sectional curvature -kappa
//    (hyperbolic space is kappa = +1).
//  * The connection Laplacian is positive: Delta t = -g^{ab} (nabla^2 t)_ab.

#include <functional>
#include <stdexcept>
#include <vector>

#include "doubleform.hpp"
#include "jets.hpp"
#include "tensorjet.hpp"

namespace lovelock {

// ---------------------------------------------------------------------------
// Coupling vector alpha with its derived constants.

struct CouplingVector {
    int n = 0;                // boundary dimension; bulk is m = n+1
    std::vector<Rat> alpha;   // alpha[q-1] multiplies the 2q-term
    Rat kappa = 1;

    CouplingVector() = default;
    CouplingVector(int n_, std::vector<Rat> a, Rat k = 1)
        : n(n_), alpha(std::move(a)), kappa(std::move(k)) {
        if (alpha.empty()) throw std::invalid_argument("empty coupling vector");
        for (size_t i = 0; i < alpha.size(); ++i)
            if (alpha[i] != 0 && 2 * int(i + 1) > n)
                throw std::invalid_argument("coupling vector requires 2q <= n");
    }

    int qmax() const { return int(alpha.size()); }
    Rat a(int q) const { return (q >= 1 && q <= qmax()) ? alpha[q - 1] : Rat(0); }

    // lambda^(2q) = (-kappa/2)^q n!(2q)!/(n-2q+1)!
    Rat lambda2q(int q, const Rat& kap) const {
        return rat_pow(-kap / 2, q) * rat_factorial(n) * rat_factorial(2 * q) /
               rat_factorial(n - 2 * q + 1);
    }
    Rat lambda2q(int q) const { return lambda2q(q, kappa); }

    // A1(alpha,kappa) = sum_q alpha_q (-kappa/2)^(q-1) (n-2)!/2 (2q)!/(n-2q)!
    Rat A1(const Rat& kap) const {
        Rat s = 0;
        for (int q = 1; q <= qmax(); ++q)
            s += a(q) * rat_pow(-kap / 2, q - 1) * rat_factorial(n - 2) / 2 *
                 rat_factorial(2 * q) / rat_factorial(n - 2 * q);
        return s;
    }
    Rat A1() const { return A1(kappa); }

    // A2(alpha,kappa) = sum_q alpha_q (-kappa/2)^(q-1) (n-2)!/2 (2q)!(q-1)/(n-2q+1)!
    Rat A2(const Rat& kap) const {
        Rat s = 0;
        for (int q = 1; q <= qmax(); ++q)
            s += a(q) * rat_pow(-kap / 2, q - 1) * rat_factorial(n - 2) / 2 *
                 rat_factorial(2 * q) * (q - 1) / rat_factorial(n - 2 * q + 1);
        return s;
    }
    Rat A2() const { return A2(kappa); }

    // A3(alpha) = sum_q alpha_q (-1/2)^q (n-2)! (2q-1)! (nq-1)/(n-2q+1)!
    Rat A3() const {
        Rat s = 0;
        for (int q = 1; q <= qmax(); ++q)
            s += a(q) * rat_pow(rat(-1, 2), q) * rat_factorial(n - 2) *
                 rat_factorial(2 * q - 1) * (Rat(n) * q - 1) / rat_factorial(n - 2 * q + 1);
        return s;
    }

    // lambda(alpha) = sum_q alpha_q lambda^(2q) at kappa=1
    Rat lambda_alpha() const {
        Rat s = 0;
        for (int q = 1; q <= qmax(); ++q) s += a(q) * lambda2q(q, 1);
        return s;
    }

    // B_{1,2}(alpha) = A2 + lambda(alpha)/(2n) = sum_q alpha_q (-1/2)^q (n-2)!/2 (2q)!/(n-2q)!
    Rat B12() const {
        Rat s = 0;
        for (int q = 1; q <= qmax(); ++q)
            s += a(q) * rat_pow(rat(-1, 2), q) * rat_factorial(n - 2) / 2 *
                 rat_factorial(2 * q) / rat_factorial(n - 2 * q);
        return s;
    }

    // c_n = 2^(n-2) ((n/2-1)!)^2 / (n-2), even n only.
    Rat c_n() const {
        if (n % 2 != 0) throw std::domain_error("c_n requires even n");
        Rat f = rat_factorial(n / 2 - 1);
        return rat_pow(Rat(2), n - 2) * f * f / (n - 2);
    }
};

// LimSec membership: sum_q lambda^(2q) alpha_q (1 - (n+1)/(2q)) (kappa^q - 1) = 0
// and A1(alpha,kappa) != 0. (lambda^(2q) at kappa=1.)
inline bool limsec_member(const CouplingVector& cv, const Rat& kap) {
    Rat s = 0;
    for (int q = 1; q <= cv.qmax(); ++q)
        s += cv.lambda2q(q, 1) * cv.a(q) * (Rat(1) - Rat(cv.n + 1) / (2 * q)) *
             (rat_pow(kap, q) - 1);
    return s == 0 && cv.A1(kap) != 0;
}

// ---------------------------------------------------------------------------
// Riemann tensor as a (2,2) double form.

template <class R>
DoubleForm<R> riemann(const MetricJet<R>& g, const std::vector<Sym2<R>>& gam,
                      const std::vector<Sym2<R>>& first) {
    int m = g.m;
    R zero = ring_zero(g.lo.v[0]);
    // Lowering g_{ku} R^u_{lij} against the first-kind symbols gives
    //   Rm(ij;kl) = (d_i d_l g_jk + d_j d_k g_il - d_i d_k g_jl - d_j d_l g_ik)/2
    //               + sum_a ( Gamma^a_{il} [jk,a] - Gamma^a_{jl} [ik,a] )
    // with the component convention Rm(e_i^e_j; e_k^e_l) = <R(e_i,e_j) e_l, e_k>.
    DoubleForm<R> rm(m, 2, 2, zero);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = k + 1; l < m; ++l) {
                    R acc = ring_scale(ring_diff(ring_diff(g.lo.at(j, k), i), l) +
                                           ring_diff(ring_diff(g.lo.at(i, l), j), k) -
                                           ring_diff(ring_diff(g.lo.at(j, l), i), k) -
                                           ring_diff(ring_diff(g.lo.at(i, k), j), l),
                                       rat(1, 2));
                    for (int a = 0; a < m; ++a)
                        acc = acc + gam[a].at(i, l) * first[a].at(j, k) -
                              gam[a].at(j, l) * first[a].at(i, k);
                    rm.at((1 << i) | (1 << j), (1 << k) | (1 << l)) = acc;
                }
    return rm;
}

template <class R>
DoubleForm<R> riemann(const MetricJet<R>& g, const std::vector<Sym2<R>>& gam) {
    return riemann(g, gam, christoffel_first(g));
}

template <class R>
DoubleForm<R> riemann(const MetricJet<R>& g) {
    auto first = christoffel_first(g);
    return riemann(g, christoffel(g, first), first);
}

// Ric^(2q) = ctr^(2q-1)(Rm^q) as a (1,1) form; scal^(2q) = ctr^(2q)(Rm^q).
template <class R>
DoubleForm<R> ricci_2q_from_rm(const DoubleForm<R>& rm, const SqMat<R>& ginv, int q) {
    return contract_pow(kn_power(rm, q), ginv, 2 * q - 1);
}

template <class R>
R scal_2q_from_rm(const DoubleForm<R>& rm, const SqMat<R>& ginv, int q) {
    return contract_pow(kn_power(rm, q), ginv, 2 * q).at(0, 0);
}

// Fast variants through the mixed-index pipeline: tmix = Rm with the second
// block raised, so the repeated contractions are multiplication-free traces.
template <class R>
DoubleForm<R> ricci_2q_from_mixed(const DoubleForm<R>& tmix, const Sym2<R>& glo, int q) {
    int m = glo.m;
    R zero = ring_zero(glo.v[0]);
    DoubleForm<R> ricm = contract_trace_pow(kn_power(tmix, q), 2 * q - 1);
    DoubleForm<R> out(m, 1, 1, zero);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            R acc = zero;
            for (int a = 0; a < m; ++a) {
                const R& e = ricm.at(1 << i, 1 << a);
                if (ring_is_zero(e)) continue;
                acc = acc + e * glo.at(a, j);
            }
            out.at(1 << i, 1 << j) = acc;
        }
    return out;
}

template <class R>
R scal_2q_from_mixed(const DoubleForm<R>& tmix, int q) {
    return contract_trace_pow(kn_power(tmix, q), 2 * q).at(0, 0);
}

template <class R>
DoubleForm<R> ricci_2q(const MetricJet<R>& g, int q) {
    if (2 * q > g.m)  // identically zero beyond the dimension
        return DoubleForm<R>(g.m, 1, 1, ring_zero(g.lo.v[0]));
    return ricci_2q_from_mixed(raise22_second(riemann(g), g.up), g.lo, q);
}

// ---------------------------------------------------------------------------
// Generalized-Kronecker form of the Lovelock curvature:
//   M_i^j = delta^{i i1..i2q}_{j j1..j2q} R_{i1 i2}^{j1 j2} ... , lowered.
// Proportional to the trace-adjusted Lovelock combination
//   E^(2q) = Ric^(2q) - (1/2q) scal^(2q) g  (see tests for the frozen N(q)).

// Proportionality constant: kronecker sum = N(q) * E^(2q), N(q) = -2^(q+1)/(2q-1)!!.
inline Rat kronecker_ratio(int q) {
    Rat dfac = 1;
    for (int t = 2 * q - 1; t > 1; t -= 2) dfac *= t;
    return -rat_pow(Rat(2), q + 1) / dfac;
}

template <class R>
Sym2<R> ricci_2q_kronecker_from_rm(const DoubleForm<R>& rm, const Sym2<R>& glo,
                                   const SqMat<R>& ginv, int q) {
    int m = glo.m;
    R zero = ring_zero(glo.v[0]);
    // raise the second block: Rup(ab;cd) = Rm(ab;ef) g^{ec} g^{fd}
    const auto& c2 = detail::combs(m, 2).masks;
    auto rup_comp = [&](int a, int b, int c, int d) {
        R acc = zero;
        for (int e = 0; e < m; ++e)
            for (int f = 0; f < m; ++f) {
                if (e == f) continue;
                acc = acc + rm.comp({a, b}, {e, f}) * ginv[e][c] * ginv[f][d];
            }
        return acc;
    };
    // cache Rup components on sorted masks
    DoubleForm<R> rupc(m, 2, 2, zero);
    for (int A : c2)
        for (int C : c2) {
            std::vector<int> ab, cd;
            for (int t = 0; t < m; ++t) {
                if (A & (1 << t)) ab.push_back(t);
                if (C & (1 << t)) cd.push_back(t);
            }
            rupc.at(A, C) = rup_comp(ab[0], ab[1], cd[0], cd[1]);
        }

    int k = 2 * q + 1;
    SqMat<R> mixed_full(m, std::vector<R>(m, zero));  // M_i^j, lowered at the end
    if (k <= m) {
        const auto& sets = detail::combs(m, k).masks;
        for (int S : sets) {
            std::vector<int> elems;
            for (int t = 0; t < m; ++t)
                if (S & (1 << t)) elems.push_back(t);
            for (int i : elems)
                for (int j : elems) {
                    // ordered arrangements I of S\{i}, J of S\{j}
                    std::vector<int> restI, restJ;
                    for (int t : elems) {
                        if (t != i) restI.push_back(t);
                        if (t != j) restJ.push_back(t);
                    }
                    std::vector<int> I = restI, J = restJ;
                    std::sort(I.begin(), I.end());
                    std::sort(J.begin(), J.end());
                    R acc = zero;
                    do {
                        std::vector<int> Jp = J;
                        std::sort(Jp.begin(), Jp.end());
                        do {
                            // sign of the permutation (i,I) -> (j,Jp)
                            std::vector<int> up{i}, lo{j};
                            up.insert(up.end(), I.begin(), I.end());
                            lo.insert(lo.end(), Jp.begin(), Jp.end());
                            Rat sgn = generalized_kronecker(up, lo);
                            if (sgn == 0) continue;
                            R prod = ring_one(zero);
                            for (int s = 0; s < 2 * q; s += 2)
                                prod = prod * rupc.comp({I[s], I[s + 1]}, {Jp[s], Jp[s + 1]});
                            acc = acc + ring_scale(prod, sgn);
                        } while (std::next_permutation(Jp.begin(), Jp.end()));
                    } while (std::next_permutation(I.begin(), I.end()));
                    mixed_full[i][j] = mixed_full[i][j] + acc;
                }
        }
    }
    // lower the upper index: (Ric_kron)_{ij} = g_{ik} M^k_j
    Sym2<R> out(m, zero);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            R acc = zero;
            for (int kk = 0; kk < m; ++kk) acc = acc + glo.at(i, kk) * mixed_full[kk][j];
            out.at(i, j) = acc;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Lovelock tensor F_alpha.

template <class R>
Sym2<R> lovelock_tensor_from_rm(const DoubleForm<R>& rm, const MetricJet<R>& g,
                                const CouplingVector& cv) {
    int n = cv.n;
    R zero = ring_zero(g.lo.v[0]);
    Sym2<R> f(g.m, zero);
    for (int q = 1; q <= cv.qmax(); ++q) {
        if (cv.a(q) == 0) continue;
        DoubleForm<R> ric = ricci_2q_from_rm(rm, g.up, q);
        R scal = contract(ric, g.up).at(0, 0);
        Rat lam = cv.lambda2q(q);
        for (int i = 0; i < g.m; ++i)
            for (int j = i; j < g.m; ++j) {
                R term = ric.at(1 << i, 1 << j) - ring_scale(g.lo.at(i, j), lam);
                R tr_part = scal - ring_scale(ring_one(zero), Rat(n + 1) * lam);
                f.at(i, j) = f.at(i, j) + ring_scale(term, cv.a(q)) -
                             ring_scale(tr_part * g.lo.at(i, j), cv.a(q) / (2 * q));
            }
    }
    return f;
}

namespace curvdetail {

// Shared fast evaluation of the F_alpha sum from a mixed-index curvature
// operator tmix (a (2,2) form with the second block raised): the repeated
// metric contractions reduce to signed trace sums with no multiplications,
//   Ric^(2q) mixed = ctr_trace^(2q-1)(tmix^q),  scal^(2q) = its trace.
template <class R>
Sym2<R> lovelock_eval_mixed(const MetricJet<R>& g, const CouplingVector& cv,
                            const DoubleForm<R>& tmix) {
    int m = g.m, n = cv.n;
    R zero = ring_zero(g.lo.v[0]);
    Sym2<R> f(m, zero);
    DoubleForm<R> tq = tmix;
    for (int q = 1; q <= cv.qmax(); ++q) {
        if (q > 1) tq = kn_product(tq, tmix);
        if (cv.a(q) == 0) continue;
        DoubleForm<R> ricm = contract_trace_pow(tq, 2 * q - 1);  // (1,1), upper 2nd index
        R scal = zero;
        for (int a = 0; a < m; ++a) scal = scal + ricm.at(1 << a, 1 << a);
        Rat lam = cv.lambda2q(q);
        R tr_part = scal - ring_scale(ring_one(zero), Rat(n + 1) * lam);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                R ric_ij = zero;  // lower the raised index: Ric_ij = M_i^a g_{aj}
                for (int a = 0; a < m; ++a) {
                    const R& e = ricm.at(1 << i, 1 << a);
                    if (ring_is_zero(e)) continue;
                    ric_ij = ric_ij + e * g.lo.at(a, j);
                }
                R term = ric_ij - ring_scale(g.lo.at(i, j), lam);
                f.at(i, j) = f.at(i, j) + ring_scale(term, cv.a(q)) -
                             ring_scale(tr_part * g.lo.at(i, j), cv.a(q) / (2 * q));
            }
    }
    return f;
}

}  // namespace curvdetail

template <class R>
Sym2<R> lovelock_tensor(const MetricJet<R>& g, const CouplingVector& cv) {
    return curvdetail::lovelock_eval_mixed(g, cv, raise22_second(riemann(g), g.up));
}

// Conformally compact variant. Input is the compactified metric
// gbar = x^2 g (an honest jet, variable `xvar` = 0 by convention); output is
// x^2 F_alpha(g), a polynomial jet, computed through the exact identity
//   x^2 Ric^(2q)(g) = ctr_gbar^(2q-1)(T^q),  x^2 scal part likewise, with
//   T = x^2 Rm_gbar + gbar . (x Hess_gbar x - (1/2)|dx|^2_gbar gbar).
// Mixed-index curvature operator of g = u^{-2} gbar from jets of gbar and u:
//   T = u^2 Rm_gbar + gbar . (u Hess_gbar u - (1/2)|du|^2_gbar gbar),
// returned with the second block raised, so that exactly
//   u^2 Ric^(2q)(g) = ctr_trace^(2q-1)(T^q) lowered,  scal^(2q)(g) = ctr_trace^(2q)(T^q).
template <class R>
DoubleForm<R> cc_curvature_mixed(const MetricJet<R>& gbar, const R& u) {
    int m = gbar.m;
    R zero = ring_zero(gbar.lo.v[0]);
    auto first = christoffel_first(gbar);
    auto gam = christoffel(gbar, first);
    DoubleForm<R> rm = riemann(gbar, gam, first);
    Sym2<R> hx = hessian(gbar, gam, u);
    R kap = zero;  // |du|^2_gbar
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            if (ring_is_zero(ring_diff(u, a)) || ring_is_zero(ring_diff(u, b))) continue;
            kap = kap + gbar.up[a][b] * ring_diff(u, a) * ring_diff(u, b);
        }
    // W = u Hess u - (kap/2) gbar, with the raised index: W_i^j = W_ia g^{aj}
    Sym2<R> w(m, zero);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            w.at(i, j) = u * hx.at(i, j) - ring_scale(kap * gbar.lo.at(i, j), rat(1, 2));
    SqMat<R> wm(m, std::vector<R>(m, zero));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            R acc = zero;
            for (int a = 0; a < m; ++a) {
                if (ring_is_zero(w.at(i, a))) continue;
                acc = acc + w.at(i, a) * gbar.up[a][j];
            }
            wm[i][j] = acc;
        }
    // Mixed T = u^2 Rm (raised) + delta ^ W (the Kulkarni-Nomizu product with
    // the mixed metric, i.e. the identity, needs no multiplications).
    R u2 = u * u;
    DoubleForm<R> tmix = u2 * raise22_second(rm, gbar.up);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = k + 1; l < m; ++l) {
                    R& c = tmix.at((1 << i) | (1 << j), (1 << k) | (1 << l));
                    if (i == k) c = c + wm[j][l];
                    if (i == l) c = c - wm[j][k];
                    if (j == k) c = c - wm[i][l];
                    if (j == l) c = c + wm[i][k];
                }
    return tmix;
}

template <class R>
Sym2<R> x2_lovelock_cc(const MetricJet<R>& gbar, const CouplingVector& cv, const R& xjet) {
    int m = gbar.m, n = cv.n;
    if (m != n + 1) throw std::invalid_argument("bulk dimension must be n+1");
    return curvdetail::lovelock_eval_mixed(gbar, cv, cc_curvature_mixed(gbar, xjet));
}


// ---------------------------------------------------------------------------
// Gauge operators of the modified Lovelock tensor.

// (delta_g t)_i = -g^{jk} (nabla_k t)_{ij}
template <class R>
std::vector<R> gauge_delta(const MetricJet<R>& g, const std::vector<Sym2<R>>& gam,
                           const Sym2<R>& t) {
    int m = g.m;
    auto dt = covd_sym2(g, gam, t);
    std::vector<R> out(m, ring_zero(t.v[0]));
    for (int i = 0; i < m; ++i) {
        R acc = ring_zero(t.v[0]);
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) acc = acc + g.up[j][k] * dt[k].at(i, j);
        out[i] = -acc;
    }
    return out;
}

// divergence of a one-form: delta_g w = -g^{ij} (nabla_i w)_j
template <class R>
R gauge_delta_oneform(const MetricJet<R>& g, const std::vector<Sym2<R>>& gam,
                      const std::vector<R>& w) {
    auto dw = covd_oneform(g, gam, w);
    R acc = ring_zero(w[0]);
    for (int i = 0; i < g.m; ++i)
        for (int j = 0; j < g.m; ++j) acc = acc + g.up[i][j] * dw[i][j];
    return -acc;
}

// (delta*_g w)_{ij} = (nabla_i w_j + nabla_j w_i)/2
template <class R>
Sym2<R> gauge_delta_star(const MetricJet<R>& g, const std::vector<Sym2<R>>& gam,
                         const std::vector<R>& w) {
    auto dw = covd_oneform(g, gam, w);
    Sym2<R> s(g.m, ring_zero(w[0]));
    for (int i = 0; i < g.m; ++i)
        for (int j = i; j < g.m; ++j) s.at(i, j) = ring_scale(dw[i][j] + dw[j][i], rat(1, 2));
    return s;
}

// (G_g Phi)_{ij} = Phi_{ij} - (1/2) g^{kl} Phi_{kl} g_{ij}
template <class R>
Sym2<R> gauge_G(const MetricJet<R>& g, const Sym2<R>& phi) {
    R tr = ring_zero(phi.v[0]);
    for (int k = 0; k < g.m; ++k)
        for (int l = 0; l < g.m; ++l) tr = tr + g.up[k][l] * phi.at(k, l);
    Sym2<R> out = phi;
    for (int i = 0; i < g.m; ++i)
        for (int j = i; j < g.m; ++j)
            out.at(i, j) = out.at(i, j) - ring_scale(tr * g.lo.at(i, j), rat(1, 2));
    return out;
}

// Bianchi operator B_g = delta_g o G_g.
template <class R>
std::vector<R> gauge_bianchi(const MetricJet<R>& g, const std::vector<Sym2<R>>& gam,
                             const Sym2<R>& t) {
    return gauge_delta(g, gam, gauge_G(g, t));
}

// Phi_alpha(g,t) = -sum_q (lambda^(2q)/(n(n-1))) alpha_q
//                  [ (n-2q+1) delta*_g - ((q-1)-(n-1)/2) g delta_g ] (g t^{-1} B_g(t))
template <class R>
Sym2<R> phi_alpha(const MetricJet<R>& g, const MetricJet<R>& t, const CouplingVector& cv) {
    int m = g.m, n = cv.n;
    R zero = ring_zero(g.lo.v[0]);
    auto gam = christoffel(g);
    auto bt = gauge_bianchi(g, gam, t.lo);
    // v_i = g_{ij} t^{jk} (B_g t)_k
    std::vector<R> v(m, zero);
    for (int i = 0; i < m; ++i) {
        R acc = zero;
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) acc = acc + g.lo.at(i, j) * t.up[j][k] * bt[k];
        v[i] = acc;
    }
    Sym2<R> ds = gauge_delta_star(g, gam, v);
    R dv = gauge_delta_oneform(g, gam, v);
    Sym2<R> out(m, zero);
    for (int q = 1; q <= cv.qmax(); ++q) {
        if (cv.a(q) == 0) continue;
        Rat pre = -cv.lambda2q(q) * cv.a(q) / (Rat(n) * (n - 1));
        Rat c1 = Rat(n - 2 * q + 1);
        Rat c2 = -(Rat(q - 1) - Rat(n - 1) / 2);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j)
                out.at(i, j) = out.at(i, j) +
                               ring_scale(ring_scale(ds.at(i, j), c1) +
                                              ring_scale(g.lo.at(i, j) * dv, c2),
                                          pre);
    }
    return out;
}

template <class R>
Sym2<R> modified_lovelock(const MetricJet<R>& g, const MetricJet<R>& t,
                          const CouplingVector& cv) {
    Sym2<R> f = lovelock_tensor(g, cv);
    Sym2<R> p = phi_alpha(g, t, cv);
    return f - p;
}

// Connection (rough) Laplacian on symmetric 2-tensors, positive convention:
// (Delta t)_{ij} = -g^{ab} (nabla_a nabla_b t)_{ij}.
template <class R>
Sym2<R> laplacian_sym2(const MetricJet<R>& g, const std::vector<Sym2<R>>& gam,
                       const Sym2<R>& t) {
    int m = g.m;
    R zero = ring_zero(t.v[0]);
    auto dt = covd_sym2(g, gam, t);  // dt[k] = (nabla_k t)_{ij}
    Sym2<R> out(m, zero);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            R acc = zero;
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    // (nabla_a nabla_b t)_{ij} = d_a (dt[b])_{ij} - Gamma^c_{ab} (dt[c])_{ij}
                    //   - Gamma^l_{ai} (dt[b])_{lj} - Gamma^l_{aj} (dt[b])_{il}
                    R sec = ring_diff(dt[b].at(i, j), a);
                    for (int c = 0; c < m; ++c)
                        sec = sec - gam[c].at(a, b) * dt[c].at(i, j) -
                              gam[c].at(a, i) * dt[b].at(c, j) - gam[c].at(a, j) * dt[b].at(i, c);
                    acc = acc + g.up[a][b] * sec;
                }
            out.at(i, j) = -acc;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Standard metric jets.

template <class R>
R scal_2q(const MetricJet<R>& g, int q) {
    if (2 * q > g.m) return ring_zero(g.lo.v[0]);
    return scal_2q_from_mixed(raise22_second(riemann(g), g.up), q);
}

// Space form of constant sectional curvature s: g = delta / (1 + s r^2/4)^2
// around the origin, expanded to jet order `cap` in m variables.
inline MetricJet<ScalarJet> metric_space_form(int m, int cap, const Rat& s) {
    ScalarJet r2 = ScalarJet::constant(m, cap, Rat(0));
    for (int i = 0; i < m; ++i) {
        ScalarJet xi = ScalarJet::variable(m, cap, i);
        r2 = r2 + xi * xi;
    }
    ScalarJet conf = ScalarJet::constant(m, cap, Rat(1)) + rat(1, 4) * s * r2;
    ScalarJet w = (conf * conf).inverse();
    Sym2<ScalarJet> g(m, ScalarJet::constant(m, cap, Rat(0)));
    for (int i = 0; i < m; ++i) g.at(i, i) = w;
    return MetricJet<ScalarJet>(std::move(g));
}

// Ball model of hyperbolic space at "constant curvature kappa" (sectional
// curvature -kappa): g = delta / (1 - kappa r^2/4)^2.
inline MetricJet<ScalarJet> metric_hyperbolic_ball(int m, int cap, const Rat& kappa = 1) {
    return metric_space_form(m, cap, -kappa);
}

// Half-space model, jetted at an interior point: with t the first variable,
// g = (1+t)^{-2} delta has sectional curvature -1 everywhere.
inline MetricJet<ScalarJet> metric_hyperbolic_half_space(int m, int cap) {
    ScalarJet conf = ScalarJet::constant(m, cap, Rat(1)) + ScalarJet::variable(m, cap, 0);
    ScalarJet w = (conf * conf).inverse();
    Sym2<ScalarJet> g(m, ScalarJet::constant(m, cap, Rat(0)));
    for (int i = 0; i < m; ++i) g.at(i, i) = w;
    return MetricJet<ScalarJet>(std::move(g));
}

// ---------------------------------------------------------------------------
// Linearization.

// Exact directional derivative of a metric functional via nilpotent duals:
// F must be callable on MetricJet<Dual<R>>.
template <class R, class F>
auto linearize_dual(F&& f, const MetricJet<R>& g0, const Sym2<R>& r) {
    using D = Dual<R>;
    Sym2<D> glo(g0.m, D{ring_zero(g0.lo.v[0]), ring_zero(g0.lo.v[0])});
    for (int i = 0; i < g0.m; ++i)
        for (int j = i; j < g0.m; ++j) glo.at(i, j) = D{g0.lo.at(i, j), r.at(i, j)};
    auto out = f(MetricJet<D>(glo));  // Sym2<Dual<R>>
    Sym2<R> deriv(out.m, ring_zero(g0.lo.v[0]));
    for (int i = 0; i < out.m; ++i)
        for (int j = i; j < out.m; ++j) deriv.at(i, j) = out.at(i, j).b;
    return deriv;
}

// Richardson-extrapolated central differences over an exact eps list.
template <class R, class F>
Sym2<R> linearize_richardson(F&& f, const MetricJet<R>& g0, const Sym2<R>& r,
                             const std::vector<Rat>& eps) {
    if (eps.empty()) throw std::invalid_argument("empty eps list");
    auto shifted = [&](const Rat& e) {
        Sym2<R> glo = g0.lo;
        for (int i = 0; i < g0.m; ++i)
            for (int j = i; j < g0.m; ++j)
                glo.at(i, j) = glo.at(i, j) + ring_scale(r.at(i, j), e);
        return MetricJet<R>(glo);
    };
    std::vector<Sym2<R>> d;
    std::vector<Rat> e2;
    for (const Rat& e : eps) {
        if (e == 0) throw std::invalid_argument("zero eps");
        auto fp = f(shifted(e));
        auto fm = f(shifted(-e));
        d.push_back(fp - fm);
        Rat half = Rat(1) / (2 * e);
        for (auto& v : d.back().v) v = ring_scale(v, half);
        e2.push_back(e * e);
    }
    // Neville elimination of even powers of eps
    int k = int(d.size());
    for (int lvl = 1; lvl < k; ++lvl)
        for (int i = 0; i < k - lvl; ++i) {
            Rat den = e2[i] - e2[i + lvl];
            Sym2<R> num = d[i + 1];  // shape template
            for (size_t t = 0; t < num.v.size(); ++t)
                num.v[t] = ring_scale(d[i + 1].v[t], e2[i] / den) -
                           ring_scale(d[i].v[t], e2[i + lvl] / den);
            d[i] = num;
        }
    return d[0];
}

}  // namespace lovelock
