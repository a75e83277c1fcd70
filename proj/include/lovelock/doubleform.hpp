#pragma once

// (p,q)-double forms over an m-dimensional space: bigraded antisymmetric
// multilinear objects with components in an arbitrary commutative ring R
// (exact rationals, jets, log-jets, duals). Storage is dense on sorted
// multi-index representatives, encoded as bitmasks; signs are computed on
// access. Supplies the Kulkarni-Nomizu product, the metric contraction, the
// combinatorial contraction formula, and generalized Kronecker deltas.

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "jets.hpp"
#include "rational.hpp"

namespace lovelock {

namespace detail {

struct CombTable {
    std::vector<int> masks;        // all m-bit masks with popcount p, increasing
    std::array<int, 256> rank{};   // mask -> position in `masks`
};

inline const CombTable& combs(int m, int p) {
    static std::map<std::pair<int, int>, CombTable> cache;
    auto key = std::make_pair(m, p);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    CombTable t;
    t.rank.fill(-1);
    for (int mask = 0; mask < (1 << m); ++mask)
        if (std::popcount(unsigned(mask)) == p) {
            t.rank[mask] = int(t.masks.size());
            t.masks.push_back(mask);
        }
    return cache.emplace(key, std::move(t)).first->second;
}

// Sign of the permutation sorting (I asc, A\I asc) into A asc, for I subset A.
inline int split_sign(int A, int I) {
    int rest = A & ~I, sign = 1;
    for (int b = rest; b; b &= b - 1) {
        int elem = b & -b;
        // elements of I above `elem` must jump over it
        if (std::popcount(unsigned(I & ~(elem - 1) & ~elem)) & 1) sign = -sign;
    }
    return sign;
}

// Sign relating omega(e_a, e_{I'}) to the sorted representative of {a} u I'.
inline int insert_sign(int Iprime, int a) {
    return (std::popcount(unsigned(Iprime & ((1 << a) - 1))) & 1) ? -1 : 1;
}

}  // namespace detail

template <class R>
class DoubleForm {
  public:
    DoubleForm() : m_(0), p_(0), q_(0) {}
    DoubleForm(int m, int p, int q, R proto)
        : m_(m), p_(p), q_(q), proto_(ring_zero(proto)) {
        if (m < 0 || m > 8) throw std::invalid_argument("dimension out of range");
        if (p < 0 || q < 0) throw std::invalid_argument("negative degree");
        if (p <= m && q <= m)
            c_.assign(size_t(np()) * nq(), proto_);
        // p > m or q > m: identically zero, no storage
    }

    int m() const { return m_; }
    int p() const { return p_; }
    int q() const { return q_; }
    const R& proto() const { return proto_; }
    bool trivial() const { return p_ > m_ || q_ > m_; }
    int np() const { return int(detail::combs(m_, p_).masks.size()); }
    int nq() const { return int(detail::combs(m_, q_).masks.size()); }

    // Access by sorted-representative bitmasks.
    const R& at(int maskI, int maskJ) const { return c_[idx(maskI, maskJ)]; }
    R& at(int maskI, int maskJ) { return c_[idx(maskI, maskJ)]; }

    // Fully general access: arbitrary index tuples, antisymmetric extension.
    R comp(const std::vector<int>& I, const std::vector<int>& J) const {
        if (int(I.size()) != p_ || int(J.size()) != q_)
            throw std::invalid_argument("index arity mismatch");
        int sI = 1, sJ = 1, mi = 0, mj = 0;
        if (!mask_of(I, mi, sI) || !mask_of(J, mj, sJ) || trivial()) return proto_;
        R v = at(mi, mj);
        if (sI * sJ == 1) return v;
        return -v;
    }

    bool is_zero() const {
        for (const auto& v : c_)
            if (!ring_is_zero(v)) return false;
        return true;
    }

    DoubleForm transpose() const {  // swap the two blocks
        DoubleForm r(m_, q_, p_, proto_);
        if (trivial()) return r;
        const auto& cp = detail::combs(m_, p_).masks;
        const auto& cq = detail::combs(m_, q_).masks;
        for (int a : cp)
            for (int b : cq) r.at(b, a) = at(a, b);
        return r;
    }
    bool is_symmetric() const {
        if (p_ != q_) return false;
        const auto& cp = detail::combs(m_, p_).masks;
        for (int a : cp)
            for (int b : cp)
                if (!ring_is_zero(at(a, b) - at(b, a))) return false;
        return true;
    }

    friend DoubleForm operator+(DoubleForm a, const DoubleForm& b) {
        a.match(b);
        for (size_t i = 0; i < a.c_.size(); ++i) a.c_[i] = a.c_[i] + b.c_[i];
        return a;
    }
    friend DoubleForm operator-(DoubleForm a, const DoubleForm& b) {
        a.match(b);
        for (size_t i = 0; i < a.c_.size(); ++i) a.c_[i] = a.c_[i] - b.c_[i];
        return a;
    }
    DoubleForm operator-() const {
        DoubleForm r = *this;
        for (auto& v : r.c_) v = -v;
        return r;
    }
    template <class S>
    friend DoubleForm operator*(const S& s, DoubleForm a) {
        for (auto& v : a.c_) v = v * s;
        return a;
    }
    friend bool operator==(const DoubleForm& a, const DoubleForm& b) {
        a.match(b);
        for (size_t i = 0; i < a.c_.size(); ++i)
            if (!ring_is_zero(a.c_[i] - b.c_[i])) return false;
        return true;
    }

  private:
    size_t idx(int maskI, int maskJ) const {
        int ri = detail::combs(m_, p_).rank[maskI];
        int rj = detail::combs(m_, q_).rank[maskJ];
        if (ri < 0 || rj < 0) throw std::invalid_argument("bad mask");
        return size_t(ri) * nq() + rj;
    }
    bool mask_of(const std::vector<int>& I, int& mask, int& sign) const {
        mask = 0;
        sign = 1;
        for (size_t a = 0; a < I.size(); ++a) {
            if (I[a] < 0 || I[a] >= m_) throw std::invalid_argument("index out of range");
            int bit = 1 << I[a];
            if (mask & bit) return false;  // repeated index
            // count inversions against previously placed (they are not sorted)
            for (size_t b = 0; b < a; ++b)
                if (I[b] > I[a]) sign = -sign;
            mask |= bit;
        }
        return true;
    }
    void match(const DoubleForm& o) const {
        if (m_ != o.m_ || p_ != o.p_ || q_ != o.q_)
            throw std::invalid_argument("double form shape mismatch");
    }

    int m_, p_, q_;
    R proto_;
    std::vector<R> c_;
};

// Metric (or any symmetric 2-tensor) as a (1,1) double form.
template <class R>
DoubleForm<R> form_from_sym2(int m, const std::vector<std::vector<R>>& g) {
    DoubleForm<R> f(m, 1, 1, ring_zero(g[0][0]));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) f.at(1 << i, 1 << j) = g[i][j];
    return f;
}

// Kulkarni-Nomizu product, normalized so that g.g has components
// 2(g_ik g_jl - g_il g_jk) (the 1/(p!q!r!s!)-normalized antisymmetrized sum).
template <class R>
DoubleForm<R> kn_product(const DoubleForm<R>& w, const DoubleForm<R>& e) {
    if (w.m() != e.m()) throw std::invalid_argument("kn_product: dimension mismatch");
    int m = w.m(), p = w.p(), q = w.q(), r = e.p(), s = e.q();
    DoubleForm<R> out(m, p + r, q + s, w.proto());
    if (out.trivial() || w.trivial() || e.trivial()) return out;
    const auto& CA = detail::combs(m, p + r).masks;
    const auto& CB = detail::combs(m, q + s).masks;
    const auto& CI = detail::combs(m, p).masks;
    const auto& CK = detail::combs(m, q).masks;
    for (int A : CA)
        for (int B : CB) {
            R acc = out.proto();
            for (int I : CI) {
                if ((I & A) != I) continue;
                int sI = detail::split_sign(A, I);
                for (int K : CK) {
                    if ((K & B) != K) continue;
                    const R& wf = w.at(I, K);
                    if (ring_is_zero(wf)) continue;
                    const R& ef = e.at(A & ~I, B & ~K);
                    if (ring_is_zero(ef)) continue;
                    int sK = detail::split_sign(B, K);
                    R term = wf * ef;
                    if (sI * sK == 1)
                        acc = acc + term;
                    else
                        acc = acc - term;
                }
            }
            out.at(A, B) = acc;
        }
    return out;
}

template <class R>
DoubleForm<R> kn_power(const DoubleForm<R>& w, int k) {
    if (k < 0) throw std::invalid_argument("negative kn power");
    if (k == 0) {
        DoubleForm<R> one(w.m(), 0, 0, w.proto());
        one.at(0, 0) = ring_one(w.proto());
        return one;
    }
    DoubleForm<R> acc = w;
    for (int i = 1; i < k; ++i) acc = kn_product(acc, w);
    return acc;
}

// Metric contraction ctr: pairs the first slot of each block through ginv.
// By convention ctr of a (0,q) or (p,0) form is zero.
template <class R>
DoubleForm<R> contract(const DoubleForm<R>& w, const std::vector<std::vector<R>>& ginv) {
    int m = w.m(), p = w.p(), q = w.q();
    if (p == 0 || q == 0) return DoubleForm<R>(m, 0, 0, w.proto());
    DoubleForm<R> out(m, p - 1, q - 1, w.proto());
    if (w.trivial()) return out;
    const auto& CI = detail::combs(m, p - 1).masks;
    const auto& CJ = detail::combs(m, q - 1).masks;
    for (int I : CI)
        for (int J : CJ) {
            R acc = out.proto();
            for (int a = 0; a < m; ++a) {
                if (I & (1 << a)) continue;
                int sa = detail::insert_sign(I, a);
                for (int b = 0; b < m; ++b) {
                    if (J & (1 << b)) continue;
                    const R& wf = w.at(I | (1 << a), J | (1 << b));
                    if (ring_is_zero(wf) || ring_is_zero(ginv[a][b])) continue;
                    int sb = detail::insert_sign(J, b);
                    R term = ginv[a][b] * wf;
                    if (sa * sb == 1)
                        acc = acc + term;
                    else
                        acc = acc - term;
                }
            }
            out.at(I, J) = acc;
        }
    return out;
}

template <class R>
DoubleForm<R> contract_pow(DoubleForm<R> w, const std::vector<std::vector<R>>& ginv, int l) {
    for (int i = 0; i < l; ++i) w = contract(w, ginv);
    return w;
}

// Trace contraction for mixed forms whose second block is already raised:
// pairs the first slot of each block through the identity, so no ring
// multiplications are needed. Equals ctr composed with raising.
template <class R>
DoubleForm<R> contract_trace(const DoubleForm<R>& w) {
    int m = w.m(), p = w.p(), q = w.q();
    if (p == 0 || q == 0) return DoubleForm<R>(m, 0, 0, w.proto());
    DoubleForm<R> out(m, p - 1, q - 1, w.proto());
    if (w.trivial()) return out;
    const auto& CI = detail::combs(m, p - 1).masks;
    const auto& CJ = detail::combs(m, q - 1).masks;
    for (int I : CI)
        for (int J : CJ) {
            R acc = out.proto();
            for (int a = 0; a < m; ++a) {
                if ((I & (1 << a)) || (J & (1 << a))) continue;
                const R& wf = w.at(I | (1 << a), J | (1 << a));
                if (ring_is_zero(wf)) continue;
                int s = detail::insert_sign(I, a) * detail::insert_sign(J, a);
                if (s == 1)
                    acc = acc + wf;
                else
                    acc = acc - wf;
            }
            out.at(I, J) = acc;
        }
    return out;
}

template <class R>
DoubleForm<R> contract_trace_pow(DoubleForm<R> w, int l) {
    for (int i = 0; i < l; ++i) w = contract_trace(w);
    return w;
}

// Raise the second block of a (2,2) form: out(ij;kl) = w(ij;ab) g^{ak} g^{bl}.
template <class R>
DoubleForm<R> raise22_second(const DoubleForm<R>& w, const std::vector<std::vector<R>>& ginv) {
    if (w.p() != 2 || w.q() != 2) throw std::invalid_argument("raise22_second: need a (2,2) form");
    int m = w.m();
    DoubleForm<R> out(m, 2, 2, w.proto());
    if (w.trivial()) return out;
    const auto& c2 = detail::combs(m, 2).masks;
    int nc = int(c2.size());
    auto lobit = [](int mask) { return std::countr_zero(unsigned(mask)); };
    auto hibit = [](int mask) { return 31 - std::countl_zero(unsigned(mask)); };
    // P[AB][KL] = g^{ak} g^{bl} - g^{al} g^{bk} for A = {a<b}, K = {k<l}
    std::vector<std::vector<R>> P(nc, std::vector<R>(nc, w.proto()));
    for (int pa = 0; pa < nc; ++pa) {
        int a = lobit(c2[pa]), b = hibit(c2[pa]);
        for (int pk = 0; pk < nc; ++pk) {
            int k = lobit(c2[pk]), l = hibit(c2[pk]);
            P[pa][pk] = ginv[a][k] * ginv[b][l] - ginv[a][l] * ginv[b][k];
        }
    }
    for (int pi = 0; pi < nc; ++pi)
        for (int pk = 0; pk < nc; ++pk) {
            R acc = out.proto();
            for (int pb = 0; pb < nc; ++pb) {
                const R& wf = w.at(c2[pi], c2[pb]);
                if (ring_is_zero(wf) || ring_is_zero(P[pb][pk])) continue;
                acc = acc + wf * P[pb][pk];
            }
            out.at(c2[pi], c2[pk]) = acc;
        }
    return out;
}

// Right-hand side of the combinatorial contraction formula:
//   ctr^l (g^k w) = sum_r C(m-p-q+l-k, r) k!/(k-r)! l!/(l-r)! g^(k-r) ctr^(l-r) w,
// with g^(k-r) = 0 for k-r < 0 and ctr^(l-r) w = 0 unless 0 <= l-r <= min(p,q).
template <class R>
DoubleForm<R> contract_power_formula(int k, int l, const DoubleForm<R>& w,
                                     const DoubleForm<R>& gform,
                                     const std::vector<std::vector<R>>& ginv) {
    int m = w.m(), p = w.p(), q = w.q();
    if (p + k - l < 0 || q + k - l < 0) return DoubleForm<R>(m, 0, 0, w.proto());
    DoubleForm<R> out(m, p + k - l, q + k - l, w.proto());
    for (int r = 0; r <= l; ++r) {
        if (k - r < 0) continue;
        if (l - r > std::min(p, q)) continue;
        Rat coef = rat_binomial(m - p - q + l - k, r) * rat_factorial(k) / rat_factorial(k - r) *
                   rat_factorial(l) / rat_factorial(l - r);
        if (coef == 0) continue;
        DoubleForm<R> term =
            kn_product(kn_power(gform, k - r), contract_pow(w, ginv, l - r));
        out = out + coef * term;
    }
    return out;
}

// Generalized Kronecker delta: det of the delta matrix.
inline Rat generalized_kronecker(const std::vector<int>& upper, const std::vector<int>& lower) {
    if (upper.size() != lower.size()) throw std::invalid_argument("kronecker arity mismatch");
    size_t k = upper.size();
    std::vector<std::vector<Rat>> d(k, std::vector<Rat>(k));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) d[i][j] = (upper[i] == lower[j]) ? 1 : 0;
    // fraction-free-ish Gaussian elimination over Q
    Rat det = 1;
    for (size_t col = 0; col < k; ++col) {
        size_t piv = col;
        while (piv < k && d[piv][col] == 0) ++piv;
        if (piv == k) return 0;
        if (piv != col) {
            std::swap(d[piv], d[col]);
            det = -det;
        }
        det *= d[col][col];
        Rat inv = Rat(1) / d[col][col];
        for (size_t row = col + 1; row < k; ++row) {
            if (d[row][col] == 0) continue;
            Rat f = d[row][col] * inv;
            for (size_t j = col; j < k; ++j) d[row][j] -= f * d[col][j];
        }
    }
    return det;
}

}  // namespace lovelock
