#pragma once

// Truncated multivariate Taylor ("jet") arithmetic over exact rationals,
// plus two decorated scalar rings built on top of it:
//   LogJet  = a + b*log(x) + c*log^2(x)   (log^3 is a hard error)
//   Dual<R> = a + eps*b      (eps^2 = 0; exact directional derivatives)
//
// Truncation is by total degree. A jet's (nvars, cap) must match across
// operands; mismatches throw rather than silently truncating.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rational.hpp"

namespace lovelock {

class ScalarJet {
  public:
    // Exponent packing: 8 bits per variable, variable v in bits [8v, 8v+8).
    using Key = std::uint64_t;
    static constexpr int kMaxVars = 8;

    ScalarJet() : nvars_(0), cap_(0) {}
    ScalarJet(int nvars, int cap) : nvars_(nvars), cap_(cap) {
        if (nvars < 0 || nvars > kMaxVars) throw std::invalid_argument("nvars out of range");
        if (cap < 0 || cap > 200) throw std::invalid_argument("cap out of range");
    }

    static ScalarJet constant(int nvars, int cap, const Rat& v) {
        ScalarJet j(nvars, cap);
        if (v != 0) j.c_[0] = v;
        return j;
    }
    static ScalarJet variable(int nvars, int cap, int var) {
        ScalarJet j(nvars, cap);
        j.check_var(var);
        if (cap >= 1) j.c_[Key(1) << (8 * var)] = 1;
        return j;
    }

    int nvars() const { return nvars_; }
    int cap() const { return cap_; }
    bool is_zero() const { return c_.empty(); }
    const std::map<Key, Rat>& terms() const { return c_; }

    static int key_degree(Key k) {
        int d = 0;
        while (k) {
            d += int(k & 0xff);
            k >>= 8;
        }
        return d;
    }
    static int key_exp(Key k, int var) { return int((k >> (8 * var)) & 0xff); }

    Rat coeff(Key k) const {
        auto it = c_.find(k);
        return it == c_.end() ? Rat(0) : it->second;
    }
    Rat coeff(const std::vector<int>& exps) const { return coeff(pack(exps)); }
    Rat constant_term() const { return coeff(Key(0)); }

    Key pack(const std::vector<int>& exps) const {
        if (int(exps.size()) != nvars_) throw std::invalid_argument("exponent arity mismatch");
        Key k = 0;
        for (int v = 0; v < nvars_; ++v) {
            if (exps[v] < 0 || exps[v] > 255) throw std::invalid_argument("exponent out of range");
            k |= Key(exps[v]) << (8 * v);
        }
        return k;
    }

    void set_coeff(const std::vector<int>& exps, const Rat& v) {
        Key k = pack(exps);
        if (key_degree(k) > cap_) throw std::invalid_argument("monomial beyond cap");
        if (v == 0)
            c_.erase(k);
        else
            c_[k] = v;
    }

    ScalarJet& operator+=(const ScalarJet& o) {
        match(o);
        for (auto& [k, v] : o.c_) add_term(k, v);
        return *this;
    }
    ScalarJet& operator-=(const ScalarJet& o) {
        match(o);
        for (auto& [k, v] : o.c_) add_term(k, -v);
        return *this;
    }
    friend ScalarJet operator+(ScalarJet a, const ScalarJet& b) { return a += b; }
    friend ScalarJet operator-(ScalarJet a, const ScalarJet& b) { return a -= b; }
    ScalarJet operator-() const {
        ScalarJet r(*this);
        for (auto& [k, v] : r.c_) v = -v;
        return r;
    }

    friend ScalarJet operator*(const ScalarJet& a, const ScalarJet& b) {
        a.match(b);
        ScalarJet r(a.nvars_, a.cap_);
        if (a.c_.empty() || b.c_.empty()) return r;
        // degree-sorted view of b for early exit in the inner loop
        struct BTerm {
            int deg;
            Key key;
            const Rat* val;
        };
        std::vector<BTerm> bt;
        bt.reserve(b.c_.size());
        for (auto& [kb, vb] : b.c_) bt.push_back({key_degree(kb), kb, &vb});
        std::sort(bt.begin(), bt.end(), [](const BTerm& x, const BTerm& y) {
            return x.deg < y.deg;
        });
        std::unordered_map<Key, Rat> acc;
        acc.reserve(2 * a.c_.size() + b.c_.size());
        static thread_local mpq_class tmp;
        for (auto& [ka, va] : a.c_) {
            int rem = a.cap_ - key_degree(ka);
            for (auto& t : bt) {
                if (t.deg > rem) break;
                mpq_mul(tmp.get_mpq_t(), va.get_mpq_t(), t.val->get_mpq_t());
                Rat& slot = acc[ka + t.key];
                mpq_add(slot.get_mpq_t(), slot.get_mpq_t(), tmp.get_mpq_t());
            }
        }
        for (auto& [k, v] : acc)
            if (v != 0) r.c_.emplace(k, std::move(v));
        return r;
    }
    ScalarJet& operator*=(const ScalarJet& o) { return *this = *this * o; }

    friend ScalarJet operator*(const Rat& s, ScalarJet a) {
        if (s == 0) return ScalarJet(a.nvars_, a.cap_);
        for (auto& [k, v] : a.c_) v *= s;
        return a;
    }
    friend ScalarJet operator*(ScalarJet a, const Rat& s) { return s * a; }

    friend bool operator==(const ScalarJet& a, const ScalarJet& b) {
        a.match(b);
        return a.c_ == b.c_;
    }

    ScalarJet diff(int var) const {
        check_var(var);
        ScalarJet r(nvars_, cap_);
        for (auto& [k, v] : c_) {
            int e = key_exp(k, var);
            if (e == 0) continue;
            r.add_term(k - (Key(1) << (8 * var)), Rat(e) * v);
        }
        return r;
    }

    // Multiplicative inverse; requires a nonzero constant term.
    ScalarJet inverse() const {
        Rat a0 = constant_term();
        if (a0 == 0) throw std::domain_error("jet inverse: zero constant term");
        ScalarJet u = *this;
        u.c_.erase(Key(0));  // u = a - a0, valuation >= 1
        Rat inv0 = Rat(1) / a0;
        ScalarJet w = (-inv0) * u;  // (-u/a0)
        ScalarJet acc = constant(nvars_, cap_, inv0);
        ScalarJet term = acc;
        for (int k = 1; k <= cap_ && !term.is_zero(); ++k) {
            term = term * w;
            acc += term;
        }
        return acc;
    }

    // Keep only monomials of total degree <= d.
    ScalarJet truncated(int d) const {
        ScalarJet r(nvars_, cap_);
        for (auto& [k, v] : c_)
            if (key_degree(k) <= d) r.c_[k] = v;
        return r;
    }

    // Coefficient of var^k, as a jet in the remaining variables (exponent stripped).
    ScalarJet coeff_of_power(int var, int k) const {
        check_var(var);
        ScalarJet r(nvars_, cap_);
        for (auto& [key, v] : c_)
            if (key_exp(key, var) == k) r.c_[key - (Key(k) << (8 * var))] = v;
        return r;
    }

    // Lowest exponent of `var` among nonzero terms; returns cap+1 when zero.
    int valuation(int var) const {
        check_var(var);
        int best = cap_ + 1;
        for (auto& [k, v] : c_) best = std::min(best, key_exp(k, var));
        return best;
    }
    // Lowest total degree among nonzero terms; cap+1 when zero.
    int order() const {
        int best = cap_ + 1;
        for (auto& [k, v] : c_) best = std::min(best, key_degree(k));
        return best;
    }
    int max_degree() const {
        int best = 0;
        for (auto& [k, v] : c_) best = std::max(best, key_degree(k));
        return best;
    }

    ScalarJet mul_monomial(int var, int k) const {
        check_var(var);
        ScalarJet r(nvars_, cap_);
        for (auto& [key, v] : c_) {
            if (key_degree(key) + k > cap_) continue;
            r.c_[key + (Key(k) << (8 * var))] = v;
        }
        return r;
    }

    // Exact division by var; every nonzero term must contain var.
    ScalarJet div_var(int var) const {
        check_var(var);
        ScalarJet r(nvars_, cap_);
        for (auto& [key, v] : c_) {
            if (key_exp(key, var) == 0)
                throw std::domain_error("jet div_var: term without the variable");
            r.c_[key - (Key(1) << (8 * var))] = v;
        }
        return r;
    }

    Rat eval(const std::vector<Rat>& pt) const {
        if (int(pt.size()) != nvars_) throw std::invalid_argument("eval arity mismatch");
        Rat acc = 0;
        for (auto& [k, v] : c_) {
            Rat t = v;
            for (int var = 0; var < nvars_; ++var)
                for (int e = 0; e < key_exp(k, var); ++e) t *= pt[var];
            acc += t;
        }
        return acc;
    }
    double eval_double(const std::vector<double>& pt) const {
        double acc = 0;
        for (auto& [k, v] : c_) {
            double t = v.get_d();
            for (int var = 0; var < nvars_; ++var)
                for (int e = 0; e < key_exp(k, var); ++e) t *= pt[var];
            acc += t;
        }
        return acc;
    }

    std::string str(const std::vector<std::string>& names) const {
        if (c_.empty()) return "0";
        std::string out;
        for (auto& [k, v] : c_) {
            if (!out.empty()) out += " + ";
            out += rat_str(v);
            for (int var = 0; var < nvars_; ++var) {
                int e = key_exp(k, var);
                if (e == 0) continue;
                out += "*" + names[var];
                if (e > 1) out += "^" + std::to_string(e);
            }
        }
        return out;
    }

  private:
    void check_var(int var) const {
        if (var < 0 || var >= nvars_) throw std::invalid_argument("variable index out of range");
    }
    void match(const ScalarJet& o) const {
        if (nvars_ != o.nvars_ || cap_ != o.cap_)
            throw std::invalid_argument("jet arity/cap mismatch");
    }
    void add_term(Key k, const Rat& v) {
        auto [it, fresh] = c_.try_emplace(k, v);
        if (!fresh) {
            it->second += v;
            if (it->second == 0) c_.erase(it);
        }
    }

    int nvars_, cap_;
    std::map<Key, Rat> c_;
};

// ---------------------------------------------------------------------------
// Generic ring hooks. Every scalar ring R used by the tensor layer provides:
//   ring_zero/ring_one(model), ring_is_zero, ring_inv, ring_scale,
// and (for jet-like rings) ring_diff.

inline Rat ring_zero(const Rat&) { return Rat(0); }
inline Rat ring_one(const Rat&) { return Rat(1); }
inline bool ring_is_zero(const Rat& r) { return r == 0; }
inline Rat ring_inv(const Rat& r) {
    if (r == 0) throw std::domain_error("inverse of zero");
    return Rat(1) / r;
}
inline Rat ring_scale(const Rat& r, const Rat& s) { return r * s; }

inline ScalarJet ring_zero(const ScalarJet& m) { return ScalarJet(m.nvars(), m.cap()); }
inline ScalarJet ring_one(const ScalarJet& m) {
    return ScalarJet::constant(m.nvars(), m.cap(), 1);
}
inline bool ring_is_zero(const ScalarJet& j) { return j.is_zero(); }
inline ScalarJet ring_inv(const ScalarJet& j) { return j.inverse(); }
inline ScalarJet ring_scale(const ScalarJet& j, const Rat& s) { return j * s; }
inline ScalarJet ring_diff(const ScalarJet& j, int var) { return j.diff(var); }

// ---------------------------------------------------------------------------
// Truncated polynomial in log(x_xvar) of degree at most two. Degree two is
// exactly what a single formal log source generates below the first log^3
// order; any product whose log^3 (or higher) part survives the jet
// truncation is out of the supported range and aborts loudly.

class LogJet {
  public:
    LogJet() = default;
    explicit LogJet(ScalarJet a)
        : a_(std::move(a)), b_(ring_zero(a_)), c_(ring_zero(a_)), xvar_(0) {}
    LogJet(ScalarJet a, ScalarJet b, int xvar = 0)
        : a_(std::move(a)), b_(std::move(b)), c_(ring_zero(a_)), xvar_(xvar) {}
    LogJet(ScalarJet a, ScalarJet b, ScalarJet c, int xvar)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), xvar_(xvar) {}

    const ScalarJet& plain() const { return a_; }
    const ScalarJet& logpart() const { return b_; }
    const ScalarJet& logpart2() const { return c_; }
    int xvar() const { return xvar_; }
    bool is_zero() const { return a_.is_zero() && b_.is_zero() && c_.is_zero(); }

    friend LogJet operator+(const LogJet& u, const LogJet& v) {
        return LogJet(u.a_ + v.a_, u.b_ + v.b_, u.c_ + v.c_, u.xvar_);
    }
    friend LogJet operator-(const LogJet& u, const LogJet& v) {
        return LogJet(u.a_ - v.a_, u.b_ - v.b_, u.c_ - v.c_, u.xvar_);
    }
    LogJet operator-() const { return LogJet(-a_, -b_, -c_, xvar_); }
    friend LogJet operator*(const LogJet& u, const LogJet& v) {
        if (!(u.b_ * v.c_ + u.c_ * v.b_).is_zero() || !(u.c_ * v.c_).is_zero())
            throw std::runtime_error("LogJet: log^3 term survives truncation");
        return LogJet(u.a_ * v.a_, u.a_ * v.b_ + u.b_ * v.a_,
                      u.a_ * v.c_ + u.b_ * v.b_ + u.c_ * v.a_, u.xvar_);
    }
    friend LogJet operator*(const LogJet& u, const Rat& s) {
        return LogJet(u.a_ * s, u.b_ * s, u.c_ * s, u.xvar_);
    }
    friend LogJet operator*(const Rat& s, const LogJet& u) { return u * s; }
    friend bool operator==(const LogJet& u, const LogJet& v) {
        return u.a_ == v.a_ && u.b_ == v.b_ && u.c_ == v.c_;
    }

    LogJet diff(int var) const {
        // d/dx (a + b log x + c log^2 x) = (a' + b/x) + (b' + 2c/x) log x + c' log^2 x
        if (var == xvar_ && !(b_.is_zero() && c_.is_zero()))
            return LogJet(a_.diff(var) + b_.div_var(xvar_),
                          b_.diff(var) + rat(2) * c_.div_var(xvar_), c_.diff(var), xvar_);
        return LogJet(a_.diff(var), b_.diff(var), c_.diff(var), xvar_);
    }

    LogJet inverse() const {
        // Neumann series in the nilpotent part b log x + c log^2 x
        ScalarJet p = a_.inverse();
        ScalarJet i1 = -(p * b_ * p);
        ScalarJet i2 = p * b_ * p * b_ * p - p * c_ * p;
        if (!(b_ * i2 + c_ * i1).is_zero() || !(c_ * i2).is_zero())
            throw std::runtime_error("LogJet inverse: log^3 term survives truncation");
        return LogJet(p, i1, i2, xvar_);
    }

  private:
    ScalarJet a_, b_, c_;
    int xvar_ = 0;
};

inline LogJet ring_zero(const LogJet& m) {
    return LogJet(ring_zero(m.plain()), ring_zero(m.plain()), ring_zero(m.plain()), m.xvar());
}
inline LogJet ring_one(const LogJet& m) {
    return LogJet(ring_one(m.plain()), ring_zero(m.plain()), ring_zero(m.plain()), m.xvar());
}
inline bool ring_is_zero(const LogJet& j) { return j.is_zero(); }
inline LogJet ring_inv(const LogJet& j) { return j.inverse(); }
inline LogJet ring_scale(const LogJet& j, const Rat& s) { return j * s; }
inline LogJet ring_diff(const LogJet& j, int var) { return j.diff(var); }

// ---------------------------------------------------------------------------
// First-order dual numbers over a jet ring: exact directional derivatives.

template <class R>
struct Dual {
    R a, b;  // a + eps*b, eps^2 = 0

    Dual() = default;
    Dual(R a_, R b_) : a(std::move(a_)), b(std::move(b_)) {}

    friend Dual operator+(const Dual& u, const Dual& v) { return {u.a + v.a, u.b + v.b}; }
    friend Dual operator-(const Dual& u, const Dual& v) { return {u.a - v.a, u.b - v.b}; }
    Dual operator-() const { return {-a, -b}; }
    friend Dual operator*(const Dual& u, const Dual& v) {
        return {u.a * v.a, u.a * v.b + u.b * v.a};
    }
    friend Dual operator*(const Dual& u, const Rat& s) { return {u.a * s, u.b * s}; }
    friend Dual operator*(const Rat& s, const Dual& u) { return u * s; }
    friend bool operator==(const Dual& u, const Dual& v) { return u.a == v.a && u.b == v.b; }
};

template <class R>
Dual<R> ring_zero(const Dual<R>& m) {
    return {ring_zero(m.a), ring_zero(m.a)};
}
template <class R>
Dual<R> ring_one(const Dual<R>& m) {
    return {ring_one(m.a), ring_zero(m.a)};
}
template <class R>
bool ring_is_zero(const Dual<R>& u) {
    return ring_is_zero(u.a) && ring_is_zero(u.b);
}
template <class R>
Dual<R> ring_inv(const Dual<R>& u) {
    R ia = ring_inv(u.a);
    return {ia, -(u.b * ia * ia)};
}
template <class R>
Dual<R> ring_scale(const Dual<R>& u, const Rat& s) {
    return {ring_scale(u.a, s), ring_scale(u.b, s)};
}
template <class R>
Dual<R> ring_diff(const Dual<R>& u, int var) {
    return {ring_diff(u.a, var), ring_diff(u.b, var)};
}

}  // namespace lovelock
