// Walkthrough: solve the formal Fefferman-Graham expansion of a conformally
// compact Lovelock metric for a curved polynomial boundary metric, print the
// solved coefficients, the obstruction tensor and the log term, then solve
// the singular Yamabe problem on the same boundary data and tabulate the
// indicial roots of the associated model operators.

#include <cstdio>
#include <string>

#include "lovelock/fg_expansion.hpp"
#include "lovelock/indicial.hpp"
#include "lovelock/yamabe.hpp"

using namespace lovelock;

namespace {

std::vector<std::string> var_names(int m) {
    std::vector<std::string> names{"x"};
    for (int i = 1; i < m; ++i) names.push_back("y" + std::to_string(i));
    return names;
}

void print_sym2(const char* label, const Sym2<ScalarJet>& t, int max_deg) {
    auto names = var_names(t.m);
    std::printf("%s\n", label);
    for (int i = 1; i < t.m; ++i)
        for (int j = i; j < t.m; ++j) {
            ScalarJet e = t.at(i, j).truncated(max_deg);
            if (e.is_zero()) continue;
            std::printf("  [%d,%d] = %s\n", i, j, e.str(names).c_str());
        }
}

std::string surd_str(const Surd& s) {
    if (s.is_rational()) return rat_str(s.a);
    std::string out = s.a == 0 ? "" : rat_str(s.a) + " + ";
    return out + rat_str(s.b) + "*sqrt(" + std::to_string(s.d) + ")";
}

}  // namespace

int main() {
    // boundary dimension n = 4; bulk metric g = x^{-2}(dx^2 + h_x) with
    // h_x = h_0 + x^2 h_2 + x^3 h_3 + x^4 (h_4 + h_{4,1} log x) + ...
    int n = 4, m = n + 1, cap = 6;
    CouplingVector cv(n, {Rat(1), rat(1, 2)});  // alpha = (1, 1/2)

    // curved boundary data: delta plus a sparse polynomial perturbation
    Sym2<ScalarJet> h0(m, ScalarJet(m, cap));
    for (int i = 1; i < m; ++i) h0.at(i, i) = ScalarJet::constant(m, cap, 1);
    h0.at(1, 1).set_coeff({0, 0, 1, 1, 0}, rat(1, 4));
    h0.at(2, 3).set_coeff({0, 1, 0, 0, 1}, rat(-1, 5));
    h0.at(4, 4).set_coeff({0, 0, 2, 0, 0}, rat(1, 6));

    std::printf("== Fefferman-Graham expansion, n = %d, alpha = (1, 1/2) ==\n", n);
    auto res = fg_solve(h0, cv, n);
    print_sym2("h_2 (equals minus the boundary Schouten tensor):", res.h[2], 2);
    std::printf("h_1 and h_3 vanish identically (parity): %s\n",
                res.h[1].is_zero() && res.h[3].is_zero() ? "yes" : "no");
    print_sym2("obstruction tensor (trace-free x^4 source):", res.obstruction, 0);
    if (res.has_log) print_sym2("log coefficient h_{4,1}:", res.hlog, 0);
    auto ords = fg_residual_orders(res, cv, n);
    std::printf("residual orders (00 / 0i / ij blocks): %d %d %d\n", ords[0], ords[1], ords[2]);
    std::printf("log-ring residual check through x^%d: %s\n\n", n,
                fg_verify_log(res, cv) == -1 ? "clean" : "FAILED");

    std::printf("== singular Yamabe expansion on the product collar dx^2 + h_0 ==\n");
    CouplingVector beta(n, {Rat(1)});
    auto yam = yamabe_solve(h0, beta);
    auto names = var_names(m);
    for (int k = 2; k <= n + 1; ++k)
        if (!yam.u[size_t(k)].is_zero())
            std::printf("  u_%d = %s\n", k,
                        yam.u[size_t(k)].truncated(cap - 2 - k < 0 ? 0 : cap - 2 - k)
                            .str(names)
                            .c_str());
    if (yam.has_log)
        std::printf("  log obstruction L = %s  (coefficient of x^%d log x)\n",
                    yam.log_coeff.truncated(0).str(names).c_str(), n + 2);
    std::printf("\n");

    std::printf("== indicial roots of the model operators, n = %d ==\n", n);
    for (Rat c : {Rat(-2), Rat(8)}) {
        std::printf("c = %s:\n", rat_str(c).c_str());
        auto f = roots_functions(n, c);
        std::printf("  functions:  xi_+ = %s, xi_- = %s\n", surd_str(f.plus).c_str(),
                    surd_str(f.minus).c_str());
        auto mus = roots_sym2(n, c);
        for (size_t k = 0; k < mus.size(); ++k)
            std::printf("  sym2 #%zu:    mu_+ = %s, mu_- = %s%s\n", k,
                        surd_str(mus[k].plus).c_str(), surd_str(mus[k].minus).c_str(),
                        mus[k].complex_pair ? "  (complex pair)" : "");
    }
    return 0;
}
