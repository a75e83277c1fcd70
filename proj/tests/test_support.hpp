#pragma once

// Shared helpers for the test suite: deterministic pseudo-random jets,
// tensors and metrics with small rational coefficients.

#include <random>
#include <vector>

#include "lovelock/jets.hpp"
#include "lovelock/tensorjet.hpp"

namespace lovelock::testing {

struct Rng {
    std::mt19937 eng;
    explicit Rng(unsigned seed) : eng(seed) {}

    int intval(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(eng);
    }
    Rat ratval(int num_range = 4, int den_max = 3) {
        int n = intval(-num_range, num_range);
        int d = intval(1, den_max);
        return rat(n, d);
    }
    Rat nonzero_rat(int num_range = 4, int den_max = 3) {
        Rat r = ratval(num_range, den_max);
        while (r == 0) r = ratval(num_range, den_max);
        return r;
    }

    // Random jet with a handful of monomials of total degree <= deg.
    ScalarJet jet(int nvars, int cap, int deg, int nterms = 6) {
        ScalarJet j(nvars, cap);
        for (int t = 0; t < nterms; ++t) {
            std::vector<int> e(nvars, 0);
            int budget = intval(0, deg);
            for (int v = 0; v < nvars && budget > 0; ++v) {
                int k = intval(0, budget);
                e[v] = k;
                budget -= k;
            }
            j.set_coeff(e, j.coeff(e) + ratval());
        }
        return j;
    }

    // Boundary metric on the bulk index range 0..n: block 1..n is delta plus
    // a sparse perturbation in the boundary variables only (degree 1..deg).
    Sym2<ScalarJet> boundary_metric(int n, int cap, int deg, int nterms = 3) {
        int m = n + 1;
        Sym2<ScalarJet> h(m, ScalarJet(m, cap));
        for (int i = 1; i < m; ++i)
            for (int j = i; j < m; ++j) {
                ScalarJet e(m, cap);
                for (int t = 0; t < nterms; ++t) {
                    std::vector<int> ex(m, 0);
                    int budget = intval(1, deg);
                    for (int v = 1; v < m && budget > 0; ++v) {
                        int k = intval(0, budget);
                        ex[v] = k;
                        budget -= k;
                    }
                    e.set_coeff(ex, e.coeff(ex) + ratval() / 5);
                }
                e = e - ScalarJet::constant(m, cap, e.coeff(std::vector<int>(m, 0)));
                if (i == j) e = e + ScalarJet::constant(m, cap, 1);
                h.at(i, j) = e;
            }
        return h;
    }
};

}  // namespace lovelock::testing
