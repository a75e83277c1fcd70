#pragma once

// Batch front end: JSON problem documents in, JSON/text reports out.
//
// Input document:
//   {"command": "curvature|fg-expand|obstruction|yamabe|indicial|limsec",
//    "n": 4, "alpha": ["1","0","-1/2"], "kappa": "1",
//    "metric": {"dim": 5, "entries": [{"i":1,"j":1,
//                "monomials":[{"exps":[0,2,0,0,0],"coeff":"1/3"}]}]},
//    "cap": 6, "order": 4, "options": {...}}
// Output document:
//   {"status": "ok", "tables": {...}, "residual_orders": {...}, "warnings": []}
// or, on failure,
//   {"status": "error", "error": {"code": c, "kind": ..., "message": ...}}
// with process exit status 0 (ok), 2 (invalid input), 3 (gate failure:
// LimSec, A1 = 0 or Btilde_{1,2} = 0), 4 (internal consistency failure).
//
// All rationals travel as strings and parse exactly; surds are serialized as
// {rational_part, rational_factor, square_free} meaning a + b sqrt(d).
// Identical inputs produce byte-identical reports, and canonical_spec() is
// idempotent, so documents survive round-trips.

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "fg_expansion.hpp"
#include "indicial.hpp"
#include "yamabe.hpp"

namespace lovelock {

using Json = nlohmann::ordered_json;

struct CliError : std::runtime_error {
    int code;  // 2 invalid input, 3 gate failure, 4 internal consistency
    CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

namespace iodetail {

inline const Json& req(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw CliError(2, std::string("missing required field '") + key + "'");
    return j.at(key);
}

inline int req_int(const Json& j, const char* key, int lo, int hi) {
    const Json& v = req(j, key);
    if (!v.is_number_integer())
        throw CliError(2, std::string("field '") + key + "' must be an integer");
    long long x = v.get<long long>();
    if (x < lo || x > hi)
        throw CliError(2, std::string("field '") + key + "' out of range");
    return int(x);
}

inline Rat req_rat(const Json& v, const char* what) {
    try {
        if (v.is_string()) return rat_parse(v.get<std::string>());
        if (v.is_number_integer()) return Rat(long(v.get<long long>()));
    } catch (const std::exception& e) {
        throw CliError(2, std::string(what) + ": " + e.what());
    }
    throw CliError(2, std::string(what) + " must be an exact rational string \"p/q\"");
}

}  // namespace iodetail

// ---------------------------------------------------------------------------
// Jet / metric (de)serialization.

inline Json jet_to_json(const ScalarJet& j) {
    Json out = Json::array();
    for (const auto& [key, val] : j.terms()) {
        Json exps = Json::array();
        for (int v = 0; v < j.nvars(); ++v) exps.push_back(ScalarJet::key_exp(key, v));
        out.push_back(Json{{"exps", std::move(exps)}, {"coeff", rat_str(val)}});
    }
    return out;
}

inline ScalarJet jet_from_json(int nvars, int cap, const Json& monomials) {
    if (!monomials.is_array()) throw CliError(2, "'monomials' must be an array");
    ScalarJet j(nvars, cap);
    for (const Json& m : monomials) {
        const Json& je = iodetail::req(m, "exps");
        if (!je.is_array() || int(je.size()) != nvars)
            throw CliError(2, "'exps' must list one exponent per variable");
        std::vector<int> exps;
        for (const Json& e : je) {
            if (!e.is_number_integer() || e.get<long long>() < 0)
                throw CliError(2, "exponents must be nonnegative integers");
            exps.push_back(int(e.get<long long>()));
        }
        Rat c = iodetail::req_rat(iodetail::req(m, "coeff"), "monomial coefficient");
        try {
            j.set_coeff(exps, j.coeff(exps) + c);  // accumulate duplicates
        } catch (const std::exception& e) {
            throw CliError(2, std::string("bad monomial: ") + e.what());
        }
    }
    return j;
}

inline Json sym2_to_json(const Sym2<ScalarJet>& t) {
    Json entries = Json::array();
    for (int i = 0; i < t.m; ++i)
        for (int j = i; j < t.m; ++j)
            if (!t.at(i, j).is_zero())
                entries.push_back(
                    Json{{"i", i}, {"j", j}, {"monomials", jet_to_json(t.at(i, j))}});
    return Json{{"dim", t.m}, {"entries", std::move(entries)}};
}

inline Sym2<ScalarJet> metric_from_json(const Json& metric, int cap) {
    int dim = iodetail::req_int(metric, "dim", 2, ScalarJet::kMaxVars);
    const Json& entries = iodetail::req(metric, "entries");
    if (!entries.is_array()) throw CliError(2, "'entries' must be an array");
    Sym2<ScalarJet> g(dim, ScalarJet(dim, cap));
    for (const Json& e : entries) {
        int i = iodetail::req_int(e, "i", 0, dim - 1);
        int j = iodetail::req_int(e, "j", 0, dim - 1);
        g.at(i, j) = g.at(i, j) + jet_from_json(dim, cap, iodetail::req(e, "monomials"));
    }
    return g;
}

// Surds a + b sqrt(d); the radicand is emitted even when b = 0 (as 0).
inline Json surd_to_json(const Surd& s) {
    return Json{{"rational_part", rat_str(s.a)},
                {"rational_factor", rat_str(s.b)},
                {"square_free", s.d}};
}

inline Json rootpair_to_json(const RootPair& p) {
    return Json{{"plus", surd_to_json(p.plus)},
                {"minus", surd_to_json(p.minus)},
                {"complex_pair", p.complex_pair}};
}

// ---------------------------------------------------------------------------
// Problem specification.

struct ParsedSpec {
    std::string command;
    int n = 0;
    std::vector<Rat> alpha;
    Rat kappa = 1;
    bool has_metric = false;
    Sym2<ScalarJet> metric{0, ScalarJet()};
    int cap = -1;    // -1 when absent
    int order = -1;  // -1 when absent
    Json options = Json::object();
};

inline ParsedSpec parse_spec(const Json& doc) {
    if (!doc.is_object()) throw CliError(2, "problem document must be a JSON object");
    ParsedSpec s;
    const Json& cmd = iodetail::req(doc, "command");
    if (!cmd.is_string()) throw CliError(2, "'command' must be a string");
    s.command = cmd.get<std::string>();
    static const char* known[] = {"curvature", "fg-expand", "obstruction",
                                  "yamabe",    "indicial",  "limsec"};
    bool ok = false;
    for (const char* k : known) ok = ok || s.command == k;
    if (!ok) throw CliError(2, "unknown command '" + s.command + "'");

    s.n = iodetail::req_int(doc, "n", 2, ScalarJet::kMaxVars - 1);
    if (doc.contains("alpha")) {
        const Json& a = doc.at("alpha");
        if (!a.is_array() || a.empty())
            throw CliError(2, "'alpha' must be a non-empty array of rationals");
        for (const Json& e : a) s.alpha.push_back(iodetail::req_rat(e, "alpha entry"));
    }
    if (doc.contains("kappa")) s.kappa = iodetail::req_rat(doc.at("kappa"), "kappa");
    if (doc.contains("cap")) s.cap = iodetail::req_int(doc, "cap", 0, 200);
    if (doc.contains("order")) s.order = iodetail::req_int(doc, "order", 0, 200);
    if (doc.contains("options")) {
        if (!doc.at("options").is_object()) throw CliError(2, "'options' must be an object");
        s.options = doc.at("options");
    }
    if (doc.contains("metric")) {
        if (s.cap < 0) throw CliError(2, "'cap' is required when a metric is given");
        s.metric = metric_from_json(doc.at("metric"), s.cap);
        s.has_metric = true;
    }
    return s;
}

// Canonical re-serialization of a problem document: fixed key order, canonical
// rationals, sorted metric entries/monomials. Idempotent by construction.
inline Json canonical_spec(const Json& doc) {
    ParsedSpec s = parse_spec(doc);
    Json out{{"command", s.command}, {"n", s.n}};
    if (!s.alpha.empty()) {
        Json a = Json::array();
        for (const Rat& r : s.alpha) a.push_back(rat_str(r));
        out["alpha"] = std::move(a);
    }
    out["kappa"] = rat_str(s.kappa);
    if (s.has_metric) out["metric"] = sym2_to_json(s.metric);
    if (s.cap >= 0) out["cap"] = s.cap;
    if (s.order >= 0) out["order"] = s.order;
    if (!s.options.empty()) out["options"] = s.options;
    return out;
}

// ---------------------------------------------------------------------------
// Command implementations.

namespace iodetail {

inline CouplingVector coupling(const ParsedSpec& s) {
    if (s.alpha.empty()) throw CliError(2, "command '" + s.command + "' requires 'alpha'");
    try {
        return CouplingVector(s.n, s.alpha, s.kappa);
    } catch (const std::exception& e) {
        throw CliError(2, std::string("bad coupling vector: ") + e.what());
    }
}

inline Json order_str(int ord, int through) {
    if (ord > through) return Json("inf (exact)");
    return Json(ord);
}

// Boundary metric on the bulk index range: block 1..n only, independent of
// the collar variable 0.
inline void check_boundary(const Sym2<ScalarJet>& h, int n) {
    if (h.m != n + 1)
        throw CliError(2, "boundary metric must have dim = n+1 (index 0 is the collar)");
    for (int i = 1; i < h.m; ++i)
        if (!h.at(0, i).is_zero() || !h.at(0, 0).is_zero())
            throw CliError(2, "boundary metric entries must not involve index 0");
    for (const auto& e : h.v)
        if (e.coeff_of_power(0, 0) != e)
            throw CliError(2, "boundary metric entries must not depend on variable 0");
}

// options.sample = {"x": [floats], "y": [floats]} -> grid + boundary point.
struct SampleReq {
    bool present = false;
    std::vector<double> x, y;
};

inline SampleReq sample_req(const ParsedSpec& s) {
    SampleReq r;
    if (!s.options.contains("sample")) return r;
    const Json& sm = s.options.at("sample");
    const Json& jx = req(sm, "x");
    const Json& jy = req(sm, "y");
    if (!jx.is_array() || !jy.is_array() || int(jy.size()) != s.n)
        throw CliError(2, "sample needs an 'x' grid and a boundary point 'y' of length n");
    for (const Json& v : jx) r.x.push_back(v.get<double>());
    for (const Json& v : jy) r.y.push_back(v.get<double>());
    r.present = true;
    return r;
}

inline Json run_limsec(const ParsedSpec& s) {
    CouplingVector cv = coupling(s);
    if (cv.A1(s.kappa) == 0)
        throw CliError(3, "gate failure: A1(alpha, kappa) = 0");
    if (!limsec_member(cv, s.kappa))
        throw CliError(3, "gate failure: (alpha, kappa) is not a LimSec member");
    return Json{{"tables",
                 Json{{"limsec", Json{{"member", true},
                                      {"A1", rat_str(cv.A1(s.kappa))},
                                      {"lambda_alpha", rat_str(cv.lambda_alpha())}}}}},
                {"residual_orders", Json::object()}};
}

inline Json run_curvature(const ParsedSpec& s) {
    CouplingVector cv = coupling(s);
    if (!s.has_metric) throw CliError(2, "'curvature' requires a metric");
    if (s.metric.m != s.n + 1)
        throw CliError(2, "'curvature' expects a bulk metric of dim = n+1");
    MetricJet<ScalarJet> g = [&] {
        try {
            return MetricJet<ScalarJet>(s.metric);
        } catch (const std::exception& e) {
            throw CliError(2, std::string("metric not invertible at the origin: ") + e.what());
        }
    }();
    auto first = christoffel_first(g);
    auto gam = christoffel(g, first);
    auto tmix = raise22_second(riemann(g, gam, first), g.up);
    Json ric = Json::object(), scal = Json::object();
    for (int q = 1; q <= cv.qmax(); ++q) {
        auto r = form_to_sym2(ricci_2q_from_mixed(tmix, g.lo, q));
        ric[std::to_string(2 * q)] = sym2_to_json(r);
        scal[std::to_string(2 * q)] = jet_to_json(scal_2q_from_mixed(tmix, q));
    }
    Json tables{{"F_alpha", sym2_to_json(lovelock_tensor(g, cv))},
                {"ricci_2q", std::move(ric)},
                {"scal_2q", std::move(scal)}};
    return Json{{"tables", std::move(tables)}, {"residual_orders", Json::object()}};
}

inline Json run_fg(const ParsedSpec& s, bool obstruction_only) {
    CouplingVector cv = coupling(s);
    if (!limsec_member(cv, s.kappa))
        throw CliError(3, "gate failure: (alpha, kappa) is not a LimSec member");
    if (!s.has_metric) throw CliError(2, "'" + s.command + "' requires a boundary metric");
    check_boundary(s.metric, s.n);
    int order = obstruction_only ? s.n : (s.order >= 0 ? s.order : s.n);
    if (order > s.n) throw CliError(2, "'order' beyond x^n is not determined");
    FGResult res = fg_solve(s.metric, cv, order);

    Json hk = Json::object();
    for (int k = 1; k <= order; ++k) hk["h_" + std::to_string(k)] = sym2_to_json(res.h[size_t(k)]);
    Json tables{{"h", std::move(hk)}, {"has_log", res.has_log}};
    if (res.has_log) tables["h_log"] = sym2_to_json(res.hlog);
    if (order == s.n) tables["obstruction"] = sym2_to_json(res.obstruction);

    auto ords = fg_residual_orders(res, cv, order);
    Json rords{{"block_00", order_str(ords[0], order)},
               {"block_0i", order_str(ords[1], order)},
               {"block_ij", order_str(ords[2], order)}};

    SampleReq sq = sample_req(s);
    if (sq.present) {
        std::vector<double> pt(size_t(s.n) + 1, 0.0);
        for (int i = 0; i < s.n; ++i) pt[size_t(i) + 1] = sq.y[size_t(i)];
        Json entries = Json::array();
        for (int i = 1; i <= s.n; ++i)
            for (int j = i; j <= s.n; ++j) {
                std::vector<double> vals;
                for (double x : sq.x) {
                    double acc = 0, xs = 1;
                    for (size_t k = 0; k < res.h.size(); ++k, xs *= x)
                        acc += xs * res.h[k].at(i, j).eval_double(pt);
                    if (res.has_log && x > 0)
                        acc += std::pow(x, s.n) * std::log(x) *
                               res.hlog.at(i, j).eval_double(pt);
                    vals.push_back(acc);
                }
                entries.push_back(Json{{"i", i}, {"j", j}, {"values", vals}});
            }
        tables["sample"] = Json{{"x", sq.x}, {"entries", std::move(entries)}};
    }
    return Json{{"tables", std::move(tables)}, {"residual_orders", std::move(rords)}};
}

inline Json run_yamabe(const ParsedSpec& s) {
    CouplingVector cv = coupling(s);
    if (s.kappa != 1) throw CliError(2, "product collars require kappa = 1");
    if (b_tilde(cv) == 0) throw CliError(3, "gate failure: Btilde_{1,2}(beta, kappa) = 0");
    if (!s.has_metric) throw CliError(2, "'yamabe' requires a boundary metric");
    check_boundary(s.metric, s.n);
    YamabeResult res = yamabe_solve(s.metric, cv);

    Json uk = Json::object();
    for (int k = 2; k <= s.n + 1; ++k)
        uk["u_" + std::to_string(k)] = jet_to_json(res.u[size_t(k)]);
    Json tables{{"u", std::move(uk)},
                {"has_log", res.has_log},
                {"log_coeff", jet_to_json(res.log_coeff)}};
    Json rords{{"plain", order_str(res.residual_order, s.metric.v[0].cap())}};

    SampleReq sq = sample_req(s);
    if (sq.present) {
        std::vector<double> pt(size_t(s.n) + 1, 0.0);
        for (int i = 0; i < s.n; ++i) pt[size_t(i) + 1] = sq.y[size_t(i)];
        std::vector<double> vals;
        for (double x : sq.x) {
            std::vector<double> ptx = pt;
            ptx[0] = x;
            double acc = res.ujet.eval_double(ptx);
            if (res.has_log && x > 0)
                acc += std::pow(x, s.n + 2) * std::log(x) * res.log_coeff.eval_double(pt);
            vals.push_back(acc);
        }
        tables["sample"] = Json{{"x", sq.x}, {"values", vals}};
    }
    return Json{{"tables", std::move(tables)}, {"residual_orders", std::move(rords)}};
}

inline Json run_indicial(const ParsedSpec& s) {
    if (!s.options.contains("c"))
        throw CliError(2, "'indicial' requires options.c (zeroth-order constant)");
    Rat c = req_rat(s.options.at("c"), "options.c");
    Json sym2roots = Json::array();
    for (const RootPair& p : roots_sym2(s.n, c)) sym2roots.push_back(rootpair_to_json(p));
    Json radii = Json::object();
    for (int r : {0, 2}) {
        IndicialRadius rad = indicial_radius(s.n, r, c);
        Json e{{"defined", rad.defined}};
        if (rad.defined) e["value"] = surd_to_json(rad.value);
        radii["r_" + std::to_string(r)] = std::move(e);
    }
    Json tables{{"roots_functions", rootpair_to_json(roots_functions(s.n, c))},
                {"roots_sym2", std::move(sym2roots)},
                {"radius", std::move(radii)}};
    return Json{{"tables", std::move(tables)}, {"residual_orders", Json::object()}};
}

}  // namespace iodetail

// ---------------------------------------------------------------------------
// Dispatch.

struct RunResult {
    int exit_code = 0;
    Json doc;
};

inline RunResult run(const Json& spec) {
    RunResult rr;
    try {
        ParsedSpec s = parse_spec(spec);
        Json body;
        if (s.command == "limsec")
            body = iodetail::run_limsec(s);
        else if (s.command == "curvature")
            body = iodetail::run_curvature(s);
        else if (s.command == "fg-expand")
            body = iodetail::run_fg(s, false);
        else if (s.command == "obstruction")
            body = iodetail::run_fg(s, true);
        else if (s.command == "yamabe")
            body = iodetail::run_yamabe(s);
        else
            body = iodetail::run_indicial(s);
        rr.doc = Json{{"status", "ok"},
                      {"tables", body.at("tables")},
                      {"residual_orders", body.at("residual_orders")},
                      {"warnings", Json::array()}};
        return rr;
    } catch (const CliError& e) {
        rr.exit_code = e.code;
        const char* kind = e.code == 3   ? "gate_failure"
                           : e.code == 4 ? "internal_consistency"
                                         : "invalid_input";
        rr.doc = Json{{"status", "error"},
                      {"error", Json{{"code", e.code}, {"kind", kind}, {"message", e.what()}}}};
        return rr;
    } catch (const std::invalid_argument& e) {
        rr.exit_code = 2;
        rr.doc = Json{{"status", "error"},
                      {"error", Json{{"code", 2}, {"kind", "invalid_input"},
                                     {"message", e.what()}}}};
        return rr;
    } catch (const std::domain_error& e) {
        rr.exit_code = 3;
        rr.doc = Json{{"status", "error"},
                      {"error", Json{{"code", 3}, {"kind", "gate_failure"},
                                     {"message", e.what()}}}};
        return rr;
    } catch (const std::exception& e) {
        rr.exit_code = 4;
        rr.doc = Json{{"status", "error"},
                      {"error", Json{{"code", 4}, {"kind", "internal_consistency"},
                                     {"message", e.what()}}}};
        return rr;
    }
}

// Plain-text rendering of a report (same content as the JSON form).
inline void render_text(const Json& j, std::ostream& os, int indent = 0) {
    std::string pad(size_t(indent) * 2, ' ');
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (v.is_object() || (v.is_array() && !v.empty() && v.front().is_structured())) {
                os << pad << k << ":\n";
                render_text(v, os, indent + 1);
            } else {
                os << pad << k << ": " << v.dump() << "\n";
            }
        }
    } else if (j.is_array()) {
        for (const Json& v : j) {
            os << pad << "-\n";
            render_text(v, os, indent + 1);
        }
    } else {
        os << pad << j.dump() << "\n";
    }
}

}  // namespace lovelock
