// Batch command-line front end: reads one problem document (JSON), dispatches
// to the requested solver, writes one report, and exits with the status code
// contract (0 ok, 2 invalid input, 3 gate failure, 4 internal consistency).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "lovelock/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Exact-arithmetic Lovelock curvature and formal expansion solver"};
    std::string in_path, out_path, format = "json";
    double tolerance = 1e-6;
    app.add_option("--in", in_path, "input problem document (default: stdin)");
    app.add_option("--out", out_path, "output report file (default: stdout)");
    app.add_option("--format", format, "output format: json|text")
        ->check(CLI::IsMember({"json", "text"}));
    app.add_option("--tolerance", tolerance, "quadrature tolerance (indicial only)");
    CLI11_PARSE(app, argc, argv);

    lovelock::Json spec;
    try {
        if (in_path.empty()) {
            spec = lovelock::Json::parse(std::cin);
        } else {
            std::ifstream f(in_path);
            if (!f) throw std::runtime_error("cannot open input file: " + in_path);
            spec = lovelock::Json::parse(f);
        }
    } catch (const std::exception& e) {
        lovelock::Json err{{"status", "error"},
                           {"error", {{"code", 2},
                                      {"kind", "invalid_input"},
                                      {"message", std::string("parse: ") + e.what()}}}};
        std::cout << err.dump(2) << "\n";
        return 2;
    }
    if (spec.is_object() && !spec.contains("options")) spec["options"] = lovelock::Json::object();
    if (spec.is_object() && spec["options"].is_object()) spec["options"]["tolerance"] = tolerance;

    lovelock::RunResult rr = lovelock::run(spec);

    std::ostringstream body;
    if (format == "text")
        lovelock::render_text(rr.doc, body);
    else
        body << rr.doc.dump(2) << "\n";

    if (out_path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream f(out_path);
        if (!f) {
            std::cerr << "cannot open output file: " << out_path << "\n";
            return 2;
        }
        f << body.str();
    }
    return rr.exit_code;
}
