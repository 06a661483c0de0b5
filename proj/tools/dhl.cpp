// dhl: command-line front end for the extended Dicke-Hubbard lattice.
//
//   dhl bands --zeta 0.18 --lambda 0.3 --out bands.csv
//   dhl classify --zeta 0.18 --lambda 0.48 --k 0
//   dhl phase-diagram --config scan.json --grid 256x256 --format json

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dhl/cli.hpp"

namespace {

using dhl::cli::json;
using dhl::io::ConfigError;

std::size_t parse_count(const std::string& s, const std::string& flag) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || v == 0) throw ConfigError(flag, "expected a positive integer, got \"" + s + "\"");
    return static_cast<std::size_t>(v);
}

json parse_k(const std::string& s) {
    const auto comma = s.find(',');
    try {
        if (comma == std::string::npos) return json(std::stod(s));
        return json::array({std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))});
    } catch (const std::exception&) {
        throw ConfigError("--k", "expected k or kx,ky, got \"" + s + "\"");
    }
}

/// --grid N or NxM, mapped onto the grid keys the task reads.
void apply_grid(json& j, const std::string& task, const std::string& text) {
    const auto x = text.find('x');
    const std::size_t n = parse_count(text.substr(0, x), "--grid");
    const std::optional<std::size_t> m =
        x == std::string::npos ? std::nullopt : std::optional(parse_count(text.substr(x + 1), "--grid"));
    const bool plane = j.contains("model") && j["model"].value("geometry", "chain") == "honeycomb";
    json& g = j["grid"];
    if (task == "bands" || task == "intersect2d" || task == "intersection-2d") {
        if (plane || task != "bands") {
            g["kx"]["count"] = n;
            g["ky"]["count"] = m.value_or(n);
        } else {
            g["k"]["count"] = n;
        }
    } else if (task == "phase-diagram") {
        if (plane) {
            g["kx"]["count"] = n;
            g["ky"]["count"] = n;
        } else {
            g["k"]["count"] = n;
        }
        if (m) g["lambda"]["count"] = *m;
    } else if (task == "ldos" || task == "flatband-scan") {
        if (plane)
            g["samples"] = json::array({n, m.value_or(n)});
        else
            g["samples"] = n;
        if (task == "flatband-scan" && m && !plane) g["lambda"]["count"] = *m;
    } else {
        throw ConfigError("--grid", "not used by task " + task);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Excitation spectra, phase diagrams and flat bands of the extended Dicke-Hubbard lattice"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out, format, geometry, branch, k, grid;
    std::optional<double> lambda, zeta, sigma;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out, "output file (default: stdout)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--lambda", lambda, "spin-field coupling");
    app.add_option("--zeta", zeta, "cavity-cavity coupling");
    app.add_option("--geometry", geometry, "chain or honeycomb")->check(CLI::IsMember({"chain", "honeycomb"}));
    app.add_option("--branch", branch, "normal, superradiant or auto")
        ->check(CLI::IsMember({"normal", "superradiant", "auto"}));
    app.add_option("--k", k, "wave vector: k or kx,ky");
    app.add_option("--grid", grid, "resolution N or NxM");
    app.add_option("--sigma", sigma, "LDOS broadening");

    app.add_subcommand("bands", "band structure along a k path or over a plane grid");
    app.add_subcommand("phase-diagram", "region labels on a (k, lambda) grid");
    app.add_subcommand("ldos", "local density of states of every mode");
    app.add_subcommand("classify", "region label at one (k, lambda)");
    app.add_subcommand("flatband-scan", "band flatness over the Brillouin zone, optionally versus lambda");
    app.add_subcommand("crossings", "k where the two boundaries of the chain meet");
    app.add_subcommand("intersect2d", "contact curve of the honeycomb boundaries")->alias("intersection-2d");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : dhl::cli::kConfigError;
    }
    const std::string task = app.get_subcommands().front()->get_name();

    dhl::cli::RunResult r;
    try {
        json j = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("--config", "cannot read " + config_path);
            try {
                j = json::parse(in);
            } catch (const json::parse_error& e) {
                throw ConfigError("--config", e.what());
            }
            if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
        }
        j["task"] = task;
        if (lambda) j["model"]["lambda"] = *lambda;
        if (zeta) j["model"]["zeta"] = *zeta;
        if (!geometry.empty()) j["model"]["geometry"] = geometry;
        if (!branch.empty()) j["branch"] = branch;
        if (!k.empty()) j["k"] = parse_k(k);
        if (sigma) j["ldos"]["sigma"] = *sigma;
        if (!grid.empty()) apply_grid(j, task, grid);
        if (!out.empty()) j["output"]["path"] = out;
        if (!format.empty()) j["output"]["format"] = format;
        r = dhl::cli::run_json(j);
    } catch (const ConfigError& e) {
        r.exit_code = dhl::cli::kConfigError;
        r.error = e.what();
    } catch (const json::exception& e) {
        r.exit_code = dhl::cli::kConfigError;
        r.error = std::string("config: ") + e.what();
    }

    if (r.exit_code != dhl::cli::kOk) {
        std::cerr << "dhl: error: " << r.error << "\n";
        return r.exit_code;
    }
    std::ostream& info = r.data.empty() ? std::cout : std::cerr;
    std::cout << r.data;
    info << r.report << r.summary << "\n";
    return 0;
}
