#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dhl/bands.hpp"
#include "dhl/io.hpp"
#include "dhl/phase.hpp"

namespace dhl::cli {

using io::ConfigError;
using io::json;

enum class Task { Bands, PhaseDiagram, Ldos, Classify, FlatbandScan, Crossings, Intersect2d };

inline const char* to_string(Task t) noexcept {
    switch (t) {
    case Task::Bands: return "bands";
    case Task::PhaseDiagram: return "phase-diagram";
    case Task::Ldos: return "ldos";
    case Task::Classify: return "classify";
    case Task::FlatbandScan: return "flatband-scan";
    case Task::Crossings: return "crossings";
    case Task::Intersect2d: return "intersect2d";
    }
    return "?";
}

inline Task parse_task(const std::string& s) {
    for (Task t : {Task::Bands, Task::PhaseDiagram, Task::Ldos, Task::Classify, Task::FlatbandScan, Task::Crossings,
                   Task::Intersect2d})
        if (s == to_string(t)) return t;
    if (s == "intersection-2d") return Task::Intersect2d;
    throw ConfigError("task", "unknown task \"" + s + "\"");
}

enum class BranchChoice { Normal, Superradiant, Auto };

struct Range {
    double min;
    double max;
    std::size_t count;

    [[nodiscard]] std::vector<double> values() const {
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i)
            v[i] = count == 1 ? min : min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
        return v;
    }
    [[nodiscard]] json to_json() const { return json{{"min", min}, {"max", max}, {"count", count}}; }
};

struct RunConfig {
    Task task{Task::Bands};
    ModelParams model;
    BranchChoice branch{BranchChoice::Auto};
    std::optional<WaveVector> k;

    Range k_range{-kPi, kPi, 1025};
    Range kx_range{-4.0 * kPi / 3.0, 4.0 * kPi / 3.0, 64};
    Range ky_range{-2.0 * kPi / kSqrt3, 2.0 * kPi / kSqrt3, 64};
    Range lambda_range{0.2, 0.7, 256};
    bool lambda_range_given{false};
    std::array<std::size_t, 2> samples{1024, 1024}; ///< chain uses [0]; honeycomb mesh uses both
    EnergyBins bins;
    BandSelector ldos_bands = BandSelector::middle();
    double sigma{0.005};
    double flat_tolerance{1e-9};
    std::array<int, 2> n_range{-1, 1};
    unsigned threads{0};

    std::string output_path;
    io::Format format{io::Format::Csv};

    /// Field-level validation of a single JSON document. Physics (model validity, phase) is left
    /// to the computation so that it reports as a domain error.
    static RunConfig from_json(const json& j);
};

namespace detail {

inline double num(const json& j, const std::string& field) { return io::detail::number(j, field); }

inline std::size_t count(const json& j, const std::string& field, std::size_t minimum) {
    if (!j.is_number_integer() || j.get<long long>() < static_cast<long long>(minimum))
        throw ConfigError(field, "expected an integer >= " + std::to_string(minimum));
    return j.get<std::size_t>();
}

inline Range range(const json& j, const std::string& field, Range r, std::size_t min_count = 2) {
    if (!j.is_object()) throw ConfigError(field, "expected an object {min, max, count}");
    io::detail::reject_unknown(j, field, {"min", "max", "count"});
    if (j.contains("min")) r.min = num(j["min"], field + ".min");
    if (j.contains("max")) r.max = num(j["max"], field + ".max");
    if (j.contains("count")) r.count = count(j["count"], field + ".count", min_count);
    if (!std::isfinite(r.min) || !std::isfinite(r.max) || !(r.max > r.min))
        throw ConfigError(field, "need finite min < max");
    return r;
}

inline WaveVector wave_vector(const json& j, Geometry g) {
    if (j.is_number()) {
        if (g != Geometry::Chain1D) throw ConfigError("k", "honeycomb geometry needs k = [kx, ky]");
        return WaveVector::chain(j.get<double>());
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        if (g != Geometry::Honeycomb2D) throw ConfigError("k", "chain geometry needs a scalar k");
        return WaveVector::plane(j[0].get<double>(), j[1].get<double>());
    }
    if (j.is_array() && j.size() == 1 && j[0].is_number()) return wave_vector(j[0], g);
    throw ConfigError("k", "expected a number or [kx, ky]");
}

inline BandSelector band_selector(const json& j) {
    if (!j.is_string()) throw ConfigError("ldos.bands", "expected a string");
    const auto s = j.get<std::string>();
    if (s == "lower") return BandSelector::lower();
    if (s == "middle") return BandSelector::middle();
    if (s == "upper") return BandSelector::upper();
    if (s == "all") return BandSelector::all();
    throw ConfigError("ldos.bands", "expected lower, middle, upper or all");
}

inline const char* band_selector_name(const BandSelector& b) {
    if (b.count() == 3) return "all";
    if (b.bands[0]) return "lower";
    if (b.bands[2]) return "upper";
    return "middle";
}

} // namespace detail

inline RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
    io::detail::reject_unknown(j, "", {"task", "model", "branch", "k", "grid", "ldos", "tolerance", "threads", "output"});
    RunConfig c;
    if (!j.contains("task")) throw ConfigError("task", "missing");
    if (!j["task"].is_string()) throw ConfigError("task", "expected a string");
    c.task = parse_task(j["task"].get<std::string>());

    if (j.contains("model")) c.model = io::model_from_json(j["model"]);
    const bool plane = c.model.geometry == Geometry::Honeycomb2D;
    if (plane) c.samples = {256, 256};

    if (j.contains("branch")) {
        if (!j["branch"].is_string()) throw ConfigError("branch", "expected a string");
        const auto b = j["branch"].get<std::string>();
        if (b == "normal") c.branch = BranchChoice::Normal;
        else if (b == "superradiant") c.branch = BranchChoice::Superradiant;
        else if (b == "auto") c.branch = BranchChoice::Auto;
        else throw ConfigError("branch", "expected normal, superradiant or auto");
    }
    if (j.contains("k")) c.k = detail::wave_vector(j["k"], c.model.geometry);

    if (c.task == Task::Intersect2d) c.kx_range.count = c.ky_range.count = 512;
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (!g.is_object()) throw ConfigError("grid", "expected an object");
        io::detail::reject_unknown(g, "grid", {"k", "kx", "ky", "lambda", "samples", "bins", "n"});
        if (g.contains("k")) c.k_range = detail::range(g["k"], "grid.k", c.k_range);
        if (g.contains("kx")) c.kx_range = detail::range(g["kx"], "grid.kx", c.kx_range);
        if (g.contains("ky")) c.ky_range = detail::range(g["ky"], "grid.ky", c.ky_range);
        if (g.contains("lambda")) {
            c.lambda_range = detail::range(g["lambda"], "grid.lambda", c.lambda_range, 1);
            c.lambda_range_given = true;
        }
        if (g.contains("samples")) {
            const json& s = g["samples"];
            if (s.is_array()) {
                if (s.size() != 2) throw ConfigError("grid.samples", "expected n or [n1, n2]");
                c.samples = {detail::count(s[0], "grid.samples[0]", 1), detail::count(s[1], "grid.samples[1]", 1)};
            } else {
                c.samples[0] = c.samples[1] = detail::count(s, "grid.samples", 1);
            }
        }
        if (g.contains("bins")) {
            const Range r = detail::range(g["bins"], "grid.bins", {c.bins.e_min, c.bins.e_max, std::size_t(c.bins.count)}, 1);
            c.bins = {r.min, r.max, static_cast<int>(r.count)};
        }
        if (g.contains("n")) {
            const json& n = g["n"];
            if (!n.is_array() || n.size() != 2 || !n[0].is_number_integer() || !n[1].is_number_integer() ||
                n[0].get<int>() > n[1].get<int>())
                throw ConfigError("grid.n", "expected [n_min, n_max] with n_min <= n_max");
            c.n_range = {n[0].get<int>(), n[1].get<int>()};
        }
    }
    if (c.task == Task::Intersect2d && (c.kx_range.count < 8 || c.ky_range.count < 8))
        throw ConfigError("grid", "intersect2d needs at least 8 vertices per axis");

    if (j.contains("ldos")) {
        const json& l = j["ldos"];
        if (!l.is_object()) throw ConfigError("ldos", "expected an object");
        io::detail::reject_unknown(l, "ldos", {"bands", "sigma"});
        if (l.contains("bands")) c.ldos_bands = detail::band_selector(l["bands"]);
        if (l.contains("sigma")) {
            c.sigma = detail::num(l["sigma"], "ldos.sigma");
            if (!(c.sigma > 0)) throw ConfigError("ldos.sigma", "must be positive");
        }
    }
    if (j.contains("tolerance")) {
        const json& t = j["tolerance"];
        if (!t.is_object()) throw ConfigError("tolerance", "expected an object");
        io::detail::reject_unknown(t, "tolerance", {"flat"});
        if (t.contains("flat")) {
            c.flat_tolerance = detail::num(t["flat"], "tolerance.flat");
            if (!(c.flat_tolerance > 0)) throw ConfigError("tolerance.flat", "must be positive");
        }
    }
    if (j.contains("threads")) c.threads = static_cast<unsigned>(detail::count(j["threads"], "threads", 0));
    if (j.contains("output")) {
        const json& o = j["output"];
        if (!o.is_object()) throw ConfigError("output", "expected an object");
        io::detail::reject_unknown(o, "output", {"path", "format"});
        if (o.contains("path")) {
            if (!o["path"].is_string()) throw ConfigError("output.path", "expected a string");
            c.output_path = o["path"].get<std::string>();
        }
        if (o.contains("format")) {
            if (!o["format"].is_string()) throw ConfigError("output.format", "expected a string");
            c.format = io::parse_format(o["format"].get<std::string>());
        }
    }

    if (c.task == Task::Classify && !c.k) throw ConfigError("k", "required by classify");
    if ((c.task == Task::Crossings) && plane)
        throw ConfigError("model.geometry", "crossings are defined for the chain; use intersect2d on the honeycomb lattice");
    return c;
}

// ---------------------------------------------------------------------------------------------
// execution

/// Everything a task produced besides its table; feeds emit_report.
struct Outcome {
    io::Table table;
    std::string grid;
    std::size_t stable{0};
    std::size_t total{0};

    std::optional<double> lambda_sc;
    std::optional<Branch> branch;
    struct FlatScanEntry {
        double lambda;
        Branch branch;
        std::vector<FlatBand> flat;
        bool stable;
    };
    std::vector<FlatScanEntry> flat_scan;
    std::optional<double> boundary_normal;
    std::optional<double> boundary_super;
    std::string boundary_super_error;
    std::optional<std::array<std::size_t, 4>> label_counts;
    std::vector<CrossingPoint> crossings;
    std::optional<RegionLabel> label;
    std::size_t contour_points{0};
    std::array<double, 3> ldos_weight{};
};

namespace detail {

using io::Cell;

inline Branch resolve_branch(const RunConfig& c, const ModelParams& p) {
    if (c.branch == BranchChoice::Normal) return Branch::NormalPhase;
    if (c.branch == BranchChoice::Superradiant) return Branch::SuperradiantPhase;
    return p.lambda > 0 && frame_mu(p) <= 1.0 + kMuRoundoff ? Branch::SuperradiantPhase : Branch::NormalPhase;
}

inline std::vector<WaveVector> path_grid(const RunConfig& c) {
    if (c.model.geometry == Geometry::Chain1D) return chain_path(c.k_range.count, c.k_range.min, c.k_range.max);
    return plane_grid(c.kx_range.min, c.kx_range.max, c.kx_range.count, c.ky_range.min, c.ky_range.max, c.ky_range.count);
}

inline json path_grid_json(const RunConfig& c) {
    if (c.model.geometry == Geometry::Chain1D) return json{{"k", c.k_range.to_json()}};
    return json{{"kx", c.kx_range.to_json()}, {"ky", c.ky_range.to_json()}};
}

inline std::vector<WaveVector> zone_samples(const RunConfig& c) {
    return c.model.geometry == Geometry::Chain1D ? chain_brillouin_samples(c.samples[0])
                                                 : honeycomb_mesh(c.samples[0], c.samples[1]);
}

inline json zone_samples_json(const RunConfig& c) {
    if (c.model.geometry == Geometry::Chain1D) return json{{"samples", c.samples[0]}};
    return json{{"samples", {c.samples[0], c.samples[1]}}};
}

inline std::string k_string(const WaveVector& k) {
    if (k.dimension() == 1) return io::format_double(k.k());
    return "(" + io::format_double(k.kx()) + ", " + io::format_double(k.ky()) + ")";
}

inline json k_json(const WaveVector& k) {
    if (k.dimension() == 1) return json(k.k());
    return json::array({k.kx(), k.ky()});
}

inline std::string count_string(std::size_t a, std::size_t b) { return std::to_string(a) + "x" + std::to_string(b); }

inline void boundaries_at(const RunConfig& c, const ModelParams& p, Outcome& o) {
    if (!c.k) return;
    o.boundary_normal = boundary_normal(p, *c.k);
    try {
        o.boundary_super = boundary_super(p, *c.k);
    } catch (const BoundaryNotFound& e) {
        o.boundary_super_error = e.what();
    }
}

inline Outcome run_bands(const RunConfig& c, json& header) {
    const Branch b = resolve_branch(c, c.model);
    const BandStructure bs = band_sweep(c.model, path_grid(c), b, c.threads);
    header["branch"] = to_string(b);
    header["grid"] = path_grid_json(c);
    Outcome o;
    o.table = io::bands_table(bs, c.model.geometry);
    o.grid = c.model.geometry == Geometry::Chain1D ? std::to_string(bs.size()) + " k"
                                                   : count_string(c.kx_range.count, c.ky_range.count) + " k";
    o.stable = bs.stable_count();
    o.total = bs.size();
    o.branch = b;
    if (bs.all_stable()) o.flat_scan.push_back({c.model.lambda, b, detect_flat_bands(bs, c.flat_tolerance), true});
    return o;
}

inline Outcome run_phase_diagram(const RunConfig& c, json& header) {
    const auto ks = path_grid(c);
    const PhaseDiagram pd = scan(c.model, ks, c.lambda_range.values(), c.threads);
    json grid = path_grid_json(c);
    grid["lambda"] = c.lambda_range.to_json();
    header["grid"] = std::move(grid);
    Outcome o;
    o.table = io::phase_table(pd, c.model.geometry);
    o.grid = std::to_string(ks.size()) + " k x " + std::to_string(c.lambda_range.count) + " lambda";
    o.total = pd.labels.size();
    o.stable = o.total - pd.count(RegionLabel::Unstable);
    o.label_counts = std::array<std::size_t, 4>{pd.count(RegionLabel::Normal), pd.count(RegionLabel::Superradiant),
                                               pd.count(RegionLabel::Overlap), pd.count(RegionLabel::Unstable)};
    o.lambda_sc = lambda_sc(c.model);
    boundaries_at(c, c.model, o);
    return o;
}

inline Outcome run_ldos(const RunConfig& c, json& header) {
    const Branch b = resolve_branch(c, c.model);
    const auto ks = zone_samples(c);
    const auto h = ldos_all_modes(c.model, b, c.ldos_bands, ks, c.bins, c.sigma, c.threads);
    header["branch"] = to_string(b);
    json grid = zone_samples_json(c);
    grid["bins"] = Range{c.bins.e_min, c.bins.e_max, static_cast<std::size_t>(c.bins.count)}.to_json();
    header["grid"] = std::move(grid);
    header["ldos"] = json{{"bands", band_selector_name(c.ldos_bands)}, {"sigma", c.sigma}};
    Outcome o;
    o.table = io::ldos_table(h);
    o.grid = std::to_string(ks.size()) + " k x " + std::to_string(c.bins.count) + " bins";
    o.stable = h[0].stable_samples;
    o.total = ks.size();
    o.branch = b;
    for (int n = 0; n < 3; ++n) o.ldos_weight[n] = h[n].total();
    return o;
}

inline Outcome run_classify(const RunConfig& c, json& header) {
    header["k"] = k_json(*c.k);
    Outcome o;
    o.label = classify(c.model, *c.k, c.model.lambda);
    o.table.columns = {"label"};
    o.table.rows.push_back({std::string(to_string(*o.label))});
    o.grid = "1 point";
    o.total = 1;
    o.stable = *o.label == RegionLabel::Unstable ? 0 : 1;
    o.lambda_sc = lambda_sc(c.model);
    boundaries_at(c, c.model, o);
    return o;
}

inline Outcome run_flatband_scan(const RunConfig& c, json& header) {
    const auto ks = zone_samples(c);
    const std::vector<double> lambdas = c.lambda_range_given ? c.lambda_range.values() : std::vector<double>{c.model.lambda};
    json grid = zone_samples_json(c);
    if (c.lambda_range_given) grid["lambda"] = c.lambda_range.to_json();
    header["grid"] = std::move(grid);
    header["tolerance"] = json{{"flat", c.flat_tolerance}};

    Outcome o;
    o.table.columns = {"lambda", "branch", "stable", "flatness_lower", "flatness_middle", "flatness_upper", "flat_bands"};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double l : lambdas) {
        const ModelParams p = c.model.with_lambda(l);
        const Branch b = resolve_branch(c, p);
        const BandStructure bs = band_sweep(p, ks, b, c.threads);
        o.stable += bs.stable_count();
        o.total += bs.size();
        std::vector<Cell> row{l, std::string(to_string(b)), static_cast<long long>(bs.stable_count())};
        if (bs.all_stable()) {
            const auto fl = band_flatness(bs);
            const auto flat = detect_flat_bands(bs, c.flat_tolerance);
            row.insert(row.end(), {fl[0], fl[1], fl[2], static_cast<long long>(flat.size())});
            o.flat_scan.push_back({l, b, flat, true});
        } else {
            row.insert(row.end(), {nan, nan, nan, 0LL});
            o.flat_scan.push_back({l, b, {}, false});
        }
        o.table.rows.push_back(std::move(row));
    }
    o.grid = std::to_string(ks.size()) + " k x " + std::to_string(lambdas.size()) + " lambda";
    o.lambda_sc = lambda_sc(c.model);
    return o;
}

inline Outcome run_crossings(const RunConfig& c, json& header) {
    header["grid"] = json{{"n", {c.n_range[0], c.n_range[1]}}};
    Outcome o;
    o.crossings = crossing_points(c.n_range[0], c.n_range[1]);
    o.table = io::crossings_table(o.crossings);
    o.grid = std::to_string(c.n_range[1] - c.n_range[0] + 1) + " n";
    o.lambda_sc = lambda_sc(c.model);
    return o;
}

inline Outcome run_intersect2d(const RunConfig& c, json& header) {
    const KWindow w{c.kx_range.min, c.kx_range.max, c.ky_range.min, c.ky_range.max};
    const ContourCurve curve =
        intersection_curve_2d(w, static_cast<int>(c.kx_range.count), static_cast<int>(c.ky_range.count));
    header["grid"] = json{{"kx", c.kx_range.to_json()}, {"ky", c.ky_range.to_json()}};
    Outcome o;
    o.table = io::contour_table(curve);
    o.grid = count_string(c.kx_range.count, c.ky_range.count);
    o.contour_points = curve.points.size();
    return o;
}

} // namespace detail

/// Runs the task. Throws ConfigError, DomainError, ContractViolation; writes nothing.
inline Outcome execute(const RunConfig& c) {
    c.model.validate();
    json header{{"task", to_string(c.task)}, {"model", io::to_json(c.model)}};
    Outcome o;
    switch (c.task) {
    case Task::Bands: o = detail::run_bands(c, header); break;
    case Task::PhaseDiagram: o = detail::run_phase_diagram(c, header); break;
    case Task::Ldos: o = detail::run_ldos(c, header); break;
    case Task::Classify: o = detail::run_classify(c, header); break;
    case Task::FlatbandScan: o = detail::run_flatband_scan(c, header); break;
    case Task::Crossings: o = detail::run_crossings(c, header); break;
    case Task::Intersect2d: o = detail::run_intersect2d(c, header); break;
    }
    o.table.header = std::move(header);
    return o;
}

/// Human-readable summary of a finished task.
inline std::string emit_report(const RunConfig& c, const Outcome& o) {
    std::ostringstream os;
    if (o.label) os << "label: " << to_string(*o.label) << "\n";
    if (o.branch) os << "branch: " << to_string(*o.branch) << "\n";
    if (o.lambda_sc) os << "lambda_sc: " << io::format_double(*o.lambda_sc) << "\n";
    if (o.boundary_normal) {
        os << "boundary_normal(k=" << detail::k_string(*c.k) << "): " << io::format_double(*o.boundary_normal) << "\n";
        if (o.boundary_super)
            os << "boundary_super(k=" << detail::k_string(*c.k) << "): " << io::format_double(*o.boundary_super) << "\n";
        else
            os << "boundary_super(k=" << detail::k_string(*c.k) << "): not found (" << o.boundary_super_error << ")\n";
    }
    if (o.label_counts) {
        const auto& n = *o.label_counts;
        os << "labels: Normal " << n[0] << ", Superradiant " << n[1] << ", Overlap " << n[2] << ", Unstable " << n[3]
           << "\n";
    }
    if (!o.flat_scan.empty()) {
        const bool verbose = o.flat_scan.size() <= 16;
        std::size_t with_flat = 0;
        for (const auto& e : o.flat_scan) {
            with_flat += e.flat.empty() ? 0 : 1;
            if (!verbose) continue;
            os << "lambda " << io::format_double(e.lambda) << " (" << to_string(e.branch) << "): ";
            if (!e.stable) {
                os << "unstable points, no flat-band test\n";
                continue;
            }
            if (e.flat.empty()) os << "no flat band";
            for (std::size_t i = 0; i < e.flat.size(); ++i) {
                const auto& f = e.flat[i];
                os << (i ? "; " : "") << "flat band " << f.band << " energy " << io::format_double(f.mean_energy)
                   << " flatness " << io::format_double(f.flatness);
            }
            os << "\n";
        }
        if (!verbose) os << "flat bands found at " << with_flat << " of " << o.flat_scan.size() << " lambda values\n";
    }
    if (c.task == Task::Ldos) {
        const double tot = o.ldos_weight[0] + o.ldos_weight[1] + o.ldos_weight[2];
        os << "weight shares: cavity_a " << io::format_double(o.ldos_weight[0] / tot) << ", cavity_b "
           << io::format_double(o.ldos_weight[1] / tot) << ", spins " << io::format_double(o.ldos_weight[2] / tot)
           << "\n";
    }
    if (!o.crossings.empty()) {
        os << "crossings (" << o.crossings.size() << "):";
        for (const auto& cp : o.crossings)
            os << " " << (cp.kind == CrossingKind::P ? "P" : "Q") << cp.n << "=" << io::format_double(cp.k);
        os << "\n";
    }
    if (c.task == Task::Intersect2d) os << "contour points: " << o.contour_points << "\n";
    if (o.total > 0 && c.task != Task::Classify)
        os << "unstable nodes: " << o.total - o.stable << " of " << o.total << "\n";
    return os.str();
}

enum ExitCode : int { kOk = 0, kConfigError = 2, kDomainError = 3, kIoError = 4 };

struct RunResult {
    int exit_code{kOk};
    std::string summary;
    std::string report;
    std::string error;
    /// Rendered table when no output path was configured.
    std::string data;
};

inline RunResult run(const RunConfig& c) {
    RunResult r;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = execute(c);
    } catch (const ConfigError& e) {
        r.exit_code = kConfigError;
        r.error = e.what();
        return r;
    } catch (const DomainError& e) {
        r.exit_code = kDomainError;
        r.error = e.what();
        return r;
    } catch (const ContractViolation& e) {
        r.exit_code = kDomainError;
        r.error = e.what();
        return r;
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    const std::string text = io::render(o.table, c.format);
    if (c.output_path.empty()) {
        r.data = text;
    } else {
        try {
            io::write_atomic(c.output_path, text);
        } catch (const io::IoError& e) {
            r.exit_code = kIoError;
            r.error = e.what();
            return r;
        }
    }
    r.report = emit_report(c, o);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f ms", ms);
    std::ostringstream os;
    os << to_string(c.task) << ": grid " << o.grid << ", " << buf << ", ";
    if (o.total > 0)
        os << "stable " << o.stable << "/" << o.total;
    else
        os << "no stability test";
    r.summary = os.str();
    return r;
}

/// Parses and runs a JSON config document.
inline RunResult run_json(const json& j) {
    try {
        return run(RunConfig::from_json(j));
    } catch (const ConfigError& e) {
        RunResult r;
        r.exit_code = kConfigError;
        r.error = e.what();
        return r;
    }
}

} // namespace dhl::cli
