#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "dhl/bands.hpp"
#include "dhl/errors.hpp"
#include "dhl/model.hpp"
#include "dhl/phase.hpp"

namespace dhl::io {

using json = nlohmann::ordered_json;

/// Invalid configuration; names the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Output file could not be written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Format { Csv, Json };

inline Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw ConfigError("output.format", "expected \"csv\" or \"json\", got \"" + s + "\"");
}

inline Geometry parse_geometry(const std::string& s) {
    if (s == "chain") return Geometry::Chain1D;
    if (s == "honeycomb") return Geometry::Honeycomb2D;
    throw ConfigError("model.geometry", "expected \"chain\" or \"honeycomb\", got \"" + s + "\"");
}

// ---------------------------------------------------------------------------------------------
// model parameters

inline json to_json(const ModelParams& p) {
    return json{{"omega_a", p.omega_a}, {"omega_b", p.omega_b}, {"omega_spin", p.omega_spin},
                {"zeta", p.zeta},       {"lambda", p.lambda},   {"geometry", to_string(p.geometry)}};
}

namespace detail {

inline double number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "expected a number");
    return j.get<double>();
}

inline void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where.empty() ? key : where + "." + key, "unknown field");
    }
}

} // namespace detail

/// Missing keys keep their defaults (omega = 1, zeta = lambda = 0, chain); unknown keys are rejected.
inline ModelParams model_from_json(const json& j, const std::string& where = "model") {
    if (!j.is_object()) throw ConfigError(where, "expected an object");
    detail::reject_unknown(j, where, {"omega_a", "omega_b", "omega_spin", "omega", "zeta", "lambda", "geometry"});
    ModelParams p;
    if (j.contains("omega")) {
        if (j.contains("omega_a") || j.contains("omega_b") || j.contains("omega_spin"))
            throw ConfigError(where + ".omega", "cannot be combined with omega_a/omega_b/omega_spin");
        p.omega_a = p.omega_b = p.omega_spin = detail::number(j["omega"], where + ".omega");
    }
    if (j.contains("omega_a")) p.omega_a = detail::number(j["omega_a"], where + ".omega_a");
    if (j.contains("omega_b")) p.omega_b = detail::number(j["omega_b"], where + ".omega_b");
    if (j.contains("omega_spin")) p.omega_spin = detail::number(j["omega_spin"], where + ".omega_spin");
    if (j.contains("zeta")) p.zeta = detail::number(j["zeta"], where + ".zeta");
    if (j.contains("lambda")) p.lambda = detail::number(j["lambda"], where + ".lambda");
    if (j.contains("geometry")) {
        if (!j["geometry"].is_string()) throw ConfigError(where + ".geometry", "expected a string");
        p.geometry = parse_geometry(j["geometry"].get<std::string>());
    }
    return p;
}

// ---------------------------------------------------------------------------------------------
// tables

using Cell = std::variant<double, long long, std::string>;

/// One output file: a header block (run parameters), named columns and rows.
struct Table {
    json header = json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Shortest decimal that round-trips.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

inline std::string format_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

inline json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? json(*d) : json(format_double(*d));
    if (const auto* i = std::get_if<long long>(&c)) return json(*i);
    return json(std::get<std::string>(c));
}

/// CSV: "# key: <json>" header lines, then a '#'-prefixed column line, so gnuplot skips the
/// whole preamble and columns can be addressed by position.
inline std::string render_csv(const Table& t) {
    std::string out;
    for (const auto& [key, value] : t.header.items()) out += "# " + key + ": " + value.dump() + "\n";
    out += "# ";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

inline std::string render_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::array();
        for (const auto& c : row) r.push_back(cell_json(c));
        rows.push_back(std::move(r));
    }
    json doc{{"header", t.header}, {"columns", t.columns}, {"rows", std::move(rows)}};
    return doc.dump(1) + "\n";
}

inline std::string render(const Table& t, Format f) { return f == Format::Csv ? render_csv(t) : render_json(t); }

/// Writes to a sibling temporary and renames it over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        os.flush();
        if (!os) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at " + path.string() + ": " + ec.message());
    }
}

// ---------------------------------------------------------------------------------------------
// column layouts

namespace detail {

inline void k_columns(std::vector<std::string>& cols, Geometry g) {
    if (g == Geometry::Chain1D)
        cols.push_back("k");
    else
        cols.insert(cols.end(), {"kx", "ky"});
}

inline void k_cells(std::vector<Cell>& row, const WaveVector& k) {
    row.emplace_back(k.kx());
    if (k.dimension() == 2) row.emplace_back(k.ky());
}

inline void complex_cells(std::vector<Cell>& row, cplx z) {
    row.emplace_back(z.real());
    row.emplace_back(z.imag());
}

} // namespace detail

/// k | kx,ky, then Re/Im of the lower, middle and upper band, then stable (0/1).
inline Table bands_table(const BandStructure& bs, Geometry g) {
    Table t;
    detail::k_columns(t.columns, g);
    t.columns.insert(t.columns.end(), {"lower_re", "lower_im", "middle_re", "middle_im", "upper_re", "upper_im", "stable"});
    for (std::size_t i = 0; i < bs.size(); ++i) {
        std::vector<Cell> row;
        detail::k_cells(row, bs.path[i]);
        for (const auto& e : bs.bands[i]) detail::complex_cells(row, e);
        row.emplace_back(static_cast<long long>(bs.stable[i]));
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// k | kx,ky, lambda, label, Re/Im of the lowest normal and superradiant excitation energies.
inline Table phase_table(const PhaseDiagram& pd, Geometry g) {
    Table t;
    detail::k_columns(t.columns, g);
    t.columns.insert(t.columns.end(), {"lambda", "label", "normal_re", "normal_im", "super_re", "super_im"});
    for (std::size_t il = 0; il < pd.lambda_axis.size(); ++il)
        for (std::size_t ik = 0; ik < pd.k_axis.size(); ++ik) {
            const std::size_t idx = pd.index(ik, il);
            std::vector<Cell> row;
            detail::k_cells(row, pd.k_axis[ik]);
            row.emplace_back(pd.lambda_axis[il]);
            row.emplace_back(std::string(to_string(pd.labels[idx])));
            detail::complex_cells(row, pd.lowest_energy_nor[idx]);
            detail::complex_cells(row, pd.lowest_energy_sup[idx]);
            t.rows.push_back(std::move(row));
        }
    return t;
}

/// e_low, e_high, then the density (weight / bin width) of cavity A, cavity B and the spins.
inline Table ldos_table(const std::array<LdosHistogram, 3>& h) {
    Table t;
    t.columns = {"e_low", "e_high", "cavity_a", "cavity_b", "spins"};
    const auto da = h[0].density(), db = h[1].density(), ds = h[2].density();
    for (std::size_t b = 0; b < da.size(); ++b)
        t.rows.push_back({h[0].bin_edges[b], h[0].bin_edges[b + 1], da[b], db[b], ds[b]});
    return t;
}

inline Table crossings_table(const std::vector<CrossingPoint>& cps) {
    Table t;
    t.columns = {"n", "kind", "k", "cos_k"};
    for (const auto& c : cps)
        t.rows.push_back({static_cast<long long>(c.n), std::string(c.kind == CrossingKind::P ? "P" : "Q"), c.k, std::cos(c.k)});
    return t;
}

/// One row per marching-squares segment: both endpoints.
inline Table contour_table(const ContourCurve& c) {
    Table t;
    t.columns = {"kx0", "ky0", "kx1", "ky1"};
    for (const auto& s : c.segments) {
        const auto& a = c.points[s[0]];
        const auto& b = c.points[s[1]];
        t.rows.push_back({a[0], a[1], b[0], b[1]});
    }
    return t;
}

} // namespace dhl::io
