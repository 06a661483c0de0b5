#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dhl/cli.hpp"

using namespace dhl;
using namespace dhl::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "dhl_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json config(const std::string& text) { return json::parse(text); }

std::string config_error_field(const std::string& text) {
    try {
        (void)RunConfig::from_json(config(text));
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<none>";
}

struct Proc {
    int status;
    std::string out;
    std::string err;
};

Proc run_cli(const std::string& args) {
    static int calls = 0;
    const std::string tag = std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
                            std::to_string(calls++);
    const fs::path out = scratch(tag + ".out"), err = scratch(tag + ".err");
    const std::string cmd = std::string(DHL_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

} // namespace

TEST(RunConfig, Defaults) {
    const RunConfig c = RunConfig::from_json(config(R"({"task": "bands"})"));
    EXPECT_EQ(c.task, Task::Bands);
    EXPECT_EQ(c.model, ModelParams{});
    EXPECT_EQ(c.k_range.count, 1025u);
    EXPECT_EQ(c.format, io::Format::Csv);
    EXPECT_EQ(RunConfig::from_json(config(R"({"task": "intersection-2d"})")).task, Task::Intersect2d);
}

TEST(RunConfig, FieldLevelRejection) {
    EXPECT_EQ(config_error_field("{}"), "task");
    EXPECT_EQ(config_error_field(R"({"task": "plot"})"), "task");
    EXPECT_EQ(config_error_field(R"({"task": "bands", "colour": 1})"), "colour");
    EXPECT_EQ(config_error_field(R"({"task": "bands", "model": {"zeta": 0.1, "beta": 2}})"), "model.beta");
    EXPECT_EQ(config_error_field(R"({"task": "bands", "grid": {"k": {"count": 1}}})"), "grid.k.count");
    EXPECT_EQ(config_error_field(R"({"task": "bands", "grid": {"k": {"min": 1, "max": 0}}})"), "grid.k");
    EXPECT_EQ(config_error_field(R"({"task": "classify"})"), "k");
    EXPECT_EQ(config_error_field(R"({"task": "classify", "k": [0, 1]})"), "k");
    EXPECT_EQ(config_error_field(R"({"task": "ldos", "ldos": {"sigma": -1}})"), "ldos.sigma");
    EXPECT_EQ(config_error_field(R"({"task": "ldos", "ldos": {"bands": "top"}})"), "ldos.bands");
    EXPECT_EQ(config_error_field(R"({"task": "bands", "output": {"format": "xml"}})"), "output.format");
    EXPECT_EQ(config_error_field(R"({"task": "bands", "tolerance": {"flatness": 1}})"), "tolerance.flatness");
    EXPECT_EQ(config_error_field(R"({"task": "crossings", "model": {"geometry": "honeycomb"}})"), "model.geometry");
    EXPECT_EQ(run_json(config(R"({"task": "bands", "x": 1})")).exit_code, kConfigError);
}

TEST(Run, BandsMiddleColumnIsFlat) {
    const auto r = run_json(config(R"({"task": "bands", "model": {"zeta": 0.18, "lambda": 0.3}})"));
    ASSERT_EQ(r.exit_code, kOk) << r.error;
    std::istringstream in(r.data);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        ASSERT_EQ(cells.size(), 8u);
        EXPECT_NEAR(std::stod(cells[3]), 1.0, 1e-12);
        ++rows;
    }
    EXPECT_EQ(rows, 1025u);
    EXPECT_NE(r.report.find("flat band 1 energy 1 "), std::string::npos) << r.report;
    EXPECT_NE(r.summary.find("stable 1025/1025"), std::string::npos) << r.summary;
}

TEST(Run, ModelInvalidIsDomainError) {
    const auto r = run_json(config(R"({"task": "bands", "model": {"zeta": 0.3, "lambda": 0.3}})"));
    EXPECT_EQ(r.exit_code, kDomainError);
    EXPECT_NE(r.error.find("|zeta/omega| < 1/4"), std::string::npos) << r.error;
    EXPECT_EQ(run_json(config(R"({"task": "bands", "branch": "superradiant", "model": {"zeta": 0.18, "lambda": 0.3}})"))
                  .exit_code,
              kDomainError);
}

TEST(Run, IoFailure) {
    json j = config(R"({"task": "crossings"})");
    j["output"]["path"] = (scratch("absent") / "nested" / "out.csv").string();
    EXPECT_EQ(run_json(j).exit_code, kIoError);
}

TEST(Run, ByteIdenticalOutputs) {
    for (const char* task : {"phase-diagram", "ldos", "bands"}) {
        json j{{"task", task}, {"model", {{"zeta", 0.18}, {"lambda", 0.3}}}, {"k", 0.0}};
        j["grid"] = task == std::string("ldos") ? json{{"samples", 256}} : json{{"k", {{"count", 40}}}};
        if (task == std::string("phase-diagram")) j["grid"]["lambda"] = {{"count", 30}};
        const fs::path a = scratch(std::string(task) + "_a.csv"), b = scratch(std::string(task) + "_b.csv");
        j["output"]["path"] = a.string();
        j["threads"] = 1;
        ASSERT_EQ(run_json(j).exit_code, kOk) << task;
        j["output"]["path"] = b.string();
        j["threads"] = 5;
        ASSERT_EQ(run_json(j).exit_code, kOk) << task;
        EXPECT_EQ(slurp(a), slurp(b)) << task;
        const std::string text = slurp(a);
        EXPECT_EQ(text.rfind(std::string("# task: \"") + task + "\"\n# model: ", 0), 0u) << task;
        EXPECT_NE(text.find("\"zeta\":0.18,\"lambda\":0.3"), std::string::npos);
        EXPECT_NE(text.find("# grid: "), std::string::npos);
    }
}

TEST(Run, JsonOutputCarriesHeader) {
    const auto r = run_json(config(R"({"task": "ldos", "model": {"zeta": 0.18, "lambda": 0.3},
        "grid": {"samples": 128, "bins": {"min": 0.9, "max": 1.1, "count": 20}},
        "output": {"format": "json"}})"));
    ASSERT_EQ(r.exit_code, kOk) << r.error;
    const json doc = json::parse(r.data);
    EXPECT_EQ(doc["header"]["model"]["zeta"], 0.18);
    EXPECT_EQ(doc["header"]["ldos"]["bands"], "middle");
    EXPECT_EQ(doc["rows"].size(), 20u);
    EXPECT_EQ(doc["columns"][2], "cavity_a");
}

TEST(Report, PhaseDiagramAndCrossings) {
    const auto pd = run_json(config(R"({"task": "phase-diagram", "model": {"zeta": 0.18}, "k": 0,
        "grid": {"k": {"count": 16}, "lambda": {"count": 16}}})"));
    ASSERT_EQ(pd.exit_code, kOk) << pd.error;
    EXPECT_NE(pd.report.find("lambda_sc: 0.46647"), std::string::npos) << pd.report;
    EXPECT_NE(pd.report.find("boundary_normal(k=0): 0.34698"), std::string::npos) << pd.report;
    EXPECT_NE(pd.report.find("labels: Normal "), std::string::npos);

    const auto cr = run_json(config(R"({"task": "crossings", "model": {"zeta": 0.18}})"));
    ASSERT_EQ(cr.exit_code, kOk);
    EXPECT_NE(cr.report.find("crossings (6):"), std::string::npos) << cr.report;

    const auto fs = run_json(config(R"({"task": "flatband-scan", "model": {"zeta": 0.18, "lambda": 0.3}})"));
    ASSERT_EQ(fs.exit_code, kOk);
    EXPECT_NE(fs.report.find("flat band 1 energy 1 flatness "), std::string::npos) << fs.report;
    EXPECT_EQ(fs.report.find("; flat band"), std::string::npos);
}

TEST(Executable, ClassifyPrintsLabel) {
    const auto p = run_cli("classify --zeta 0.18 --lambda 0.48 --k 0");
    EXPECT_EQ(p.status, 0) << p.err;
    EXPECT_NE(p.out.find("\nUnstable\n"), std::string::npos) << p.out;
    EXPECT_NE(p.err.find("label: Unstable"), std::string::npos) << p.err;
}

TEST(Executable, ExitCodes) {
    const auto bad = run_cli("bands --zeta 0.3 --lambda 0.3");
    EXPECT_EQ(bad.status, 3);
    EXPECT_NE(bad.err.find("|zeta/omega| < 1/4"), std::string::npos) << bad.err;
    EXPECT_EQ(run_cli("bands --bogus").status, 2);
    EXPECT_EQ(run_cli("classify --k 0 --grid 4").status, 2);
    EXPECT_EQ(run_cli("bands --config /definitely/not/here.json").status, 2);
    EXPECT_EQ(run_cli("crossings --out " + (scratch("gone") / "a" / "b.csv").string()).status, 4);
}

TEST(Executable, OverridesAndAtomicFile) {
    const fs::path out = scratch("cli_bands.csv");
    const auto p = run_cli("bands --zeta 0.12 --lambda 0.34 --geometry honeycomb --grid 5x4 --out " + out.string());
    ASSERT_EQ(p.status, 0) << p.err;
    EXPECT_NE(p.out.find("bands: grid 5x4 k"), std::string::npos) << p.out;
    const std::string text = slurp(out);
    EXPECT_NE(text.find("\"geometry\":\"honeycomb\""), std::string::npos);
    EXPECT_NE(text.find("# kx,ky,lower_re"), std::string::npos);
    EXPECT_FALSE(fs::exists(out.string() + ".tmp"));
}
