#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dhl/io.hpp"
#include "oracles.hpp"

using namespace dhl;
using namespace dhl::io;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "dhl_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST(Format, DoublesRoundTrip) {
    for (double v : {0.1, 1.0, -0.25, 0.46647615158762407, 1e-300, 6.02e23}) EXPECT_EQ(std::stod(format_double(v)), v);
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(format_double(std::nan("")), "nan");
    EXPECT_EQ(format_double(-INFINITY), "-inf");
}

TEST(ModelJson, RoundTrip) {
    const ModelParams p{1.0, 0.9, 1.1, 0.12, 0.34, Geometry::Honeycomb2D};
    EXPECT_EQ(model_from_json(to_json(p)), p);
    const ModelParams q = model_from_json(json::parse(R"({"omega": 2, "zeta": 0.1})"));
    EXPECT_EQ(q.omega_a, 2.0);
    EXPECT_EQ(q.omega_spin, 2.0);
    EXPECT_EQ(q.lambda, 0.0);
    EXPECT_EQ(q.geometry, Geometry::Chain1D);
}

TEST(ModelJson, FieldLevelErrors) {
    try {
        (void)model_from_json(json::parse(R"({"zeta": 0.1, "lamda": 0.3})"));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "model.lamda");
    }
    try {
        (void)model_from_json(json::parse(R"({"zeta": "big"})"));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "model.zeta");
    }
    EXPECT_THROW((void)model_from_json(json::parse(R"({"geometry": "square"})")), ConfigError);
    EXPECT_THROW((void)model_from_json(json::parse(R"({"omega": 1, "omega_a": 1})")), ConfigError);
    EXPECT_THROW((void)model_from_json(json::parse("[1, 2]")), ConfigError);
}

TEST(Render, CsvHeaderBlockAndRows) {
    Table t;
    t.header = json{{"task", "demo"}, {"model", to_json(dhl::testing::chain(0.18, 0.3))}};
    t.columns = {"k", "label", "n"};
    t.rows = {{0.5, std::string("Normal"), 3LL}, {std::nan(""), std::string("Unstable"), -1LL}};
    const std::string csv = render_csv(t);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, R"(# task: "demo")");
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# model: {", 0), 0u);
    EXPECT_EQ(model_from_json(json::parse(line.substr(9))), dhl::testing::chain(0.18, 0.3));
    std::getline(in, line);
    EXPECT_EQ(line, "# k,label,n");
    std::getline(in, line);
    EXPECT_EQ(line, "0.5,Normal,3");
    std::getline(in, line);
    EXPECT_EQ(line, "nan,Unstable,-1");
    EXPECT_FALSE(std::getline(in, line));
}

TEST(Render, JsonMirrorsCsv) {
    Table t;
    t.header = json{{"task", "demo"}};
    t.columns = {"x", "y"};
    t.rows = {{1.5, std::nan("")}};
    const json doc = json::parse(render_json(t));
    EXPECT_EQ(doc["header"]["task"], "demo");
    EXPECT_EQ(doc["columns"], json::array({"x", "y"}));
    EXPECT_EQ(doc["rows"][0][0], 1.5);
    EXPECT_EQ(doc["rows"][0][1], "nan");
}

TEST(Tables, Layouts) {
    const auto bs = band_sweep(dhl::testing::chain(0.18, 0.3), chain_path(5), Branch::NormalPhase);
    const Table b = bands_table(bs, Geometry::Chain1D);
    ASSERT_EQ(b.columns.size(), 8u);
    EXPECT_EQ(b.columns[3], "middle_re");
    ASSERT_EQ(b.rows.size(), 5u);
    for (const auto& r : b.rows) EXPECT_NEAR(std::get<double>(r[3]), 1.0, 1e-12);

    const auto pd = scan(dhl::testing::chain(0.18, 0.0), chain_path(3), {0.3, 0.6}, 1);
    const Table p = phase_table(pd, Geometry::Chain1D);
    EXPECT_EQ(p.columns, (std::vector<std::string>{"k", "lambda", "label", "normal_re", "normal_im", "super_re", "super_im"}));
    ASSERT_EQ(p.rows.size(), 6u);
    EXPECT_EQ(std::get<double>(p.rows[0][1]), 0.3);
    EXPECT_EQ(std::get<double>(p.rows[5][1]), 0.6);

    const Table c = crossings_table(crossing_points(0, 0));
    ASSERT_EQ(c.rows.size(), 2u);
    EXPECT_EQ(std::get<std::string>(c.rows[0][1]), "P");
}

TEST(AtomicWrite, ReplacesTargetAndLeavesNoTemporary) {
    const fs::path p = scratch("atomic.csv");
    write_atomic(p, "first\n");
    write_atomic(p, "second\n");
    EXPECT_EQ(slurp(p), "second\n");
    EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
    EXPECT_THROW(write_atomic(scratch("missing") / "sub" / "x.csv", "x"), IoError);
}
