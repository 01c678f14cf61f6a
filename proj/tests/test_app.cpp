#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mmsgeo/config.hpp"
#include "mmsgeo/csv.hpp"
#include "mmsgeo/tasks.hpp"

using namespace mmsgeo;
using namespace mmsgeo::app;

namespace {

std::string config_error(const std::string& text) {
    try {
        parse_config(text, "cfg.yaml");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Config);
        return e.what();
    }
    FAIL("config accepted: " << text);
    return "";
}

std::map<std::string, std::string> suite_csvs(const std::string& suite, unsigned n_workers) {
    set_workers(n_workers);
    Report rep = run_suite(suite, 1);
    set_workers(0);
    std::map<std::string, std::string> out{{"verdicts", rep.verdicts_csv()}};
    for (const auto& t : rep.tables) out[t.name] = t.csv();
    return out;
}

}  // namespace

TEST_CASE("config errors are line anchored") {
    auto msg = config_error("task: coarea\ncoarea:\n  tolerance: -0.1\n");
    CHECK(msg.find("cfg.yaml:3:") == 0);
    CHECK(msg.find("tolerance") != std::string::npos);

    msg = config_error("task: coarea\nbogus: 1\n");
    CHECK(msg.find("cfg.yaml:2:") == 0);
    CHECK(msg.find("bogus") != std::string::npos);

    msg = config_error("task: nonsense\n");
    CHECK(msg.find("cfg.yaml:1:") == 0);

    msg = config_error("task: perimeter\nspace:\n  kind: grid\n  n: [1, 2\n");
    CHECK(msg.find("cfg.yaml:") == 0);
}

TEST_CASE("config parses and builds") {
    auto cfg = parse_config(
        "task: perimeter\nseed: 7\nspace: {kind: grid, dims: 1, n: 1001}\n"
        "set: {shape: box, lo: [0.4], hi: [0.6]}\n");
    CHECK(cfg.task == "perimeter");
    CHECK(cfg.seed == 7);
    REQUIRE(cfg.space.has_value());
    auto sp = build_space(*cfg.space);
    CHECK(sp.size() == 1001);
    auto a = build_set(sp, *cfg.set);
    CHECK(measure(sp, a) == doctest::Approx(0.2).epsilon(0.01));

    for (const auto& name : space_presets()) CHECK_NOTHROW(parse_space_argument(name));
    auto inline_spec = parse_space_argument("grid:dims=1,n=64,box=0:2");
    CHECK(build_space(inline_spec).total_mass() == doctest::Approx(2.0));
    CHECK_THROWS_AS(parse_space_argument("grid:n=64,wat=1"), Error);
}

TEST_CASE("csv quoting") {
    CHECK(csv::quote("plain") == "plain");
    CHECK(csv::quote("a,b") == "\"a,b\"");
    CHECK(csv::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv::quote("two\nlines") == "\"two\nlines\"");
    std::ostringstream os;
    const std::vector<std::string> row{"x", "a,b", "1.5"};
    csv::write_row(os, row);
    CHECK(os.str() == "x,\"a,b\",1.5\n");
    CHECK(csv::split_row("x,\"a,b\",\"q\"\"\"") == std::vector<std::string>{"x", "a,b", "q\""});
    CHECK(csv::format_number(0.1) == "0.1");
    CHECK(csv::format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("parallel reductions do not depend on the worker count") {
    auto term = [](std::size_t i) { return 1.0 / (1.0 + static_cast<double>(i) * 0.37); };
    set_workers(1);
    const double a = parallel_sum(100000, term);
    const double ma = parallel_max(100000, term);
    set_workers(4);
    const double b = parallel_sum(100000, term);
    const double mb = parallel_max(100000, term);
    set_workers(0);
    CHECK(a == b);
    CHECK(ma == mb);
}

TEST_CASE("suite CSVs are byte identical across workers") {
    for (const char* suite : {"strict-semigroup", "eq13", "dust"}) {
        CAPTURE(suite);
        CHECK(suite_csvs(suite, 1) == suite_csvs(suite, 3));
    }
}

TEST_CASE("verify quick passes on the three point space") {
    auto sp = build_space(parse_space_argument("three_point"));
    auto rep = run_verify(sp, "quick");
    CHECK(rep.passed());
    CHECK(rep.verdicts.size() > 0);
    for (const auto& v : rep.verdicts) CHECK_FALSE(v.anchor.empty());
}

TEST_CASE("artifacts") {
    const auto dir = std::filesystem::temp_directory_path() / "mmsgeo_test_artifacts";
    std::filesystem::remove_all(dir);
    Report rep;
    rep.check_le("a", "anchor", 1.0, 2.0);
    rep.tables.push_back(Table{"my table", {"x", "y"}, {{1.0, 2.0}}});
    auto files = write_artifacts(dir, rep, run_record("verify", "<inline>", "", 1, 1, 0.5));
    CHECK(std::find(files.begin(), files.end(), "verdicts.csv") != files.end());
    CHECK(std::find(files.begin(), files.end(), "summary.json") != files.end());
    for (const auto& f : files) CHECK(std::filesystem::exists(dir / f));
    std::ifstream in(dir / "summary.json");
    auto js = nlohmann::json::parse(in);
    CHECK(js["passed"] == true);
    CHECK(js["task"] == "verify");
    std::filesystem::remove_all(dir);
}
