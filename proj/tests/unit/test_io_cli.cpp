#include "doctest.h"

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fairport/cli.hpp"
#include "fairport/csv.hpp"
#include "fairport/error.hpp"
#include "fairport/io.hpp"
#include "../support/oracles.hpp"

using namespace fairport;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("fairport_cli_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& content) const {
        std::ofstream(path / name, std::ios::binary) << content;
        return path / name;
    }
    fs::path operator/(const std::string& name) const { return path / name; }
};

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "fairport");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

const char* kToyPool =
    "id,score,group\n"
    "a0,0.1,A\na1,0.3,A\na2,0.5,A\n"
    "b0,0.5,B\nb1,0.7,B\nb2,0.9,B\n";

}  // namespace

TEST_CASE("parse_csv") {
    const auto t = parse_csv("id,note\n1,\"hello, world\"\n2,\"say \"\"hi\"\"\"\r\n\n3,plain\n");
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0][1] == "hello, world");
    CHECK(t.rows[1][1] == "say \"hi\"");
    CHECK(t.lines[2] == 5);
    CHECK(*t.column("note") == 1);
    try {
        parse_csv("a,b\n1,2\n3\n");
        FAIL("expected a field count error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_csv(""), InputError);
    CHECK_THROWS_AS(parse_csv("a\n\"open\n"), InputError);
    CHECK(csv_escape("x,y") == "\"x,y\"");
}

TEST_CASE("format_real and parse_real round trip") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        CHECK(*parse_real(format_real(x)) == x);
    }
    CHECK_FALSE(parse_real("0.5x"));
    CHECK_FALSE(parse_real(""));
    CHECK(*parse_real(" 0.25 ") == 0.25);
}

TEST_CASE("parse_dataset validation") {
    SUBCASE("missing score column is named") {
        try {
            parse_dataset(parse_csv("id,group\n1,A\n"));
            FAIL("expected error");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("'score'") != std::string::npos);
        }
    }
    SUBCASE("duplicate id is named") {
        try {
            parse_dataset(parse_csv("id,score,group\nx1,0.1,A\nx1,0.2,B\n"));
            FAIL("expected error");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("x1") != std::string::npos);
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("scores and labels are range checked") {
        CHECK_THROWS_AS(parse_dataset(parse_csv("id,score,group\n1,1.5,A\n")), InputError);
        CHECK_THROWS_AS(parse_dataset(parse_csv("id,score,group\n1,abc,A\n")), InputError);
        CHECK_THROWS_AS(parse_dataset(parse_csv("id,score,group,label\n1,0.5,A,2\n")), InputError);
        CHECK_THROWS_AS(parse_dataset(parse_csv("id,score,group\n1,0.5,\n")), InputError);
    }
    SUBCASE("custom columns and optional labels") {
        ColumnNames cols;
        cols.score = "p";
        cols.group = "sex";
        const auto ds = parse_dataset(parse_csv("id,p,sex,label\n1,0.5,F,1\n2,0.25,M,\n"), cols);
        REQUIRE(ds.records.size() == 2);
        CHECK(ds.has_labels);
        CHECK(*ds.records[0].label == 1);
        CHECK_FALSE(ds.records[1].label);
        CHECK(ds.records[1].group == "M");
        cols.label = "target";
        cols.label_required = true;
        CHECK_THROWS_AS(parse_dataset(parse_csv("id,p,sex\n1,0.5,F\n"), cols), InputError);
    }
}

TEST_CASE("calibrator JSON persistence") {
    SUBCASE("property: save/load is bit-faithful on transform outputs") {
        std::mt19937_64 rng(55);
        std::uniform_int_distribution<std::size_t> size(1, 50);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        TempDir dir;
        for (int trial = 0; trial < 40; ++trial) {
            std::vector<ScoreRecord> pool;
            const int k = 1 + trial % 3;
            for (int g = 0; g < k; ++g) {
                for (double x : oracle::random_scores(rng, size(rng))) {
                    pool.push_back({std::to_string(pool.size()), x, "g" + std::to_string(g), {}});
                }
            }
            std::optional<JitterConfig> jitter;
            if (trial % 4 == 0) jitter = JitterConfig{1e-7, static_cast<std::uint64_t>(trial)};
            const auto c = FairCalibrator::fit(pool, jitter);
            save_calibrator(c, dir / "cal.json");
            const auto back = load_calibrator(dir / "cal.json");
            CHECK(back.jitter() == c.jitter());
            for (int p = 0; p < 50; ++p) {
                const double x = u(rng);
                const std::string g = "g" + std::to_string(p % k);
                CHECK(back.transform(x, g) == c.transform(x, g));
            }
            for (const auto& r : pool) CHECK(back.transform(r.score, r.group) == c.transform(r.score, r.group));
            // Saving the loaded calibrator reproduces the same bytes.
            save_calibrator(back, dir / "cal2.json");
            CHECK(read_file(dir / "cal.json") == read_file(dir / "cal2.json"));
        }
    }
    SUBCASE("document layout") {
        std::vector<ScoreRecord> pool{{"1", 0.1, "A", {}}, {"2", 0.3, "B", {}}};
        const auto doc = calibrator_to_json(FairCalibrator::fit(pool));
        CHECK(doc.at("format_version") == kCalibratorFormatVersion);
        CHECK(doc.at("groups").size() == 2);
        CHECK(doc.at("groups")[0].at("label") == "A");
        CHECK(doc.at("groups")[0].at("weight") == 0.5);
        CHECK(doc.at("groups")[0].at("count") == 1);
        CHECK(doc.at("groups")[0].at("sorted_scores")[0] == 0.1);
        CHECK(doc.at("jitter").is_null());
    }
    SUBCASE("rejects bad documents") {
        nlohmann::ordered_json doc = {{"format_version", 99}, {"groups", nlohmann::ordered_json::array()}};
        CHECK_THROWS_AS(calibrator_from_json(doc), InputError);
        doc = nlohmann::ordered_json::parse(
            R"({"format_version":1,"groups":[{"label":"A","weight":1.0,"count":2,"sorted_scores":[0.1]}],"jitter":null})");
        CHECK_THROWS_AS(calibrator_from_json(doc), InputError);
        doc = nlohmann::ordered_json::parse(
            R"({"format_version":1,"groups":[{"label":"A","weight":0.7,"count":1,"sorted_scores":[0.1]},)"
            R"({"label":"B","weight":0.3,"count":1,"sorted_scores":[0.2]}],"jitter":null})");
        CHECK_THROWS_AS(calibrator_from_json(doc), InputError);
    }
}

TEST_CASE("cli fit") {
    TempDir dir;
    const auto input = dir.write("pool.csv", kToyPool);
    const auto r = cli({"fit", "--input", input.string(), "--calibrator", (dir / "cal.json").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("A: count=3 weight=0.5") != std::string::npos);
    const auto c = load_calibrator(dir / "cal.json");
    CHECK(c.group("A").weight() == 0.5);
    CHECK(c.group("B").weight() == 0.5);

    const auto no_score = dir.write("bad.csv", "id,group\n1,A\n");
    const auto bad = cli({"fit", "--input", no_score.string(), "--calibrator", (dir / "x.json").string()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("'score'") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "x.json"));

    const auto dup = dir.write("dup.csv", "id,score,group\nq,0.1,A\nq,0.2,B\n");
    const auto d = cli({"fit", "--input", dup.string(), "--calibrator", (dir / "x.json").string()});
    CHECK(d.code == 2);
    CHECK(d.err.find("'q'") != std::string::npos);

    const auto declared = cli({"fit", "--input", input.string(), "--calibrator", (dir / "x.json").string(),
                               "--groups", "A,B,C"});
    CHECK(declared.code == 2);
    CHECK(declared.err.find("'C'") != std::string::npos);
}

TEST_CASE("cli transform") {
    TempDir dir;
    const auto pool = dir.write("pool.csv", kToyPool);
    REQUIRE(cli({"fit", "--input", pool.string(), "--calibrator", (dir / "cal.json").string()}).code == 0);

    const auto data = dir.write("data.csv", "id,score,group,extra\nx,0.3,A,keep\ny,0.95,A,me\nz,0.5,B,too\n");
    const auto out = dir / "fair.csv";
    auto r = cli({"transform", "--input", data.string(), "--calibrator", (dir / "cal.json").string(),
                  "--output", out.string()});
    REQUIRE(r.code == 0);
    const auto table = read_csv(out);
    REQUIRE(table.header == std::vector<std::string>{"id", "score", "group", "extra", "fair_score"});
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0][3] == "keep");
    CHECK(*parse_real(table.rows[0][4]) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(*parse_real(table.rows[1][4]) == doctest::Approx(0.7).epsilon(1e-15));
    // B at 0.5: F_B = 1/3, barycenter 0.5*0.1 + 0.5*0.5.
    CHECK(*parse_real(table.rows[2][4]) == doctest::Approx(0.3).epsilon(1e-15));

    const auto first = read_file(out);
    REQUIRE(cli({"transform", "--input", data.string(), "--calibrator", (dir / "cal.json").string(),
                 "--output", out.string()}).code == 0);
    CHECK(read_file(out) == first);

    const auto empty = dir.write("empty.csv", "id,score,group\n");
    REQUIRE(cli({"transform", "--input", empty.string(), "--calibrator", (dir / "cal.json").string(),
                 "--output", (dir / "empty_out.csv").string()}).code == 0);
    CHECK(read_file(dir / "empty_out.csv") == "id,score,group,fair_score\n");

    const auto unknown = dir.write("unknown.csv", "id,score,group\nx,0.3,A\ny,0.3,Q\n");
    r = cli({"transform", "--input", unknown.string(), "--calibrator", (dir / "cal.json").string(),
             "--output", (dir / "u.csv").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 3") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "u.csv"));

    auto doc = nlohmann::ordered_json::parse(read_file(dir / "cal.json"));
    doc["format_version"] = 2;
    const auto v2 = dir.write("v2.json", doc.dump());
    r = cli({"transform", "--input", data.string(), "--calibrator", v2.string(), "--output", (dir / "v.csv").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("format_version") != std::string::npos);
}

TEST_CASE("cli audit") {
    TempDir dir;
    const auto disjoint = dir.write("disjoint.csv", "id,score,group\n1,0.1,A\n2,0.2,A\n3,0.8,B\n4,0.9,B\n");
    auto r = cli({"audit", "--input", disjoint.string(), "--report", (dir / "report.json").string()});
    REQUIRE(r.code == 0);
    auto doc = nlohmann::ordered_json::parse(read_file(dir / "report.json"));
    CHECK(doc.at("format_version") == kReportFormatVersion);
    CHECK(doc.at("unfairness") == 1.0);
    CHECK(doc.at("after").at("unfairness").get<double>() <= 0.5);
    CHECK(doc.at("meta").at("timing_ms").is_number());
    CHECK(doc.at("counts").at("A") == 2);
    CHECK(doc.contains("pairwise_ks"));
    CHECK(doc.contains("w2"));
    CHECK(doc.at("auc").is_null());
    CHECK(r.out.find("before projection") != std::string::npos);

    // Auditing the transformed file's fair scores gives the same post figure.
    REQUIRE(cli({"fit", "--input", disjoint.string(), "--calibrator", (dir / "cal.json").string()}).code == 0);
    REQUIRE(cli({"transform", "--input", disjoint.string(), "--calibrator", (dir / "cal.json").string(),
                 "--output", (dir / "fair.csv").string()}).code == 0);
    r = cli({"audit", "--input", (dir / "fair.csv").string(), "--score-col", "fair_score"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::ordered_json::parse(r.out).at("unfairness").get<double>() <= 0.5);

    const auto labeled = dir.write("labeled.csv", "id,score,group,label\n1,0.9,A,1\n2,0.1,A,0\n3,0.8,B,1\n4,0.3,B,0\n");
    r = cli({"audit", "--input", labeled.string(), "--no-timing"});
    REQUIRE(r.code == 0);
    doc = nlohmann::ordered_json::parse(r.out);
    CHECK(doc.at("auc") == 1.0);
    CHECK(doc.at("meta").at("timing_ms").is_null());
    // Byte-identical without timing.
    CHECK(cli({"audit", "--input", labeled.string(), "--no-timing"}).out == r.out);

    const auto single = dir.write("single.csv", "id,score,group\n1,0.9,A\n2,0.1,A\n");
    r = cli({"audit", "--input", single.string()});
    CHECK(r.code == 0);
    CHECK(nlohmann::ordered_json::parse(r.out).at("unfairness").is_null());
    CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("cli bias-labels") {
    TempDir dir;
    const auto pool = dir.write("pool.csv", kToyPool);
    REQUIRE(cli({"fit", "--input", pool.string(), "--calibrator", (dir / "cal.json").string()}).code == 0);
    // d_B against the toy calibrator: +0.1, +0.2, -0.3, -0.39.
    const auto toy = dir.write("toy.csv", "id,score,group\nr1,0.2,A\nr2,0.1,A\nr3,0.6,B\nr4,0.69,B\n");
    auto r = cli({"bias-labels", "--input", toy.string(), "--calibrator", (dir / "cal.json").string(),
                  "--task", "bias-size", "--alpha", "0.75", "--output", (dir / "tasks.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("positives=2/4") != std::string::npos);
    const auto tasks = read_task_dataset(dir / "tasks.csv");
    REQUIRE(tasks.size() == 4);
    CHECK(*tasks[0].label == 0);
    CHECK(*tasks[1].label == 0);
    CHECK(*tasks[2].label == 1);
    CHECK(*tasks[3].label == 1);
    CHECK(std::abs(tasks[2].d_b) == doctest::Approx(0.3).epsilon(1e-12));
    const auto at = r.out.find("tau=");
    REQUIRE(at != std::string::npos);
    const auto tau = parse_real(r.out.substr(at + 4, r.out.find(' ', at) - at - 4));
    REQUIRE(tau);
    CHECK(*tau == doctest::Approx(0.3).epsilon(1e-12));

    r = cli({"bias-labels", "--input", toy.string(), "--calibrator", (dir / "cal.json").string(),
             "--output", (dir / "disc.csv").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("task=discrimination") != std::string::npos);

    r = cli({"bias-labels", "--input", toy.string(), "--task", "bias-size", "--alpha", "1.5",
             "--output", (dir / "no.csv").string()});
    CHECK(r.code == 2);
    CHECK_FALSE(fs::exists(dir / "no.csv"));

    r = cli({"bias-labels", "--input", toy.string(), "--task", "nonsense", "--output", (dir / "no.csv").string()});
    CHECK(r.code == 2);

    // Self-fitted pool (no --calibrator) runs the two-group identity check.
    r = cli({"bias-labels", "--input", pool.string(), "--task", "outliers", "--output", (dir / "self.csv").string()});
    CHECK(r.code == 0);
}

TEST_CASE("cli synth") {
    TempDir dir;
    const std::vector<std::string> base{"synth", "--group", "A:beta:2:5:300", "--group", "B:gauss:0.6:0.2:200",
                                        "--seed", "17", "--repetitions", "2", "--calib-frac", "0.5",
                                        "--test-frac", "0.5", "--no-timing"};
    auto args = base;
    args.insert(args.end(), {"--output", (dir / "a.csv").string(), "--report", (dir / "a.json").string()});
    auto r = cli(args);
    REQUIRE(r.code == 0);
    args = base;
    args.insert(args.end(), {"--output", (dir / "b.csv").string(), "--report", (dir / "b.json").string()});
    REQUIRE(cli(args).code == 0);
    CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
    CHECK(read_file(dir / "a.json") == read_file(dir / "b.json"));
    const auto table = read_csv(dir / "a.csv");
    CHECK(table.rows.size() == 500);
    CHECK(table.header == std::vector<std::string>{"id", "score", "group", "label"});
    const auto doc = nlohmann::ordered_json::parse(read_file(dir / "a.json"));
    CHECK(doc.at("repetitions") == 2);
    CHECK(doc.at("summary").at("ranks_preserved") == true);

    // A JSON config file gives the same stream as the equivalent flags.
    SynthSpec spec;
    spec.groups = {parse_group_spec("A:beta:2:5:300"), parse_group_spec("B:gauss:0.6:0.2:200")};
    spec.seed = 17;
    const auto config = dir.write("spec.json", to_json(spec).dump());
    REQUIRE(cli({"synth", "--config", config.string(), "--output", (dir / "c.csv").string()}).code == 0);
    CHECK(read_file(dir / "c.csv") == read_file(dir / "a.csv"));

    // FAIRPORT_SEED overrides --seed.
    ::setenv("FAIRPORT_SEED", "17", 1);
    r = cli({"synth", "--group", "A:beta:2:5:300", "--group", "B:gauss:0.6:0.2:200", "--seed", "999",
             "--output", (dir / "d.csv").string()});
    ::unsetenv("FAIRPORT_SEED");
    REQUIRE(r.code == 0);
    CHECK(read_file(dir / "d.csv") == read_file(dir / "a.csv"));

    CHECK(cli({"synth", "--group", "A:beta:2:5:0", "--output", (dir / "e.csv").string()}).code == 2);
    CHECK(cli({"synth", "--group", "A:beta:2:5", "--output", (dir / "e.csv").string()}).code == 2);
    CHECK(cli({"synth", "--group", "A:beta:2:5:10"}).code == 2);
    CHECK(cli({"nonsense"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
}
