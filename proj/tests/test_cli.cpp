#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "lakeschema/pipeline.hpp"
#include "support/tempdir.hpp"

// Exercises the installed command surface end to end against the bundled
// five-table fixture. LAKESCHEMA_CLI and LAKESCHEMA_FIXTURES come from the
// build system.

namespace {

const std::string kCli = LAKESCHEMA_CLI;
const std::string kFixture = std::string(LAKESCHEMA_FIXTURES) + "/movielake";

int run(const std::string& args) {
    std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    if (status < 0) return -1;
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("index command persists a deterministic artifact") {
    testsupport::TempDir dir("cli");
    auto idx1 = (dir.path / "idx1.bin").string();
    auto idx2 = (dir.path / "idx2.bin").string();

    CHECK(run("index --input-dir " + kFixture + " --out " + idx1) == 0);
    CHECK(std::filesystem::exists(idx1));
    CHECK(run("index --input-dir " + kFixture + " --out " + idx2) == 0);
    CHECK(testsupport::read_text(idx1) == testsupport::read_text(idx2));
}

TEST_CASE("index command reports missing directories with exit code 2") {
    testsupport::TempDir dir("cli");
    CHECK(run("index --input-dir " + (dir.path / "nope").string() + " --out " +
              (dir.path / "x.bin").string()) == 2);
}

TEST_CASE("bad configuration exits with code 2") {
    testsupport::TempDir dir("cli");
    auto out = (dir.path / "schema.json").string();
    CHECK(run("infer --input-dir " + kFixture + " --out " + out + " --delimiter toolong") == 2);
    CHECK(run("infer --input-dir " + kFixture + " --out " + out + " --weights bogus") == 2);
    CHECK(run("infer --input-dir " + kFixture + " --out " + out + " --weights shape=2") == 2);
    CHECK(run("infer") == 2); // missing required options
}

TEST_CASE("infer produces the expected schema deterministically") {
    testsupport::TempDir dir("cli");
    auto s1 = (dir.path / "s1.json").string();
    auto s2 = (dir.path / "s2.json").string();
    auto dot = (dir.path / "schema.dot").string();
    auto report = (dir.path / "report.json").string();

    REQUIRE(run("infer --input-dir " + kFixture + " --out " + s1 + " --dot " + dot +
                " --report " + report) == 0);
    REQUIRE(run("infer --input-dir " + kFixture + " --out " + s2) == 0);
    CHECK(testsupport::read_text(s1) == testsupport::read_text(s2));

    auto j = nlohmann::json::parse(testsupport::read_text(s1));
    CHECK(j["entity_types"].size() == 2);
    CHECK(j["relationships"].size() == 2);
    CHECK(j["unclustered"] == nlohmann::json::array({"people_c"}));

    // DOT output: one node per entity type, edges present, braces balanced.
    std::string d = testsupport::read_text(dot);
    CHECK(d.rfind("digraph", 0) == 0);
    CHECK(d.find("et0") != std::string::npos);
    CHECK(d.find("et1") != std::string::npos);
    CHECK(d.find("->") != std::string::npos);

    auto r = nlohmann::json::parse(testsupport::read_text(report));
    CHECK(r["timings"]["build_indexes_s"].get<double>() >= 0.0);
    CHECK(r["params"].contains("eps"));
}

TEST_CASE("infer can reuse a persisted index") {
    testsupport::TempDir dir("cli");
    auto idx = (dir.path / "idx.bin").string();
    auto s1 = (dir.path / "s1.json").string();
    auto s2 = (dir.path / "s2.json").string();

    REQUIRE(run("index --input-dir " + kFixture + " --out " + idx) == 0);
    REQUIRE(run("infer --input-dir " + kFixture + " --index " + idx + " --out " + s1) == 0);
    REQUIRE(run("infer --input-dir " + kFixture + " --out " + s2) == 0);
    CHECK(testsupport::read_text(s1) == testsupport::read_text(s2));
}

TEST_CASE("a stale index artifact is rejected against a different lake") {
    testsupport::TempDir dir("cli");
    auto idx = (dir.path / "idx.bin").string();
    REQUIRE(run("index --input-dir " + kFixture + " --out " + idx) == 0);

    testsupport::TempDir other("cli_other");
    testsupport::write_text(other.path / "solo.csv", "x,y\n1,2\n3,4\n");
    CHECK(run("infer --input-dir " + other.path.string() + " --index " + idx + " --out " +
              (dir.path / "s.json").string()) == 2);
}

TEST_CASE("single-cell grid skips the search") {
    testsupport::TempDir dir("cli");
    auto out = (dir.path / "schema.json").string();
    REQUIRE(run("infer --input-dir " + kFixture + " --out " + out +
                " --eps 0.45 --min-points 2") == 0);
    auto j = nlohmann::json::parse(testsupport::read_text(out));
    CHECK(j["clustering"]["params"]["eps"].get<double>() == 0.45);
    CHECK(j["clustering"]["params"]["min_points"].get<int>() == 2);
}

TEST_CASE("evaluate reports the reference scores") {
    testsupport::TempDir dir("cli");
    auto schema = (dir.path / "schema.json").string();
    auto out = (dir.path / "eval.json").string();
    REQUIRE(run("infer --input-dir " + kFixture + " --out " + schema) == 0);

    SUBCASE("against the bundled ground truth") {
        REQUIRE(run("evaluate --schema " + schema + " --ground-truth " + kFixture +
                    "/ground_truth.json --out " + out) == 0);
        auto j = nlohmann::json::parse(testsupport::read_text(out));
        CHECK(j["rand"].get<double>() == 0.8);
        CHECK(j["rand_r"].get<double>() == 0.75);
        CHECK(j["cluster_counts"]["a"] == 2);
        CHECK(j["cluster_counts"]["b"] == 6);
        CHECK(j["relationship_counts"]["e"] == 2);
    }
    SUBCASE("ground truth equal to the computed schema scores 1.0") {
        auto sj = nlohmann::json::parse(testsupport::read_text(schema));
        nlohmann::json gt;
        gt["clusters"] = nlohmann::json::array();
        for (const auto& et : sj["entity_types"]) gt["clusters"].push_back(et["tables"]);
        for (const auto& t : sj["unclustered"]) {
            gt["clusters"].push_back(nlohmann::json::array({t}));
        }
        gt["relationships"] = nlohmann::json::array();
        for (const auto& rel : sj["relationships"]) {
            gt["relationships"].push_back(rel["foreign_keys"]);
        }
        auto gt_path = (dir.path / "gt_same.json").string();
        testsupport::write_text(gt_path, gt.dump());
        REQUIRE(run("evaluate --schema " + schema + " --ground-truth " + gt_path + " --out " +
                    out) == 0);
        auto j = nlohmann::json::parse(testsupport::read_text(out));
        CHECK(j["rand"].get<double>() == 1.0);
        CHECK(j["rand_r"].get<double>() == 1.0);
    }
    SUBCASE("missing relationships section reports N/A") {
        auto gt_path = (dir.path / "gt_na.json").string();
        testsupport::write_text(
            gt_path,
            R"({"clusters": [["movies_a","movies_b"],["people_a","people_b","people_c"]]})");
        REQUIRE(run("evaluate --schema " + schema + " --ground-truth " + gt_path + " --out " +
                    out) == 0);
        auto j = nlohmann::json::parse(testsupport::read_text(out));
        CHECK(j["rand_r"].is_null());
    }
    SUBCASE("empty GT relationships against detected ones count entirely as e") {
        auto gt_path = (dir.path / "gt_empty_rel.json").string();
        testsupport::write_text(
            gt_path,
            R"({"clusters": [["movies_a","movies_b"],["people_a","people_b","people_c"]],
                "relationships": []})");
        REQUIRE(run("evaluate --schema " + schema + " --ground-truth " + gt_path + " --out " +
                    out) == 0);
        auto j = nlohmann::json::parse(testsupport::read_text(out));
        CHECK(j["rand_r"].get<double>() == 0.0);
        CHECK(j["relationship_counts"]["e"] == 4);
    }
    SUBCASE("both sides empty reports N/A") {
        // Hand-built schema artifact without any relationships.
        nlohmann::json s;
        s["clustering"] = {{"params", {{"eps", 0.4}, {"min_points", 2}, {"silhouette", 0.5}}},
                           {"clusters", nlohmann::json::array({{"movies_a", "movies_b"}})},
                           {"noise", nlohmann::json::array()}};
        s["entity_types"] =
            nlohmann::json::array({{{"label", 0}, {"tables", {"movies_a", "movies_b"}}}});
        s["relationships"] = nlohmann::json::array();
        s["unclustered"] = nlohmann::json::array();
        s["ungrouped_foreign_keys"] = nlohmann::json::array();
        auto schema_path = (dir.path / "schema_norel.json").string();
        testsupport::write_text(schema_path, s.dump());
        auto gt_path = (dir.path / "gt_both_empty.json").string();
        testsupport::write_text(
            gt_path, R"({"clusters": [["movies_a","movies_b"]], "relationships": []})");
        REQUIRE(run("evaluate --schema " + schema_path + " --ground-truth " + gt_path +
                    " --out " + out) == 0);
        auto j = nlohmann::json::parse(testsupport::read_text(out));
        CHECK(j["rand_r"].is_null());
    }
    SUBCASE("validation failures propagate as exit code 2") {
        auto gt_path = (dir.path / "gt_bad.json").string();
        testsupport::write_text(gt_path, R"({"clusters": [["movies_a","zzz"]]})");
        CHECK(run("evaluate --schema " + schema + " --ground-truth " + gt_path) == 2);
    }
}

TEST_CASE("export-dot renders a schema artifact") {
    testsupport::TempDir dir("cli");
    auto schema = (dir.path / "schema.json").string();
    auto dot = (dir.path / "out.dot").string();
    REQUIRE(run("infer --input-dir " + kFixture + " --out " + schema) == 0);
    REQUIRE(run("export-dot --schema " + schema + " --out " + dot) == 0);
    std::string d = testsupport::read_text(dot);
    CHECK(d.rfind("digraph", 0) == 0);
    CHECK(d.find("et1 -> et0") != std::string::npos);
}

TEST_CASE("library-level pipeline runs are byte-identical") {
    lakeschema::RunConfig cfg;
    auto r1 = lakeschema::run_pipeline(kFixture, cfg);
    auto r2 = lakeschema::run_pipeline(kFixture, cfg);
    CHECK(lakeschema::schema_to_json(r1.schema) == lakeschema::schema_to_json(r2.schema));
}

TEST_CASE("results do not depend on the thread count") {
    lakeschema::RunConfig serial;
    lakeschema::RunConfig parallel;
    serial.threads = 1;
    parallel.threads = 4;
    auto r1 = lakeschema::run_pipeline(kFixture, serial);
    auto r2 = lakeschema::run_pipeline(kFixture, parallel);
    CHECK(lakeschema::schema_to_json(r1.schema) == lakeschema::schema_to_json(r2.schema));

    testsupport::TempDir dir("cli");
    auto s1 = (dir.path / "s1.json").string();
    auto s2 = (dir.path / "s2.json").string();
    REQUIRE(run("infer --input-dir " + kFixture + " --threads 1 --out " + s1) == 0);
    REQUIRE(run("infer --input-dir " + kFixture + " --threads 3 --out " + s2) == 0);
    CHECK(testsupport::read_text(s1) == testsupport::read_text(s2));
}

TEST_CASE("all-noise lakes degrade with exit code 1 but still emit a schema") {
    testsupport::TempDir dir("cli");
    // Three mutually dissimilar tables: every grid cell scores at the
    // sentinel, so the run completes degraded.
    testsupport::write_text(dir.path / "aa.csv", "alpha,beta\nred,blue\ngreen,teal\n");
    testsupport::write_text(dir.path / "bb.csv", "num,val\n101,9.5\n102,8.1\n103,7.7\n");
    testsupport::write_text(dir.path / "cc.csv", "ref,flag\nPX-91,ww9\nPX-82,qq8\n");

    auto out = (dir.path / "schema.json").string();
    CHECK(run("infer --input-dir " + dir.path.string() + " --out " + out) == 1);
    auto j = nlohmann::json::parse(testsupport::read_text(out));
    CHECK(j["entity_types"].empty());
    CHECK(j["unclustered"].size() == 3);
}
