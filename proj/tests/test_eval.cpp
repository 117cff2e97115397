#include "doctest.h"

#include <random>

#include "lakeschema/eval.hpp"
#include "lakeschema/util.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace lakeschema;

TEST_CASE("rand_score on the five-table reference example") {
    // Computed: {P1,P2},{M1,M2} with P3 noise already turned into a
    // singleton; ground truth: {P1,P2,P3},{M1,M2}.
    Partition computed = {{"P1", "P2"}, {"M1", "M2"}, {"P3"}};
    Partition gt = {{"P1", "P2", "P3"}, {"M1", "M2"}};

    RandResult r = rand_score(computed, gt);
    CHECK(r.counts.a == 2);
    CHECK(r.counts.b == 6);
    CHECK(r.counts.c + r.counts.d == 2);
    CHECK(r.score == 0.8);
}

TEST_CASE("rand_score edge cases") {
    SUBCASE("identical partitions score 1") {
        Partition p = {{"a", "b"}, {"c"}, {"d", "e", "f"}};
        RandResult r = rand_score(p, p);
        CHECK(r.score == 1.0);
        CHECK(r.counts.c == 0);
        CHECK(r.counts.d == 0);
    }
    SUBCASE("fewer than two elements scores 1") {
        CHECK(rand_score({{"only"}}, {{"only"}}).score == 1.0);
        CHECK(rand_score({}, {}).score == 1.0);
    }
    SUBCASE("coverage mismatch is fatal") {
        CHECK_THROWS_AS(rand_score({{"a", "b"}}, {{"a"}}), FatalError);
        CHECK_THROWS_AS(rand_score({{"a"}}, {{"a", "b"}}), FatalError);
    }
    SUBCASE("overlapping sets are fatal") {
        CHECK_THROWS_AS(rand_score({{"a", "b"}, {"b"}}, {{"a", "b"}}), FatalError);
    }
}

TEST_CASE("rand_score equals the all-pairs oracle on random partitions") {
    std::mt19937 rng(321);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
        std::vector<std::string> elements;
        for (std::size_t i = 0; i < n; ++i) elements.push_back("e" + std::to_string(i));
        Partition x = gen::random_partition(rng, elements, 4);
        Partition y = gen::random_partition(rng, elements, 4);

        RandResult mine = rand_score(x, y);
        oracle::RandOracle ref = oracle::brute_rand(x, y);
        CHECK(mine.counts.a == ref.a);
        CHECK(mine.counts.b == ref.b);
        CHECK(mine.counts.c == ref.c);
        CHECK(mine.counts.d == ref.d);
        CHECK(mine.score == ref.score);

        // a+b+c+d always covers every unordered pair.
        CHECK(mine.counts.a + mine.counts.b + mine.counts.c + mine.counts.d ==
              n * (n - 1) / 2);

        // Symmetry: swapping the partitions swaps c and d only.
        RandResult swapped = rand_score(y, x);
        CHECK(swapped.score == mine.score);
        CHECK(swapped.counts.c == mine.counts.d);
        CHECK(swapped.counts.d == mine.counts.c);
    }
}

TEST_CASE("relationship_rand_score on the reference example") {
    // Four shared foreign keys grouped the same way on both sides, plus two
    // ground-truth-only keys from the unclustered table.
    Partition computed = {{"L1", "L2"}, {"F1", "F2"}};
    Partition gt = {{"L1", "L2"}, {"F1", "F2", "X1", "X2"}};

    RelationshipRandResult r = relationship_rand_score(computed, gt);
    CHECK(r.counts.a == 2);
    CHECK(r.counts.b == 4);
    CHECK(r.counts.c == 0);
    CHECK(r.counts.d == 0);
    CHECK(r.e == 2);
    CHECK(r.score == 0.75);
}

TEST_CASE("relationship_rand_score edge cases") {
    SUBCASE("identical group sets score 1") {
        Partition p = {{"x", "y"}, {"z"}};
        CHECK(relationship_rand_score(p, p).score == 1.0);
    }
    SUBCASE("both sides empty score 1") {
        CHECK(relationship_rand_score({}, {}).score == 1.0);
    }
    SUBCASE("one empty side turns entirely into e") {
        Partition computed = {{"x", "y"}};
        RelationshipRandResult r = relationship_rand_score(computed, {});
        CHECK(r.e == 2);
        CHECK(r.score == 0.0);
    }
    SUBCASE("an invented foreign key only adds to e") {
        Partition gt = {{"x", "y"}, {"z", "w"}};
        Partition computed = {{"x", "y"}, {"z", "w", "extra"}};
        RelationshipRandResult with_extra = relationship_rand_score(computed, gt);
        RelationshipRandResult without = relationship_rand_score(gt, gt);
        CHECK(with_extra.e == 1);
        CHECK(with_extra.counts.a == without.counts.a);
        CHECK(with_extra.counts.b == without.counts.b);
        CHECK(with_extra.counts.c == without.counts.c);
        CHECK(with_extra.counts.d == without.counts.d);
    }
}

TEST_CASE("relationship_rand_score equals the all-pairs oracle on random groups") {
    std::mt19937 rng(555);
    for (int iter = 0; iter < 100; ++iter) {
        // Overlapping but unequal identifier universes.
        std::vector<std::string> xs, ys;
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
        for (std::size_t i = 0; i < n; ++i) {
            std::string id = "fk" + std::to_string(i);
            if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.8) xs.push_back(id);
            if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.8) ys.push_back(id);
        }
        if (xs.empty() || ys.empty()) continue;
        Partition x = gen::random_partition(rng, xs, 3);
        Partition y = gen::random_partition(rng, ys, 3);

        RelationshipRandResult mine = relationship_rand_score(x, y);
        oracle::RelationshipRandOracle ref = oracle::brute_relationship_rand(x, y);
        CHECK(mine.counts.a == ref.a);
        CHECK(mine.counts.b == ref.b);
        CHECK(mine.counts.c == ref.c);
        CHECK(mine.counts.d == ref.d);
        CHECK(mine.e == ref.e);
        CHECK(mine.score == ref.score);

        // Adding e can only shrink the score relative to rand on shared items.
        std::uint64_t shared_denom =
            mine.counts.a + mine.counts.b + mine.counts.c + mine.counts.d;
        if (shared_denom > 0) {
            double shared_rand = static_cast<double>(mine.counts.a + mine.counts.b) /
                                 static_cast<double>(shared_denom);
            CHECK(mine.score <= shared_rand + 1e-12);
        }
    }
}

TEST_CASE("partition_from_schema turns noise into singletons") {
    SchemaDigest digest;
    digest.entity_tables = {{"a", "b"}, {"c"}};
    digest.unclustered = {"x", "y"};
    Partition p = partition_from_schema(digest);
    REQUIRE(p.size() == 4);
    CHECK(p[2] == std::set<std::string>{"x"});
    CHECK(p[3] == std::set<std::string>{"y"});
}

TEST_CASE("evaluate_schema assembles the report and applies the N/A rules") {
    SchemaDigest schema;
    schema.entity_tables = {{"a", "b"}, {"c", "d"}};
    schema.unclustered = {"e"};

    GroundTruth gt;
    gt.clusters = {{"a", "b", "e"}, {"c", "d"}};

    SUBCASE("no relationships section means N/A") {
        EvalReport r = evaluate_schema(schema, gt);
        CHECK(r.tables == 5);
        CHECK(r.clusters == 2);
        CHECK(r.gt_clusters == 2);
        CHECK(r.cluster_rand.score == 0.8);
        CHECK_FALSE(r.relationship_rand.has_value());
    }
    SUBCASE("both sides empty means N/A") {
        gt.relationships = Partition{};
        EvalReport r = evaluate_schema(schema, gt);
        CHECK_FALSE(r.relationship_rand.has_value());
    }
    SUBCASE("one side empty is scored, entirely as e") {
        gt.relationships = Partition{{"a.x->c.y", "b.x->d.y"}};
        EvalReport r = evaluate_schema(schema, gt);
        REQUIRE(r.relationship_rand.has_value());
        CHECK(r.relationship_rand->e == 2);
        CHECK(r.relationship_rand->score == 0.0);
    }
    SUBCASE("matching groups score 1") {
        schema.relationship_fks = {{"a.x->c.y", "b.x->d.y"}};
        gt.relationships = Partition{{"a.x->c.y", "b.x->d.y"}};
        EvalReport r = evaluate_schema(schema, gt);
        REQUIRE(r.relationship_rand.has_value());
        CHECK(r.relationship_rand->score == 1.0);
    }
}

TEST_CASE("load_ground_truth validates structure") {
    testsupport::TempDir dir("eval");
    std::vector<std::string> known = {"a", "b", "c"};

    SUBCASE("valid file with two clusters") {
        auto p = dir.path / "gt.json";
        testsupport::write_text(p, R"({"clusters": [["a","b"],["c"]]})");
        GroundTruth gt = load_ground_truth(p, known);
        REQUIRE(gt.clusters.size() == 2);
        CHECK_FALSE(gt.relationships.has_value()); // missing section -> N/A
    }
    SUBCASE("unknown table id is fatal and names the id") {
        auto p = dir.path / "gt.json";
        testsupport::write_text(p, R"({"clusters": [["a","zzz"]]})");
        try {
            load_ground_truth(p, known);
            FAIL("expected FatalError");
        } catch (const FatalError& e) {
            CHECK(std::string(e.what()).find("zzz") != std::string::npos);
        }
    }
    SUBCASE("overlapping clusters are fatal") {
        auto p = dir.path / "gt.json";
        testsupport::write_text(p, R"({"clusters": [["a","b"],["b","c"]]})");
        CHECK_THROWS_AS(load_ground_truth(p, known), FatalError);
    }
    SUBCASE("relationships validate identifiers") {
        auto p = dir.path / "gt.json";
        testsupport::write_text(
            p, R"({"clusters": [["a","b"]], "relationships": [["a.x->b.y"],["a.x->b.y"]]})");
        CHECK_THROWS_AS(load_ground_truth(p, known), FatalError); // duplicate fk

        testsupport::write_text(p,
                                R"({"clusters": [["a"]], "relationships": [["nope"]]})");
        CHECK_THROWS_AS(load_ground_truth(p, known), FatalError); // malformed id

        testsupport::write_text(
            p, R"({"clusters": [["a"]], "relationships": [["ghost.x->a.y"]]})");
        CHECK_THROWS_AS(load_ground_truth(p, known), FatalError); // unknown table
    }
    SUBCASE("empty relationships section is kept, distinct from absent") {
        auto p = dir.path / "gt.json";
        testsupport::write_text(p, R"({"clusters": [["a"]], "relationships": []})");
        GroundTruth gt = load_ground_truth(p, known);
        REQUIRE(gt.relationships.has_value());
        CHECK(gt.relationships->empty());
    }
    SUBCASE("garbage is fatal") {
        auto p = dir.path / "gt.json";
        testsupport::write_text(p, "{{{");
        CHECK_THROWS_AS(load_ground_truth(p, known), FatalError);
        CHECK_THROWS_AS(load_ground_truth(dir.path / "absent.json", known), FatalError);
    }
}
