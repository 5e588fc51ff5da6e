#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "camuv/dataset.hpp"
#include "camuv/graph.hpp"

using namespace camuv;

namespace {

Dataset tiny_dataset() {
    Eigen::MatrixXd m(4, 2);
    m << 1, 2, 3, 4, 5, 6, 7, 8;
    return Dataset({"X1", "X2"}, m);
}

}  // namespace

TEST_CASE("validate_graph accepts an empty graph") {
    CausalGraph g;
    g.variables = {"X1", "X2"};
    CHECK(validate_graph(g).empty());
}

TEST_CASE("validate_graph flags edge/dashed overlap") {
    CausalGraph g;
    g.variables = {"X1", "X2"};
    g.parents["X2"] = {"X1"};
    g.dashed.insert(unordered_pair("X1", "X2"));
    auto violations = validate_graph(g);
    REQUIRE_FALSE(violations.empty());
    CHECK(violations.front().find("edge/dashed overlap") != std::string::npos);
}

TEST_CASE("validate_graph flags self-parenting") {
    CausalGraph g;
    g.variables = {"X1"};
    g.parents["X1"] = {"X1"};
    auto violations = validate_graph(g);
    REQUIRE_FALSE(violations.empty());
    CHECK(violations.front().find("self-parent") != std::string::npos);
}

TEST_CASE("is_forbidden respects pair order") {
    auto data = tiny_dataset();
    PriorKnowledge pk;
    pk.add("X1", "X2");
    CHECK(is_forbidden(pk, data, "X1", "X2"));
    CHECK_FALSE(is_forbidden(pk, data, "X2", "X1"));
    CHECK_THROWS_AS(is_forbidden(pk, data, "X9", "X2"), std::invalid_argument);

    PriorKnowledge empty;
    CHECK_FALSE(is_forbidden(empty, data, "X1", "X2"));
}

TEST_CASE("prior knowledge rejects self-pairs and validates identifiers") {
    PriorKnowledge pk;
    CHECK_THROWS_AS(pk.add("X1", "X1"), std::invalid_argument);
    pk.add("X1", "X9");
    CHECK_THROWS_AS(pk.validate_against(tiny_dataset()), std::invalid_argument);
}

TEST_CASE("graph json round-trip is the identity") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const int p = 3 + static_cast<int>(rng() % 5);
        CausalGraph g;
        for (int i = 1; i <= p; ++i) g.variables.push_back("X" + std::to_string(i));
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                if (i == j || rng() % 4 != 0) continue;
                g.parents[g.variables[j]].insert(g.variables[i]);
            }
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) {
                const auto& a = g.variables[i];
                const auto& b = g.variables[j];
                if (g.has_directed_edge(a, b) || g.has_directed_edge(b, a)) continue;
                if (rng() % 5 == 0) g.dashed.insert(unordered_pair(a, b));
            }
        REQUIRE(validate_graph(g).empty());
        CHECK(graph_from_json(to_json(g)) == g);
    }
}

TEST_CASE("prior json round-trip") {
    PriorKnowledge pk;
    pk.add("X2", "X1");
    pk.add("X3", "X1");
    CHECK(prior_from_json(to_json(pk)).forbidden == pk.forbidden);
}

TEST_CASE("dot export draws solid directed and dashed undirected edges") {
    CausalGraph g;
    g.variables = {"X1", "X2", "X3"};
    g.parents["X2"] = {"X1"};
    g.dashed.insert(unordered_pair("X2", "X3"));
    const std::string dot = to_dot(g);
    CHECK(dot.find("\"X1\" -> \"X2\";") != std::string::npos);
    CHECK(dot.find("\"X2\" -> \"X3\" [dir=none, style=dashed];") != std::string::npos);
}

TEST_CASE("dataset rejects malformed input") {
    Eigen::MatrixXd m(2, 2);
    m << 1, 2, 3, 4;
    CHECK_THROWS_AS(Dataset({"A", "A"}, m), std::invalid_argument);
    Eigen::MatrixXd bad = m;
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(Dataset({"A", "B"}, bad), std::invalid_argument);
}

TEST_CASE("csv round-trip preserves values exactly") {
    Eigen::MatrixXd m(3, 2);
    m << 0.1, -2.5e-7, 3.0, 4.25, 1e300, -0.0;
    Dataset d({"A", "B"}, m);
    const std::string path = "/tmp/camuv_test_roundtrip.csv";
    write_csv(d, path);
    Dataset back = read_csv(path);
    REQUIRE(back.names() == d.names());
    CHECK(back.values() == d.values());
}
