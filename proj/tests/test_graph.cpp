#include <doctest.h>

#include <filesystem>

#include "spikelasso/errors.hpp"
#include "spikelasso/graph.hpp"

using namespace spikelasso;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("spikelasso_graph_" + name);
}

} // namespace

TEST_CASE("generate_random rejects bad parameters") {
    CHECK_THROWS_AS(generate_random(1, 0.5, 0), ParameterError);
    CHECK_THROWS_AS(generate_random(5, -0.1, 0), ParameterError);
    CHECK_THROWS_AS(generate_random(5, 1.5, 0), ParameterError);
}

TEST_CASE("generate_random edge-probability extremes") {
    const auto empty = generate_random(5, 0.0, 7);
    CHECK(empty.n_edges() == 0);

    const auto full = generate_random(5, 1.0, 7);
    CHECK(full.n_edges() == 20); // complete digraph minus diagonal
    for (const auto& [s, t] : full.edges)
        CHECK(s != t);
}

TEST_CASE("generate_random is seed-reproducible") {
    const auto a = generate_random(12, 0.3, 42);
    const auto b = generate_random(12, 0.3, 42);
    CHECK(a.edges == b.edges);
    const auto c = generate_random(12, 0.3, 43);
    CHECK(a.edges != c.edges);
}

TEST_CASE("mean edge count matches the binomial expectation") {
    // 20 * 19 * 0.3 = 114 expected edges per draw.
    long total = 0;
    const int draws = 300;
    for (int s = 0; s < draws; ++s)
        total += static_cast<long>(generate_random(20, 0.3, s).n_edges());
    const double mean = static_cast<double>(total) / draws;
    CHECK(mean == doctest::Approx(114.0).epsilon(0.03));
}

TEST_CASE("adjacency of the five-node reference network") {
    DirectedGraph g;
    g.n_nodes = 5;
    g.edges = {{0, 1}, {0, 3}, {1, 3}, {2, 0}, {2, 4}, {3, 2}, {4, 0}, {4, 3}};

    const std::vector<std::vector<int>> expected = {{0, 1, 0, 1, 0},
                                                    {0, 0, 0, 1, 0},
                                                    {1, 0, 0, 0, 1},
                                                    {0, 0, 1, 0, 0},
                                                    {1, 0, 0, 1, 0}};
    CHECK(to_adjacency(g) == expected);
}

TEST_CASE("adjacency corner cases") {
    DirectedGraph empty;
    empty.n_nodes = 3;
    CHECK(to_adjacency(empty) == std::vector<std::vector<int>>(3, {0, 0, 0}));

    DirectedGraph one;
    one.n_nodes = 2;
    one.edges = {{0, 1}};
    const auto a = to_adjacency(one);
    CHECK(a[0][1] == 1);
    CHECK(a[0][0] + a[1][0] + a[1][1] == 0);
}

TEST_CASE("from_adjacency inverts to_adjacency") {
    const auto g = generate_random(9, 0.4, 5);
    CHECK(from_adjacency(to_adjacency(g)).edges == g.edges);

    CHECK_THROWS_AS(from_adjacency({{0, 1}, {1, 1}}), DataError); // diagonal
    CHECK_THROWS_AS(from_adjacency({{0, 2}, {0, 0}}), DataError); // not 0/1
    CHECK_THROWS_AS(from_adjacency({{0, 1, 0}, {0, 0}}), DataError);
}

TEST_CASE("count_bidirectional") {
    DirectedGraph g;
    g.n_nodes = 3;
    g.edges = {{0, 1}, {1, 0}, {1, 2}};
    CHECK(count_bidirectional(g) == 1);

    CHECK(count_bidirectional(generate_random(3, 1.0, 0)) == 3);

    DirectedGraph empty;
    empty.n_nodes = 4;
    CHECK(count_bidirectional(empty) == 0);
}

TEST_CASE("graph validation catches malformed graphs") {
    DirectedGraph self;
    self.n_nodes = 3;
    self.edges = {{1, 1}};
    CHECK_THROWS_AS(self.validate(), DataError);

    DirectedGraph range;
    range.n_nodes = 3;
    range.edges = {{0, 3}};
    CHECK_THROWS_AS(range.validate(), DataError);

    DirectedGraph dup;
    dup.n_nodes = 3;
    dup.edges = {{0, 1}, {0, 1}};
    CHECK_THROWS_AS(dup.validate(), DataError);
}

TEST_CASE("JSON and CSV round trips") {
    auto g = generate_random(7, 0.35, 99);
    g.edge_weights[g.edges.front()] = 2.5;

    const auto jpath = temp_file("g.json");
    write_graph_json(g, jpath);
    const auto g2 = read_graph_json(jpath);
    CHECK(g2.n_nodes == g.n_nodes);
    CHECK(g2.edges == g.edges);
    CHECK(g2.weight(g.edges.front().first, g.edges.front().second) == 2.5);

    const auto cpath = temp_file("g.csv");
    write_adjacency_csv(g, cpath);
    CHECK(read_adjacency_csv(cpath).edges == g.edges);

    fs::remove(jpath);
    fs::remove(cpath);
}
