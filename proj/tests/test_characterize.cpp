#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "mmcoord/characterize.hpp"
#include "oracles/brunner_munzel_cases.hpp"
#include "support.hpp"

using namespace mmcoord;
using testsupport::Edge;

namespace {

WeightedGraph graph(std::size_t n, const std::vector<Edge>& e) { return WeightedGraph::from_edges(n, e); }

std::vector<Edge> clique(std::uint32_t first, std::uint32_t size) {
  std::vector<Edge> out;
  for (std::uint32_t u = first; u < first + size; ++u) {
    for (std::uint32_t v = u + 1; v < first + size; ++v) out.emplace_back(u, v, 1.0);
  }
  return out;
}

std::vector<Edge> barbell(std::uint32_t k) {
  auto e = clique(0, k);
  const auto right = clique(k, k);
  e.insert(e.end(), right.begin(), right.end());
  e.emplace_back(k - 1, k, 1.0);
  return e;
}

std::vector<ActorId> range(ActorId from, ActorId to) {
  std::vector<ActorId> v(to - from);
  std::iota(v.begin(), v.end(), from);
  return v;
}

}  // namespace

TEST_SUITE("characterize") {
  TEST_CASE("clique community: density and clustering 1, conductance by context") {
    const auto k4 = graph(4, clique(0, 4));
    const auto m = community_metrics(k4, range(0, 4));
    CHECK(m.size == 4);
    CHECK(m.density == 1.0);
    CHECK(m.avg_clustering == 1.0);
    CHECK(m.avg_degree == 3.0);
    CHECK_FALSE(m.conductance.has_value());  // S = V
    CHECK_FALSE(m.assortativity_defined);    // regular

    auto e = clique(0, 4);
    e.emplace_back(4, 5, 1.0);
    const auto with_other = community_metrics(graph(6, e), range(0, 4));
    REQUIRE(with_other.conductance.has_value());
    CHECK(*with_other.conductance == 0.0);
  }

  TEST_CASE("barbell conductance by hand counts") {
    // Two triangles and a bridge: cut 1, vol(S) = 2 + 2 + 3 = 7.
    CHECK(*community_metrics(graph(6, barbell(3)), range(0, 3)).conductance == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
    // Two K4 and a bridge: cut 1, vol(S) = 3 + 3 + 3 + 4 = 13.
    CHECK(*community_metrics(graph(8, barbell(4)), range(0, 4)).conductance == doctest::Approx(1.0 / 13.0).epsilon(1e-15));
  }

  TEST_CASE("single member and weights") {
    const auto g = graph(3, {{0, 1, 0.25}, {1, 2, 0.75}});
    const auto one = community_metrics(g, {1});
    CHECK(one.density == 0.0);
    CHECK(one.avg_weight == 0.0);
    const auto all = community_metrics(g, range(0, 3));
    CHECK(all.avg_weight == 0.5);
    CHECK(all.density == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(community_metrics(g, {}), DataError);
    CHECK_THROWS_AS(community_metrics(g, {7}), DataError);
  }

  TEST_CASE("star is perfectly disassortative") {
    const auto g = graph(5, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {0, 4, 1}});
    const auto m = community_metrics(g, range(0, 5));
    CHECK(m.assortativity_defined);
    CHECK(m.assortativity == doctest::Approx(-1.0));
  }

  TEST_CASE("node metrics closed forms: K4, C5, star") {
    const auto k4 = node_metrics(graph(4, clique(0, 4)));
    for (const auto& n : k4.nodes) {
      CHECK(n.eigenvector_centrality == doctest::Approx(0.5).epsilon(1e-9));
      CHECK(n.degree_centrality == 1.0);
      CHECK(n.local_clustering == 1.0);
    }
    CHECK(k4.eigenvalue == doctest::Approx(3.0).epsilon(1e-9));

    const auto c5 = node_metrics(graph(5, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {0, 4, 1}}));
    for (const auto& n : c5.nodes) CHECK(n.pagerank == doctest::Approx(0.2).epsilon(1e-12));

    const auto star = node_metrics(graph(5, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {0, 4, 1}}));
    CHECK(star.nodes[0].local_clustering == 0.0);
    CHECK(star.nodes[1].degree_centrality == 0.25);
    CHECK(star.nodes[0].degree_centrality == 1.0);
  }

  TEST_CASE("eigenvector centrality is zero outside the dominant component") {
    auto e = clique(0, 4);
    e.emplace_back(4, 5, 1.0);
    const auto rep = node_metrics(graph(6, e));
    CHECK(rep.eigenvector_partial);
    CHECK(rep.nodes[4].eigenvector_centrality == 0.0);
    CHECK(rep.nodes[0].eigenvector_centrality == doctest::Approx(0.5));
  }

  TEST_CASE("node metric invariants on random graphs") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 30; ++trial) {
      const auto edges = testsupport::random_edges(rng, 30, 0.15);
      if (edges.empty()) continue;
      const auto g = graph(30, edges);
      const auto rep = node_metrics(g);
      double sum = 0.0, norm = 0.0;
      for (const auto& n : rep.nodes) {
        sum += n.pagerank;
        norm += n.eigenvector_centrality * n.eigenvector_centrality;
        CHECK(n.pagerank > 0.0);
        CHECK(n.local_clustering >= 0.0);
        CHECK(n.local_clustering <= 1.0);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-9);
      CHECK(std::abs(norm - 1.0) <= 1e-9);
      const auto serial = node_metrics(g, 0.85, KernelMode::Serial);
      for (std::size_t i = 0; i < rep.nodes.size(); ++i) {
        CHECK(serial.nodes[i].pagerank == rep.nodes[i].pagerank);
        CHECK(serial.nodes[i].eigenvector_centrality == rep.nodes[i].eigenvector_centrality);
      }
    }
    CHECK_THROWS_AS(node_metrics(graph(3, {{0, 1, 1}}), 1.0), ConfigError);
  }

  TEST_CASE("metric cosine") {
    CommunityMetrics a;
    a.size = 10;
    a.density = 0.4;
    a.avg_degree = 3.6;
    a.avg_weight = 0.3;
    a.avg_clustering = 0.5;
    a.conductance = 0.2;
    a.assortativity = -0.1;
    CHECK(metric_cosine(a, a) == doctest::Approx(1.0).epsilon(1e-15));
    const std::vector<double> v{1, 2, 3}, w{2, 4, 6}, z{0, 0, 0};
    CHECK(cosine(v, w) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(cosine(v, z), DataError);
  }

  TEST_CASE("PCA: rank-one data, symmetric blobs, duplicates, dropped features") {
    std::vector<std::array<double, 7>> line;
    for (int k = 0; k < 6; ++k) line.push_back({1.0 * k, 2.0 * k, 0.5 * k, 3.0 * k + 1, 7.0 * k, 0.1 * k, 1.0 * k});
    const auto r1 = pca_project(line);
    CHECK(r1.explained_ratio[0] == doctest::Approx(1.0).epsilon(1e-12));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<std::array<double, 7>> blobs;
    for (int k = 0; k < 20; ++k) {
      const double c = k < 10 ? -1.0 : 1.0;
      std::array<double, 7> v{};
      for (auto& x : v) x = c + noise(rng);
      blobs.push_back(v);
    }
    const auto r2 = pca_project(blobs);
    for (int k = 0; k < 10; ++k) CHECK(r2.coords[k][0] * r2.coords[k + 10][0] < 0.0);
    for (std::size_t k = 1; k < r2.explained_ratio.size(); ++k) CHECK(r2.explained_ratio[k] <= r2.explained_ratio[k - 1]);
    CHECK(std::accumulate(r2.explained_ratio.begin(), r2.explained_ratio.end(), 0.0) == doctest::Approx(1.0));

    auto twice = blobs;
    twice.insert(twice.end(), blobs.begin(), blobs.end());
    const auto r3 = pca_project(twice);
    for (std::size_t k = 0; k < blobs.size(); ++k) {
      CHECK(r3.coords[k][0] == doctest::Approx(r3.coords[k + blobs.size()][0]).epsilon(1e-12));
    }

    auto constant = blobs;
    for (auto& v : constant) v[2] = 4.0;
    const auto r4 = pca_project(constant);
    CHECK(r4.kept_features.size() == 6);
    CHECK(r4.warnings.size() == 1);
    CHECK_THROWS_AS(pca_project({line[0], line[1]}), DataError);
  }

  TEST_CASE("midranks average ties") {
    const std::vector<double> v{3, 1, 3, 2, 3};
    CHECK(midranks(v) == std::vector<double>{4, 1, 4, 2, 4});
  }

  TEST_CASE("Brunner-Munzel matches the reference implementation") {
    for (const auto& c : kBmCases) {
      const auto t = brunner_munzel(c.x, c.y);
      CHECK(t.statistic == doctest::Approx(c.statistic).epsilon(1e-9));
      CHECK(std::abs(t.p_value - c.p_value) <= 1e-6);
      CHECK(t.df > 0.0);
    }
  }

  TEST_CASE("Brunner-Munzel: antisymmetry and degenerate inputs") {
    const std::vector<double> x{1.2, 3.4, 2.2, 5.0, 0.3}, y{2.0, 4.1, 6.3, 1.7};
    const auto xy = brunner_munzel(x, y);
    const auto yx = brunner_munzel(y, x);
    CHECK(xy.statistic == doctest::Approx(-yx.statistic).epsilon(1e-14));
    CHECK(xy.p_value == yx.p_value);

    const std::vector<double> far{101, 102, 103};
    CHECK_THROWS_AS(brunner_munzel(x, far), DataError);
    CHECK_THROWS_AS(brunner_munzel(std::vector<double>{1.0}, y), DataError);
    CHECK_THROWS_AS(brunner_munzel(std::vector<double>{2, 2, 2}, std::vector<double>{2, 2}), DataError);
  }

  TEST_CASE("significance bands") {
    CHECK(significance_band(0.2) == "ns");
    CHECK(significance_band(0.05) == "ns");
    CHECK(significance_band(0.049) == "*");
    CHECK(significance_band(0.01) == "**");
    CHECK(significance_band(0.001) == "***");
    CHECK(significance_band(0.0) == "***");
  }
}
