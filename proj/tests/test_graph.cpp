#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "grafica/eig.hpp"
#include "grafica/errors.hpp"
#include "grafica/graph.hpp"
#include "test_support.hpp"

using grafica::AttributedGraph;
using grafica::make_graph;
using grafica::WeightedEdge;

namespace {

AttributedGraph two_path() {
  return make_graph(2, {{0, 1, 1.0}}, Eigen::MatrixXd::Zero(2, 1));
}

AttributedGraph triangle() {
  return make_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}},
                    Eigen::MatrixXd::Zero(3, 1));
}

}  // namespace

TEST_CASE("two-node path normalizes to itself") {
  Eigen::MatrixXd an(grafica::normalize_adjacency(two_path()));
  CHECK(an(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(an(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(an(0, 0) == 0.0);
  CHECK(an(1, 1) == 0.0);
}

TEST_CASE("triangle normalizes to A/2") {
  AttributedGraph g = triangle();
  Eigen::MatrixXd an(grafica::normalize_adjacency(g));
  Eigen::MatrixXd a(g.adjacency);
  CHECK((an - a / 2.0).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("isolated node gets a zero row and column") {
  AttributedGraph g = make_graph(3, {{0, 1, 1.0}}, Eigen::MatrixXd::Zero(3, 1));
  Eigen::MatrixXd an(grafica::normalize_adjacency(g));
  CHECK(an.row(2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(an.col(2).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd ln(grafica::normalized_laplacian(g));
  CHECK(ln(2, 2) == 1.0);
}

TEST_CASE("two-node path Laplacian") {
  Eigen::MatrixXd ln(grafica::normalized_laplacian(two_path()));
  Eigen::MatrixXd want(2, 2);
  want << 1.0, -1.0, -1.0, 1.0;
  CHECK((ln - want).cwiseAbs().maxCoeff() <= 1e-14);

  auto dec = grafica::eig_sym(ln);
  CHECK(dec.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dec.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("triangle Laplacian eigenvalues are 0, 1.5, 1.5") {
  auto dec = grafica::eig_sym(Eigen::MatrixXd(grafica::normalized_laplacian(triangle())));
  CHECK(dec.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dec.eigenvalues(1) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(dec.eigenvalues(2) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("disconnected components each contribute a zero eigenvalue") {
  AttributedGraph g = make_graph(4, {{0, 1, 1.0}, {2, 3, 1.0}},
                                 Eigen::MatrixXd::Zero(4, 1));
  auto dec = grafica::eig_sym(Eigen::MatrixXd(grafica::normalized_laplacian(g)));
  CHECK(std::abs(dec.eigenvalues(0)) <= 1e-9);
  CHECK(std::abs(dec.eigenvalues(1)) <= 1e-9);
  CHECK(dec.eigenvalues(2) > 0.5);
}

TEST_CASE("eig_sym on the identity") {
  auto dec = grafica::eig_sym(Eigen::MatrixXd::Identity(3, 3));
  for (int i = 0; i < 3; ++i)
    CHECK(dec.eigenvalues(i) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eig_sym of [[1,-1],[-1,1]]") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, -1.0, -1.0, 1.0;
  auto dec = grafica::eig_sym(m);
  CHECK(dec.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dec.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-12));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(dec.eigenvectors(0, 0)) - inv_sqrt2) <= 1e-12);
  CHECK(std::abs(dec.eigenvectors(0, 0) - dec.eigenvectors(1, 0)) <= 1e-12);
  CHECK(std::abs(dec.eigenvectors(0, 1) + dec.eigenvectors(1, 1)) <= 1e-12);
}

TEST_CASE("eig_sym reconstruction on random symmetric matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 49);
    Eigen::MatrixXd m = testsup::random_symmetric(n, rng);
    auto dec = grafica::eig_sym(m);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    Eigen::MatrixXd recon = dec.eigenvectors *
                            dec.eigenvalues.asDiagonal() *
                            dec.eigenvectors.transpose();
    CHECK((recon - m).cwiseAbs().maxCoeff() <= 1e-8 * scale);
    Eigen::MatrixXd gram =
        dec.eigenvectors.transpose() * dec.eigenvectors;
    CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <=
          1e-8);
    for (Eigen::Index i = 1; i < n; ++i)
      CHECK(dec.eigenvalues(i) >= dec.eigenvalues(i - 1));
  }
}

TEST_CASE("eig_sym_smallest matches the head of the full spectrum") {
  std::mt19937_64 rng(12);
  Eigen::MatrixXd m = testsup::random_symmetric(20, rng);
  auto full = grafica::eig_sym(m);
  auto part = grafica::eig_sym_smallest(m, 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(part.eigenvalues(i) ==
          doctest::Approx(full.eigenvalues(i)).epsilon(1e-10));
    // Columns may differ by sign.
    const double dot =
        std::abs(part.eigenvectors.col(i).dot(full.eigenvectors.col(i)));
    CHECK(dot == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("eig_sym rejects asymmetric and non-square inputs") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.0, 1.0, 0.5, 0.0;
  CHECK_THROWS_AS(grafica::eig_sym(bad), grafica::StructuralError);
  CHECK_THROWS_AS(grafica::eig_sym(Eigen::MatrixXd::Zero(2, 3)),
                  grafica::StructuralError);
  CHECK_THROWS_AS(grafica::eig_sym_smallest(Eigen::MatrixXd::Identity(3, 3), 4),
                  grafica::StructuralError);
}

TEST_CASE("Laplacian spectrum stays in [0,2] on random graphs") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng() % 20);
    std::vector<WeightedEdge> edges;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        if (unif(rng) < 0.3) edges.push_back({i, j, 1.0 + unif(rng)});
    if (edges.empty()) edges.push_back({0, 1, 1.0});
    AttributedGraph g = make_graph(n, edges, Eigen::MatrixXd::Zero(n, 1));
    auto dec = grafica::eig_sym(Eigen::MatrixXd(grafica::normalized_laplacian(g)));
    CHECK(dec.eigenvalues(0) >= -1e-9);
    CHECK(std::abs(dec.eigenvalues(0)) <= 1e-9);  // >= 1 edge
    CHECK(dec.eigenvalues(n - 1) <= 2.0 + 1e-9);

    // L_n = I - A_n elementwise off the zero-degree diagonal.
    Eigen::MatrixXd ln(grafica::normalized_laplacian(g));
    Eigen::MatrixXd an(grafica::normalize_adjacency(g));
    Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    CHECK((ln - (identity - an)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("make_graph symmetrizes, drops self-loops, collapses duplicates") {
  AttributedGraph g = make_graph(
      3, {{0, 1, 1.0}, {1, 0, 1.0}, {0, 0, 5.0}, {1, 2, 2.0}, {2, 1, 3.0}},
      Eigen::MatrixXd::Zero(3, 2));
  Eigen::MatrixXd a(g.adjacency);
  CHECK(a(0, 0) == 0.0);             // self-loop dropped
  CHECK(a(0, 1) == 1.0);
  CHECK(a(1, 0) == 1.0);
  CHECK(a(1, 2) == 3.0);             // duplicate collapsed by max
  CHECK(a(2, 1) == 3.0);
  CHECK(g.n_edges() == 2);
}

TEST_CASE("make_graph validates inputs") {
  CHECK_THROWS_AS(
      make_graph(2, {{0, 2, 1.0}}, Eigen::MatrixXd::Zero(2, 1)),
      grafica::StructuralError);
  CHECK_THROWS_AS(
      make_graph(2, {{0, 1, -1.0}}, Eigen::MatrixXd::Zero(2, 1)),
      grafica::StructuralError);
  CHECK_THROWS_AS(
      make_graph(2, {{0, 1, 1.0}}, Eigen::MatrixXd::Zero(3, 1)),
      grafica::StructuralError);
  // Non-contiguous labels.
  CHECK_THROWS_AS(make_graph(2, {{0, 1, 1.0}}, Eigen::MatrixXd::Zero(2, 1),
                             std::vector<int>{0, 2}),
                  grafica::StructuralError);
}
