#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "grafica/errors.hpp"
#include "grafica/io.hpp"
#include "grafica/pipeline.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test binary run, removed on teardown.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("grafica_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path file(const std::string& name) const { return path / name; }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("content/cites loads a handcrafted three-node network") {
  TempDir dir;
  write_text(dir.file("toy.content"),
             "n1\t1\t0\tgenetic\n"
             "n2\t0\t1\tgenetic\n"
             "n3\t0.5\t0.5\ttheory\n");
  write_text(dir.file("toy.cites"),
             "n1\tn2\n"
             "n2\tn3\n"
             "n1\tmissing\n");
  std::size_t skipped = 0;
  grafica::AttributedGraph g = grafica::load_content_cites(
      dir.file("toy.content"), dir.file("toy.cites"), &skipped);

  CHECK(g.n_nodes == 3);
  CHECK(g.n_edges() == 2);
  CHECK(skipped == 1);
  CHECK(g.attributes(0, 0) == 1.0);
  CHECK(g.attributes(2, 0) == 0.5);
  // Labels are assigned by first appearance: genetic=0, theory=1.
  REQUIRE(g.labels.has_value());
  CHECK((*g.labels)[0] == 0);
  CHECK((*g.labels)[1] == 0);
  CHECK((*g.labels)[2] == 1);
  REQUIRE(g.node_ids.has_value());
  CHECK((*g.node_ids)[0] == "n1");
  CHECK(g.adjacency.coeff(0, 1) == 1.0);
  CHECK(g.adjacency.coeff(1, 0) == 1.0);
  CHECK(g.adjacency.coeff(0, 2) == 0.0);
}

TEST_CASE("content file with ragged columns names the line") {
  TempDir dir;
  write_text(dir.file("bad.content"),
             "n1\t1\t0\ta\n"
             "n2\t0\tb\n");
  write_text(dir.file("bad.cites"), "");
  try {
    grafica::load_content_cites(dir.file("bad.content"), dir.file("bad.cites"));
    FAIL("expected ParseError");
  } catch (const grafica::ParseError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
}

TEST_CASE("duplicate content ids are rejected") {
  TempDir dir;
  write_text(dir.file("dup.content"),
             "n1\t1\t0\ta\n"
             "n1\t0\t1\tb\n");
  write_text(dir.file("dup.cites"), "");
  CHECK_THROWS_AS(
      grafica::load_content_cites(dir.file("dup.content"), dir.file("dup.cites")),
      grafica::ParseError);
}

TEST_CASE("empty content file is rejected") {
  TempDir dir;
  write_text(dir.file("empty.content"), "");
  write_text(dir.file("empty.cites"), "");
  CHECK_THROWS_AS(grafica::load_content_cites(dir.file("empty.content"),
                                              dir.file("empty.cites")),
                  grafica::StructuralError);
}

TEST_CASE("missing file raises an io error") {
  TempDir dir;
  CHECK_THROWS_AS(grafica::load_content_cites(dir.file("nope.content"),
                                              dir.file("nope.cites")),
                  grafica::IoError);
}

TEST_CASE("CRLF content parses like LF") {
  TempDir dir;
  write_text(dir.file("crlf.content"), "n1\t1\t0\ta\r\nn2\t0\t1\tb\r\n");
  write_text(dir.file("crlf.cites"), "n1\tn2\r\n");
  grafica::AttributedGraph g =
      grafica::load_content_cites(dir.file("crlf.content"), dir.file("crlf.cites"));
  CHECK(g.n_nodes == 2);
  CHECK(g.n_edges() == 1);
}

TEST_CASE("csv pair loads a labeled two-node dataset") {
  TempDir dir;
  write_text(dir.file("nodes.csv"),
             "id,label,f1,f2\n"
             "a,x,1,2\n"
             "b,y,3,4\n");
  write_text(dir.file("edges.csv"),
             "src,dst,weight\n"
             "a,b,0.5\n");
  grafica::AttributedGraph g =
      grafica::load_csv_dataset(dir.file("nodes.csv"), dir.file("edges.csv"));
  CHECK(g.n_nodes == 2);
  CHECK(g.attributes(1, 1) == 4.0);
  CHECK(g.adjacency.coeff(0, 1) == 0.5);
  REQUIRE(g.labels.has_value());
  CHECK((*g.labels)[0] == 0);
  CHECK((*g.labels)[1] == 1);
}

TEST_CASE("csv without a label column yields an unlabeled graph") {
  TempDir dir;
  write_text(dir.file("nodes.csv"),
             "id,f1\n"
             "a,1\n"
             "b,2\n");
  write_text(dir.file("edges.csv"),
             "src,dst\n"
             "a,b\n");
  grafica::AttributedGraph g =
      grafica::load_csv_dataset(dir.file("nodes.csv"), dir.file("edges.csv"));
  CHECK_FALSE(g.labels.has_value());
  CHECK(g.adjacency.coeff(0, 1) == 1.0);
}

TEST_CASE("csv errors carry the offending id") {
  TempDir dir;
  write_text(dir.file("nodes.csv"),
             "id,f1\n"
             "a,1\n"
             "a,2\n");
  write_text(dir.file("edges.csv"), "src,dst\n");
  try {
    grafica::load_csv_dataset(dir.file("nodes.csv"), dir.file("edges.csv"));
    FAIL("expected ParseError");
  } catch (const grafica::ParseError& e) {
    CHECK(std::string(e.what()).find("'a'") != std::string::npos);
  }

  write_text(dir.file("nodes2.csv"),
             "id,f1\n"
             "a,1\n"
             "b,2\n");
  write_text(dir.file("edges2.csv"),
             "src,dst\n"
             "a,ghost\n");
  try {
    grafica::load_csv_dataset(dir.file("nodes2.csv"), dir.file("edges2.csv"));
    FAIL("expected ParseError");
  } catch (const grafica::ParseError& e) {
    CHECK(std::string(e.what()).find("'ghost'") != std::string::npos);
  }
}

TEST_CASE("ragged csv rows are rejected with a line number") {
  TempDir dir;
  write_text(dir.file("nodes.csv"),
             "id,f1,f2\n"
             "a,1,2\n"
             "b,3\n");
  write_text(dir.file("edges.csv"), "src,dst\n");
  try {
    grafica::load_csv_dataset(dir.file("nodes.csv"), dir.file("edges.csv"));
    FAIL("expected ParseError");
  } catch (const grafica::ParseError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
}

TEST_CASE("sbm extremes produce exact cliques") {
  grafica::SbmParams params;
  params.n_nodes = 24;
  params.k = 3;
  params.p_in = 1.0;
  params.p_out = 0.0;
  params.attr_dim = 3;
  params.center_separation = 4.0;
  params.attr_noise_sigma = 0.5;
  params.seed = 5;
  grafica::AttributedGraph g = grafica::generate_sbm(params);

  REQUIRE(g.labels.has_value());
  // Every within-block pair joined, no cross-block edge.
  for (Eigen::Index i = 0; i < g.n_nodes; ++i)
    for (Eigen::Index j = i + 1; j < g.n_nodes; ++j) {
      const bool same =
          (*g.labels)[static_cast<std::size_t>(i)] ==
          (*g.labels)[static_cast<std::size_t>(j)];
      CHECK(g.adjacency.coeff(i, j) == (same ? 1.0 : 0.0));
    }

  // k disconnected components: the normalized Laplacian has k zero
  // eigenvalues.
  auto spec = grafica::eig_sym(Eigen::MatrixXd(grafica::normalized_laplacian(g)));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(spec.eigenvalues(i)) <= 1e-10);
  CHECK(spec.eigenvalues(3) > 1e-6);
}

TEST_CASE("noise-free sbm attributes coincide within a block") {
  grafica::SbmParams params;
  params.n_nodes = 12;
  params.k = 4;
  params.p_in = 0.5;
  params.p_out = 0.1;
  params.attr_dim = 4;
  params.center_separation = 3.0;
  params.attr_noise_sigma = 0.0;
  params.seed = 9;
  grafica::AttributedGraph g = grafica::generate_sbm(params);
  REQUIRE(g.labels.has_value());
  for (Eigen::Index i = 0; i < g.n_nodes; ++i)
    for (Eigen::Index j = i + 1; j < g.n_nodes; ++j)
      if ((*g.labels)[static_cast<std::size_t>(i)] ==
          (*g.labels)[static_cast<std::size_t>(j)])
        CHECK((g.attributes.row(i) - g.attributes.row(j)).norm() == 0.0);

  // Distinct-block centers sit exactly center_separation apart.
  CHECK((g.attributes.row(0) - g.attributes.row(g.n_nodes - 1)).norm() ==
        doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("sbm edge counts respect a four-sigma binomial bound") {
  grafica::SbmParams params;
  params.n_nodes = 200;
  params.k = 4;
  params.p_in = 0.2;
  params.p_out = 0.02;
  params.attr_dim = 4;
  params.center_separation = 5.0;
  params.attr_noise_sigma = 1.0;
  params.seed = 17;
  grafica::AttributedGraph g = grafica::generate_sbm(params);

  REQUIRE(g.labels.has_value());
  double within_pairs = 0.0;
  double cross_pairs = 0.0;
  double within_edges = 0.0;
  double cross_edges = 0.0;
  for (Eigen::Index i = 0; i < g.n_nodes; ++i)
    for (Eigen::Index j = i + 1; j < g.n_nodes; ++j) {
      const bool same =
          (*g.labels)[static_cast<std::size_t>(i)] ==
          (*g.labels)[static_cast<std::size_t>(j)];
      (same ? within_pairs : cross_pairs) += 1.0;
      if (g.adjacency.coeff(i, j) != 0.0)
        (same ? within_edges : cross_edges) += 1.0;
    }
  const double mean_in = within_pairs * 0.2;
  const double sd_in = std::sqrt(within_pairs * 0.2 * 0.8);
  CHECK(std::abs(within_edges - mean_in) <= 4.0 * sd_in);
  const double mean_out = cross_pairs * 0.02;
  const double sd_out = std::sqrt(cross_pairs * 0.02 * 0.98);
  CHECK(std::abs(cross_edges - mean_out) <= 4.0 * sd_out);
}

TEST_CASE("sbm generation is deterministic per seed") {
  grafica::SbmParams params;
  params.n_nodes = 60;
  params.k = 3;
  params.p_in = 0.3;
  params.p_out = 0.05;
  params.attr_dim = 3;
  params.center_separation = 4.0;
  params.attr_noise_sigma = 1.0;
  params.seed = 23;
  grafica::AttributedGraph a = grafica::generate_sbm(params);
  grafica::AttributedGraph b = grafica::generate_sbm(params);
  CHECK((a.attributes - b.attributes).cwiseAbs().maxCoeff() == 0.0);
  CHECK(Eigen::MatrixXd(a.adjacency - b.adjacency).cwiseAbs().maxCoeff() == 0.0);

  params.seed = 24;
  grafica::AttributedGraph c = grafica::generate_sbm(params);
  CHECK((a.attributes - c.attributes).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("csv write then load round-trips a generated graph") {
  grafica::SbmParams params;
  params.n_nodes = 40;
  params.k = 2;
  params.p_in = 0.4;
  params.p_out = 0.05;
  params.attr_dim = 2;
  params.center_separation = 3.0;
  params.attr_noise_sigma = 0.7;
  params.seed = 31;
  grafica::AttributedGraph g = grafica::generate_sbm(params);

  TempDir dir;
  grafica::write_csv_dataset(g, dir.file("nodes.csv"), dir.file("edges.csv"));
  grafica::AttributedGraph back =
      grafica::load_csv_dataset(dir.file("nodes.csv"), dir.file("edges.csv"));

  REQUIRE(back.n_nodes == g.n_nodes);
  // Shortest round-trip formatting makes the reload exact, not approximate.
  CHECK((back.attributes - g.attributes).cwiseAbs().maxCoeff() == 0.0);
  CHECK(Eigen::MatrixXd(back.adjacency - g.adjacency).cwiseAbs().maxCoeff() ==
        0.0);
  REQUIRE(back.labels.has_value());
  CHECK(*back.labels == *g.labels);
}

TEST_CASE("results round-trip through json byte-for-byte") {
  grafica::SbmParams params;
  params.n_nodes = 60;
  params.k = 3;
  params.p_in = 0.3;
  params.p_out = 0.03;
  params.attr_dim = 3;
  params.center_separation = 5.0;
  params.attr_noise_sigma = 1.0;
  params.seed = 37;
  grafica::AttributedGraph g = grafica::generate_sbm(params);
  grafica::RunConfig cfg;
  cfg.k = 3;
  cfg.selection = grafica::SelectionMode::kInternalCost;
  cfg.seed = 2;
  grafica::RunResult result = grafica::grafica_run(g, cfg);

  TempDir dir;
  grafica::write_results(result, dir.file("run.json"));
  grafica::RunResult back = grafica::read_results(dir.file("run.json"));
  CHECK(grafica::result_to_json(back).dump() ==
        grafica::result_to_json(result).dump());

  // The document on disk ends with exactly one newline.
  std::string text = read_text(dir.file("run.json"));
  REQUIRE_FALSE(text.empty());
  CHECK(text.back() == '\n');
  CHECK(text[text.size() - 2] != '\n');
}

TEST_CASE("filter response files are written exactly") {
  TempDir dir;
  grafica::FilterCoefficients constant;
  constant.coeffs = Eigen::VectorXd(2);
  constant.coeffs << 1.0, 0.0;
  grafica::write_filter_response(constant, {0.0, 1.0, 2.0},
                                 dir.file("const.tsv"));
  CHECK(read_text(dir.file("const.tsv")) == "0\t1\n1\t1\n2\t1\n");

  grafica::FilterCoefficients ramp;
  ramp.coeffs = Eigen::VectorXd(2);
  ramp.coeffs << 0.0, 1.0;
  grafica::write_filter_response(ramp, {0.0, 1.0, 2.0}, dir.file("ramp.tsv"));
  CHECK(read_text(dir.file("ramp.tsv")) == "0\t0\n1\t1\n2\t2\n");
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(grafica::format_double(0.1) == "0.1");
  CHECK(grafica::format_double(1.0) == "1");
  CHECK(grafica::format_double(-2.5e-7) == "-2.5e-07");
  const double third = 1.0 / 3.0;
  CHECK(std::stod(grafica::format_double(third)) == third);
}
