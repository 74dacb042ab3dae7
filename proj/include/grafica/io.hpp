#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "grafica/graph.hpp"
#include "grafica/pipeline.hpp"

#include <nlohmann/json.hpp>

namespace grafica {

/// Citation-network disk format: one node per line in the content file,
/// tab-separated `<id> <f_1> ... <f_p> <label>`; one directed citation per
/// line in the cites file, `<target_id> <source_id>`. Citations naming an id
/// absent from the content file are skipped; *skipped_citations (optional)
/// receives their count.
AttributedGraph load_content_cites(const std::filesystem::path& content_path,
                                   const std::filesystem::path& cites_path,
                                   std::size_t* skipped_citations = nullptr);

/// Generic CSV pair: nodes.csv with header `id,label,f1..fp` (label column
/// optional), edges.csv with header `src,dst` plus optional `weight`.
AttributedGraph load_csv_dataset(const std::filesystem::path& nodes_path,
                                 const std::filesystem::path& edges_path);

/// Writes a graph back out in the CSV pair format; numbers use shortest
/// round-trip formatting so load(write(g)) reproduces g exactly.
void write_csv_dataset(const AttributedGraph& graph,
                       const std::filesystem::path& nodes_path,
                       const std::filesystem::path& edges_path);

struct SbmParams {
  Eigen::Index n_nodes = 0;
  int k = 1;
  double p_in = 0.0;
  double p_out = 0.0;
  Eigen::Index attr_dim = 1;
  double center_separation = 0.0;
  double attr_noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Attributed stochastic block model with near-equal blocks, planted labels,
/// and Gaussian attribute blobs whose centers sit at mutual distance
/// center_separation (requires attr_dim >= k). Deterministic per seed.
AttributedGraph generate_sbm(const SbmParams& params);

/// RunResult <-> JSON. Serialization is canonical: fixed key order, shortest
/// round-trip numbers, non-finite values as null.
nlohmann::ordered_json result_to_json(const RunResult& result);
RunResult result_from_json(const nlohmann::json& doc);

/// Writes any JSON document with a trailing newline.
void write_json_document(const nlohmann::ordered_json& doc,
                         const std::filesystem::path& path);
nlohmann::json read_json_document(const std::filesystem::path& path);

void write_results(const RunResult& result, const std::filesystem::path& path);
RunResult read_results(const std::filesystem::path& path);

/// Two-column text file: lambda <tab> H(lambda) per grid point.
void write_filter_response(const FilterCoefficients& h,
                           const std::vector<double>& grid,
                           const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly this double.
std::string format_double(double value);

}  // namespace grafica
