#pragma once

#include "sdenet/results.hpp"
#include "sdenet/system.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace sdenet {

using Json = nlohmann::json;

// Rows as arrays; NaN becomes null.
Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j);
Json vector_to_json(const Eigen::VectorXd& v);
Json adjacency_to_json(const Adjacency& a);
Adjacency adjacency_from_json(const Json& j);

// Shortest round-trip decimal representation.
std::string format_double(double v);

// CSV with header time,z1..zp,u1..uq. read_dataset reports the offending
// row (1-based, header = row 1) on malformed input.
void write_dataset(const std::filesystem::path& path, const TimeSeriesData& data);
TimeSeriesData read_dataset(const std::filesystem::path& path);

// Grid values with header time,y1..yp.
void write_trajectory_csv(const std::filesystem::path& path, const std::vector<double>& times,
                          const Eigen::MatrixXd& y);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// Dataset sidecar: system matrices, generation settings and the measured-node
// truth adjacency.
struct DatasetMeta {
  std::string kind;
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  double lambda_meas = 0.0;
  double sigma_e = 0.0;
  std::string input_mode;
  SystemMatrices system;
  Adjacency truth;
};

Json meta_to_json(const DatasetMeta& meta);
DatasetMeta meta_from_json(const Json& j);

Json summary_to_json(const PosteriorSummary& s);

// Sidecar path convention: data.csv -> data.json.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

}  // namespace sdenet
