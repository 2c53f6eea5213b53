#include "sdenet/io.hpp"

#include "sdenet/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sdenet {

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(std::isfinite(m(r, c)) ? Json(m(r, c)) : Json(nullptr));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  if (!j.is_array()) throw DataError("expected a matrix (array of rows)");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) throw DataError("ragged matrix in JSON");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& v = j[r][c];
      m(r, c) = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    }
  }
  return m;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(std::isfinite(v(i)) ? Json(v(i)) : Json(nullptr));
  return out;
}

Json adjacency_to_json(const Adjacency& a) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c) ? 1 : 0);
    rows.push_back(std::move(row));
  }
  return rows;
}

Adjacency adjacency_from_json(const Json& j) {
  const Eigen::MatrixXd m = matrix_from_json(j);
  return (m.array() != 0.0).matrix();
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write " + path.string());
  return os;
}

}  // namespace

void write_dataset(const std::filesystem::path& path, const TimeSeriesData& data) {
  std::ofstream os = open_out(path);
  os << "time";
  for (int r = 0; r < data.num_nodes(); ++r) os << ",z" << r + 1;
  for (int i = 0; i < data.num_inputs(); ++i) os << ",u" << i + 1;
  os << "\n";
  for (int k = 0; k < data.num_measurements(); ++k) {
    os << format_double(data.times[k]);
    for (int r = 0; r < data.num_nodes(); ++r) os << ',' << format_double(data.Z(k, r));
    for (int i = 0; i < data.num_inputs(); ++i) os << ',' << format_double(data.U(k, i));
    os << "\n";
  }
  if (!os) throw DataError("failed writing " + path.string());
}

TimeSeriesData read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  const auto header = split(line);
  if (header.empty() || trim(header[0]) != "time") {
    throw DataError(path.string() + ": row 1: first column must be 'time'");
  }
  int p = 0, q = 0;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string h = trim(header[c]);
    if (!h.empty() && h[0] == 'z' && q == 0) {
      ++p;
    } else if (!h.empty() && h[0] == 'u') {
      ++q;
    } else {
      throw DataError(path.string() + ": row 1: unexpected column '" + h + "' (expected z1..zp then u1..uq)");
    }
  }
  if (p == 0) throw DataError(path.string() + ": no measurement columns");

  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw DataError(path.string() + ": row " + std::to_string(row_no) + ": expected " +
                      std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()));
    }
    std::vector<double> vals(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string cell = trim(cells[c]);
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), vals[c]);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(vals[c])) {
        throw DataError(path.string() + ": row " + std::to_string(row_no) + ", column " + std::to_string(c + 1) +
                        ": invalid number '" + cell + "'");
      }
    }
    if (!times.empty() && !(vals[0] > times.back())) {
      throw DataError(path.string() + ": row " + std::to_string(row_no) + ": time " + cells[0] +
                      " is not greater than the previous time");
    }
    times.push_back(vals[0]);
    rows.push_back(std::move(vals));
  }
  if (rows.size() < 2) throw DataError(path.string() + ": need at least two measurement rows");
  TimeSeriesData data;
  data.times = times;
  data.Z.resize(static_cast<Eigen::Index>(rows.size()), p);
  data.U.resize(static_cast<Eigen::Index>(rows.size()), q);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (int r = 0; r < p; ++r) data.Z(static_cast<Eigen::Index>(k), r) = rows[k][1 + r];
    for (int i = 0; i < q; ++i) data.U(static_cast<Eigen::Index>(k), i) = rows[k][1 + p + i];
  }
  return data;
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<double>& times,
                          const Eigen::MatrixXd& y) {
  if (static_cast<Eigen::Index>(times.size()) != y.rows()) throw ArgumentError("times and trajectory rows differ");
  std::ofstream os = open_out(path);
  os << "time";
  for (Eigen::Index r = 0; r < y.cols(); ++r) os << ",y" << r + 1;
  os << "\n";
  for (Eigen::Index k = 0; k < y.rows(); ++k) {
    os << format_double(times[k]);
    for (Eigen::Index r = 0; r < y.cols(); ++r) os << ',' << format_double(y(k, r));
    os << "\n";
  }
  if (!os) throw DataError("failed writing " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os = open_out(path);
  os << text;
  if (!os) throw DataError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": invalid JSON: " + e.what());
  }
}

Json meta_to_json(const DatasetMeta& meta) {
  Json j;
  j["kind"] = meta.kind;
  j["seed"] = meta.seed;
  j["snr_db"] = meta.snr_db;
  j["lambda_meas"] = meta.lambda_meas;
  j["sigma_e"] = meta.sigma_e;
  j["input_mode"] = meta.input_mode;
  j["measured"] = meta.system.measured;
  j["A"] = matrix_to_json(meta.system.A);
  j["B"] = matrix_to_json(meta.system.B);
  j["K"] = matrix_to_json(meta.system.K);
  j["truth_adjacency"] = adjacency_to_json(meta.truth);
  return j;
}

DatasetMeta meta_from_json(const Json& j) {
  try {
    DatasetMeta m;
    m.kind = j.value("kind", "");
    m.seed = j.value("seed", std::uint64_t{0});
    m.snr_db = j.value("snr_db", 0.0);
    m.lambda_meas = j.value("lambda_meas", 0.0);
    m.sigma_e = j.value("sigma_e", 0.0);
    m.input_mode = j.value("input_mode", "");
    if (j.contains("A")) {
      m.system.A = matrix_from_json(j.at("A"));
      m.system.B = matrix_from_json(j.at("B"));
      m.system.K = matrix_from_json(j.at("K"));
      m.system.measured = j.at("measured").get<int>();
    }
    m.truth = adjacency_from_json(j.at("truth_adjacency"));
    return m;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed dataset sidecar: ") + e.what());
  }
}

Json summary_to_json(const PosteriorSummary& s) {
  Json j;
  j["nodes"] = s.nodes;
  j["blocks"] = s.blocks;
  j["lags"] = s.lags;
  j["kernel"] = std::string(to_string(s.kernel.kind));
  j["retained_draws"] = s.retained;
  j["link_prob"] = matrix_to_json(s.link_prob);
  j["s_map"] = adjacency_to_json(s.s_map);
  j["map_frequency"] = s.map_frequency;
  j["s_threshold"] = adjacency_to_json(s.s_threshold);
  j["gamma_mean"] = matrix_to_json(s.gamma_mean);
  j["beta1_mean"] = matrix_to_json(s.beta1_mean);
  j["beta2_mean"] = matrix_to_json(s.beta2_mean);
  j["sigma_mean"] = vector_to_json(s.sigma_mean);
  j["lambda_mean"] = s.lambda_mean;
  if (s.w_mean.size()) j["w_mean"] = matrix_to_json(s.w_mean);
  Json diag;
  auto move = [](const MoveStats& m) {
    return Json{{"proposed", m.proposed}, {"accepted", m.accepted}, {"rate", m.rate()}};
  };
  diag["trajectory"] = move(s.stats.trajectory);
  diag["switch"] = move(s.stats.switch_move);
  diag["update"] = move(s.stats.update_move);
  diag["numeric_rejections"] = s.stats.numeric_rejections;
  j["diagnostics"] = diag;
  return j;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p.replace_extension(".json");
  return p;
}

}  // namespace sdenet
