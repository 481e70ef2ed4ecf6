#include "rcf/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rcf {

NormalizationStats compute_stats(const Trajectory& traj, Eigen::Index n_train) {
  if (n_train < 1 || n_train > traj.n())
    throw std::invalid_argument("compute_stats: n_train out of range");
  const auto block = traj.samples.topRows(n_train);
  NormalizationStats stats;
  stats.mean = block.colwise().mean();
  Eigen::MatrixXd centered = block.rowwise() - stats.mean.transpose();
  stats.std =
      (centered.array().square().colwise().sum() / double(n_train)).sqrt();
  for (Eigen::Index j = 0; j < stats.std.size(); ++j) {
    if (!(stats.std[j] > 0.0))
      throw std::runtime_error(
          "compute_stats: zero standard deviation in component " +
          std::to_string(j));
  }
  return stats;
}

Trajectory normalize(const Trajectory& traj, const NormalizationStats& stats) {
  Trajectory out = traj;
  out.samples = (traj.samples.rowwise() - stats.mean.transpose()).array().rowwise() /
                stats.std.transpose().array();
  return out;
}

Trajectory denormalize(const Trajectory& traj, const NormalizationStats& stats) {
  Trajectory out = traj;
  out.samples =
      (traj.samples.array().rowwise() * stats.std.transpose().array()).matrix();
  out.samples.rowwise() += stats.mean.transpose();
  return out;
}

void write_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << "t";
  for (Eigen::Index j = 0; j < traj.dim(); ++j) out << ",u" << j;
  out << "\n";
  char buf[32];
  for (Eigen::Index i = 0; i < traj.n(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", traj.t0 + double(i) * traj.dt);
    out << buf;
    for (Eigen::Index j = 0; j < traj.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", traj.samples(i, j));
      out << ',' << buf;
    }
    out << "\n";
  }
}

Trajectory read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty file");
  std::vector<std::vector<double>> rows;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> row;
    while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
    if (row.empty()) continue;
    times.push_back(row.front());
    rows.emplace_back(row.begin() + 1, row.end());
  }
  if (rows.empty()) throw std::runtime_error("read_csv: no samples in " + path);
  Trajectory traj;
  traj.samples.resize(Eigen::Index(rows.size()), Eigen::Index(rows[0].size()));
  for (Eigen::Index i = 0; i < traj.n(); ++i)
    for (Eigen::Index j = 0; j < traj.dim(); ++j)
      traj.samples(i, j) = rows[size_t(i)][size_t(j)];
  traj.t0 = times.front();
  traj.dt = times.size() > 1 ? times[1] - times[0] : 0.0;
  return traj;
}

}  // namespace rcf
