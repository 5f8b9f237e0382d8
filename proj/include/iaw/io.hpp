#pragma once

#include <string>
#include <vector>

#include "iaw/field.hpp"

namespace iaw {

// Trajectory container for persistence: named fields sampled on a shared
// time grid. Stored as a short text header followed by raw little-endian
// 64-bit floats (times, then frame-major field data).
struct TrajectoryFile {
    Grid grid;
    std::vector<std::string> field_names;
    std::vector<double> times;
    // data[frame][field]
    std::vector<std::vector<GridField>> data;
};

void write_trajectory(const std::string& path, const TrajectoryFile& t);
TrajectoryFile read_trajectory(const std::string& path);

// RFC-4180 CSV writer; cells are quoted only when needed.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    void row(const std::vector<std::string>& cells);
    static std::string num(double x);

  private:
    void* out_;
};

void ensure_directory(const std::string& path);

} // namespace iaw
