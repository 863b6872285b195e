#pragma once
// Bit-stable CSV and JSONL emission: 17 significant digits, round-trip exact,
// fixed column orders.

#include <string>
#include <vector>

#include "vortexbodies/dynamics.hpp"
#include "vortexbodies/limitsys.hpp"

namespace vb {

std::string format_g17(double v);

class CsvWriter {
  public:
    explicit CsvWriter(std::string path);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void close();
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::string buffer_;
    bool closed_{false};
    std::size_t columns_{0};
};

// Column layout shared by both systems:
// t, body<k>.{hx,hy,theta,vx,vy,omega}..., vortex<k>.{x,y}..., energy, circ<k>..., margin
std::vector<std::string> trajectory_columns(int bodies, int vortices);

// Row builders; "vortices" are the blobs for the full system and the point
// vortices followed by the blobs for the limit system.
std::vector<double> trajectory_row(const DynamicsEngine& eng, const FullState& s);
std::vector<double> trajectory_row(const LimitEngine& eng, const LimitState& s);

}  // namespace vb
