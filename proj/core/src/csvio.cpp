#include "vortexbodies/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace vb {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::string path) : path_(std::move(path)) {}

void CsvWriter::header(const std::vector<std::string>& columns) {
    columns_ = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += columns[i];
    }
    buffer_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (columns_ && values.size() != columns_)
        throw std::logic_error("csv row width does not match the header");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += format_g17(values[i]);
    }
    buffer_ += '\n';
}

void CsvWriter::close() {
    if (closed_) return;
    std::ofstream out(path_, std::ios::binary);
    out << buffer_;
    closed_ = true;
}

std::vector<std::string> trajectory_columns(int bodies, int vortices) {
    std::vector<std::string> c = {"t"};
    for (int k = 0; k < bodies; ++k) {
        const std::string b = "body" + std::to_string(k) + ".";
        for (const char* f : {"hx", "hy", "theta", "vx", "vy", "omega"}) c.push_back(b + f);
    }
    for (int k = 0; k < vortices; ++k) {
        const std::string v = "vortex" + std::to_string(k) + ".";
        c.push_back(v + "x");
        c.push_back(v + "y");
    }
    c.push_back("energy");
    for (int k = 0; k < bodies; ++k) c.push_back("circ" + std::to_string(k));
    c.push_back("margin");
    return c;
}

std::vector<double> trajectory_row(const DynamicsEngine& eng, const FullState& s) {
    std::vector<double> r = {s.t};
    for (int k = 0; k < s.body_count(); ++k) {
        r.push_back(s.cfg.bodies[k].pose.h.x);
        r.push_back(s.cfg.bodies[k].pose.h.y);
        r.push_back(s.cfg.bodies[k].pose.theta);
        r.push_back(s.p[3 * k]);
        r.push_back(s.p[3 * k + 1]);
        r.push_back(s.p[3 * k + 2]);
    }
    for (const auto& b : s.vorticity.blobs) {
        r.push_back(b.z.x);
        r.push_back(b.z.y);
    }
    r.push_back(eng.energy(s).total);
    for (int k = 0; k < s.body_count(); ++k) r.push_back(eng.measured_circulation(s, k));
    std::vector<Vec2> zs;
    for (const auto& b : s.vorticity.blobs) zs.push_back(b.z);
    r.push_back(admissibility(s.cfg, zs, 0.0).margin());
    return r;
}

std::vector<double> trajectory_row(const LimitEngine& eng, const LimitState& s) {
    std::vector<double> r = {s.t};
    for (int k = 0; k < s.body_count(); ++k) {
        r.push_back(s.cfg.bodies[k].pose.h.x);
        r.push_back(s.cfg.bodies[k].pose.h.y);
        r.push_back(s.cfg.bodies[k].pose.theta);
        r.push_back(s.p[3 * k]);
        r.push_back(s.p[3 * k + 1]);
        r.push_back(s.p[3 * k + 2]);
    }
    for (const auto& v : s.vorticity.points) {
        r.push_back(v.z.x);
        r.push_back(v.z.y);
    }
    for (const auto& b : s.vorticity.blobs) {
        r.push_back(b.z.x);
        r.push_back(b.z.y);
    }
    r.push_back(eng.energy(s).total);
    for (int k = 0; k < s.body_count(); ++k) r.push_back(eng.measured_circulation(s, k));
    std::vector<Vec2> zs;
    for (const auto& v : s.vorticity.points) zs.push_back(v.z);
    for (const auto& b : s.vorticity.blobs) zs.push_back(b.z);
    r.push_back(admissibility(s.cfg, zs, 0.0).margin());
    return r;
}

}  // namespace vb
