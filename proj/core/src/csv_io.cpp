#include "scatfun/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace scatfun::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_grid_csv(std::ostream& os, const channel::ScatteringGrid& grid) {
    os << "k,m,value\n";
    const channel::GridSpec& g = grid.grid;
    for (const channel::Box& box : grid.cover.boxes) {
        const int ka = channel::mod(box.a, g.L) * g.Ktilde;
        const int mb = channel::mod(box.b, g.L) * g.P;
        for (int i = 0; i < g.Ktilde; ++i)
            for (int m = 0; m < g.P; ++m)
                os << (ka + i) << "," << (mb + m) << ","
                   << format_double(grid.values(ka + i, mb + m)) << "\n";
    }
}

void write_grid_csv(const std::string& path, const channel::ScatteringGrid& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write grid CSV: " + path);
    write_grid_csv(out, grid);
    if (!out) throw ValidationError("write failed for grid CSV: " + path);
}

channel::ScatteringGrid read_grid_csv(const std::string& path, const channel::GridSpec& grid,
                                      const channel::SupportCover& cover) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open grid CSV: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "k,m,value")
        throw ParseError("grid CSV " + path + ": expected header \"k,m,value\"");
    channel::ScatteringGrid out{
        Eigen::MatrixXd::Zero(grid.delay_taps(), grid.doppler_bins()), grid, cover, 0.0};
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        int k, m;
        double v;
        char comma1, comma2;
        if (!(ss >> k >> comma1 >> m >> comma2 >> v) || comma1 != ',' || comma2 != ',')
            throw ParseError("grid CSV " + path + ": malformed row at line " +
                             std::to_string(lineno));
        if (k < 0 || k >= grid.delay_taps() || m < 0 || m >= grid.doppler_bins())
            throw ParseError("grid CSV " + path + ": cell out of range at line " +
                             std::to_string(lineno));
        out.values(k, m) = v;
    }
    return out;
}

void write_cover_file(const std::string& path, const channel::SupportCover& cover) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write cover file: " + path);
    for (const channel::Box& box : cover.boxes) out << box.a << " " << box.b << "\n";
}

channel::SupportCover read_cover_file(const std::string& path, int L) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open cover file: " + path);
    std::vector<channel::Box> boxes;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        channel::Box box;
        if (!(ss >> box.a >> box.b))
            throw ParseError("cover file " + path + ": expected \"a b\" at line " +
                             std::to_string(lineno));
        boxes.push_back(box);
    }
    return channel::build_cover(boxes, L);
}

void write_mse_csv(std::ostream& os, const std::vector<harness::CurvePoint>& points) {
    os << "J,rel_mse,variance\n";
    for (const harness::CurvePoint& p : points)
        os << p.J << "," << format_double(p.rel_mse) << "," << format_double(p.variance)
           << "\n";
}

void write_mse_csv(const std::string& path, const std::vector<harness::CurvePoint>& points) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write MSE CSV: " + path);
    write_mse_csv(out, points);
}

}  // namespace scatfun::io
