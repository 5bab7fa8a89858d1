#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "scatfun/channel.hpp"
#include "scatfun/harness.hpp"

namespace scatfun::io {

/// round-trippable, byte-stable float formatting used by every CSV writer
std::string format_double(double v);

// Scattering grids: header "k,m,value", one active cell per row, cells listed
// cover-box by cover-box in stored order.
void write_grid_csv(std::ostream& os, const channel::ScatteringGrid& grid);
void write_grid_csv(const std::string& path, const channel::ScatteringGrid& grid);
channel::ScatteringGrid read_grid_csv(const std::string& path, const channel::GridSpec& grid,
                                      const channel::SupportCover& cover);

// Cover files: one "a b" pair per line.
void write_cover_file(const std::string& path, const channel::SupportCover& cover);
channel::SupportCover read_cover_file(const std::string& path, int L);

// MSE curves: header "J,rel_mse,variance".
void write_mse_csv(std::ostream& os, const std::vector<harness::CurvePoint>& points);
void write_mse_csv(const std::string& path, const std::vector<harness::CurvePoint>& points);

}  // namespace scatfun::io
