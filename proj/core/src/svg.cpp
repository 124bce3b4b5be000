#include "graphdis/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace graphdis {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", x);
  return buf;
}

}  // namespace

std::string adjacency_contact_sheet(const std::vector<std::vector<HeatmapCell>>& grid,
                                    int cell_pixels) {
  constexpr int kMargin = 8;
  constexpr int kLabel = 14;
  std::size_t cols = 0;
  for (const auto& row : grid) cols = std::max(cols, row.size());
  const int pitch = cell_pixels + kMargin;
  const int width = static_cast<int>(cols) * pitch + kMargin;
  const int height = static_cast<int>(grid.size()) * (pitch + kLabel) + kMargin;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t r = 0; r < grid.size(); ++r) {
    for (std::size_t c = 0; c < grid[r].size(); ++c) {
      const HeatmapCell& cell = grid[r][c];
      const int x0 = kMargin + static_cast<int>(c) * pitch;
      const int y0 = kMargin + static_cast<int>(r) * (pitch + kLabel);
      const int n = cell.sample.n_max;
      const double px = n > 0 ? static_cast<double>(cell_pixels) / n : 0.0;
      os << "<g>\n<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << cell_pixels
         << "\" height=\"" << cell_pixels << "\" fill=\"none\" stroke=\"#999\"/>\n";
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double shade =
              cell.sample.adj_at(i, j) * cell.sample.mask[i] * cell.sample.mask[j];
          if (shade < 0.01) continue;
          os << "<rect x=\"" << fixed(x0 + j * px) << "\" y=\"" << fixed(y0 + i * px)
             << "\" width=\"" << fixed(px) << "\" height=\"" << fixed(px)
             << "\" fill=\"#08306b\" fill-opacity=\"" << fixed(shade) << "\"/>\n";
        }
      }
      os << "<text x=\"" << x0 << "\" y=\"" << y0 + cell_pixels + kLabel - 3
         << "\" font-size=\"10\" font-family=\"monospace\">" << escape(cell.label)
         << "</text>\n</g>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace graphdis
