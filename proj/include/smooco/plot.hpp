#pragma once

#include <string>
#include <vector>

#include "smooco/csv.hpp"

namespace smooco {

// One curve; when band_lo/band_hi are non-empty (same length as x) a shaded
// band is drawn behind the line.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> band_lo;
  std::vector<double> band_hi;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<PlotSeries> series;
};

// Self-contained SVG text; output is a pure function of the PlotSpec, so
// identical inputs give identical bytes.
std::string render_svg(const PlotSpec& spec, int width = 960, int height = 600);

void write_svg(const std::string& path, const PlotSpec& spec);

struct NamedPlot {
  std::string name;  // file stem, e.g. "regret_total"
  PlotSpec spec;
};

// Per-algorithm mean +/- one std across trials of the cumulative regret
// columns in a per-step table: total, imbalance part, switching part.
std::vector<NamedPlot> regret_plots(const CsvTable& steps);

// Window-size sweep: mean regret (with std band) and mean per-window solve
// time, one curve per solver strategy.
std::vector<NamedPlot> sweep_plots(const CsvTable& sweep);

}  // namespace smooco
