#include "smooco/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "smooco/errors.hpp"

namespace smooco {
namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range pad_range(double lo, double hi) {
  if (!(lo <= hi)) return {0.0, 1.0};
  if (lo == hi) {
    const double pad = (lo == 0.0) ? 1.0 : std::abs(lo) * 0.1;
    return {lo - pad, hi + pad};
  }
  const double pad = (hi - lo) * 0.05;
  return {lo - pad, hi + pad};
}

double required_column(const CsvTable& table, const std::string& name,
                       const std::vector<std::string>& row, int col) {
  (void)table;
  if (col < 0 || col >= static_cast<int>(row.size())) {
    throw ParameterError("plot input is missing column '" + name + "'");
  }
  return parse_double(row[col]);
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

Stats mean_std(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  for (double v : xs) s.mean += v;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return s;
  double acc = 0.0;
  for (double v : xs) acc += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(acc / static_cast<double>(xs.size() - 1));
  return s;
}

}  // namespace

std::string render_svg(const PlotSpec& spec, int width, int height) {
  const double left = 70.0, right = 20.0, top = 45.0, bottom = 55.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool any = false;
  for (const PlotSeries& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double ylo = s.band_lo.size() == s.x.size() ? s.band_lo[i] : s.y[i];
      const double yhi = s.band_hi.size() == s.x.size() ? s.band_hi[i] : s.y[i];
      if (!any) {
        xmin = xmax = s.x[i];
        ymin = std::min(ylo, s.y[i]);
        ymax = std::max(yhi, s.y[i]);
        any = true;
      } else {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, std::min(ylo, s.y[i]));
        ymax = std::max(ymax, std::max(yhi, s.y[i]));
      }
    }
  }
  const Range xr = pad_range(xmin, xmax);
  const Range yr = pad_range(ymin, ymax);

  const auto sx = [&](double x) {
    return left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w;
  };
  const auto sy = [&](double y) {
    return top + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h;
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << escape_xml(spec.title)
      << "</text>\n";

  // Axes frame and ticks.
  out << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\""
      << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / ticks;
    const double px = sx(fx);
    out << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(top + plot_h)
        << "\" x2=\"" << fmt(px) << "\" y2=\"" << fmt(top + plot_h + 5)
        << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(top + plot_h + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << fmt_tick(fx) << "</text>\n";
    const double fy = yr.lo + (yr.hi - yr.lo) * i / ticks;
    const double py = sy(fy);
    out << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(py)
        << "\" x2=\"" << fmt(left) << "\" y2=\"" << fmt(py)
        << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << fmt_tick(fy) << "</text>\n";
  }
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\">" << escape_xml(spec.xlabel) << "</text>\n";
  out << "<text x=\"18\" y=\"" << fmt(top + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\" transform=\"rotate(-90 18 " << fmt(top + plot_h / 2)
      << ")\">" << escape_xml(spec.ylabel) << "</text>\n";

  // Bands first so lines draw on top of them.
  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const PlotSeries& s = spec.series[si];
    const char* color = kPalette[si % kPaletteSize];
    if (s.band_lo.size() == s.x.size() && s.band_hi.size() == s.x.size() &&
        !s.x.empty()) {
      out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" "
          << "stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        out << fmt(sx(s.x[i])) << "," << fmt(sy(s.band_hi[i])) << " ";
      }
      for (std::size_t i = s.x.size(); i-- > 0;) {
        out << fmt(sx(s.x[i])) << "," << fmt(sy(s.band_lo[i]));
        if (i) out << " ";
      }
      out << "\"/>\n";
    }
  }
  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const PlotSeries& s = spec.series[si];
    const char* color = kPalette[si % kPaletteSize];
    if (s.x.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) out << " ";
      out << fmt(sx(s.x[i])) << "," << fmt(sy(s.y[i]));
    }
    out << "\"/>\n";
  }

  // Legend, top-left inside the frame.
  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const char* color = kPalette[si % kPaletteSize];
    const double ly = top + 14 + 16.0 * static_cast<double>(si);
    out << "<line x1=\"" << fmt(left + 10) << "\" y1=\"" << fmt(ly)
        << "\" x2=\"" << fmt(left + 34) << "\" y2=\"" << fmt(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(left + 40) << "\" y=\"" << fmt(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape_xml(spec.series[si].label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_svg(const std::string& path, const PlotSpec& spec) {
  write_lines(path, {render_svg(spec)});
}

std::vector<NamedPlot> regret_plots(const CsvTable& steps) {
  const int c_alg = steps.column("algorithm");
  const int c_t = steps.column("t");
  const int c_total = steps.column("cum_regret");
  const int c_imb = steps.column("cum_imb_regret");
  const int c_sw = steps.column("cum_sw_regret");
  if (c_alg < 0 || c_t < 0 || c_total < 0 || c_imb < 0 || c_sw < 0) {
    throw ParameterError(
        "per-step table needs columns algorithm,t,cum_regret,cum_imb_regret,"
        "cum_sw_regret");
  }

  // algorithm -> t -> samples across trials, per metric column.
  struct Cell {
    std::vector<double> total, imb, sw;
  };
  std::vector<std::string> order;  // first-appearance order of algorithms
  std::map<std::string, std::map<int, Cell>> by_alg;
  for (const auto& row : steps.rows) {
    const std::string alg = row[c_alg];
    if (by_alg.find(alg) == by_alg.end()) order.push_back(alg);
    const int t = static_cast<int>(parse_int(row[c_t]));
    Cell& cell = by_alg[alg][t];
    cell.total.push_back(required_column(steps, "cum_regret", row, c_total));
    cell.imb.push_back(required_column(steps, "cum_imb_regret", row, c_imb));
    cell.sw.push_back(required_column(steps, "cum_sw_regret", row, c_sw));
  }

  struct Metric {
    const char* name;
    const char* title;
    std::vector<double> Cell::* member;
  };
  const Metric metrics[] = {
      {"regret_total", "Cumulative regret vs offline benchmark", &Cell::total},
      {"regret_imbalance", "Cumulative load-imbalance regret", &Cell::imb},
      {"regret_switching", "Cumulative switching regret", &Cell::sw},
  };

  std::vector<NamedPlot> plots;
  for (const Metric& metric : metrics) {
    PlotSpec spec;
    spec.title = metric.title;
    spec.xlabel = "online step";
    spec.ylabel = "cumulative regret";
    for (const std::string& alg : order) {
      PlotSeries series;
      series.label = alg;
      for (const auto& [t, cell] : by_alg[alg]) {
        const Stats st = mean_std(cell.*(metric.member));
        series.x.push_back(t);
        series.y.push_back(st.mean);
        series.band_lo.push_back(st.mean - st.stddev);
        series.band_hi.push_back(st.mean + st.stddev);
      }
      spec.series.push_back(std::move(series));
    }
    plots.push_back({metric.name, std::move(spec)});
  }
  return plots;
}

std::vector<NamedPlot> sweep_plots(const CsvTable& sweep) {
  const int c_strat = sweep.column("strategy");
  const int c_size = sweep.column("size");
  const int c_mean = sweep.column("mean_regret");
  const int c_std = sweep.column("std_regret");
  const int c_time = sweep.column("mean_solve_time");
  if (c_strat < 0 || c_size < 0 || c_mean < 0 || c_std < 0 || c_time < 0) {
    throw ParameterError(
        "sweep table needs columns strategy,size,mean_regret,std_regret,"
        "mean_solve_time");
  }

  struct Point {
    int size;
    double mean, stddev, time;
  };
  std::vector<std::string> order;
  std::map<std::string, std::vector<Point>> by_strat;
  for (const auto& row : sweep.rows) {
    const std::string strat = row[c_strat];
    if (by_strat.find(strat) == by_strat.end()) order.push_back(strat);
    Point p;
    p.size = static_cast<int>(parse_int(row[c_size]));
    p.mean = parse_double(row[c_mean]);
    p.stddev = parse_double(row[c_std]);
    p.time = parse_double(row[c_time]);
    by_strat[strat].push_back(p);
  }
  for (auto& [strat, pts] : by_strat) {
    std::sort(pts.begin(), pts.end(),
              [](const Point& a, const Point& b) { return a.size < b.size; });
  }

  PlotSpec regret;
  regret.title = "Mean regret by fixed window size";
  regret.xlabel = "window size";
  regret.ylabel = "mean cumulative regret";
  PlotSpec time;
  time.title = "Mean solve time per committed window";
  time.xlabel = "window size";
  time.ylabel = "seconds";
  for (const std::string& strat : order) {
    PlotSeries sr, st;
    sr.label = strat;
    st.label = strat;
    for (const Point& p : by_strat[strat]) {
      sr.x.push_back(p.size);
      sr.y.push_back(p.mean);
      sr.band_lo.push_back(p.mean - p.stddev);
      sr.band_hi.push_back(p.mean + p.stddev);
      st.x.push_back(p.size);
      st.y.push_back(p.time);
    }
    regret.series.push_back(std::move(sr));
    time.series.push_back(std::move(st));
  }
  return {{"sweep_regret", std::move(regret)}, {"sweep_time", std::move(time)}};
}

}  // namespace smooco
