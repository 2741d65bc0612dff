#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tsq/quadrature.hpp"
#include "tsq/scenario.hpp"

namespace tsq {

namespace {

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

void open_binary(std::ofstream& out, const std::string& path) {
  out.open(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
}

unsigned char channel(double v) {
  // v in [0, 1]; round half away from zero for byte stability
  const long b = std::lround(v * 255.0);
  return static_cast<unsigned char>(std::min(255L, std::max(0L, b)));
}

}  // namespace

namespace emit {

void write_snapshot_csv(const std::string& path, const ComplexField<double>& field) {
  std::ofstream out;
  open_binary(out, path);
  out << "x,y,re_rho,im_rho\n";
  const auto& g = field.grid;
  for (Index i = 0; i < field.values.size(); ++i) {
    const double x = g.x(g.ix_of(i));
    const double y = g.dims() == 2 ? g.y(g.iy_of(i)) : 0.0;
    const auto z = field.values[i];
    out << fmt(x, 9) << ',' << fmt(y, 9) << ',' << fmt(z.real(), 9) << ',' << fmt(z.imag(), 9)
        << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_diverging_ppm(const std::string& path, const ComplexField<double>& field,
                         bool imaginary_part, double max_abs_value) {
  if (field.grid.dims() != 2) throw ShapeError("write_diverging_ppm: requires a 2D field");
  const auto& g = field.grid;
  const double scale = max_abs_value > 0 ? max_abs_value : 1.0;

  std::ofstream out;
  open_binary(out, path);
  out << "P6\n" << g.nx() << ' ' << g.ny() << "\n255\n";
  std::vector<unsigned char> row(std::size_t(g.nx()) * 3);
  for (Index iy = g.ny() - 1; iy >= 0; --iy) {  // top row = ymax
    for (Index ix = 0; ix < g.nx(); ++ix) {
      const auto z = field.values[g.index(ix, iy)];
      const double v = (imaginary_part ? z.imag() : z.real()) / scale;
      unsigned char r, gg, b;
      if (v >= 0) {
        r = 255;
        gg = b = channel(1.0 - v);
      } else {
        r = gg = channel(1.0 + v);
        b = 255;
      }
      row[std::size_t(ix) * 3] = r;
      row[std::size_t(ix) * 3 + 1] = gg;
      row[std::size_t(ix) * 3 + 2] = b;
    }
    out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_abs_pgm(const std::string& path, const ComplexField<double>& field,
                   double max_abs_value) {
  if (field.grid.dims() != 2) throw ShapeError("write_abs_pgm: requires a 2D field");
  const auto& g = field.grid;
  const double scale = max_abs_value > 0 ? max_abs_value : 1.0;

  std::ofstream out;
  open_binary(out, path);
  out << "P5\n" << g.nx() << ' ' << g.ny() << "\n255\n";
  std::vector<unsigned char> row(std::size_t(g.nx()));
  for (Index iy = g.ny() - 1; iy >= 0; --iy) {
    for (Index ix = 0; ix < g.nx(); ++ix)
      row[std::size_t(ix)] = channel(std::abs(field.values[g.index(ix, iy)]) / scale);
    out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<std::string> emit_outputs(
    RunReport& report, const std::vector<std::pair<double, ComplexField<double>>>& snapshots,
    const ScenarioConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.run.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");

  std::vector<std::string> files;
  char name[64];

  if (cfg.run.emit_csv) {
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
      std::snprintf(name, sizeof(name), "snapshot_%03zu.csv", i);
      write_snapshot_csv((dir / name).string(), snapshots[i].second);
      files.emplace_back(name);
    }
  }

  if (cfg.run.emit_heatmaps && !snapshots.empty() && snapshots.front().second.grid.dims() == 2) {
    // shared scale per channel across the whole sequence
    double max_re = 0, max_im = 0, max_mod = 0;
    for (const auto& [t, f] : snapshots) {
      for (Index i = 0; i < f.values.size(); ++i) {
        max_re = std::max(max_re, std::abs(f.values[i].real()));
        max_im = std::max(max_im, std::abs(f.values[i].imag()));
        max_mod = std::max(max_mod, std::abs(f.values[i]));
      }
    }
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
      std::snprintf(name, sizeof(name), "heat_%03zu_re.ppm", i);
      write_diverging_ppm((dir / name).string(), snapshots[i].second, false, max_re);
      files.emplace_back(name);
      std::snprintf(name, sizeof(name), "heat_%03zu_im.ppm", i);
      write_diverging_ppm((dir / name).string(), snapshots[i].second, true, max_im);
      files.emplace_back(name);
      std::snprintf(name, sizeof(name), "heat_%03zu_abs.pgm", i);
      write_abs_pgm((dir / name).string(), snapshots[i].second, max_mod);
      files.emplace_back(name);
    }
  }

  report.files = files;

  const std::string report_path = (dir / "report.txt").string();
  std::ofstream out;
  open_binary(out, report_path);
  out << format_report(report);
  if (!out) throw IoError("write failed for '" + report_path + "'");
  files.emplace_back("report.txt");
  return files;
}

}  // namespace emit

std::string format_report(const RunReport& r) {
  std::string out;
  auto kv = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  kv("scenario", r.scenario);
  if (r.a_s_re) kv("a_s_re", fmt(*r.a_s_re, 12));
  if (r.a_s_im) kv("a_s_im", fmt(*r.a_s_im, 12));
  if (r.p_s) kv("p_s", fmt(*r.p_s, 12));
  if (r.drift) kv("drift", fmt(*r.drift, 12));
  if (r.continuity_residual_max) kv("continuity_residual_max", fmt(*r.continuity_residual_max, 12));
  for (const auto& [k, v] : r.detector_probabilities) kv(k, fmt(v, 12));
  if (r.absorbed_fraction) kv("absorbed_fraction", fmt(*r.absorbed_fraction, 12));
  for (const auto& [k, v] : r.extra) kv(k, fmt(v, 12));
  for (std::size_t i = 0; i < r.files.size(); ++i) {
    char key[32];
    std::snprintf(key, sizeof(key), "file_%03zu", i);
    kv(key, r.files[i]);
  }
  return out;
}

}  // namespace tsq
