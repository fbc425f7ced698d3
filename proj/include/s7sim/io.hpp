#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace s7sim::io {

/// Minimal numeric-table CSV writer.
class Csv {
  public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
    void add_row(const std::vector<std::string>& cells);
    void add_row(const std::vector<double>& cells);
    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string format_double(double v);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Parse a simple numeric CSV with a header row; returns column-major data.
std::map<std::string, std::vector<double>> read_csv_columns(const std::string& path);

/// FNV-1a hash of a string, hex-encoded; used for config fingerprints.
std::string fnv1a_hex(const std::string& data);

struct Series {
    std::string name;
    std::vector<double> x, y;
};

/// Self-contained SVG line plot (log-scale y optional).
std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<Series>& series,
                          bool log_y = false);

}  // namespace s7sim::io
