#include "s7sim/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace s7sim::io {

void Csv::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size()) throw std::invalid_argument("csv row width mismatch");
    rows_.push_back(cells);
}

void Csv::add_row(const std::vector<double>& cells) {
    std::vector<std::string> out;
    for (double v : cells) out.push_back(format_double(v));
    add_row(out);
}

std::string Csv::str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
    os << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    }
    return os.str();
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::vector<double>> read_csv_columns(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
    std::vector<std::string> names;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) names.push_back(cell);
    }
    std::map<std::string, std::vector<double>> cols;
    for (const auto& n : names) cols[n];
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t i = 0;
        while (std::getline(ss, cell, ',') && i < names.size()) cols[names[i++]].push_back(std::stod(cell));
        if (i != names.size()) throw std::runtime_error("ragged csv row in " + path);
    }
    return cols;
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {
std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}
}  // namespace

std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<Series>& series,
                          bool log_y) {
    const double width = 720, height = 480;
    const double ml = 70, mr = 160, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double y = s.y[i];
            if (log_y) {
                if (y <= 0.0) continue;
                y = std::log10(y);
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double y) {
        if (log_y) y = std::log10(std::max(y, 1e-300));
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
    };
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
       << xml_escape(title) << "</text>\n";
    // axes
    os << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
       << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
       << height - mb << "\" stroke=\"black\"/>\n";
    char buf[64];
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        std::snprintf(buf, sizeof(buf), "%.4g", fx);
        os << "<text x=\"" << px(fx) << "\" y=\"" << height - mb + 18
           << "\" text-anchor=\"middle\">" << buf << "</text>\n";
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        std::snprintf(buf, sizeof(buf), "%.4g", log_y ? std::pow(10.0, fy) : fy);
        os << "<text x=\"" << ml - 8 << "\" y=\""
           << height - mb - (height - mt - mb) * i / 4.0 + 4
           << "\" text-anchor=\"end\">" << buf << "</text>\n";
    }
    os << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
       << "\" text-anchor=\"middle\">" << xml_escape(xlabel) << "</text>\n";
    os << "<text x=\"18\" y=\"" << (mt + height - mb) / 2
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << (mt + height - mb) / 2
       << ")\">" << xml_escape(ylabel) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % 8];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (log_y && series[s].y[i] <= 0.0) continue;
            os << px(series[s].x[i]) << ',' << py(series[s].y[i]) << ' ';
        }
        os << "\"/>\n";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (log_y && series[s].y[i] <= 0.0) continue;
            os << "<circle cx=\"" << px(series[s].x[i]) << "\" cy=\"" << py(series[s].y[i])
               << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        }
        os << "<text x=\"" << width - mr + 10 << "\" y=\"" << mt + 16 * s + 10 << "\" fill=\""
           << color << "\">" << xml_escape(series[s].name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace s7sim::io
