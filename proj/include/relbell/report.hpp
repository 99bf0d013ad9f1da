#ifndef RELBELL_REPORT_HPP
#define RELBELL_REPORT_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Flat-file output: CSV tables, key=value run manifests, and minimal SVG
// line plots.

namespace relbell::report
{

inline constexpr int csv_significant_digits = 12;

/// Number formatted with 12 significant digits, '.' decimal separator.
inline std::string fmt_num(double v)
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(csv_significant_digits) << v;
    return os.str();
}

struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row)
    {
        if (row.size() != header.size())
            throw std::logic_error("CsvTable: row width does not match header");
        rows.push_back(std::move(row));
    }

    [[nodiscard]] std::string str() const
    {
        std::string out;
        auto line = [&out](std::vector<std::string> const& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i)
                    out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(header);
        for (auto const& r : rows)
            line(r);
        return out;
    }
};

inline void write_file(std::string const& path, std::string const& content)
{
    std::ofstream f{path, std::ios::binary};
    if (!f)
        throw std::runtime_error("cannot open " + path + " for writing");
    f << content;
    if (!f)
        throw std::runtime_error("write failed for " + path);
}

inline std::string read_file(std::string const& path)
{
    std::ifstream f{path, std::ios::binary};
    if (!f)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

/// Parses a CSV written by CsvTable (no quoting) into header and rows.
inline CsvTable parse_csv(std::string const& text)
{
    CsvTable t;
    std::istringstream in{text};
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls{line};
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            t.add_row(std::move(cells));
        }
    }
    return t;
}

/// Sidecar key=value file. Keys keep insertion order.
class Manifest
{
  public:
    void set(std::string const& key, std::string value)
    {
        for (auto& kv : entries_)
            if (kv.first == key) {
                kv.second = std::move(value);
                return;
            }
        entries_.emplace_back(key, std::move(value));
    }
    void set(std::string const& key, double value) { set(key, fmt_num(value)); }

    [[nodiscard]] std::string get(std::string const& key) const
    {
        for (auto const& kv : entries_)
            if (kv.first == key)
                return kv.second;
        throw std::out_of_range("manifest has no key " + key);
    }

    [[nodiscard]] std::string str() const
    {
        std::string out;
        for (auto const& [k, v] : entries_)
            out += k + "=" + v + "\n";
        return out;
    }

    static Manifest parse(std::string const& text)
    {
        Manifest m;
        std::istringstream in{text};
        std::string line;
        while (std::getline(in, line)) {
            auto const eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            m.set(line.substr(0, eq), line.substr(eq + 1));
        }
        return m;
    }

  private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

inline std::string manifest_path(std::string const& data_path) { return data_path + ".manifest"; }

// Arguments joined with single spaces; arguments containing spaces are
// double-quoted.
inline std::string join_command_line(std::vector<std::string> const& args)
{
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i)
            out += ' ';
        if (args[i].find(' ') != std::string::npos)
            out += '"' + args[i] + '"';
        else
            out += args[i];
    }
    return out;
}

inline std::vector<std::string> split_command_line(std::string const& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false, have = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
            have = true;
        } else if (c == ' ' && !quoted) {
            if (have)
                out.push_back(cur);
            cur.clear();
            have = false;
        } else {
            cur += c;
            have = true;
        }
    }
    if (have)
        out.push_back(cur);
    return out;
}

struct Series
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Polyline plot with axes, tick labels and a legend.
inline std::string render_svg(std::vector<Series> const& series, std::string const& xlabel,
                              std::string const& ylabel, std::string const& title = {})
{
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (auto const& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmax > xmin)) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (!(ymax > ymin)) {
        double const pad = ymin == 0 ? 1.0 : std::abs(ymin) * 0.1;
        ymin -= pad;
        ymax += pad;
    }
    double const W = 640, H = 420, left = 80, right = 170, top = 40, bottom = 60;
    double const pw = W - left - right, ph = H - top - bottom;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + (1 - (y - ymin) / (ymax - ymin)) * ph; };
    static char const* const colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                         "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        os << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\">" << title
           << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double const xv = xmin + (xmax - xmin) * i / 4, yv = ymin + (ymax - ymin) * i / 4;
        os << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 18
           << "\" text-anchor=\"middle\">" << fmt_num(std::round(xv * 1e4) / 1e4) << "</text>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">"
           << std::setprecision(4) << yv << std::setprecision(6) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
       << xlabel << "</text>\n";
    os << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << top + ph / 2 << ")\">" << ylabel << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        auto const& s = series[k];
        char const* col = colors[k % 8];
        os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << (i ? " " : "") << sx(s.x[i]) << "," << sy(s.y[i]);
        os << "\"/>\n";
        double const ly = top + 14 + 18 * static_cast<double>(k);
        os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36
           << "\" y2=\"" << ly << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">" << s.label
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace relbell::report

#endif
