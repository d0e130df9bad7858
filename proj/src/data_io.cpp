#include "superlin/data_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "superlin/error.hpp"

namespace superlin {

namespace {

[[noreturn]] void fail_at(const std::string& source, std::size_t line,
                          const std::string& message) {
  std::ostringstream os;
  os << source << ":" << line << ": " << message;
  throw Error(ErrorCode::data_format, os.str());
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_number(const std::string& field, double& out) {
  const char* first = field.data();
  const char* last = first + field.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

struct Row {
  std::vector<double> values;
  std::size_t line;
};

struct Parsed {
  std::string label;
  std::vector<Row> rows;
};

// Reads comment metadata, the header and numeric rows; `columns` gives the
// required column names and fixes the order of Row::values.
Parsed parse_table(const std::string& text, const std::string& source,
                   const std::vector<std::string>& columns) {
  Parsed parsed;
  std::vector<std::size_t> order;  // order[k] = field index of columns[k]
  std::size_t header_fields = 0;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      if (body.rfind("label:", 0) == 0) parsed.label = trim(body.substr(6));
      continue;
    }
    const auto fields = split_fields(line);
    if (order.empty()) {
      for (const auto& name : columns) {
        const auto it = std::find(fields.begin(), fields.end(), name);
        if (it == fields.end())
          fail_at(source, line_no, "header lacks column '" + name + "'");
        order.push_back(static_cast<std::size_t>(it - fields.begin()));
      }
      header_fields = fields.size();
      continue;
    }
    if (fields.size() != header_fields) {
      std::ostringstream os;
      os << "expected " << header_fields << " fields, found " << fields.size();
      fail_at(source, line_no, os.str());
    }
    Row row{{}, line_no};
    for (std::size_t k = 0; k < columns.size(); ++k) {
      double value = 0.0;
      if (!parse_number(fields[order[k]], value))
        fail_at(source, line_no,
                "column '" + columns[k] + "': not a finite number: '" +
                    fields[order[k]] + "'");
      row.values.push_back(value);
    }
    parsed.rows.push_back(std::move(row));
  }
  if (order.empty()) fail_at(source, line_no, "empty file: no header found");
  if (parsed.rows.empty()) fail_at(source, line_no, "no data rows");
  return parsed;
}

void check_point(const std::string& source, std::size_t line, double mu,
                 double p) {
  if (!(mu > 0.0)) {
    std::ostringstream os;
    os << "mu must be positive, got " << mu;
    fail_at(source, line, os.str());
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << "p must lie in [0, 1], got " << p;
    fail_at(source, line, os.str());
  }
}

}  // namespace

ResponseCurve parse_curve(const std::string& text, const std::string& source) {
  auto parsed = parse_table(text, source, {"mu", "p"});
  for (const auto& row : parsed.rows)
    check_point(source, row.line, row.values[0], row.values[1]);
  std::stable_sort(parsed.rows.begin(), parsed.rows.end(),
                   [](const Row& a, const Row& b) {
                     return a.values[0] < b.values[0];
                   });
  std::vector<CurvePoint> points;
  for (std::size_t i = 0; i < parsed.rows.size(); ++i) {
    const auto& row = parsed.rows[i];
    if (i > 0 && row.values[0] == parsed.rows[i - 1].values[0]) {
      std::ostringstream os;
      os << "duplicate mu=" << format_double(row.values[0])
         << " (also on line " << parsed.rows[i - 1].line << ")";
      fail_at(source, row.line, os.str());
    }
    points.push_back({row.values[0], row.values[1]});
  }
  if (points.size() < 2)
    fail_at(source, parsed.rows.front().line,
            "a response curve needs at least 2 points");
  return ResponseCurve(std::move(points), parsed.label);
}

TimeResolvedResponse parse_grid(const std::string& text,
                                const std::string& source) {
  auto parsed = parse_table(text, source, {"t_ns", "mu", "p"});
  // time -> mu -> (p, line)
  std::map<double, std::map<double, std::pair<double, std::size_t>>> cells;
  std::map<double, std::size_t> mu_axis;  // mu -> first line seen
  for (const auto& row : parsed.rows) {
    const double t = row.values[0], mu = row.values[1], p = row.values[2];
    check_point(source, row.line, mu, p);
    auto [it, inserted] = cells[t].emplace(mu, std::make_pair(p, row.line));
    if (!inserted) {
      std::ostringstream os;
      os << "duplicate cell t_ns=" << format_double(t)
         << ", mu=" << format_double(mu) << " (also on line "
         << it->second.second << ")";
      fail_at(source, row.line, os.str());
    }
    mu_axis.emplace(mu, row.line);
  }
  std::vector<double> times;
  std::vector<ResponseCurve> curves;
  for (const auto& [t, slice] : cells) {
    std::vector<CurvePoint> points;
    for (const auto& [mu, first_line] : mu_axis) {
      const auto it = slice.find(mu);
      if (it == slice.end()) {
        std::ostringstream os;
        os << "ragged grid: time slice t_ns=" << format_double(t)
           << " has no row for mu=" << format_double(mu) << " (mu first seen "
           << "on line " << first_line << ")";
        throw Error(ErrorCode::data_format, source + ": " + os.str());
      }
      points.push_back({mu, it->second.first});
    }
    if (points.size() < 2)
      fail_at(source, slice.begin()->second.second,
              "each time slice needs at least 2 mu values");
    times.push_back(t);
    curves.emplace_back(std::move(points), parsed.label);
  }
  return TimeResolvedResponse(std::move(times), std::move(curves),
                              parsed.label);
}

ResponseCurve load_curve(const std::filesystem::path& path) {
  return parse_curve(read_text(path), path.string());
}

TimeResolvedResponse load_grid(const std::filesystem::path& path) {
  return parse_grid(read_text(path), path.string());
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string render_curve(const ResponseCurve& curve) {
  std::string out;
  if (!curve.label().empty()) out += "# label: " + curve.label() + "\n";
  out += "mu,p\n";
  for (const auto& pt : curve.points())
    out += format_double(pt.mu) + "," + format_double(pt.p) + "\n";
  return out;
}

std::string render_grid(const TimeResolvedResponse& grid) {
  std::string out;
  if (!grid.label().empty()) out += "# label: " + grid.label() + "\n";
  out += "t_ns,mu,p\n";
  for (std::size_t i = 0; i < grid.times().size(); ++i)
    for (const auto& pt : grid.curves()[i].points())
      out += format_double(grid.times()[i]) + "," + format_double(pt.mu) +
             "," + format_double(pt.p) + "\n";
  return out;
}

void write_curve(const ResponseCurve& curve,
                 const std::filesystem::path& path) {
  write_text(path, render_curve(curve));
}

void write_grid(const TimeResolvedResponse& grid,
                const std::filesystem::path& path) {
  write_text(path, render_grid(grid));
}

std::string render_table(const Table& table, TableFormat format) {
  if (format == TableFormat::csv) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c)
      out += (c ? "," : "") + table.columns[c];
    out += "\n";
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ",";
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>)
                out += format_double(v);
              else if constexpr (std::is_same_v<T, std::int64_t>)
                out += std::to_string(v);
              else if constexpr (std::is_same_v<T, std::string>)
                out += v;
            },
            row[c]);
      }
      out += "\n";
    }
    return out;
  }
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>)
              obj[table.columns[c]] = nullptr;
            else
              obj[table.columns[c]] = v;
          },
          row[c]);
    }
    rows.push_back(std::move(obj));
  }
  return rows.dump(2) + "\n";
}

Table scan_table(std::span<const AttackPoint> points) {
  Table table;
  table.columns = {"mu",   "t",    "p_f0",          "p_f1",   "p_h0",
                   "p_h1", "qber", "transmittance", "loss_db"};
  for (const auto& pt : points) {
    table.rows.push_back({pt.mu,
                          pt.t ? Cell{*pt.t} : Cell{},
                          pt.clicks.p_f0,
                          pt.clicks.p_f1,
                          pt.clicks.p_h0,
                          pt.clicks.p_h1,
                          pt.qber,
                          pt.transmittance,
                          pt.loss_db});
  }
  return table;
}

std::string render_scan(std::span<const AttackPoint> points,
                        TableFormat format) {
  if (points.empty())
    throw Error(ErrorCode::invalid_argument, "scan table is empty");
  return render_table(scan_table(points), format);
}

void write_scan(std::span<const AttackPoint> points,
                const std::filesystem::path& path, TableFormat format) {
  write_text(path, render_scan(points, format));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open for writing: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::io, "write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string sha256_file(const std::filesystem::path& path) {
  const std::string data = read_text(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1)
    throw Error(ErrorCode::io, "sha256 failed for " + path.string());
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

}  // namespace superlin
