#include "mcc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mcc/error.hpp"

namespace mcc {

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw InvalidInput("cannot parse number '" + std::string(s) + "'");
  return v;
}

std::filesystem::path header_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".json");
  return p;
}

namespace {

nlohmann::json axis_json(const Axis& a) {
  return {{"lower", a.lower}, {"upper", a.upper}, {"n_points", a.n_points}};
}

Axis axis_from(const nlohmann::json& j) {
  return Axis{j.at("lower").get<double>(), j.at("upper").get<double>(), j.at("n_points").get<std::size_t>()};
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

void write_density(const std::filesystem::path& csv, const GridDensity& d) {
  const Grid& g = d.grid();
  {
    CsvWriter w(csv, g.dim() == 1 ? std::vector<std::string>{"node", "value"}
                                  : std::vector<std::string>{"node1", "node2", "value"});
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point p = g.point(i);
      if (g.dim() == 1)
        w.row({p[0], d[i]});
      else
        w.row({p[0], p[1], d[i]});
    }
  }
  nlohmann::json h;
  if (g.dim() == 1) {
    h = axis_json(g.axis(0));
  } else {
    h["axes"] = {axis_json(g.axis(0)), axis_json(g.axis(1))};
  }
  h["description"] = d.description();
  write_text(header_path(csv), h.dump(2) + "\n");
}

GridDensity read_density(const std::filesystem::path& csv) {
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(read_text(header_path(csv)));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("bad density header for " + csv.string() + ": " + e.what());
  }
  Grid g = h.contains("axes") ? Grid(axis_from(h["axes"][0]), axis_from(h["axes"][1])) : Grid(axis_from(h));
  std::istringstream in(read_text(csv));
  std::string line;
  std::getline(in, line);
  std::vector<double> v;
  v.reserve(g.size());
  const std::size_t cols = g.dim() == 1 ? 2 : 3;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto parts = split(line);
    if (parts.size() != cols) throw InvalidInput("density csv row has wrong column count: " + line);
    v.push_back(parse_double(parts.back()));
  }
  if (v.size() != g.size()) throw InvalidInput("density csv row count does not match header grid");
  for (double x : v)
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("density csv has a negative or non-finite value");
  return GridDensity::unchecked(std::move(g), std::move(v), h.value("description", std::string{}));
}

void write_function(const std::filesystem::path& csv, const GridFunction& f, const std::string& value_name) {
  const Grid& g = f.grid;
  CsvWriter w(csv, g.dim() == 1 ? std::vector<std::string>{"node", value_name}
                                : std::vector<std::string>{"node1", "node2", value_name});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point p = g.point(i);
    if (g.dim() == 1)
      w.row({p[0], f[i]});
    else
      w.row({p[0], p[1], f[i]});
  }
}

struct CsvWriter::Impl {
  std::ofstream out;
  std::string buf;
};

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
    : impl_(std::make_unique<Impl>()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  impl_->out.open(path, std::ios::binary | std::ios::trunc);
  if (!impl_->out) {
    throw ResourceError("cannot open " + path.string() + " for writing");
  }
  row_text(columns);
}

void CsvWriter::row(const std::vector<double>& values) {
  auto& b = impl_->buf;
  b.clear();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) b.push_back(',');
    b += format_double(values[i]);
  }
  b.push_back('\n');
  impl_->out << b;
}

void CsvWriter::row_text(const std::vector<std::string>& values) {
  auto& b = impl_->buf;
  b.clear();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) b.push_back(',');
    b += values[i];
  }
  b.push_back('\n');
  impl_->out << b;
}

void CsvWriter::close() {
  if (impl_ && impl_->out.is_open()) impl_->out.close();
}

CsvWriter::~CsvWriter() { close(); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ResourceError("cannot open " + path.string() + " for writing");
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read file " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace mcc
