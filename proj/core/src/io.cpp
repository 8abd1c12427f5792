#include "dhj/io.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace dhj {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

JsonWriter& JsonWriter::begin_object() {
  separator();
  out_ += '{';
  need_comma_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  out_ += '}';
  need_comma_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  separator();
  out_ += '[';
  need_comma_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  out_ += ']';
  need_comma_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
  separator();
  out_ += '"';
  out_ += k;
  out_ += "\":";
  if (!need_comma_.empty()) need_comma_.back() = false;  // next value attaches
  return *this;
}

void JsonWriter::separator() {
  if (!need_comma_.empty()) {
    if (need_comma_.back()) out_ += ',';
    need_comma_.back() = true;
  }
}

JsonWriter& JsonWriter::value(double v) {
  separator();
  if (std::isfinite(v)) {
    out_ += format_double(v);
  } else {
    out_ += "null";
  }
  return *this;
}

JsonWriter& JsonWriter::value(int v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(long v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separator();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& s) {
  separator();
  out_ += '"';
  for (char c : s) {
    if (c == '"' || c == '\\') out_ += '\\';
    out_ += c;
  }
  out_ += '"';
  return *this;
}

JsonWriter& JsonWriter::value(const char* s) { return value(std::string(s)); }

JsonWriter& JsonWriter::value(const Vec& v) {
  begin_array();
  for (int d = 0; d < v.size(); ++d) value(v[d]);
  return end_array();
}

JsonWriter& JsonWriter::null() {
  separator();
  out_ += "null";
  return *this;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << content;
  if (!out) throw ConfigError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_field_csv(const std::string& path, const GridField& u) {
  const int dim = u.dim();
  const std::vector<GridField> grad = numerical_gradient(u);
  std::string out;
  out.reserve(u.size() * 64);
  out += dim == 1 ? "q_1,u,du_1\n" : "q_1,q_2,u,du_1,du_2\n";
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    const Vec q = u.node_point(idx);
    out += format_double(q[0]);
    if (dim == 2) {
      out += ',';
      out += format_double(q[1]);
    }
    out += ',';
    out += format_double(u.values[idx]);
    for (int d = 0; d < dim; ++d) {
      out += ',';
      out += format_double(grad[d].values[idx]);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

namespace {

std::vector<double> parse_csv_row(const std::string& line, const std::string& path) {
  std::vector<double> cells;
  const char* p = line.data();
  const char* end = line.data() + line.size();
  while (p < end) {
    double v = 0.0;
    const auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc()) throw ConfigError("bad numeric cell in " + path);
    cells.push_back(v);
    p = res.ptr;
    if (p < end) {
      if (*p != ',') throw ConfigError("expected ',' in " + path);
      ++p;
    }
  }
  return cells;
}

}  // namespace

GridField read_field_csv(const std::string& path, const TorusDomain& domain, InterpKind interp) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open field file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("empty field file: " + path);
  int dim = 0;
  if (header.rfind("q_1,u,du_1", 0) == 0) {
    dim = 1;
  } else if (header.rfind("q_1,q_2,u,du_1,du_2", 0) == 0) {
    dim = 2;
  } else {
    throw ConfigError("unrecognized field CSV header in " + path);
  }
  if (dim != domain.dim) {
    throw ConfigError("field file dimension does not match the problem: " + path);
  }

  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_csv_row(line, path));
    if (rows.back().size() != static_cast<std::size_t>(2 * dim + 1)) {
      throw ConfigError("wrong column count in " + path);
    }
  }
  if (rows.size() < 2) throw ConfigError("field file has too few rows: " + path);

  std::array<int, 2> nodes{static_cast<int>(rows.size()), 1};
  if (dim == 2) {
    // row-major: q_2 cycles fastest
    int n1 = 0;
    const double q20 = rows[0][1];
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r][1] == q20) {
        n1 = static_cast<int>(r);
        break;
      }
    }
    if (n1 <= 0 || rows.size() % n1 != 0) {
      throw ConfigError("field rows are not a row-major grid in " + path);
    }
    nodes = {static_cast<int>(rows.size()) / n1, n1};
  }

  GridField u = GridField::zeros(domain, nodes, interp);
  for (std::size_t idx = 0; idx < rows.size(); ++idx) {
    const Vec q = u.node_point(idx);
    for (int d = 0; d < dim; ++d) {
      if (std::abs(rows[idx][d] - q[d]) > 1e-9 * domain.periods[d]) {
        throw ConfigError("node coordinates in " + path + " do not match the expected grid");
      }
    }
    u.values[idx] = rows[idx][dim];
    if (!std::isfinite(u.values[idx])) throw ConfigError("non-finite field value in " + path);
  }
  return u;
}

void write_trace_csv(const std::string& path, const ConvergenceTrace& trace) {
  std::string out = "t,value_error,grad_error\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    out += format_double(trace.times[i]);
    out += ',';
    out += format_double(trace.value_error[i]);
    out += ',';
    out += format_double(trace.grad_error[i]);
    out += '\n';
  }
  write_text_file(path, out);
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<double>& deviations) {
  if (traj.empty()) throw ConfigError("write_trajectory_csv: empty trajectory");
  const int dim = static_cast<int>(traj.front().z.q.size());
  std::string out = dim == 1 ? "t,q_1,p_1,deviation\n" : "t,q_1,q_2,p_1,p_2,deviation\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out += format_double(traj[i].t);
    for (int d = 0; d < dim; ++d) {
      out += ',';
      out += format_double(traj[i].z.q[d]);
    }
    for (int d = 0; d < dim; ++d) {
      out += ',';
      out += format_double(traj[i].z.p[d]);
    }
    out += ',';
    out += format_double(i < deviations.size() ? deviations[i] : 0.0);
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace dhj
