#include <sfo/io.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace sfo {

namespace {

std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string location(const std::string& path, std::size_t line_no) {
  return path + ":" + std::to_string(line_no) + ": ";
}

// Hands out non-blank lines with their 1-based numbers.
class LineReader {
 public:
  explicit LineReader(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines_.push_back(line);
    }
  }

  bool next(std::string& line, std::size_t& line_no) {
    while (cursor_ < lines_.size()) {
      const std::string& candidate = lines_[cursor_];
      ++cursor_;
      if (candidate.find_first_not_of(" \t") != std::string::npos) {
        line = candidate;
        line_no = cursor_;
        return true;
      }
    }
    return false;
  }

  std::string require(std::size_t& line_no, const char* what) {
    std::string line;
    if (!next(line, line_no))
      throw ParseError(path_ + ": unexpected end of file, expected " + std::string(what));
    return line;
  }

  void expect_end() {
    std::string line;
    std::size_t line_no = 0;
    if (next(line, line_no))
      throw ParseError(location(path_, line_no) + "trailing garbage: \"" + line + "\"");
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::vector<std::string> lines_;
  std::size_t cursor_ = 0;
};

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream stream(line);
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

std::vector<std::string> split_char(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == sep) {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

long parse_long(const std::string& token, const std::string& path, std::size_t line_no) {
  std::size_t consumed = 0;
  long value = 0;
  try {
    value = std::stol(token, &consumed);
  } catch (const std::exception&) {
    throw ParseError(location(path, line_no) + "expected integer, got \"" + token + "\"");
  }
  if (consumed != token.size())
    throw ParseError(location(path, line_no) + "expected integer, got \"" + token + "\"");
  return value;
}

double parse_real(const std::string& token, const std::string& path, std::size_t line_no) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &consumed);
  } catch (const std::exception&) {
    throw ParseError(location(path, line_no) + "expected number, got \"" + token + "\"");
  }
  if (consumed != token.size())
    throw ParseError(location(path, line_no) + "expected number, got \"" + token + "\"");
  return value;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to " + path + " failed");
}

std::string trim(const std::string& line) {
  const std::size_t begin = line.find_first_not_of(" \t");
  const std::size_t end = line.find_last_not_of(" \t");
  return begin == std::string::npos ? std::string() : line.substr(begin, end - begin + 1);
}

}  // namespace

std::pair<Mesh, Embedding> read_off(const std::string& path) {
  LineReader reader(path);
  std::size_t line_no = 0;

  if (trim(reader.require(line_no, "OFF header")) != "OFF")
    throw ParseError(location(path, line_no) + "expected OFF header");

  const auto counts = split_ws(reader.require(line_no, "counts line"));
  if (counts.size() != 3)
    throw ParseError(location(path, line_no) + "counts line must hold \"vertices faces edges\"");
  const long n = parse_long(counts[0], path, line_no);
  const long f = parse_long(counts[1], path, line_no);
  parse_long(counts[2], path, line_no);  // edge count is informational
  if (n < 0 || f < 0) throw ParseError(location(path, line_no) + "negative counts");

  Embedding x(n, 3);
  for (long v = 0; v < n; ++v) {
    const auto tokens = split_ws(reader.require(line_no, "vertex line"));
    if (tokens.size() != 3)
      throw ParseError(location(path, line_no) + "vertex line must hold exactly 3 coordinates");
    for (int c = 0; c < 3; ++c) x(v, c) = parse_real(tokens[static_cast<std::size_t>(c)], path, line_no);
  }

  std::vector<std::array<int, 3>> faces;
  faces.reserve(static_cast<std::size_t>(f));
  for (long i = 0; i < f; ++i) {
    const auto tokens = split_ws(reader.require(line_no, "face line"));
    if (tokens.empty()) throw ParseError(location(path, line_no) + "empty face line");
    const long arity = parse_long(tokens[0], path, line_no);
    if (arity != 3)
      throw NonTriangleFace(location(path, line_no) + "face has " + std::to_string(arity) +
                            " vertices, only triangles are supported");
    if (tokens.size() != 4)
      throw ParseError(location(path, line_no) + "triangle line must hold exactly 4 numbers");
    faces.push_back({static_cast<int>(parse_long(tokens[1], path, line_no)),
                     static_cast<int>(parse_long(tokens[2], path, line_no)),
                     static_cast<int>(parse_long(tokens[3], path, line_no))});
  }
  reader.expect_end();

  Mesh mesh = build_mesh(static_cast<int>(n), std::move(faces));
  return {std::move(mesh), std::move(x)};
}

void write_off(const std::string& path, const Mesh& mesh, const Embedding& x) {
  if (mesh.vertex_count == 0 || mesh.faces.empty())
    throw InvalidArgument("refusing to write an empty mesh");
  if (x.rows() != mesh.vertex_count || x.cols() != 3)
    throw DimensionMismatch("embedding must be " + std::to_string(mesh.vertex_count) + "x3");
  std::ofstream out = open_for_write(path);
  out << "OFF\n"
      << mesh.vertex_count << ' ' << mesh.face_count() << ' ' << mesh.edge_count() << '\n';
  for (int v = 0; v < mesh.vertex_count; ++v)
    out << fmt17(x(v, 0)) << ' ' << fmt17(x(v, 1)) << ' ' << fmt17(x(v, 2)) << '\n';
  for (const auto& [a, b, c] : mesh.faces) out << "3 " << a << ' ' << b << ' ' << c << '\n';
  finish_write(out, path);
}

std::pair<Mesh, Embedding> read_obj(const std::string& path) {
  LineReader reader(path);
  std::vector<std::array<double, 3>> coords;
  std::vector<std::array<int, 3>> faces;
  std::string line;
  std::size_t line_no = 0;
  while (reader.next(line, line_no)) {
    const auto tokens = split_ws(line);
    if (tokens[0] == "v") {
      if (tokens.size() < 4)
        throw ParseError(location(path, line_no) + "vertex line must hold 3 coordinates");
      coords.push_back({parse_real(tokens[1], path, line_no), parse_real(tokens[2], path, line_no),
                        parse_real(tokens[3], path, line_no)});
    } else if (tokens[0] == "f") {
      if (tokens.size() != 4)
        throw NonTriangleFace(location(path, line_no) + "only triangle faces are supported");
      std::array<int, 3> face{};
      for (int c = 0; c < 3; ++c) {
        const std::string& ref = tokens[static_cast<std::size_t>(c) + 1];
        const std::string index = ref.substr(0, ref.find('/'));
        const long v = parse_long(index, path, line_no);
        if (v < 1)
          throw ParseError(location(path, line_no) + "only positive 1-based indices are supported");
        face[static_cast<std::size_t>(c)] = static_cast<int>(v - 1);
      }
      faces.push_back(face);
    }
    // Any other directive (vn, vt, usemtl, comments, ...) is skipped.
  }
  Embedding x(static_cast<Eigen::Index>(coords.size()), 3);
  for (std::size_t v = 0; v < coords.size(); ++v)
    for (int c = 0; c < 3; ++c) x(static_cast<Eigen::Index>(v), c) = coords[v][static_cast<std::size_t>(c)];
  Mesh mesh = build_mesh(static_cast<int>(coords.size()), std::move(faces));
  return {std::move(mesh), std::move(x)};
}

Eigen::MatrixXd read_dense_matrix(const std::string& path) {
  LineReader reader(path);
  std::size_t line_no = 0;
  const auto header = split_ws(reader.require(line_no, "matrix size line"));
  if (header.size() != 2)
    throw ParseError(location(path, line_no) + "first line must hold \"rows cols\"");
  const long rows = parse_long(header[0], path, line_no);
  const long cols = parse_long(header[1], path, line_no);
  if (rows < 1 || cols < 1)
    throw ParseError(location(path, line_no) + "matrix dimensions must be positive");
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    const auto tokens = split_ws(reader.require(line_no, "matrix row"));
    if (static_cast<long>(tokens.size()) != cols)
      throw ParseError(location(path, line_no) + "row holds " + std::to_string(tokens.size()) +
                       " values, expected " + std::to_string(cols));
    for (long c = 0; c < cols; ++c)
      m(r, c) = parse_real(tokens[static_cast<std::size_t>(c)], path, line_no);
  }
  reader.expect_end();
  return m;
}

void write_dense_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.cols() < 1) throw InvalidArgument("refusing to write an empty matrix");
  std::ofstream out = open_for_write(path);
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << fmt17(m(r, c));
    }
    out << '\n';
  }
  finish_write(out, path);
}

DiscreteMetric read_edge_csv(const std::string& path, const Mesh& mesh) {
  LineReader reader(path);
  DiscreteMetric metric;
  metric.lengths = Eigen::VectorXd::Zero(mesh.edge_count());
  std::vector<char> seen(static_cast<std::size_t>(mesh.edge_count()), 0);
  std::string line;
  std::size_t line_no = 0;
  while (reader.next(line, line_no)) {
    const auto fields = split_char(line, ',');
    if (fields.size() != 3)
      throw ParseError(location(path, line_no) + "expected \"i,j,length\"");
    const long i = parse_long(trim(fields[0]), path, line_no);
    const long j = parse_long(trim(fields[1]), path, line_no);
    const double length = parse_real(trim(fields[2]), path, line_no);
    const int e = mesh.edge_index(static_cast<int>(i), static_cast<int>(j));
    if (e < 0)
      throw UnknownEdge(location(path, line_no) + "(" + std::to_string(i) + "," +
                        std::to_string(j) + ") is not a mesh edge");
    if (seen[static_cast<std::size_t>(e)])
      throw ParseError(location(path, line_no) + "edge (" + std::to_string(i) + "," +
                       std::to_string(j) + ") listed twice");
    if (!(length > 0.0))
      throw NonPositiveLength(location(path, line_no) + "length " + fmt17(length) +
                              " must be positive");
    seen[static_cast<std::size_t>(e)] = 1;
    metric.lengths[e] = length;
  }
  for (int e = 0; e < mesh.edge_count(); ++e)
    if (!seen[static_cast<std::size_t>(e)])
      throw MissingEdge(path + ": no length given for edge (" +
                        std::to_string(mesh.edges[static_cast<std::size_t>(e)][0]) + "," +
                        std::to_string(mesh.edges[static_cast<std::size_t>(e)][1]) + ")");
  return metric;
}

void write_edge_csv(const std::string& path, const Mesh& mesh, const DiscreteMetric& metric) {
  if (metric.lengths.size() != mesh.edge_count())
    throw DimensionMismatch("metric does not match the mesh edge count");
  std::ofstream out = open_for_write(path);
  for (int e = 0; e < mesh.edge_count(); ++e)
    out << mesh.edges[static_cast<std::size_t>(e)][0] << ','
        << mesh.edges[static_cast<std::size_t>(e)][1] << ',' << fmt17(metric.lengths[e]) << '\n';
  finish_write(out, path);
}

void write_vertex_csv(const std::string& path, const Eigen::VectorXd& values) {
  std::ofstream out = open_for_write(path);
  for (Eigen::Index i = 0; i < values.size(); ++i) out << fmt17(values[i]) << '\n';
  finish_write(out, path);
}

Eigen::VectorXd read_vertex_csv(const std::string& path) {
  LineReader reader(path);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (reader.next(line, line_no)) values.push_back(parse_real(trim(line), path, line_no));
  Eigen::VectorXd result(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) result[static_cast<Eigen::Index>(i)] = values[i];
  return result;
}

std::vector<int> read_point_map(const std::string& path) {
  LineReader reader(path);
  std::vector<int> map;
  std::string line;
  std::size_t line_no = 0;
  while (reader.next(line, line_no)) {
    const auto tokens = split_ws(line);
    if (tokens.size() != 2)
      throw ParseError(location(path, line_no) + "expected \"row target\" with 0-based indices");
    const long row = parse_long(tokens[0], path, line_no);
    if (row != static_cast<long>(map.size()))
      throw ParseError(location(path, line_no) + "row index " + std::to_string(row) +
                       " out of order, expected " + std::to_string(map.size()));
    map.push_back(static_cast<int>(parse_long(tokens[1], path, line_no)));
  }
  return map;
}

void write_point_map(const std::string& path, const std::vector<int>& point_map) {
  std::ofstream out = open_for_write(path);
  for (std::size_t r = 0; r < point_map.size(); ++r) out << r << ' ' << point_map[r] << '\n';
  finish_write(out, path);
}

void write_trace_csv(const std::string& path, const SolverTrace& trace) {
  std::ofstream out = open_for_write(path);
  out << "outer_iter,phase,inner_iter,energy,stress,mu,halvings\n";
  for (const TraceRecord& r : trace.records)
    out << r.outer_iter << ',' << (r.phase == SolverPhase::MfO ? "MfO" : "MDS") << ','
        << r.inner_iter << ',' << fmt17(r.energy) << ',' << fmt17(r.stress) << ','
        << fmt17(r.mu) << ',' << r.halvings << '\n';
  finish_write(out, path);
}

}  // namespace sfo
