#include "snperm/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace snperm::io {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

Mat parse_matrix_market(std::istream& in) {
  std::string header;
  std::getline(in, header);
  const std::string h = lower(header);
  if (h.rfind("%%matrixmarket", 0) != 0)
    throw std::invalid_argument("matrix market: missing banner");
  const bool coordinate = h.find("coordinate") != std::string::npos;
  const bool symmetric = h.find("symmetric") != std::string::npos;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream sizes(line);
  if (coordinate) {
    int rows, cols;
    long long nnz;
    if (!(sizes >> rows >> cols >> nnz)) throw std::invalid_argument("matrix market: bad size line");
    Mat m(rows, cols);
    for (long long t = 0; t < nnz; ++t) {
      int i, j;
      double v;
      if (!(in >> i >> j >> v)) throw std::invalid_argument("matrix market: truncated entries");
      m(i - 1, j - 1) = v;
      if (symmetric && i != j) m(j - 1, i - 1) = v;
    }
    return m;
  }
  int rows, cols;
  if (!(sizes >> rows >> cols)) throw std::invalid_argument("matrix market: bad size line");
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    const int i0 = symmetric ? j : 0;
    for (int i = i0; i < rows; ++i) {
      double v;
      if (!(in >> v)) throw std::invalid_argument("matrix market: truncated array");
      m(i, j) = v;
      if (symmetric) m(j, i) = v;
    }
  }
  return m;
}

Mat parse_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && rows.front().size() != row.size())
      throw std::invalid_argument("csv: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("csv: empty matrix");
  Mat m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  return m;
}

Mat parse_binary01(std::istream& in) {
  int rows, cols;
  if (!(in >> rows >> cols)) throw std::invalid_argument("binary01: missing 'rows cols' header");
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      int v;
      if (!(in >> v) || (v != 0 && v != 1))
        throw std::invalid_argument("binary01: entries must be 0 or 1");
      m(i, j) = v;
    }
  return m;
}

}  // namespace

MatrixFormat format_from_name(const std::string& name) {
  const std::string n = lower(name);
  if (n == "auto" || n.empty()) return MatrixFormat::auto_detect;
  if (n == "mm" || n == "matrixmarket" || n == "mtx") return MatrixFormat::matrix_market;
  if (n == "mm-array" || n == "array") return MatrixFormat::matrix_market_array;
  if (n == "csv") return MatrixFormat::csv;
  if (n == "bin01" || n == "01") return MatrixFormat::binary01;
  throw std::invalid_argument("unknown matrix format: " + name);
}

std::string format_name(MatrixFormat f) {
  switch (f) {
    case MatrixFormat::matrix_market: return "mm";
    case MatrixFormat::matrix_market_array: return "mm-array";
    case MatrixFormat::csv: return "csv";
    case MatrixFormat::binary01: return "bin01";
    default: return "auto";
  }
}

std::string matrix_to_string(const Mat& m, MatrixFormat format) {
  std::ostringstream os;
  os.precision(17);
  switch (format) {
    case MatrixFormat::matrix_market: {
      long long nnz = 0;
      for (double v : m.a)
        if (v != 0.0) ++nnz;
      os << "%%MatrixMarket matrix coordinate real general\n";
      os << m.rows << ' ' << m.cols << ' ' << nnz << '\n';
      for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j)
          if (m(i, j) != 0.0) os << i + 1 << ' ' << j + 1 << ' ' << m(i, j) << '\n';
      return os.str();
    }
    case MatrixFormat::matrix_market_array: {
      os << "%%MatrixMarket matrix array real general\n";
      os << m.rows << ' ' << m.cols << '\n';
      for (int j = 0; j < m.cols; ++j)
        for (int i = 0; i < m.rows; ++i) os << m(i, j) << '\n';
      return os.str();
    }
    case MatrixFormat::csv: {
      for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) os << (j ? "," : "") << m(i, j);
        os << '\n';
      }
      return os.str();
    }
    case MatrixFormat::binary01: {
      os << m.rows << ' ' << m.cols << '\n';
      for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) {
          const double v = m(i, j);
          if (v != 0.0 && v != 1.0)
            throw std::invalid_argument("binary01 writer: entries must be 0 or 1");
          os << (j ? " " : "") << static_cast<int>(v);
        }
        os << '\n';
      }
      return os.str();
    }
    default:
      throw std::invalid_argument("matrix_to_string: explicit format required");
  }
}

Mat matrix_from_string(const std::string& text, MatrixFormat format) {
  std::istringstream in(text);
  if (format == MatrixFormat::auto_detect) {
    if (lower(text).rfind("%%matrixmarket", 0) == 0) {
      const bool coordinate = lower(text).find("coordinate") != std::string::npos;
      format = coordinate ? MatrixFormat::matrix_market : MatrixFormat::matrix_market_array;
    } else if (text.find(',') != std::string::npos) {
      format = MatrixFormat::csv;
    } else {
      format = MatrixFormat::binary01;
    }
  }
  switch (format) {
    case MatrixFormat::matrix_market:
    case MatrixFormat::matrix_market_array:
      return parse_matrix_market(in);
    case MatrixFormat::csv:
      return parse_csv(in);
    case MatrixFormat::binary01:
      return parse_binary01(in);
    default:
      throw std::invalid_argument("matrix_from_string: bad format");
  }
}

Mat read_matrix(const std::string& path, MatrixFormat format) {
  if (format == MatrixFormat::auto_detect) {
    const std::string p = lower(path);
    if (ends_with(p, ".mtx") || ends_with(p, ".mm")) format = MatrixFormat::auto_detect;
    else if (ends_with(p, ".csv")) format = MatrixFormat::csv;
    else if (ends_with(p, ".01") || ends_with(p, ".bin01")) format = MatrixFormat::binary01;
  }
  return matrix_from_string(read_text_file(path), format);
}

void write_matrix(const std::string& path, const Mat& m, MatrixFormat format) {
  if (format == MatrixFormat::auto_detect) {
    const std::string p = lower(path);
    if (ends_with(p, ".csv")) format = MatrixFormat::csv;
    else if (ends_with(p, ".01") || ends_with(p, ".bin01")) format = MatrixFormat::binary01;
    else format = MatrixFormat::matrix_market;
  }
  write_text_file(path, matrix_to_string(m, format));
}

PermutationVec read_permutation(const std::string& path) {
  std::istringstream in(read_text_file(path));
  PermutationVec p;
  int v;
  while (in >> v) p.push_back(v);
  if (!is_permutation_vec(p))
    throw std::invalid_argument("read_permutation: not a permutation of 1..n: " + path);
  return p;
}

void write_permutation(const std::string& path, const PermutationVec& p) {
  std::ostringstream os;
  for (size_t i = 0; i < p.size(); ++i) os << (i ? " " : "") << p[i];
  os << '\n';
  write_text_file(path, os.str());
}

model::SideConstraints read_constraints(const std::string& path) {
  std::istringstream in(read_text_file(path));
  model::SideConstraints out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    int i, j;
    double gap;
    if (ls >> i >> j >> gap) {
      if (i < 1 || j < 1 || i == j || gap <= 0.0)
        throw std::invalid_argument("read_constraints: bad row in " + path);
      out.push_back({i - 1, j - 1, gap});
    }
  }
  return out;
}

void write_constraints(const std::string& path, const model::SideConstraints& side) {
  std::ostringstream os;
  os << "# i j gap (1-based positions, meaning x_i + gap <= x_j)\n";
  for (const auto& sc : side) os << sc.i + 1 << ' ' << sc.j + 1 << ' ' << sc.gap << '\n';
  write_text_file(path, os.str());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace snperm::io
