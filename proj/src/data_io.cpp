#include "ogl/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "ogl/rng.hpp"

namespace ogl {

namespace {

// Artifact tags for the per-seed stream split.
constexpr std::uint64_t kStreamDesign = 1;
constexpr std::uint64_t kStreamSignal = 2;
constexpr std::uint64_t kStreamNoise = 3;

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view token, double& out) {
  token = trim_view(token);
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !token.empty();
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open file: " + path);
  }
  return in;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) tokens.push_back(tok);
  return tokens;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

Matrix load_matrix_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  bool first_data_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;

    std::vector<double> row;
    std::size_t start = 0;
    long column = 0;
    bool bad_token = false;
    long bad_column = 0;
    while (true) {
      ++column;
      const std::size_t comma = line.find(',', start);
      const std::string_view token =
          std::string_view(line).substr(start, comma == std::string::npos
                                                   ? std::string::npos
                                                   : comma - start);
      double value = 0.0;
      if (!parse_double(token, value)) {
        bad_token = true;
        bad_column = column;
        break;
      }
      row.push_back(value);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (bad_token) {
      // A non-numeric first row is a header; anywhere else it is an error.
      if (first_data_line) {
        first_data_line = false;
        continue;
      }
      throw ParseError("not a number in " + path, line_no, bad_column);
    }
    first_data_line = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw RaggedRows("row at line " + std::to_string(line_no) + " of " +
                       path + " has " + std::to_string(row.size()) +
                       " fields, expected " +
                       std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw EmptyFile("no data rows in " + path);
  }
  Matrix A(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return A;
}

Vector load_vector(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<double> values;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    double value = 0.0;
    if (!parse_double(line, value)) {
      throw ParseError("not a number in " + path, line_no, 1);
    }
    values.push_back(value);
  }
  if (values.empty()) {
    throw EmptyFile("no values in " + path);
  }
  return Eigen::Map<const Vector>(values.data(),
                                  static_cast<Eigen::Index>(values.size()));
}

GroupStructure load_groups(const std::string& path, int p) {
  std::ifstream in = open_or_throw(path);
  std::vector<std::vector<int>> groups;
  std::vector<double> weights;
  std::vector<std::string> names;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> tokens = split_ws(line);
    if (tokens.size() < 2) {
      throw ParseError("expected `name weight idx...` in " + path, line_no);
    }
    std::vector<int> indices;
    for (std::size_t t = 2; t < tokens.size(); ++t) {
      int idx = 0;
      auto [ptr, ec] = std::from_chars(
          tokens[t].data(), tokens[t].data() + tokens[t].size(), idx);
      if (ec != std::errc() || ptr != tokens[t].data() + tokens[t].size()) {
        throw ParseError("bad index token `" + tokens[t] + "` in " + path,
                         line_no, static_cast<long>(t + 1));
      }
      indices.push_back(idx);
    }
    double weight = 0.0;
    if (tokens[1] == "auto") {
      weight = std::sqrt(static_cast<double>(indices.size()));
    } else if (!parse_double(tokens[1], weight)) {
      throw ParseError("bad weight token `" + tokens[1] + "` in " + path,
                       line_no, 2);
    }
    names.push_back(tokens[0]);
    weights.push_back(weight);
    groups.push_back(std::move(indices));
  }
  return validate_groups(std::move(groups), std::move(weights), p,
                         std::move(names));
}

void write_matrix_csv(const std::string& path, const Matrix& A) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(A(i, j));
    }
    out << '\n';
  }
}

void write_vector(const std::string& path, const Vector& v) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out << format_double(v[i]) << '\n';
  }
}

void write_groups(const std::string& path, const GroupStructure& gs) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  for (int i = 0; i < gs.g(); ++i) {
    out << (gs.names.empty() ? "g" + std::to_string(i) : gs.names[i]);
    out << ' ' << format_double(gs.weights[i]);
    for (int idx : gs.groups[i]) out << ' ' << idx;
    out << '\n';
  }
}

SynthData synth_overlap_dataset(const SynthSpec& spec) {
  if (spec.p < 1 || spec.n < 1 || spec.g < 1 || spec.group_size < 1) {
    throw SpecInfeasible("sizes must be positive");
  }
  if (spec.overlap < 0 || spec.overlap >= spec.group_size) {
    throw SpecInfeasible("overlap must lie in [0, group_size)");
  }
  if (spec.active_groups < 0 || spec.active_groups > spec.g) {
    throw SpecInfeasible("active_groups must lie in [0, g]");
  }
  if (!(spec.noise_sigma >= 0.0)) {
    throw SpecInfeasible("noise_sigma must be >= 0");
  }
  const int stride = spec.group_size - spec.overlap;
  const long span =
      static_cast<long>(spec.g - 1) * stride + spec.group_size;
  if (span > spec.p) {
    throw SpecInfeasible("chain layout needs " + std::to_string(span) +
                         " features but p = " + std::to_string(spec.p));
  }

  std::vector<std::vector<int>> groups(static_cast<std::size_t>(spec.g));
  std::vector<double> weights(static_cast<std::size_t>(spec.g),
                              std::sqrt(static_cast<double>(spec.group_size)));
  for (int i = 0; i < spec.g; ++i) {
    const int start = i * stride;
    for (int k = 0; k < spec.group_size; ++k) {
      groups[static_cast<std::size_t>(i)].push_back(start + k);
    }
  }

  SynthData out;
  out.gs = validate_groups(std::move(groups), std::move(weights), spec.p);

  // Truly nonzero groups chosen by a seeded partial Fisher-Yates shuffle.
  RandomStream signal(derive_stream_seed(spec.seed, kStreamSignal));
  std::vector<int> order(static_cast<std::size_t>(spec.g));
  for (int i = 0; i < spec.g; ++i) order[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < spec.active_groups; ++i) {
    const auto j = i + static_cast<int>(signal.below(
                           static_cast<std::uint64_t>(spec.g - i)));
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(j)]);
  }

  std::vector<char> active_coord(static_cast<std::size_t>(spec.p), 0);
  for (int i = 0; i < spec.active_groups; ++i) {
    for (int idx : out.gs.groups[static_cast<std::size_t>(order[i])]) {
      active_coord[static_cast<std::size_t>(idx)] = 1;
    }
  }
  out.x_true = Vector::Zero(spec.p);
  for (int j = 0; j < spec.p; ++j) {
    if (active_coord[static_cast<std::size_t>(j)]) {
      out.x_true[j] = signal.normal();
    }
  }

  RandomStream design(derive_stream_seed(spec.seed, kStreamDesign));
  out.data.A = Matrix(spec.n, spec.p);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    for (Eigen::Index j = 0; j < spec.p; ++j) {
      out.data.A(i, j) = design.normal();
    }
  }

  out.data.b = out.data.A * out.x_true;
  if (spec.noise_sigma > 0.0) {
    RandomStream noise(derive_stream_seed(spec.seed, kStreamNoise));
    for (Eigen::Index i = 0; i < spec.n; ++i) {
      out.data.b[i] += spec.noise_sigma * noise.normal();
    }
  }
  return out;
}

double balanced_error_rate(const Vector& predictions, const Vector& labels) {
  if (predictions.size() != labels.size()) {
    throw LengthMismatch("got " + std::to_string(predictions.size()) +
                         " predictions for " + std::to_string(labels.size()) +
                         " labels");
  }
  long pos = 0, neg = 0, pos_err = 0, neg_err = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const double y = labels[i];
    if (y != 1.0 && y != -1.0) {
      throw Error("labels must be +1 or -1, got " + format_double(y));
    }
    const double pred = predictions[i] >= 0.0 ? 1.0 : -1.0;
    if (y > 0) {
      ++pos;
      if (pred < 0) ++pos_err;
    } else {
      ++neg;
      if (pred > 0) ++neg_err;
    }
  }
  if (pos == 0 || neg == 0) {
    throw SingleClassLabels("both classes must appear in the labels");
  }
  return 0.5 * (static_cast<double>(pos_err) / pos +
                static_cast<double>(neg_err) / neg);
}

}  // namespace ogl
