#include "mim/pattern.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mim {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_double(std::string_view s) {
  double value = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Maps tokens to internal indices: natural order, most frequent label moved
// to the last slot.
std::vector<std::string> order_labels(std::span<const std::string> tokens) {
  std::map<std::string, std::size_t, decltype(&label_less)> counts(&label_less);
  for (const auto& t : tokens) ++counts[t];
  if (counts.size() < 2) {
    throw std::invalid_argument(
        "point pattern needs at least 2 distinct mark labels, got " +
        std::to_string(counts.size()));
  }
  std::vector<std::string> labels;
  labels.reserve(counts.size());
  auto reference = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > reference->second) reference = it;
  }
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it != reference) labels.push_back(it->first);
  }
  labels.push_back(reference->first);
  return labels;
}

std::vector<Mark> encode(std::span<const std::string> tokens,
                         const std::vector<std::string>& labels) {
  std::map<std::string, Mark> index;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    index.emplace(labels[k], static_cast<Mark>(k));
  }
  std::vector<Mark> marks;
  marks.reserve(tokens.size());
  for (const auto& t : tokens) marks.push_back(index.at(t));
  return marks;
}

}  // namespace

bool label_less(const std::string& a, const std::string& b) {
  const auto na = parse_double(a);
  const auto nb = parse_double(b);
  if (na && nb && *na != *nb) return *na < *nb;
  return a < b;
}

PointPattern::PointPattern(std::vector<Point> points, std::vector<Mark> marks,
                           std::vector<std::string> labels, double length,
                           Point origin)
    : points_(std::move(points)),
      marks_(std::move(marks)),
      labels_(std::move(labels)),
      length_(length),
      origin_(origin) {
  if (points_.empty()) {
    throw std::invalid_argument("point pattern must contain at least 1 point");
  }
  if (points_.size() != marks_.size()) {
    throw std::invalid_argument("point and mark counts differ");
  }
  if (labels_.size() < 2) {
    throw std::invalid_argument("point pattern needs Q >= 2 mark categories");
  }
  if (!(length_ > 0.0) || !std::isfinite(length_)) {
    throw std::invalid_argument("rescaling length must be positive");
  }
  for (const auto& p : points_) {
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
      throw std::invalid_argument("coordinate outside the unit square: (" +
                                  format_double(p.x) + ", " +
                                  format_double(p.y) + ")");
    }
  }
  const auto q = static_cast<Mark>(labels_.size());
  for (Mark m : marks_) {
    if (m < 0 || m >= q) {
      throw std::invalid_argument("mark index " + std::to_string(m) +
                                  " outside 0.." + std::to_string(q - 1));
    }
  }
  const auto counts = mark_counts();
  if (*std::max_element(counts.begin(), counts.end()) > counts.back()) {
    throw std::invalid_argument(
        "reference mark (last internal index) must be the most frequent");
  }
}

std::vector<std::size_t> PointPattern::mark_counts() const {
  std::vector<std::size_t> counts(labels_.size(), 0);
  for (Mark m : marks_) ++counts[static_cast<std::size_t>(m)];
  return counts;
}

PointPattern rescale(std::span<const RawPoint> raw,
                     std::optional<double> length) {
  if (raw.empty()) {
    throw std::invalid_argument("cannot rescale an empty point list");
  }
  if (length && !(*length > 0.0 && std::isfinite(*length))) {
    throw std::invalid_argument("rescaling length must be positive and finite");
  }
  double min_x = raw.front().x, max_x = raw.front().x;
  double min_y = raw.front().y, max_y = raw.front().y;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& r = raw[i];
    if (!std::isfinite(r.x) || !std::isfinite(r.y)) {
      throw std::invalid_argument("non-finite coordinate at point " +
                                  std::to_string(i + 1));
    }
    min_x = std::min(min_x, r.x);
    max_x = std::max(max_x, r.x);
    min_y = std::min(min_y, r.y);
    max_y = std::max(max_y, r.y);
  }
  double l = length.value_or(std::max(max_x - min_x, max_y - min_y));
  // All points coincide: any positive length maps them to the origin.
  if (!(l > 0.0)) l = 1.0;

  std::vector<Point> points;
  std::vector<std::string> tokens;
  points.reserve(raw.size());
  tokens.reserve(raw.size());
  for (const auto& r : raw) {
    points.push_back({(r.x - min_x) / l, (r.y - min_y) / l});
    tokens.push_back(r.label);
  }
  auto labels = order_labels(tokens);
  auto marks = encode(tokens, labels);
  return PointPattern(std::move(points), std::move(marks), std::move(labels), l,
                      {min_x, min_y});
}

PointPattern make_pattern(std::span<const Point> points,
                          std::span<const std::string> labels) {
  if (points.size() != labels.size()) {
    throw std::invalid_argument("point and label counts differ");
  }
  auto ordered = order_labels(labels);
  auto marks = encode(labels, ordered);
  return PointPattern(std::vector<Point>(points.begin(), points.end()),
                      std::move(marks), std::move(ordered));
}

std::vector<RawPoint> read_raw_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::vector<RawPoint> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();

    if (!header_seen) {
      header_seen = true;
      if (fields.size() != 3 || fields[0] != "x" || fields[1] != "y" ||
          fields[2] != "mark") {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": expected header 'x,y,mark'");
      }
      continue;
    }
    const auto fail = [&](const std::string& what) {
      return std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                ": " + what);
    };
    if (fields.size() != 3) {
      throw fail("expected 3 fields (x,y,mark), found " +
                 std::to_string(fields.size()));
    }
    const auto x = parse_double(fields[0]);
    const auto y = parse_double(fields[1]);
    if (!x || !y) throw fail("malformed coordinate");
    if (!std::isfinite(*x) || !std::isfinite(*y)) {
      throw fail("non-finite coordinate");
    }
    if (fields[2].empty()) throw fail("missing mark");
    rows.push_back({*x, *y, fields[2]});
  }
  if (!header_seen) throw std::runtime_error(path.string() + ": empty file");
  return rows;
}

std::filesystem::path metadata_path(const std::filesystem::path& csv) {
  auto p = csv;
  p += ".meta.json";
  return p;
}

PointPattern load_pattern(const std::filesystem::path& path,
                          std::optional<double> length) {
  auto rows = read_raw_csv(path);
  const auto meta_path = metadata_path(path);
  if (!std::filesystem::exists(meta_path)) return rescale(rows, length);

  std::ifstream meta_in(meta_path);
  const auto meta = nlohmann::json::parse(meta_in);
  const auto& map = meta.at("label_map");
  std::vector<std::string> labels(map.size());
  for (const auto& [label, index] : map.items()) {
    const auto k = index.get<std::size_t>();
    if (k < 1 || k > labels.size() || !labels[k - 1].empty()) {
      throw std::runtime_error(meta_path.string() + ": invalid label_map");
    }
    labels[k - 1] = label;
  }
  std::map<std::string, Mark> index;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    index.emplace(labels[k], static_cast<Mark>(k));
  }

  std::vector<Point> points;
  std::vector<Mark> marks;
  points.reserve(rows.size());
  marks.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto it = index.find(rows[i].label);
    if (it == index.end()) {
      // Data rows start on line 2, after the header.
      throw std::runtime_error(path.string() + ":" + std::to_string(i + 2) +
                               ": mark '" + rows[i].label +
                               "' not in label_map");
    }
    points.push_back({rows[i].x, rows[i].y});
    marks.push_back(it->second);
  }
  const auto& origin = meta.at("origin");
  return PointPattern(std::move(points), std::move(marks), std::move(labels),
                      meta.at("length").get<double>(),
                      {origin.at(0).get<double>(), origin.at(1).get<double>()});
}

void save_pattern(const PointPattern& pattern,
                  const std::filesystem::path& path) {
  {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "x,y,mark\n";
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      const auto& p = pattern.point(i);
      out << format_double(p.x) << ',' << format_double(p.y) << ','
          << pattern.labels()[static_cast<std::size_t>(pattern.mark(i))]
          << '\n';
    }
  }
  nlohmann::json meta;
  meta["length"] = pattern.length();
  meta["origin"] = {pattern.origin().x, pattern.origin().y};
  meta["label_map"] = nlohmann::json::object();
  for (std::size_t k = 0; k < pattern.labels().size(); ++k) {
    meta["label_map"][pattern.labels()[k]] = k + 1;
  }
  std::ofstream meta_out(metadata_path(path));
  if (!meta_out) {
    throw std::runtime_error("cannot write " + metadata_path(path).string());
  }
  meta_out << meta.dump(2) << '\n';
}

}  // namespace mim
