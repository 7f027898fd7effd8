#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mim {

/// Internal mark index in 0..Q-1. Index Q-1 is the reference category.
using Mark = std::int32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// One row of raw input: a location in original units and its mark token.
struct RawPoint {
  double x = 0.0;
  double y = 0.0;
  std::string label;
};

/**
 * Multi-type point pattern in the unit square.
 *
 * Marks are stored as internal indices 0..Q-1 where the most frequent
 * original label always maps to Q-1, so the identifiability constraints
 * of the model bind the largest category. The original labels are kept in
 * `labels()` (internal index -> token) together with the rescaling length
 * and origin, so results can be reported in the units and vocabulary of
 * the input file.
 *
 * Immutable after construction.
 */
class PointPattern {
 public:
  /// Validates and takes ownership. Throws std::invalid_argument when the
  /// invariants do not hold (sizes, ranges, reference mark most frequent).
  PointPattern(std::vector<Point> points, std::vector<Mark> marks,
               std::vector<std::string> labels, double length = 1.0,
               Point origin = {});

  std::size_t size() const { return points_.size(); }
  int num_marks() const { return static_cast<int>(labels_.size()); }

  std::span<const Point> points() const { return points_; }
  std::span<const Mark> marks() const { return marks_; }
  const Point& point(std::size_t i) const { return points_[i]; }
  Mark mark(std::size_t i) const { return marks_[i]; }

  /// labels()[k] is the original token for internal mark k.
  const std::vector<std::string>& labels() const { return labels_; }
  double length() const { return length_; }
  Point origin() const { return origin_; }

  /// Number of points carrying each internal mark.
  std::vector<std::size_t> mark_counts() const;

 private:
  std::vector<Point> points_;
  std::vector<Mark> marks_;
  std::vector<std::string> labels_;
  double length_ = 1.0;
  Point origin_{};
};

/**
 * Shift to the origin and divide by `length`. When `length` is absent it is
 * estimated as the larger side of the bounding box. Labels are relabeled so
 * the most frequent one becomes internal mark Q-1 (ties: the lowest
 * original label wins); the remaining labels keep their natural order.
 */
PointPattern rescale(std::span<const RawPoint> raw,
                     std::optional<double> length = std::nullopt);

/// Builds a pattern from unit-square points and mark tokens without
/// rescaling (length 1, origin 0). Relabeling follows `rescale`.
PointPattern make_pattern(std::span<const Point> points,
                          std::span<const std::string> labels);

/// Natural ordering of mark tokens: numeric when both parse as numbers,
/// lexicographic otherwise.
bool label_less(const std::string& a, const std::string& b);

/// Raw rows of a `x,y,mark` CSV. Throws std::runtime_error naming the line
/// for malformed rows.
std::vector<RawPoint> read_raw_csv(const std::filesystem::path& path);

/// Sidecar metadata path for a pattern CSV: `<path>.meta.json`.
std::filesystem::path metadata_path(const std::filesystem::path& csv);

/**
 * Load a pattern CSV. If the metadata sidecar exists the coordinates are
 * taken as already rescaled and the sidecar's length, origin and label map
 * are restored. Otherwise the rows are treated as raw data and passed
 * through `rescale(rows, length)`.
 */
PointPattern load_pattern(const std::filesystem::path& path,
                          std::optional<double> length = std::nullopt);

/// Write the rescaled coordinates with original labels plus the sidecar.
void save_pattern(const PointPattern& pattern,
                  const std::filesystem::path& path);

}  // namespace mim
