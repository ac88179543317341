#include "sparsetree/segmentation.hpp"

#include <algorithm>
#include <sstream>

namespace sparsetree {

namespace {

std::string pair_text(std::size_t j, const SegmentPair& p) {
  std::ostringstream os;
  os << "pair " << (j + 1) << " (x at offset " << p.x_offset << ", v at offset " << p.v_offset << ")";
  return os.str();
}

}  // namespace

LineGeometry LineGeometry::of_path(const TreeBall& ball, const PathSegment& p) {
  LineGeometry g;
  g.length = static_cast<std::int64_t>(p.size()) - 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (ball.is_junction(p[i])) g.junction_offsets.push_back(static_cast<std::int64_t>(i));
  }
  return g;
}

std::optional<std::int64_t> LineGeometry::junction_distance(std::int64_t offset) const {
  const auto it = std::lower_bound(junction_offsets.begin(), junction_offsets.end(), offset);
  if (it == junction_offsets.end()) return std::nullopt;
  return *it - offset;
}

std::vector<std::int64_t> LineGeometry::junctions_between(std::int64_t from, std::int64_t to) const {
  const auto lo = std::lower_bound(junction_offsets.begin(), junction_offsets.end(), from);
  const auto hi = std::upper_bound(junction_offsets.begin(), junction_offsets.end(), to);
  return {lo, hi};
}

SegmentationError::SegmentationError(std::string condition, std::string measured)
    : std::invalid_argument("segmentation precondition violated: " + condition + " (measured " +
                            measured + ")"),
      condition_(std::move(condition)),
      measured_(std::move(measured)) {}

SegmentationResult segment_line(const LineGeometry& line, int L0) {
  if (L0 < 1) throw SegmentationError("L0 >= 1", "L0 = " + std::to_string(L0));
  const std::int64_t L = L0;
  if (!(line.length > 7 * L)) {
    throw SegmentationError("d(x1, v) > 7 L0 = " + std::to_string(7 * L),
                            "d(x1, v) = " + std::to_string(line.length));
  }
  const auto j1 = line.junction_distance(0);
  if (j1 && !(*j1 > L)) {
    throw SegmentationError("J(x1) > L0 = " + std::to_string(L), "J(x1) = " + std::to_string(*j1));
  }
  for (std::size_t i = 1; i < line.junction_offsets.size(); ++i) {
    const auto gap = line.junction_offsets[i] - line.junction_offsets[i - 1];
    if (!(gap > 8 * L)) {
      throw SegmentationError("junction gaps > 8 L0 = " + std::to_string(8 * L),
                              "gap " + std::to_string(gap) + " between offsets " +
                                  std::to_string(line.junction_offsets[i - 1]) + " and " +
                                  std::to_string(line.junction_offsets[i]));
    }
  }

  SegmentationResult result;
  result.L0 = L0;
  result.path_length = line.length;
  std::int64_t x = 0;
  for (bool first = true;; first = false) {
    if (!first && line.length - x <= 7 * L) {
      result.pairs.push_back({x, line.length});
      break;
    }
    const auto j = line.junction_distance(x);
    const std::int64_t step = (!j || *j >= 3 * L) ? L : 5 * L;
    result.pairs.push_back({x, x + step});
    x += step + 3;
  }
  return result;
}

SegmentationResult segment_path(const TreeBall& ball, VertexId x1, VertexId v, int L0) {
  if (L0 < kMinL0) {
    throw SegmentationError("L0 >= " + std::to_string(kMinL0), "L0 = " + std::to_string(L0));
  }
  const auto p = path(ball, x1, v);
  auto result = segment_line(LineGeometry::of_path(ball, p), L0);
  for (auto& pair : result.pairs) {
    pair.x = p[static_cast<std::size_t>(pair.x_offset)];
    pair.v = p[static_cast<std::size_t>(pair.v_offset)];
  }
  return result;
}

bool SegmentationReport::all_passed() const {
  return well_formed && single_junction &&
         std::all_of(properties.begin(), properties.end(), [](const PropertyCheck& c) { return c.passed; });
}

SegmentationReport verify_segmentation(const LineGeometry& line, const SegmentationResult& result) {
  SegmentationReport report;
  const auto& pairs = result.pairs;
  const std::int64_t L = result.L0;
  auto fail = [](PropertyCheck& check, std::string witness) {
    if (check.passed) check.witness = std::move(witness);
    check.passed = false;
  };

  if (pairs.empty()) {
    report.well_formed = false;
    report.structure_witness = "no pairs";
    for (auto& p : report.properties) fail(p, "no pairs");
    return report;
  }
  if (pairs.front().x_offset != 0) {
    report.well_formed = false;
    report.structure_witness = "first x is not x1";
  } else if (pairs.back().v_offset != line.length) {
    report.well_formed = false;
    report.structure_witness = "last v is not v";
  }
  for (std::size_t j = 0; j < pairs.size() && report.well_formed; ++j) {
    const auto& p = pairs[j];
    if (p.x_offset < 0 || p.v_offset > line.length || p.v_offset <= p.x_offset) {
      report.well_formed = false;
      report.structure_witness = pair_text(j, p) + " is not ordered on the path";
    } else if (j + 1 < pairs.size() && pairs[j + 1].x_offset != p.v_offset + 3) {
      report.well_formed = false;
      report.structure_witness = pair_text(j + 1, pairs[j + 1]) + " does not start 3 beyond v_" +
                                 std::to_string(j + 1);
    }
  }

  for (std::size_t j = 0; j < pairs.size(); ++j) {
    const auto& p = pairs[j];
    const auto jx = line.junction_distance(p.x_offset);
    if (jx && *jx < L) {
      fail(report.properties[0], pair_text(j, p) + ": J(x) = " + std::to_string(*jx));
    }
    const auto inside = line.junctions_between(p.x_offset, p.v_offset);
    if (inside.size() > 1) {
      report.single_junction = false;
    }
    for (auto u : inside) {
      if (std::llabs(p.v_offset - u) < L) {
        fail(report.properties[1], pair_text(j, p) + ": junction at offset " + std::to_string(u) +
                                       " is " + std::to_string(std::llabs(p.v_offset - u)) + " from v");
      }
    }
    if (p.v_offset - p.x_offset < L) {
      fail(report.properties[2], pair_text(j, p) + ": d(x, v) = " + std::to_string(p.v_offset - p.x_offset));
    }
  }
  // l >= d / (5 L0 + 3), in integers: l (5 L0 + 3) >= d.
  const auto l = static_cast<std::int64_t>(pairs.size());
  if (l * (5 * L + 3) < line.length) {
    fail(report.properties[3], "l = " + std::to_string(l) + " < d(x1, v) / (5 L0 + 3) = " +
                                   std::to_string(line.length) + " / " + std::to_string(5 * L + 3));
  }
  return report;
}

SegmentationReport verify_segmentation(const TreeBall& ball, const SegmentationResult& result,
                                       VertexId v) {
  if (result.pairs.empty()) return verify_segmentation(LineGeometry{}, result);
  const auto p = path(ball, result.pairs.front().x, v);
  const auto line = LineGeometry::of_path(ball, p);
  auto offset_of = [&](VertexId id) -> std::optional<std::int64_t> {
    const auto it = std::find(p.begin(), p.end(), id);
    if (it == p.end()) return std::nullopt;
    return static_cast<std::int64_t>(it - p.begin());
  };
  SegmentationResult located = result;
  for (std::size_t j = 0; j < located.pairs.size(); ++j) {
    auto& pair = located.pairs[j];
    const auto xo = offset_of(pair.x);
    const auto vo = offset_of(pair.v);
    if (!xo || !vo) {
      SegmentationReport report;
      report.well_formed = false;
      report.structure_witness = "pair " + std::to_string(j + 1) + " has a vertex off the path";
      for (auto& prop : report.properties) {
        prop.passed = false;
        prop.witness = report.structure_witness;
      }
      return report;
    }
    pair.x_offset = *xo;
    pair.v_offset = *vo;
  }
  return verify_segmentation(line, located);
}

}  // namespace sparsetree
