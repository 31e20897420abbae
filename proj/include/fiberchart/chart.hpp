#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fiberchart/rational.hpp"

namespace fiberchart {

enum class SingKind { Cone, Dot, HalfCone, HalfDot, Bowl };
enum class SingType { Zero, I, II, III, IB, IIB };

bool is_boundary_kind(SingKind k);
bool kind_index_admissible(SingKind k, int index);

// Handle index contributed by a singularity of this type (0/1/2/3; bowls
// count as their cone analogue).
int handle_of(SingType t);

const char* kind_name(SingKind k);
const char* type_name(SingType t);
std::optional<SingKind> kind_from_name(const std::string& s);
std::optional<SingType> type_from_name(const std::string& s);

// Slope convention: positive slope means theta decreases as t decreases.
// Positive slope <=> type agrees with index, negative <=> the Table-1
// opposite. Throws std::invalid_argument on an inadmissible (kind, index).
SingType type_from_slope(SingKind kind, int index, int slope_sign);

// Sign demanded by a labelled arc: +1 if (kind, index, type) agree, -1 if
// they are the Table-1 opposites.
int slope_sign_of(SingKind kind, int index, SingType type);

struct PathPoint {
  Rational t;
  Rational theta;  // unwrapped: the circle position is theta mod 1
};

struct SingularityArc {
  std::string id;
  SingKind kind = SingKind::Cone;
  int index = 1;
  SingType type = SingType::I;
  bool boundary = false;  // dashed in renders; must match kind
  std::vector<PathPoint> path;  // t strictly decreasing
  std::string provenance;  // block that created the arc, e.g. "band:0"

  const PathPoint& top() const { return path.front(); }
  const PathPoint& bottom() const { return path.back(); }
  // Sign of the first segment; 0 if vertical or degenerate.
  int slope_sign() const;
  // Unwrapped theta extent over the whole path.
  Rational theta_min() const;
  Rational theta_max() const;
};

enum class EventKind { PairCusp, PairExtremum, TripleJoin, BoundaryConversion };

const char* event_kind_name(EventKind k);
std::optional<EventKind> event_kind_from_name(const std::string& s);

struct ChartEvent {
  EventKind kind = EventKind::PairCusp;
  Rational t;
  Rational theta;  // compared mod 1 against member endpoints
  std::vector<std::string> arcs;  // 2 or 3 member arc ids
};

struct Chart {
  std::vector<SingularityArc> arcs;
  std::vector<ChartEvent> events;
  Rational t_lo = Rational(0);
  Rational t_hi = Rational(1);

  const SingularityArc* find_arc(const std::string& id) const;
};

struct Violation {
  std::string subject;  // arc or event id/index
  std::string rule;
  Rational t;
  Rational theta;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
};

// Rule names emitted: "path monotone", "vertical arc", "slope sign",
// "kind index", "boundary flag", "type slope", "arc range",
// "dangling endpoint", "event membership", "event configuration",
// "interface event", "tangency", "overlap".
ValidationReport validate_chart(const Chart& chart);

struct Crossing {
  Rational t;
  Rational theta;  // unwrapped coordinate on the first arc
  std::string arc_a;
  std::string arc_b;
};

// All transverse interior intersection points of distinct arcs.
// Throws std::runtime_error on tangential or overlapping contact.
std::vector<Crossing> crossings(const Chart& chart);

// Resolves tangencies, vertex contacts and overlaps by displacing interior
// path vertices of the lexicographically later arc by at most eps in theta.
// Transverse charts are returned unchanged. Throws std::runtime_error when
// an arc's slope sign is broken (irreparable) or resolution fails.
Chart perturb(const Chart& chart, const Rational& eps, unsigned seed = 0);

}  // namespace fiberchart
