#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "fiberchart/chart.hpp"

using namespace fiberchart;

namespace {

SingularityArc mk_arc(const std::string& id, SingKind kind, int index, SingType type,
                      std::vector<PathPoint> path) {
  SingularityArc a;
  a.id = id;
  a.kind = kind;
  a.index = index;
  a.type = type;
  a.boundary = is_boundary_kind(kind);
  a.path = std::move(path);
  return a;
}

bool has_rule(const ValidationReport& r, const std::string& rule) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const Violation& v) { return v.rule == rule; });
}

// A small valid chart: one pair_cusp death of a (II cone, III dot) pair,
// both positive slope, plus an unrelated negative-slope cone crossing the
// dot transversely.
Chart cusp_chart() {
  Chart c;
  c.t_lo = Rational(0);
  c.t_hi = Rational(1);
  c.arcs.push_back(mk_arc("a_cone", SingKind::Cone, 2, SingType::II,
                          {{Rational(1), Rational(1, 4)}, {Rational(1, 2), Rational(1, 8)}}));
  c.arcs.push_back(mk_arc("b_dot", SingKind::Dot, 3, SingType::III,
                          {{Rational(1), Rational(3, 4)}, {Rational(1, 2), Rational(1, 8)}}));
  c.arcs.push_back(mk_arc("c_cone", SingKind::Cone, 1, SingType::II,
                          {{Rational(1), Rational(3, 8)}, {Rational(0), Rational(7, 8)}}));
  c.events.push_back({EventKind::PairCusp, Rational(1, 2), Rational(1, 8), {"a_cone", "b_dot"}});
  return c;
}

}  // namespace

TEST_CASE("type_from_slope matches the type table") {
  CHECK(type_from_slope(SingKind::Cone, 1, +1) == SingType::I);
  CHECK(type_from_slope(SingKind::Cone, 2, -1) == SingType::I);
  CHECK(type_from_slope(SingKind::Cone, 2, +1) == SingType::II);
  CHECK(type_from_slope(SingKind::Cone, 1, -1) == SingType::II);
  CHECK(type_from_slope(SingKind::Dot, 0, +1) == SingType::Zero);
  CHECK(type_from_slope(SingKind::Dot, 3, -1) == SingType::Zero);
  CHECK(type_from_slope(SingKind::Dot, 3, +1) == SingType::III);
  CHECK(type_from_slope(SingKind::HalfDot, 0, -1) == SingType::III);
  CHECK(type_from_slope(SingKind::Bowl, 0, +1) == SingType::IB);
  CHECK(type_from_slope(SingKind::Bowl, 2, -1) == SingType::IB);
  CHECK(type_from_slope(SingKind::Bowl, 2, +1) == SingType::IIB);
  CHECK_THROWS_AS(type_from_slope(SingKind::Cone, 0, +1), std::invalid_argument);
  CHECK_THROWS_AS(type_from_slope(SingKind::Bowl, 1, +1), std::invalid_argument);
  CHECK_THROWS_AS(type_from_slope(SingKind::HalfDot, 2, -1), std::invalid_argument);
}

TEST_CASE("empty chart is valid") {
  Chart c;
  CHECK(validate_chart(c).valid());
}

TEST_CASE("valid cusp chart passes and mutations are rejected") {
  Chart c = cusp_chart();
  auto rep = validate_chart(c);
  CHECK(rep.valid());

  SUBCASE("vertical segment") {
    Chart m = c;
    m.arcs[2].path.insert(m.arcs[2].path.begin() + 1,
                          PathPoint{Rational(1, 2), Rational(3, 8)});
    auto r = validate_chart(m);
    CHECK_FALSE(r.valid());
    CHECK(has_rule(r, "vertical arc"));
  }
  SUBCASE("flipped type label") {
    Chart m = c;
    m.arcs[0].type = SingType::I;
    auto r = validate_chart(m);
    CHECK_FALSE(r.valid());
    CHECK(has_rule(r, "type slope"));
  }
  SUBCASE("deleted event member leaves a dangling endpoint") {
    Chart m = c;
    m.events[0].arcs = {"a_cone"};
    auto r = validate_chart(m);
    CHECK_FALSE(r.valid());
    CHECK((has_rule(r, "dangling endpoint") || has_rule(r, "event membership")));
  }
  SUBCASE("slope sign change is rejected") {
    Chart m = c;
    m.arcs[2].path.insert(m.arcs[2].path.begin() + 1,
                          PathPoint{Rational(1, 2), Rational(1, 4)});
    auto r = validate_chart(m);
    CHECK_FALSE(r.valid());
    CHECK(has_rule(r, "slope sign"));
  }
  SUBCASE("cusp of two type II arcs is rejected") {
    Chart m = c;
    // Relabel the dot as a cone of type II with consistent slope.
    m.arcs[1] = mk_arc("b_dot", SingKind::Cone, 2, SingType::II, m.arcs[1].path);
    auto r = validate_chart(m);
    CHECK_FALSE(r.valid());
    CHECK(has_rule(r, "event configuration"));
  }
  SUBCASE("boundary flag must match kind") {
    Chart m = c;
    m.arcs[0].boundary = true;
    auto r = validate_chart(m);
    CHECK(has_rule(r, "boundary flag"));
  }
}

TEST_CASE("validation is order independent") {
  Chart c = cusp_chart();
  c.arcs[0].type = SingType::I;  // introduce one violation
  auto r1 = validate_chart(c);
  Chart shuffled = c;
  std::reverse(shuffled.arcs.begin(), shuffled.arcs.end());
  auto r2 = validate_chart(shuffled);
  REQUIRE(r1.violations.size() == r2.violations.size());
  for (size_t i = 0; i < r1.violations.size(); ++i) {
    CHECK(r1.violations[i].rule == r2.violations[i].rule);
    CHECK(r1.violations[i].subject == r2.violations[i].subject);
  }
}

TEST_CASE("pair extremum rules") {
  Chart c;
  // Birth of two type II half-cones of opposite index (boundary fusion 1).
  c.arcs.push_back(mk_arc("h1", SingKind::HalfCone, 2, SingType::II,
                          {{Rational(1, 2), Rational(1, 2)}, {Rational(0), Rational(1, 4)}}));
  c.arcs.push_back(mk_arc("h2", SingKind::HalfCone, 1, SingType::II,
                          {{Rational(1, 2), Rational(1, 2)}, {Rational(0), Rational(3, 4)}}));
  c.events.push_back(
      {EventKind::PairExtremum, Rational(1, 2), Rational(1, 2), {"h1", "h2"}});
  CHECK(validate_chart(c).valid());

  Chart m = c;
  m.arcs[1] = mk_arc("h2", SingKind::HalfCone, 2, SingType::I, m.arcs[1].path);
  auto r = validate_chart(m);
  CHECK_FALSE(r.valid());
  CHECK(has_rule(r, "event configuration"));
}

TEST_CASE("tangency and crossing detection") {
  Chart c;
  c.arcs.push_back(mk_arc("p", SingKind::Cone, 1, SingType::I,
                          {{Rational(1), Rational(1, 2)}, {Rational(0), Rational(1, 4)}}));
  c.arcs.push_back(mk_arc("q", SingKind::Cone, 1, SingType::II,
                          {{Rational(1), Rational(1, 4)}, {Rational(0), Rational(1, 2)}}));

  SUBCASE("transverse crossing is fine and reported by crossings()") {
    auto r = validate_chart(c);
    CHECK(r.valid());
    auto xs = crossings(c);
    REQUIRE(xs.size() == 1);
    CHECK(xs[0].t == Rational(1, 2));
    CHECK(xs[0].theta == Rational(3, 8));
  }
  SUBCASE("disjoint arcs have no crossings") {
    Chart d;
    d.arcs.push_back(c.arcs[0]);
    CHECK(crossings(d).empty());
  }
  SUBCASE("vertex contact is a tangency") {
    Chart m = c;
    m.arcs[1].path.insert(m.arcs[1].path.begin() + 1,
                          PathPoint{Rational(1, 2), Rational(3, 8)});
    auto r = validate_chart(m);
    CHECK(has_rule(r, "tangency"));
    CHECK_THROWS(crossings(m));
  }
  SUBCASE("wrapped crossing is found") {
    Chart m;
    // p lives near theta=0, q crosses the wrap line theta=1.
    m.arcs.push_back(mk_arc("p", SingKind::Cone, 1, SingType::I,
                            {{Rational(1), Rational(1, 16)}, {Rational(0), Rational(0)}}));
    m.arcs.push_back(mk_arc("q", SingKind::Cone, 1, SingType::II,
                            {{Rational(1), Rational(31, 32)}, {Rational(0), Rational(33, 32)}}));
    auto xs = crossings(m);
    REQUIRE(xs.size() == 1);
  }
}

TEST_CASE("perturb repairs and is idempotent on clean charts") {
  Chart c;
  c.arcs.push_back(mk_arc("p", SingKind::Cone, 1, SingType::I,
                          {{Rational(1), Rational(1, 2)}, {Rational(0), Rational(1, 4)}}));
  c.arcs.push_back(mk_arc("q", SingKind::Cone, 1, SingType::II,
                          {{Rational(1), Rational(1, 4)}, {Rational(0), Rational(1, 2)}}));

  SUBCASE("clean chart unchanged") {
    Chart p = perturb(c, Rational(1, 64));
    REQUIRE(p.arcs.size() == 2);
    for (size_t i = 0; i < 2; ++i) {
      const auto* orig = c.find_arc(p.arcs[i].id);
      REQUIRE(orig != nullptr);
      CHECK(p.arcs[i].path.size() == orig->path.size());
      for (size_t j = 0; j < orig->path.size(); ++j)
        CHECK(p.arcs[i].path[j].theta == orig->path[j].theta);
    }
  }
  SUBCASE("tangency resolved into 0 or 2 transverse crossings") {
    Chart m = c;
    m.arcs[1].path.insert(m.arcs[1].path.begin() + 1,
                          PathPoint{Rational(1, 2), Rational(3, 8)});
    Chart p = perturb(m, Rational(1, 64));
    auto xs = crossings(p);  // must not throw
    CHECK((xs.size() == 0 || xs.size() == 2));
    auto r = validate_chart(p);
    CHECK_FALSE(has_rule(r, "tangency"));
    // Displacement bounded by eps.
    const auto* orig = m.find_arc("q");
    const auto* post = p.find_arc("q");
    REQUIRE(post != nullptr);
    for (const auto& pp : post->path) {
      bool close = false;
      for (const auto& op : orig->path)
        if (op.t == pp.t && (op.theta - pp.theta).abs() <= Rational(1, 64)) close = true;
      if (!close) {
        // split vertices are new; check against the segment interpolation
        CHECK(pp.theta >= orig->theta_min() - Rational(1, 64));
        CHECK(pp.theta <= orig->theta_max() + Rational(1, 64));
      }
    }
  }
  SUBCASE("coincident parallel segments get separated") {
    Chart m;
    m.arcs.push_back(mk_arc("p", SingKind::Cone, 1, SingType::I,
                            {{Rational(1), Rational(1, 2)}, {Rational(0), Rational(1, 4)}}));
    m.arcs.push_back(mk_arc("q", SingKind::Cone, 2, SingType::II,
                            {{Rational(15, 16), Rational(31, 64)},
                             {Rational(1, 16), Rational(17, 64)}}));
    auto r0 = validate_chart(m);
    CHECK(has_rule(r0, "overlap"));
    Chart p = perturb(m, Rational(1, 64));
    auto r = validate_chart(p);
    CHECK_FALSE(has_rule(r, "overlap"));
    CHECK_NOTHROW(crossings(p));
  }
  SUBCASE("slope sign change is irreparable") {
    Chart m = c;
    m.arcs[0].path.insert(m.arcs[0].path.begin() + 1,
                          PathPoint{Rational(1, 2), Rational(5, 8)});
    CHECK_THROWS_AS(perturb(m, Rational(1, 64)), std::runtime_error);
  }
}

TEST_CASE("event catalogue closure: removing a member invalidates") {
  Chart c = cusp_chart();
  REQUIRE(validate_chart(c).valid());
  for (const auto& ev : c.events) {
    for (const auto& member : ev.arcs) {
      Chart m = c;
      m.arcs.erase(std::remove_if(m.arcs.begin(), m.arcs.end(),
                                  [&](const SingularityArc& a) { return a.id == member; }),
                   m.arcs.end());
      auto r = validate_chart(m);
      CHECK_FALSE(r.valid());
    }
  }
}
