#include "fiberchart/chart.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace fiberchart {

bool is_boundary_kind(SingKind k) {
  return k == SingKind::HalfCone || k == SingKind::HalfDot || k == SingKind::Bowl;
}

bool kind_index_admissible(SingKind k, int index) {
  switch (k) {
    case SingKind::Cone:
    case SingKind::HalfCone:
      return index == 1 || index == 2;
    case SingKind::Dot:
    case SingKind::HalfDot:
      return index == 0 || index == 3;
    case SingKind::Bowl:
      return index == 0 || index == 2;
  }
  return false;
}

int handle_of(SingType t) {
  switch (t) {
    case SingType::Zero: return 0;
    case SingType::I: return 1;
    case SingType::II: return 2;
    case SingType::III: return 3;
    case SingType::IB: return 1;
    case SingType::IIB: return 2;
  }
  return -1;
}

const char* kind_name(SingKind k) {
  switch (k) {
    case SingKind::Cone: return "cone";
    case SingKind::Dot: return "dot";
    case SingKind::HalfCone: return "half_cone";
    case SingKind::HalfDot: return "half_dot";
    case SingKind::Bowl: return "bowl";
  }
  return "?";
}

const char* type_name(SingType t) {
  switch (t) {
    case SingType::Zero: return "0";
    case SingType::I: return "I";
    case SingType::II: return "II";
    case SingType::III: return "III";
    case SingType::IB: return "IB";
    case SingType::IIB: return "IIB";
  }
  return "?";
}

std::optional<SingKind> kind_from_name(const std::string& s) {
  if (s == "cone") return SingKind::Cone;
  if (s == "dot") return SingKind::Dot;
  if (s == "half_cone") return SingKind::HalfCone;
  if (s == "half_dot") return SingKind::HalfDot;
  if (s == "bowl") return SingKind::Bowl;
  return std::nullopt;
}

std::optional<SingType> type_from_name(const std::string& s) {
  if (s == "0") return SingType::Zero;
  if (s == "I") return SingType::I;
  if (s == "II") return SingType::II;
  if (s == "III") return SingType::III;
  if (s == "IB") return SingType::IB;
  if (s == "IIB") return SingType::IIB;
  return std::nullopt;
}

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::PairCusp: return "pair_cusp";
    case EventKind::PairExtremum: return "pair_extremum";
    case EventKind::TripleJoin: return "triple_join";
    case EventKind::BoundaryConversion: return "boundary_conversion";
  }
  return "?";
}

std::optional<EventKind> event_kind_from_name(const std::string& s) {
  if (s == "pair_cusp") return EventKind::PairCusp;
  if (s == "pair_extremum") return EventKind::PairExtremum;
  if (s == "triple_join") return EventKind::TripleJoin;
  if (s == "boundary_conversion") return EventKind::BoundaryConversion;
  return std::nullopt;
}

SingType type_from_slope(SingKind kind, int index, int slope_sign) {
  if (!kind_index_admissible(kind, index))
    throw std::invalid_argument(std::string("inadmissible kind/index: ") + kind_name(kind) +
                                "/" + std::to_string(index));
  bool agree = slope_sign > 0;
  switch (kind) {
    case SingKind::Cone:
    case SingKind::HalfCone:
      if (index == 1) return agree ? SingType::I : SingType::II;
      return agree ? SingType::II : SingType::I;
    case SingKind::Dot:
    case SingKind::HalfDot:
      if (index == 0) return agree ? SingType::Zero : SingType::III;
      return agree ? SingType::III : SingType::Zero;
    case SingKind::Bowl:
      if (index == 0) return agree ? SingType::IB : SingType::IIB;
      return agree ? SingType::IIB : SingType::IB;
  }
  throw std::invalid_argument("unreachable kind");
}

int slope_sign_of(SingKind kind, int index, SingType type) {
  return type_from_slope(kind, index, +1) == type ? +1 : -1;
}

int SingularityArc::slope_sign() const {
  if (path.size() < 2) return 0;
  const Rational d = path[1].theta - path[0].theta;
  return d.is_zero() ? 0 : (d < Rational(0) ? +1 : -1);
}

Rational SingularityArc::theta_min() const {
  Rational m = path.front().theta;
  for (const auto& p : path) m = Rational::min(m, p.theta);
  return m;
}

Rational SingularityArc::theta_max() const {
  Rational m = path.front().theta;
  for (const auto& p : path) m = Rational::max(m, p.theta);
  return m;
}

const SingularityArc* Chart::find_arc(const std::string& id) const {
  for (const auto& a : arcs)
    if (a.id == id) return &a;
  return nullptr;
}

namespace {

// Sign of a single segment: +1 if theta decreases with t, -1 if it
// increases, 0 if vertical.
int seg_sign(const PathPoint& hi, const PathPoint& lo) {
  if (lo.theta == hi.theta) return 0;
  return lo.theta < hi.theta ? +1 : -1;
}

bool theta_eq_mod1(const Rational& a, const Rational& b) { return (a - b).mod1().is_zero(); }

struct EndpointRef {
  const SingularityArc* arc;
  bool at_top;  // true: event at the arc's top endpoint (arc extends below)
};

std::string event_subject(const ChartEvent& e) {
  return std::string(event_kind_name(e.kind)) + "@" + e.t.str() + "," + e.theta.mod1().str();
}

struct Reporter {
  std::vector<Violation> out;
  void add(const std::string& subject, const std::string& rule, const Rational& t,
           const Rational& theta, const std::string& msg) {
    out.push_back({subject, rule, t, theta, msg});
  }
};

struct SegRef {
  const SingularityArc* arc;
  size_t i;  // segment from path[i] to path[i+1]
  const PathPoint& a() const { return arc->path[i]; }
  const PathPoint& b() const { return arc->path[i + 1]; }
};

struct Contact {
  enum What { Transverse, Tangency, Overlap } what;
  Rational t, theta;
};

// Intersects segment P (p1->p2) with segment Q shifted by integer k in
// theta. Both segments have strictly decreasing t. Appends contacts.
void intersect_segments(const SegRef& P, const SegRef& Q, long long k,
                        std::vector<Contact>& out, bool endpoints_shared_ok) {
  const Rational pt1 = P.a().t, pth1 = P.a().theta;
  const Rational pt2 = P.b().t, pth2 = P.b().theta;
  const Rational qt1 = Q.a().t, qth1 = Q.a().theta + Rational(k);
  const Rational qt2 = Q.b().t, qth2 = Q.b().theta + Rational(k);

  // Overlapping t-ranges required.
  const Rational tlo = Rational::max(pt2, qt2);
  const Rational thi = Rational::min(pt1, qt1);
  if (!(tlo < thi) && tlo != thi) return;

  // Solve p(t) = q(t) where each theta is linear in t.
  const Rational dp = (pth2 - pth1) / (pt2 - pt1);
  const Rational dq = (qth2 - qth1) / (qt2 - qt1);
  if (dp == dq) {
    // Parallel: collinear iff they meet at any common t.
    const Rational thA = pth1 + dp * (tlo - pt1);
    const Rational thB = qth1 + dq * (tlo - qt1);
    if (thA != thB) return;
    if (tlo < thi) {
      out.push_back({Contact::Overlap, thi, pth1 + dp * (thi - pt1)});
      return;
    }
    // Touch at a single shared t: both at segment ends.
    if (!endpoints_shared_ok) out.push_back({Contact::Tangency, tlo, thA});
    return;
  }
  const Rational tstar = (qth1 - pth1 + dp * pt1 - dq * qt1) / (dp - dq);
  if (tstar < tlo || tstar > thi) return;
  const Rational theta_star = pth1 + dp * (tstar - pt1);
  const bool at_p_end = (tstar == pt1 || tstar == pt2);
  const bool at_q_end = (tstar == qt1 || tstar == qt2);
  if (!at_p_end && !at_q_end) {
    out.push_back({Contact::Transverse, tstar, theta_star});
    return;
  }
  if (at_p_end && at_q_end && endpoints_shared_ok) return;
  out.push_back({Contact::Tangency, tstar, theta_star});
}

// Enumerates raw contacts between two arcs across all integer wraps.
// endpoint_exempt: contact points equal to a path endpoint of BOTH arcs
// (mod 1) are skipped; those are event meeting points checked elsewhere.
void arc_contacts(const SingularityArc& A, const SingularityArc& B,
                  std::vector<Contact>& out) {
  for (size_t i = 0; i + 1 < A.path.size(); ++i) {
    SegRef P{&A, i};
    const Rational pmin = Rational::min(P.a().theta, P.b().theta);
    const Rational pmax = Rational::max(P.a().theta, P.b().theta);
    for (size_t j = 0; j + 1 < B.path.size(); ++j) {
      SegRef Q{&B, j};
      const Rational qmin = Rational::min(Q.a().theta, Q.b().theta);
      const Rational qmax = Rational::max(Q.a().theta, Q.b().theta);
      const long long klo = (pmin - qmax).ceil();
      const long long khi = (pmax - qmin).floor();
      for (long long k = klo; k <= khi; ++k) {
        // A contact at a point that is an endpoint of both whole arcs is a
        // legitimate event meeting; exempt it here.
        std::vector<Contact> raw;
        intersect_segments(P, Q, k, raw, false);
        for (auto& c : raw) {
          bool a_end = (c.t == A.path.front().t && theta_eq_mod1(c.theta, A.path.front().theta)) ||
                       (c.t == A.path.back().t && theta_eq_mod1(c.theta, A.path.back().theta));
          bool b_end = (c.t == B.path.front().t && theta_eq_mod1(c.theta, B.path.front().theta)) ||
                       (c.t == B.path.back().t && theta_eq_mod1(c.theta, B.path.back().theta));
          if (c.what != Contact::Overlap && a_end && b_end) continue;
          out.push_back(c);
        }
      }
    }
  }
}

void check_arc_local(const SingularityArc& a, const Chart& chart, Reporter& rep) {
  if (a.path.size() < 2) {
    rep.add(a.id, "path monotone", Rational(0), Rational(0), "path needs at least 2 points");
    return;
  }
  for (size_t i = 0; i + 1 < a.path.size(); ++i) {
    if (!(a.path[i + 1].t < a.path[i].t)) {
      rep.add(a.id, "path monotone", a.path[i].t, a.path[i].theta,
              "t must strictly decrease along path");
      return;
    }
  }
  for (const auto& p : a.path) {
    if (p.t < chart.t_lo || p.t > chart.t_hi) {
      rep.add(a.id, "arc range", p.t, p.theta, "path point outside chart t-range");
      break;
    }
  }
  if (!kind_index_admissible(a.kind, a.index)) {
    rep.add(a.id, "kind index", a.top().t, a.top().theta,
            std::string(kind_name(a.kind)) + " cannot carry index " + std::to_string(a.index));
    return;
  }
  if (a.boundary != is_boundary_kind(a.kind)) {
    rep.add(a.id, "boundary flag", a.top().t, a.top().theta,
            "boundary flag must match kind");
  }
  int want = 0;
  bool vertical = false, mixed = false;
  for (size_t i = 0; i + 1 < a.path.size(); ++i) {
    int s = seg_sign(a.path[i], a.path[i + 1]);
    if (s == 0) {
      if (!vertical) {
        rep.add(a.id, "vertical arc", a.path[i].t, a.path[i].theta,
                "segment with constant theta");
        vertical = true;
      }
      continue;
    }
    if (want == 0) want = s;
    else if (s != want && !mixed) {
      rep.add(a.id, "slope sign", a.path[i].t, a.path[i].theta,
              "slope sign changes along arc");
      mixed = true;
    }
  }
  if (want != 0 && !mixed) {
    SingType expect = type_from_slope(a.kind, a.index, want);
    if (expect != a.type) {
      rep.add(a.id, "type slope", a.top().t, a.top().theta,
              std::string("arc labelled ") + type_name(a.type) + " but slope demands " +
                  type_name(expect));
    }
  }
}

struct MemberInfo {
  const SingularityArc* arc = nullptr;
  bool above = false;  // arc lies above the event (its bottom endpoint is here)
  bool below = false;  // arc lies below the event (its top endpoint is here)
};

bool resolve_member(const Chart& chart, const ChartEvent& e, const std::string& id,
                    MemberInfo& out) {
  const SingularityArc* a = chart.find_arc(id);
  if (!a || a->path.size() < 2) return false;
  out.arc = a;
  out.above = (a->path.back().t == e.t && theta_eq_mod1(a->path.back().theta, e.theta));
  out.below = (a->path.front().t == e.t && theta_eq_mod1(a->path.front().theta, e.theta));
  return out.above || out.below;
}

bool kinds_match(const MemberInfo& x, const MemberInfo& y, SingKind k1, SingKind k2) {
  return (x.arc->kind == k1 && y.arc->kind == k2) || (x.arc->kind == k2 && y.arc->kind == k1);
}

void check_pair_cusp(const ChartEvent& e, MemberInfo& m0, MemberInfo& m1, Reporter& rep) {
  const std::string subj = event_subject(e);
  if (m0.above != m1.above || m0.below != m1.below) {
    rep.add(subj, "event configuration", e.t, e.theta,
            "cusp arcs must lie on the same side of the event");
    return;
  }
  if (m0.arc->slope_sign() != m1.arc->slope_sign()) {
    rep.add(subj, "event configuration", e.t, e.theta,
            "cusp arcs must share a slope sign");
    return;
  }
  bool interior_pair =
      kinds_match(m0, m1, SingKind::Dot, SingKind::Cone) ||
      kinds_match(m0, m1, SingKind::Cone, SingKind::Cone);
  bool boundary_pair =
      kinds_match(m0, m1, SingKind::HalfDot, SingKind::HalfCone) ||
      kinds_match(m0, m1, SingKind::HalfCone, SingKind::Bowl);
  if (!interior_pair && !boundary_pair) {
    rep.add(subj, "event configuration", e.t, e.theta,
            "cusp kinds must form a cancelling interior or boundary pair");
    return;
  }
  int k0 = handle_of(m0.arc->type), k1 = handle_of(m1.arc->type);
  if (k0 - k1 != 1 && k1 - k0 != 1) {
    rep.add(subj, "event configuration", e.t, e.theta,
            std::string("cusp types (") + type_name(m0.arc->type) + "," +
                type_name(m1.arc->type) + ") are not a cancelling-handle pair");
  }
}

void check_pair_extremum(const ChartEvent& e, MemberInfo& m0, MemberInfo& m1, Reporter& rep) {
  const std::string subj = event_subject(e);
  if (m0.above != m1.above || m0.below != m1.below) {
    rep.add(subj, "event configuration", e.t, e.theta,
            "extremum arcs must lie on the same side of the event");
    return;
  }
  if (m0.arc->kind != m1.arc->kind || m0.arc->type != m1.arc->type) {
    rep.add(subj, "event configuration", e.t, e.theta,
            "extremum arcs must share kind and type");
    return;
  }
  if (m0.arc->slope_sign() == m1.arc->slope_sign()) {
    rep.add(subj, "event configuration", e.t, e.theta,
            "extremum arcs must leave with opposite slope signs");
  }
}

void check_conversion2(const ChartEvent& e, MemberInfo& m0, MemberInfo& m1, Reporter& rep) {
  const std::string subj = event_subject(e);
  if (!kinds_match(m0, m1, SingKind::Cone, SingKind::HalfCone)) {
    rep.add(subj, "event configuration", e.t, e.theta,
            "conversion needs one cone and one half-cone");
    return;
  }
  if (m0.above == m1.above) {
    rep.add(subj, "event configuration", e.t, e.theta,
            "conversion arcs must lie on opposite sides of the event");
    return;
  }
  if (m0.arc->index != m1.arc->index) {
    rep.add(subj, "event configuration", e.t, e.theta,
            "conversion must preserve the index");
  }
}

void check_three_arc(const ChartEvent& e, std::vector<MemberInfo>& ms, bool strict_conversion,
                     Reporter& rep) {
  const std::string subj = event_subject(e);
  // Split: the lone arc on one side is the continuation.
  int above = 0;
  for (auto& m : ms) above += m.above ? 1 : 0;
  if (above != 1 && above != 2) {
    rep.add(subj, "event configuration", e.t, e.theta,
            "three-arc event needs a dying pair and a continuation");
    return;
  }
  const bool pair_above = (above == 2);
  MemberInfo *interior = nullptr, *boundary_dying = nullptr, *cont = nullptr;
  for (auto& m : ms) {
    if (m.above == pair_above) {
      if (!is_boundary_kind(m.arc->kind)) {
        if (interior) {
          rep.add(subj, "event configuration", e.t, e.theta,
                  "dying pair needs exactly one interior arc");
          return;
        }
        interior = &m;
      } else {
        boundary_dying = &m;
      }
    } else {
      cont = &m;
    }
  }
  if (!interior || !boundary_dying || !cont) {
    rep.add(subj, "event configuration", e.t, e.theta,
            "three-arc event needs interior + boundary dying pair and a boundary continuation");
    return;
  }
  if (!is_boundary_kind(cont->arc->kind)) {
    rep.add(subj, "event configuration", e.t, e.theta, "continuation arc must be a boundary kind");
    return;
  }
  if (interior->arc->slope_sign() != boundary_dying->arc->slope_sign()) {
    rep.add(subj, "event configuration", e.t, e.theta,
            "dying pair must share a slope sign");
    return;
  }
  const int k = handle_of(interior->arc->type);
  const int j = handle_of(boundary_dying->arc->type);
  if (k - j != 1 && j - k != 1) {
    rep.add(subj, "event configuration", e.t, e.theta,
            "interior handle and boundary half-handle must cancel (j = k +/- 1)");
    return;
  }
  if (handle_of(cont->arc->type) != k) {
    rep.add(subj, "event configuration", e.t, e.theta,
            "continuation must carry the interior arc's handle contribution");
    return;
  }
  // Continuation kind table.
  SingKind want;
  switch (boundary_dying->arc->kind) {
    case SingKind::HalfCone:
      want = interior->arc->kind == SingKind::Cone ? SingKind::HalfCone : SingKind::HalfDot;
      break;
    case SingKind::HalfDot:
      want = SingKind::Bowl;
      break;
    case SingKind::Bowl:
      want = interior->arc->kind == SingKind::Cone ? SingKind::HalfCone : SingKind::HalfDot;
      break;
    default:
      rep.add(subj, "event configuration", e.t, e.theta, "dying boundary arc has interior kind");
      return;
  }
  if (cont->arc->kind != want) {
    rep.add(subj, "event configuration", e.t, e.theta,
            std::string("continuation kind should be ") + kind_name(want));
    return;
  }
  if (strict_conversion) {
    // Movies 3.13/3.14: a cone dies against a half-cone or half-dot.
    if (interior->arc->kind != SingKind::Cone ||
        boundary_dying->arc->kind == SingKind::Bowl) {
      rep.add(subj, "event configuration", e.t, e.theta,
              "boundary conversion cancels a cone with a half-cone or half-dot");
      return;
    }
    if (boundary_dying->arc->kind == SingKind::HalfCone) {
      // Half-cones of index i cancel a cone of index 3-i; the point becomes
      // a half-cone of index 3-i of the same type.
      if (interior->arc->index + boundary_dying->arc->index != 3 ||
          cont->arc->index != interior->arc->index ||
          cont->arc->type != interior->arc->type) {
        rep.add(subj, "event configuration", e.t, e.theta,
                "cone/half-cone death must continue as a half-cone of index 3-i");
      }
    } else {
      int ci = interior->arc->index, di = boundary_dying->arc->index;
      if (ci - di != 1 && di - ci != 1) {
        rep.add(subj, "event configuration", e.t, e.theta,
                "cone and half-dot must have cancelling indices");
      }
    }
  }
}

}  // namespace

ValidationReport validate_chart(const Chart& chart) {
  Reporter rep;

  std::set<std::string> ids;
  for (const auto& a : chart.arcs) {
    if (!ids.insert(a.id).second)
      rep.add(a.id, "event membership", Rational(0), Rational(0), "duplicate arc id");
    check_arc_local(a, chart, rep);
  }

  // Endpoint bookkeeping: (arc id, top?) -> number of covering events.
  std::map<std::pair<std::string, bool>, int> covered;

  for (const auto& e : chart.events) {
    const std::string subj = event_subject(e);
    if (e.t == chart.t_lo || e.t == chart.t_hi) {
      rep.add(subj, "interface event", e.t, e.theta,
              "events may not sit on the chart's top or bottom slice");
    }
    size_t want = (e.kind == EventKind::TripleJoin) ? 3 : 2;
    bool size_ok = e.arcs.size() == want ||
                   (e.kind == EventKind::BoundaryConversion && e.arcs.size() == 3);
    if (!size_ok) {
      rep.add(subj, "event membership", e.t, e.theta, "wrong number of member arcs");
      continue;
    }
    std::set<std::string> uniq(e.arcs.begin(), e.arcs.end());
    if (uniq.size() != e.arcs.size()) {
      rep.add(subj, "event membership", e.t, e.theta, "duplicate member arc");
      continue;
    }
    std::vector<MemberInfo> ms(e.arcs.size());
    bool ok = true;
    for (size_t i = 0; i < e.arcs.size(); ++i) {
      if (!resolve_member(chart, e, e.arcs[i], ms[i])) {
        rep.add(subj, "event membership", e.t, e.theta,
                "member arc " + e.arcs[i] + " has no endpoint at the event");
        ok = false;
      } else {
        if (ms[i].above && ms[i].below) {
          rep.add(subj, "event configuration", e.t, e.theta,
                  "member arc " + e.arcs[i] + " loops through the event");
          ok = false;
        }
        covered[{e.arcs[i], ms[i].below}]++;
      }
    }
    if (!ok) continue;
    // Skip configuration checks when a member arc is locally broken; its
    // slope data would be meaningless.
    bool members_clean = true;
    for (auto& m : ms)
      if (m.arc->slope_sign() == 0) members_clean = false;
    if (!members_clean) continue;

    switch (e.kind) {
      case EventKind::PairCusp:
        check_pair_cusp(e, ms[0], ms[1], rep);
        break;
      case EventKind::PairExtremum:
        check_pair_extremum(e, ms[0], ms[1], rep);
        break;
      case EventKind::BoundaryConversion:
        if (ms.size() == 2) check_conversion2(e, ms[0], ms[1], rep);
        else check_three_arc(e, ms, true, rep);
        break;
      case EventKind::TripleJoin:
        check_three_arc(e, ms, false, rep);
        break;
    }
  }

  // Dangling endpoints.
  for (const auto& a : chart.arcs) {
    if (a.path.size() < 2) continue;
    struct End {
      bool top;
      const PathPoint* p;
    } ends[2] = {{true, &a.path.front()}, {false, &a.path.back()}};
    for (const auto& end : ends) {
      const bool at_interface = (end.p->t == chart.t_lo || end.p->t == chart.t_hi);
      const int n = covered.count({a.id, end.top}) ? covered[{a.id, end.top}] : 0;
      if (at_interface) {
        if (n > 0)
          rep.add(a.id, "interface event", end.p->t, end.p->theta,
                  "interface endpoint may not belong to an event");
      } else if (n == 0) {
        rep.add(a.id, "dangling endpoint", end.p->t, end.p->theta,
                "arc endpoint inside the chart belongs to no event");
      } else if (n > 1) {
        rep.add(a.id, "event membership", end.p->t, end.p->theta,
                "arc endpoint belongs to more than one event");
      }
    }
  }

  // Transversality of interiors.
  for (size_t i = 0; i < chart.arcs.size(); ++i) {
    const auto& A = chart.arcs[i];
    if (A.path.size() < 2) continue;
    for (size_t j = i + 1; j < chart.arcs.size(); ++j) {
      const auto& B = chart.arcs[j];
      if (B.path.size() < 2) continue;
      const auto& first = A.id < B.id ? A : B;
      const auto& second = A.id < B.id ? B : A;
      std::vector<Contact> cs;
      arc_contacts(first, second, cs);
      for (const auto& c : cs) {
        if (c.what == Contact::Overlap)
          rep.add(first.id + "+" + second.id, "overlap", c.t, c.theta,
                  "arcs share a segment");
        else if (c.what == Contact::Tangency)
          rep.add(first.id + "+" + second.id, "tangency", c.t, c.theta,
                  "non-transverse contact");
      }
    }
  }

  auto& v = rep.out;
  std::sort(v.begin(), v.end(), [](const Violation& a, const Violation& b) {
    if (a.rule != b.rule) return a.rule < b.rule;
    if (a.subject != b.subject) return a.subject < b.subject;
    if (a.t != b.t) return a.t < b.t;
    if (a.theta != b.theta) return a.theta < b.theta;
    return a.message < b.message;
  });
  v.erase(std::unique(v.begin(), v.end(),
                      [](const Violation& a, const Violation& b) {
                        return a.rule == b.rule && a.subject == b.subject && a.t == b.t &&
                               a.theta == b.theta && a.message == b.message;
                      }),
          v.end());
  return {v};
}

std::vector<Crossing> crossings(const Chart& chart) {
  std::vector<Crossing> out;
  for (size_t i = 0; i < chart.arcs.size(); ++i) {
    const auto& A = chart.arcs[i];
    if (A.path.size() < 2) continue;
    for (size_t j = i + 1; j < chart.arcs.size(); ++j) {
      const auto& B = chart.arcs[j];
      if (B.path.size() < 2) continue;
      const auto& first = A.id < B.id ? A : B;
      const auto& second = A.id < B.id ? B : A;
      std::vector<Contact> cs;
      arc_contacts(first, second, cs);
      for (const auto& c : cs) {
        if (c.what == Contact::Transverse) {
          out.push_back({c.t, c.theta, first.id, second.id});
        } else {
          throw std::runtime_error("non-transverse contact between " + first.id + " and " +
                                   second.id + " at t=" + c.t.str() +
                                   "; perturb the chart first");
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) {
    if (a.t != b.t) return b.t < a.t;  // walk top-down
    if (a.theta != b.theta) return a.theta < b.theta;
    if (a.arc_a != b.arc_a) return a.arc_a < b.arc_a;
    return a.arc_b < b.arc_b;
  });
  return out;
}

namespace {

// Allowed open theta-window for moving path vertex i of arc a without
// breaking monotonicity in theta.
std::pair<Rational, Rational> vertex_window(const SingularityArc& a, size_t i) {
  const Rational lo = Rational::min(a.path[i - 1].theta, a.path[i + 1].theta);
  const Rational hi = Rational::max(a.path[i - 1].theta, a.path[i + 1].theta);
  return {lo, hi};
}

}  // namespace

Chart perturb(const Chart& chart, const Rational& eps, unsigned seed) {
  if (!(Rational(0) < eps)) throw std::invalid_argument("perturb needs eps > 0");
  Chart out = chart;

  // Irreparable inputs: an arc whose nonvertical segments disagree in sign.
  for (const auto& a : out.arcs) {
    int want = 0;
    for (size_t i = 0; i + 1 < a.path.size(); ++i) {
      int s = seg_sign(a.path[i], a.path[i + 1]);
      if (s == 0) continue;
      if (want == 0) want = s;
      else if (s != want)
        throw std::runtime_error("arc " + a.id + " changes slope sign; cannot perturb");
    }
  }

  std::sort(out.arcs.begin(), out.arcs.end(),
            [](const SingularityArc& x, const SingularityArc& y) { return x.id < y.id; });

  const int max_passes = 64;
  for (int pass = 0; pass < max_passes; ++pass) {
    // Repair vertical segments first: displace the lower vertex toward the
    // sign the arc's label demands.
    bool dirty = false;
    for (auto& a : out.arcs) {
      const int want = slope_sign_of(a.kind, a.index, a.type);
      for (size_t i = 0; i + 1 < a.path.size(); ++i) {
        if (seg_sign(a.path[i], a.path[i + 1]) != 0) continue;
        dirty = true;
        const Rational delta = eps / Rational(8 * (pass + 1));
        if (i + 2 == a.path.size()) {
          // Lower vertex is the arc endpoint: move the upper one if interior,
          // else split the segment.
          if (i == 0) {
            PathPoint mid{(a.path[i].t + a.path[i + 1].t) / Rational(2),
                          a.path[i].theta + (want > 0 ? delta : -delta)};
            a.path.insert(a.path.begin() + i + 1, mid);
          } else {
            a.path[i].theta += (want > 0 ? delta : -delta);
          }
        } else {
          a.path[i + 1].theta += (want > 0 ? -delta : delta);
        }
      }
    }

    // Find the first pairwise conflict in canonical order.
    struct Conflict {
      size_t ai, bi;  // indices into out.arcs, ai < bi by id
      Contact c;
    };
    std::optional<Conflict> found;
    for (size_t i = 0; i < out.arcs.size() && !found; ++i) {
      for (size_t j = i + 1; j < out.arcs.size() && !found; ++j) {
        std::vector<Contact> cs;
        arc_contacts(out.arcs[i], out.arcs[j], cs);
        for (const auto& c : cs) {
          if (c.what != Contact::Transverse) {
            found = Conflict{i, j, c};
            break;
          }
        }
      }
    }
    if (!found && !dirty) return out;
    if (!found) continue;

    // Deform one arc near the conflict: the later one by id, unless the
    // contact is pinned at an arc endpoint, in which case the other arc
    // must bend around it.
    auto pinned_at_end = [&](const SingularityArc& a) {
      const auto& c = found->c;
      return (c.t == a.path.front().t && theta_eq_mod1(c.theta, a.path.front().theta)) ||
             (c.t == a.path.back().t && theta_eq_mod1(c.theta, a.path.back().theta));
    };
    size_t target = found->bi;
    if (pinned_at_end(out.arcs[found->bi]) && !pinned_at_end(out.arcs[found->ai]))
      target = found->ai;
    SingularityArc& b = out.arcs[target];
    const Rational delta0 = eps / Rational(8 * (pass + 1));
    const int dir = ((seed + pass) % 2 == 0) ? +1 : -1;

    // Locate the segment of b containing the conflict t.
    size_t seg = 0;
    for (size_t i = 0; i + 1 < b.path.size(); ++i) {
      if (b.path[i + 1].t <= found->c.t && found->c.t <= b.path[i].t) {
        seg = i;
        break;
      }
    }
    const bool t_at_vertex =
        (found->c.t == b.path[seg].t) || (found->c.t == b.path[seg + 1].t);
    size_t moved;
    if (t_at_vertex && found->c.t == b.path[seg].t && seg > 0) {
      moved = seg;
    } else if (t_at_vertex && found->c.t == b.path[seg + 1].t && seg + 2 < b.path.size()) {
      moved = seg + 1;
    } else {
      // Split the segment at the conflict height and displace the new vertex.
      Rational tm = found->c.t;
      if (tm == b.path[seg].t || tm == b.path[seg + 1].t)
        tm = (b.path[seg].t + b.path[seg + 1].t) / Rational(2);
      const Rational frac = (tm - b.path[seg].t) / (b.path[seg + 1].t - b.path[seg].t);
      PathPoint mid{tm, b.path[seg].theta + (b.path[seg + 1].theta - b.path[seg].theta) * frac};
      b.path.insert(b.path.begin() + seg + 1, mid);
      moved = seg + 1;
    }
    auto [lo, hi] = vertex_window(b, moved);
    Rational room = Rational::min(b.path[moved].theta - lo, hi - b.path[moved].theta);
    Rational delta = Rational::min(delta0, room / Rational(4));
    if (!(Rational(0) < delta)) delta = room / Rational(4);
    if (!(Rational(0) < delta))
      throw std::runtime_error("perturb: no room to displace a vertex of arc " + b.id);
    b.path[moved].theta += Rational(dir) * delta;
    if (!(lo < b.path[moved].theta) || !(b.path[moved].theta < hi))
      b.path[moved].theta -= Rational(2 * dir) * delta;
  }
  throw std::runtime_error("perturb: failed to reach a transverse chart");
}

}  // namespace fiberchart
