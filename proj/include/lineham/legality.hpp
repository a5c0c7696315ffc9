#pragma once

#include <vector>

#include "lineham/shape.hpp"

namespace lineham {

// A forbidden-arrangement hit: the penalty group (1..7) and the 0-based site
// of the pattern (left site for pair patterns).
struct Violation {
  int group;
  int site;
  bool operator==(const Violation& o) const {
    return group == o.group && site == o.site;
  }
};

// Scan a 12- or 13-state shape for the forbidden arrangements, groups 1-7.
// Pair patterns exist in boundary and non-boundary variants exactly as
// listed; group 2 is positional (first/last block, chain ends); group 7's
// patterns are the missing-transition arrangements.
inline std::vector<Violation> find_violations(const Shape& s) {
  if (s.alphabet == Alphabet::Nine)
    throw std::invalid_argument("penalty patterns are defined for the 12/13-state chains");
  std::vector<Violation> out;
  const int L = s.size();
  const int n = s.n;
  auto active = [](Sym x) { return sym_active(x); };

  for (int i = 0; i + 1 < L; ++i) {
    const Sym a = s.sym[i], b = s.sym[i + 1];
    const bool bnd = (i + 1) % n == 0;
    // Group 1: unborn X (X != unborn); X dead (X != dead).
    if (a == Sym::Unborn && b != Sym::Unborn) out.push_back({1, i});
    if (b == Sym::Dead && a != Sym::Dead) out.push_back({1, i});
    // Group 3: qpend X (X not qpend/unborn); X qdone (X not qdone/dead).
    if (a == Sym::Qpend && b != Sym::Qpend && b != Sym::Unborn)
      out.push_back({3, i});
    if (b == Sym::Qdone && a != Sym::Qdone && a != Sym::Dead)
      out.push_back({3, i});
    // Group 4: dead qpend; qdone unborn; dead unborn.
    if (a == Sym::Dead && b == Sym::Qpend) out.push_back({4, i});
    if (a == Sym::Qdone && b == Sym::Unborn) out.push_back({4, i});
    if (a == Sym::Dead && b == Sym::Unborn) out.push_back({4, i});
    // Group 5: qdone qpend.
    if (a == Sym::Qdone && b == Sym::Qpend) out.push_back({5, i});
    // Group 6: any adjacent pair of active sites.
    if (active(a) && active(b)) out.push_back({6, i});
    // Group 7: the missing-transition arrangements. dead gate and gate
    // unborn are fine across a block boundary; the boundary forms of
    // qdone|gate, gate|qpend, dead|rightflag, rightflag|unborn are fine
    // without one.
    if (!bnd) {
      if (a == Sym::Dead && b == Sym::GateF) out.push_back({7, i});
      if (a == Sym::GateF && b == Sym::Unborn) out.push_back({7, i});
    } else {
      if (a == Sym::Qdone && b == Sym::GateF) out.push_back({7, i});
      if (a == Sym::GateF && b == Sym::Qpend) out.push_back({7, i});
      if (a == Sym::Dead && b == Sym::RightF) out.push_back({7, i});
      if (a == Sym::RightF && b == Sym::Unborn) out.push_back({7, i});
    }
  }
  // Group 2: in the first block no unborn, and no qpend at the left chain
  // end; in the last block no dead, and no qdone at the right chain end.
  for (int i = 0; i < n; ++i)
    if (s.sym[i] == Sym::Unborn) out.push_back({2, i});
  if (s.sym[0] == Sym::Qpend) out.push_back({2, 0});
  for (int i = L - n; i < L; ++i)
    if (s.sym[i] == Sym::Dead) out.push_back({2, i});
  if (s.sym[L - 1] == Sym::Qdone) out.push_back({2, L - 1});
  // Group 7 chain-end forms: |rightflag and rightflag|.
  if (s.sym[0] == Sym::RightF) out.push_back({7, 0});
  if (s.sym[L - 1] == Sym::RightF) out.push_back({7, L - 1});

  std::sort(out.begin(), out.end(), [](const Violation& x, const Violation& y) {
    return x.site != y.site ? x.site < y.site : x.group < y.group;
  });
  return out;
}

inline int violation_count(const Shape& s) {
  return static_cast<int>(find_violations(s).size());
}

enum class ShapeClass {
  Legal,
  ExceptionI,    // turn flag strictly inside the qubit string
  ExceptionII,   // qubit string of incorrect length
  ExceptionIII,  // length n but rightflag aligned / gate misaligned
  LocallyDetectableIllegal,
};

namespace detail {

struct StringParse {
  bool ok = false;
  int lo = 0, hi = 0;   // inclusive span of the (qubits) string
  int left_fill = 0;    // qdone count left of the active site
  int right_fill = 0;   // qpend count right of it
  int active = 0;
};

// Decompose as dead* [qdone* active qpend*] unborn* (9-state: empty/qubit).
inline StringParse parse_string(const Shape& s) {
  StringParse p;
  if (s.active_count() != 1) return p;
  const bool nine = s.alphabet == Alphabet::Nine;
  const Sym left_sym = nine ? Sym::Qubit : Sym::Qdone;
  const Sym right_sym = nine ? Sym::Qubit : Sym::Qpend;
  const Sym pre = nine ? Sym::Empty : Sym::Dead;
  const Sym post = nine ? Sym::Empty : Sym::Unborn;
  const int a = s.active_pos();
  int lo = a, hi = a;
  while (lo > 0 && s.sym[lo - 1] == left_sym) --lo;
  while (hi + 1 < s.size() && s.sym[hi + 1] == right_sym) ++hi;
  for (int i = 0; i < lo; ++i)
    if (s.sym[i] != pre) return p;
  for (int i = hi + 1; i < s.size(); ++i)
    if (s.sym[i] != post) return p;
  p.ok = true;
  p.lo = lo;
  p.hi = hi;
  p.left_fill = a - lo;
  p.right_fill = hi - a;
  p.active = a;
  return p;
}

}  // namespace detail

// Legal and exception forms. A shape that fires any of the group 1-6
// patterns is locally detectable; otherwise it is one of the legal forms or
// one of the three exceptions (interior turn; wrong string length; length-n
// string whose alignment disagrees with its flag).
inline ShapeClass classify_shape(const Shape& s) {
  const int n = s.n;
  if (s.alphabet != Alphabet::Nine) {
    for (const Violation& v : find_violations(s))
      if (v.group <= 6) return ShapeClass::LocallyDetectableIllegal;
    if (s.alphabet == Alphabet::Thirteen) {
      bool has_start = false;
      for (Sym x : s.sym) has_start |= x == Sym::Start;
      if (has_start) {
        // First-sweep family: qdone^k gate start^(n-1-k) unborn^(L-n).
        int i = 0;
        while (i < n && s.sym[i] == Sym::Qdone) ++i;
        bool ok = i < n && s.sym[i] == Sym::GateF;
        if (ok) {
          for (int j = i + 1; j < n; ++j) ok &= s.sym[j] == Sym::Start;
          for (int j = n; j < s.size(); ++j) ok &= s.sym[j] == Sym::Unborn;
        }
        return ok ? ShapeClass::Legal : ShapeClass::ExceptionII;
      }
    }
  } else if (s.active_count() != 1) {
    return ShapeClass::LocallyDetectableIllegal;
  }

  const auto p = detail::parse_string(s);
  if (!p.ok) return ShapeClass::LocallyDetectableIllegal;
  const int m = p.hi - p.lo + 1;
  const bool block_aligned = p.lo % n == 0 && m == n;
  switch (s.sym[p.active]) {
    case Sym::GateF:
      if (m != n) return ShapeClass::ExceptionII;
      return block_aligned ? ShapeClass::Legal : ShapeClass::ExceptionIII;
    case Sym::RightF:
      if (m != n) return ShapeClass::ExceptionII;
      return block_aligned ? ShapeClass::ExceptionIII : ShapeClass::Legal;
    case Sym::LeftF:
      return m == n + 1 ? ShapeClass::Legal : ShapeClass::ExceptionII;
    case Sym::TurnF:
      if (p.left_fill > 0 && p.right_fill > 0) return ShapeClass::ExceptionI;
      return m == n + 1 ? ShapeClass::Legal : ShapeClass::ExceptionII;
    default:
      throw std::logic_error("active symbol expected");
  }
}

inline bool is_legal(const Shape& s) {
  return classify_shape(s) == ShapeClass::Legal;
}

}  // namespace lineham
