#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "lineham/shape.hpp"

namespace lineham {

// Where a rule pattern may sit. Pair patterns are sensitive to block
// boundaries: "XY" never crosses one, "X|Y" always does. The chain ends act
// as virtual outer boundaries and carry the two single-site rules.
enum class PatternPos { Pair, PairBoundary, LeftEnd, RightEnd };

// How qubit data moves when a rule fires, phrased as (target site <- source
// site) assignments on the affected pair.
enum class Dataflow {
  None,      // no 2-dim site involved
  KeepLeft,  // left bit stays on the left site
  KeepRight, // right bit stays on the right site
  KeepBoth,  // both bits stay in place (the flag identity moves instead)
  MoveLR,    // the left site's bit moves one site to the right
  GateU,     // both bits transformed by the location's two-qubit gate
  CreateZero // 13-state first-block rule: left bit stays, right bit born as 0
};

struct Rule {
  int id;           // rule group 1..6 as listed for the construction
  int sub;          // disambiguates variants within a group
  PatternPos pos;
  Sym a0, a1;       // pattern before (a1 ignored for single-site rules)
  Sym b0, b1;       // pattern after
  Dataflow flow;
  bool first_block_only = false;  // 13-state gate-rule substitution
  bool skip_first_block = false;
};

inline const std::vector<Rule>& rule_table(Alphabet al) {
  static const Sym X = Sym::Dead;  // placeholder for single-site slots
  static const std::vector<Rule> twelve = {
      // Gate rule: gate qpend -> qdone gate, applying the location's gate.
      {1, 0, PatternPos::Pair, Sym::GateF, Sym::Qpend, Sym::Qdone, Sym::GateF,
       Dataflow::GateU},
      // Turning rules, right side.
      {2, 0, PatternPos::PairBoundary, Sym::GateF, Sym::Unborn, Sym::Qdone,
       Sym::TurnF, Dataflow::KeepLeft},
      {2, 1, PatternPos::Pair, Sym::TurnF, Sym::Unborn, Sym::LeftF,
       Sym::Unborn, Dataflow::None},
      {2, 2, PatternPos::PairBoundary, Sym::TurnF, Sym::Unborn, Sym::LeftF,
       Sym::Unborn, Dataflow::None},
      {2, 3, PatternPos::RightEnd, Sym::TurnF, X, Sym::LeftF, X,
       Dataflow::None},
      // Sweeping left rules.
      {3, 0, PatternPos::Pair, Sym::Qdone, Sym::LeftF, Sym::LeftF, Sym::Qpend,
       Dataflow::MoveLR},
      {3, 1, PatternPos::PairBoundary, Sym::Qdone, Sym::LeftF, Sym::LeftF,
       Sym::Qpend, Dataflow::MoveLR},
      // Turning rules, left side.
      {4, 0, PatternPos::Pair, Sym::Dead, Sym::LeftF, Sym::Dead, Sym::TurnF,
       Dataflow::None},
      {4, 1, PatternPos::PairBoundary, Sym::Dead, Sym::LeftF, Sym::Dead,
       Sym::TurnF, Dataflow::None},
      {4, 2, PatternPos::LeftEnd, Sym::LeftF, X, Sym::TurnF, X,
       Dataflow::None},
      {4, 3, PatternPos::Pair, Sym::TurnF, Sym::Qpend, Sym::Dead, Sym::RightF,
       Dataflow::KeepRight},
      // Sweeping right rules.
      {5, 0, PatternPos::Pair, Sym::RightF, Sym::Qpend, Sym::Qdone,
       Sym::RightF, Dataflow::KeepBoth},
      {5, 1, PatternPos::PairBoundary, Sym::RightF, Sym::Qpend, Sym::Qdone,
       Sym::RightF, Dataflow::KeepBoth},
      {5, 2, PatternPos::Pair, Sym::RightF, Sym::Unborn, Sym::Qdone,
       Sym::TurnF, Dataflow::KeepLeft},
      // Starting new round rule.
      {6, 0, PatternPos::PairBoundary, Sym::TurnF, Sym::Qpend, Sym::Dead,
       Sym::GateF, Dataflow::KeepRight},
  };
  static const std::vector<Rule> nine = [] {
    std::vector<Rule> t = twelve;
    for (Rule& r : t) {
      auto merge = [](Sym& s) {
        if (s == Sym::Qdone || s == Sym::Qpend) s = Sym::Qubit;
        if (s == Sym::Dead || s == Sym::Unborn) s = Sym::Empty;
      };
      if (r.pos == PatternPos::Pair || r.pos == PatternPos::PairBoundary) {
        merge(r.a0); merge(r.a1); merge(r.b0); merge(r.b1);
      } else {
        merge(r.a0); merge(r.b0);
      }
    }
    return t;
  }();
  static const std::vector<Rule> thirteen = [] {
    std::vector<Rule> t = twelve;
    // Replace the first-block gate rule with gate start -> qdone gate(0).
    t[0].skip_first_block = true;
    t.push_back({1, 1, PatternPos::Pair, Sym::GateF, Sym::Start, Sym::Qdone,
                 Sym::GateF, Dataflow::CreateZero, /*first_block_only=*/true,
                 false});
    return t;
  }();
  switch (al) {
    case Alphabet::Twelve: return twelve;
    case Alphabet::Nine: return nine;
    case Alphabet::Thirteen: return thirteen;
  }
  throw std::logic_error("bad alphabet");
}

// A rule instance: a rule anchored at a chain position. For pair patterns,
// site is the 0-based index of the left site; for end patterns, the site of
// the single affected cell.
struct RuleInstance {
  const Rule* rule;
  int site;
};

inline bool instance_valid(const Rule& r, int site, int n, int L) {
  switch (r.pos) {
    case PatternPos::Pair:
    case PatternPos::PairBoundary: {
      if (site < 0 || site + 1 >= L) return false;
      const bool bnd = (site + 1) % n == 0;
      if (bnd != (r.pos == PatternPos::PairBoundary)) return false;
      if (r.first_block_only && site + 1 >= n) return false;
      if (r.skip_first_block && site + 1 < n) return false;
      return true;
    }
    case PatternPos::LeftEnd: return site == 0;
    case PatternPos::RightEnd: return site == L - 1;
  }
  return false;
}

inline bool matches_before(const Rule& r, const Shape& s, int site) {
  if (r.pos == PatternPos::LeftEnd || r.pos == PatternPos::RightEnd)
    return s.sym[site] == r.a0;
  return s.sym[site] == r.a0 && s.sym[site + 1] == r.a1;
}

inline bool matches_after(const Rule& r, const Shape& s, int site) {
  if (r.pos == PatternPos::LeftEnd || r.pos == PatternPos::RightEnd)
    return s.sym[site] == r.b0;
  return s.sym[site] == r.b0 && s.sym[site + 1] == r.b1;
}

struct RuleApplication {
  int rule_id = 0;
  int rule_sub = 0;
  int site = 0;           // left site of the affected span (0-based)
  bool forward_dir = true;
  Dataflow flow = Dataflow::None;
  int gate_block = -1;    // for GateU/CreateZero: 0-based block index
  int gate_offset = -1;   // 0-based offset of the pair within its block
};

inline RuleApplication make_application(const Rule& r, int site, int n,
                                        bool forward_dir) {
  RuleApplication a;
  a.rule_id = r.id;
  a.rule_sub = r.sub;
  a.site = site;
  a.forward_dir = forward_dir;
  a.flow = r.flow;
  if (r.flow == Dataflow::GateU || r.flow == Dataflow::CreateZero) {
    a.gate_block = site / n;
    a.gate_offset = site % n;
  }
  return a;
}

inline Shape apply_rule(const Shape& s, const Rule& r, int site, bool forward) {
  Shape out = s;
  if (r.pos == PatternPos::LeftEnd || r.pos == PatternPos::RightEnd) {
    out.sym[site] = forward ? r.b0 : r.a0;
  } else {
    out.sym[site] = forward ? r.b0 : r.a0;
    out.sym[site + 1] = forward ? r.b1 : r.a1;
  }
  return out;
}

// All rule instances matching the shape's current symbols, scanning every
// position. Works for any number of active sites; used by the operator
// assembler and as an oracle for the localized scan.
inline std::vector<RuleInstance> forward_matches_fullscan(const Shape& s) {
  std::vector<RuleInstance> out;
  const auto& table = rule_table(s.alphabet);
  const int L = s.size();
  for (const Rule& r : table)
    for (int i = 0; i < L; ++i)
      if (instance_valid(r, i, s.n, L) && matches_before(r, s, i))
        out.push_back({&r, i});
  return out;
}

inline std::vector<RuleInstance> backward_matches_fullscan(const Shape& s) {
  std::vector<RuleInstance> out;
  const auto& table = rule_table(s.alphabet);
  const int L = s.size();
  for (const Rule& r : table)
    for (int i = 0; i < L; ++i)
      if (instance_valid(r, i, s.n, L) && matches_after(r, s, i))
        out.push_back({&r, i});
  return out;
}

namespace detail {
// Every rule pattern contains exactly one active symbol on each side, so for
// a single-active-site shape only positions overlapping the active site can
// match.
inline void candidate_sites(int p, int* sites, int* count) {
  *count = 0;
  if (p > 0) sites[(*count)++] = p - 1;
  sites[(*count)++] = p;
}
}  // namespace detail

inline int count_forward_matches(const Shape& s, RuleInstance* first = nullptr) {
  const int p = s.active_pos();
  if (p < 0 || s.active_count() != 1)
    throw std::invalid_argument("transition requires exactly one active site");
  const auto& table = rule_table(s.alphabet);
  int sites[2], ns;
  detail::candidate_sites(p, sites, &ns);
  int found = 0;
  for (const Rule& r : table)
    for (int k = 0; k < ns; ++k) {
      const int i = sites[k];
      if (instance_valid(r, i, s.n, s.size()) && matches_before(r, s, i)) {
        if (first && found == 0) *first = {&r, i};
        ++found;
      }
    }
  return found;
}

inline int count_backward_matches(const Shape& s, RuleInstance* first = nullptr) {
  const int p = s.active_pos();
  if (p < 0 || s.active_count() != 1)
    throw std::invalid_argument("transition requires exactly one active site");
  const auto& table = rule_table(s.alphabet);
  int sites[2], ns;
  detail::candidate_sites(p, sites, &ns);
  int found = 0;
  for (const Rule& r : table)
    for (int k = 0; k < ns; ++k) {
      const int i = sites[k];
      if (instance_valid(r, i, s.n, s.size()) && matches_after(r, s, i)) {
        if (first && found == 0) *first = {&r, i};
        ++found;
      }
    }
  return found;
}

// One forward step. Exactly one active site is required; at most one rule can
// ever apply (checked), and nothing matches on terminal configurations.
inline std::optional<std::pair<Shape, RuleApplication>> forward(const Shape& s) {
  RuleInstance inst;
  const int m = count_forward_matches(s, &inst);
  if (m == 0) return std::nullopt;
  if (m > 1) throw std::logic_error("multiple forward rules match: " + s.render());
  return std::make_pair(apply_rule(s, *inst.rule, inst.site, true),
                        make_application(*inst.rule, inst.site, s.n, true));
}

inline std::optional<std::pair<Shape, RuleApplication>> backward(const Shape& s) {
  RuleInstance inst;
  const int m = count_backward_matches(s, &inst);
  if (m == 0) return std::nullopt;
  if (m > 1) throw std::logic_error("multiple backward rules match: " + s.render());
  return std::make_pair(apply_rule(s, *inst.rule, inst.site, false),
                        make_application(*inst.rule, inst.site, s.n, false));
}

// Iterate forward until no rule applies (or max_steps shapes are collected).
inline std::vector<Shape> trace(const Shape& start,
                                int max_steps = 1 << 20) {
  std::vector<Shape> out{start};
  while (static_cast<int>(out.size()) < max_steps) {
    auto next = forward(out.back());
    if (!next) break;
    out.push_back(std::move(next->first));
  }
  return out;
}

inline std::vector<std::pair<Shape, RuleApplication>> trace_with_steps(
    const Shape& start, int max_steps = 1 << 20) {
  std::vector<std::pair<Shape, RuleApplication>> out;
  out.emplace_back(start, RuleApplication{});
  while (static_cast<int>(out.size()) < max_steps) {
    auto next = forward(out.back().first);
    if (!next) break;
    out.push_back(std::move(*next));
  }
  return out;
}

// K = n(2n+3)(R-1) + n - 1: one n(2n+3)-move cycle per block advance plus the
// final in-block gate sweep.
inline long step_count(int n, int R) {
  return static_cast<long>(n) * (2 * n + 3) * (R - 1) + n - 1;
}

}  // namespace lineham
