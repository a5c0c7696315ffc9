#pragma once

#include <array>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lineham {

// Site alphabets. The 12-state chain has eight symbol types (four of them
// carry a qubit, so the per-site dimension adds up to 12); the 9-state chain
// merges qdone/qpend and dead/unborn; the 13-state chain adds a start symbol.
enum class Alphabet { Twelve, Nine, Thirteen };

inline int alphabet_states(Alphabet a) {
  switch (a) {
    case Alphabet::Twelve: return 12;
    case Alphabet::Nine: return 9;
    case Alphabet::Thirteen: return 13;
  }
  throw std::logic_error("bad alphabet");
}

inline Alphabet alphabet_from_int(int s) {
  if (s == 12) return Alphabet::Twelve;
  if (s == 9) return Alphabet::Nine;
  if (s == 13) return Alphabet::Thirteen;
  throw std::invalid_argument("alphabet must be 9, 12 or 13");
}

enum class Sym : uint8_t {
  Dead,    // D  1-dim, left of all qubits
  Unborn,  // E  1-dim, right of all qubits
  Qdone,   // A  2-dim, qubit left of the active site
  Qpend,   // B  2-dim, qubit right of the active site
  GateF,   // G  2-dim active, sweeps right performing gates
  RightF,  // R  2-dim active, sweeps right through qubits
  LeftF,   // L  1-dim active, moves qubits right one space
  TurnF,   // T  1-dim active, turnaround marker
  Start,   // S  1-dim, 13-state only
  Qubit,   // q  2-dim, 9-state merge of A/B
  Empty,   // e  1-dim, 9-state merge of D/E
};

constexpr int kNumSyms = 11;

constexpr char kSymChar[kNumSyms] = {'D', 'E', 'A', 'B', 'G', 'R',
                                     'L', 'T', 'S', 'q', 'e'};

constexpr int kSymDataDim[kNumSyms] = {1, 1, 2, 2, 2, 2, 1, 1, 1, 2, 1};

constexpr bool kSymActive[kNumSyms] = {false, false, false, false, true, true,
                                       true,  true,  false, false, false};

// Rank consistent with ASCII ordering of the rendered characters; used for
// the deterministic shape-major basis order.
constexpr int kSymRank[kNumSyms] = {2, 3, 0, 1, 4, 6, 5, 8, 7, 10, 9};

inline char sym_char(Sym s) { return kSymChar[static_cast<int>(s)]; }
inline int sym_data_dim(Sym s) { return kSymDataDim[static_cast<int>(s)]; }
inline bool sym_active(Sym s) { return kSymActive[static_cast<int>(s)]; }
inline int sym_rank(Sym s) { return kSymRank[static_cast<int>(s)]; }

inline bool sym_in_alphabet(Sym s, Alphabet a) {
  switch (a) {
    case Alphabet::Twelve:
      return s != Sym::Start && s != Sym::Qubit && s != Sym::Empty;
    case Alphabet::Thirteen:
      return s != Sym::Qubit && s != Sym::Empty;
    case Alphabet::Nine:
      return s == Sym::Qubit || s == Sym::Empty || s == Sym::GateF ||
             s == Sym::RightF || s == Sym::LeftF || s == Sym::TurnF;
  }
  return false;
}

inline Sym sym_from_char(char c) {
  for (int i = 0; i < kNumSyms; ++i)
    if (kSymChar[i] == c) return static_cast<Sym>(i);
  throw std::invalid_argument(std::string("unknown site symbol '") + c + "'");
}

// A configuration of the chain: one symbol per site, block width n (one block
// per circuit round), qubit data not included.
struct Shape {
  Alphabet alphabet = Alphabet::Twelve;
  int n = 0;
  std::vector<Sym> sym;

  Shape() = default;
  Shape(Alphabet a, int block, std::vector<Sym> s)
      : alphabet(a), n(block), sym(std::move(s)) {
    validate();
  }

  int size() const { return static_cast<int>(sym.size()); }
  int rounds() const { return size() / n; }

  void validate() const {
    if (n < 2) throw std::invalid_argument("block width n must be >= 2");
    if (sym.empty() || size() % n != 0)
      throw std::invalid_argument("chain length must be a positive multiple of n");
    if (size() / n < 2)
      throw std::invalid_argument("need at least two blocks (R >= 2)");
    for (Sym s : sym)
      if (!sym_in_alphabet(s, alphabet))
        throw std::invalid_argument("symbol not in the selected alphabet");
  }

  // Block boundary between sites i and i+1 (0-based)?
  bool boundary_after(int i) const { return (i + 1) % n == 0; }
  int block_of(int i) const { return i / n; }

  int active_count() const {
    int c = 0;
    for (Sym s : sym) c += sym_active(s) ? 1 : 0;
    return c;
  }
  int active_pos() const {
    for (int i = 0; i < size(); ++i)
      if (sym_active(sym[i])) return i;
    return -1;
  }
  int data_bits() const {
    int q = 0;
    for (Sym s : sym) q += sym_data_dim(s) == 2 ? 1 : 0;
    return q;
  }

  std::string render() const {
    std::string out;
    for (int i = 0; i < size(); ++i) {
      if (i > 0) {
        out += ' ';
        if (i % n == 0) out += "| ";
      }
      out += sym_char(sym[i]);
    }
    return out;
  }

  bool operator==(const Shape& o) const {
    return alphabet == o.alphabet && n == o.n && sym == o.sym;
  }
  bool operator!=(const Shape& o) const { return !(*this == o); }

  // Orders identically to comparing rendered strings.
  bool operator<(const Shape& o) const {
    const int m = std::min(size(), o.size());
    for (int i = 0; i < m; ++i) {
      int a = sym_rank(sym[i]), b = sym_rank(o.sym[i]);
      if (a != b) return a < b;
    }
    return size() < o.size();
  }
};

inline Shape parse_shape(const std::string& text, Alphabet alphabet,
                         int n_hint = 0) {
  std::vector<Sym> syms;
  std::vector<int> boundaries;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok == "|") {
      boundaries.push_back(static_cast<int>(syms.size()));
      continue;
    }
    if (tok.size() != 1)
      throw std::invalid_argument("shape token must be a single character: " + tok);
    syms.push_back(sym_from_char(tok[0]));
  }
  int n = n_hint;
  if (n == 0) {
    if (boundaries.empty())
      throw std::invalid_argument("cannot infer block width without '|' markers");
    n = boundaries.front();
  }
  for (int b : boundaries)
    if (b == 0 || b % n != 0)
      throw std::invalid_argument("block boundary markers inconsistent with n");
  return Shape(alphabet, n, std::move(syms));
}

// | gate qpend ... qpend | unborn ... unborn |   (13-state: start symbols
// after the gate instead of qpend).
inline Shape initial_shape(int n, int R, Alphabet alphabet) {
  std::vector<Sym> s(static_cast<size_t>(n) * R,
                     alphabet == Alphabet::Nine ? Sym::Empty : Sym::Unborn);
  s[0] = Sym::GateF;
  for (int i = 1; i < n; ++i) {
    if (alphabet == Alphabet::Thirteen)
      s[i] = Sym::Start;
    else
      s[i] = alphabet == Alphabet::Nine ? Sym::Qubit : Sym::Qpend;
  }
  return Shape(alphabet, n, std::move(s));
}

// | dead ... dead | qdone ... qdone gate |
inline Shape final_shape(int n, int R, Alphabet alphabet) {
  const int L = n * R;
  std::vector<Sym> s(static_cast<size_t>(L),
                     alphabet == Alphabet::Nine ? Sym::Empty : Sym::Dead);
  for (int i = L - n; i < L - 1; ++i)
    s[i] = alphabet == Alphabet::Nine ? Sym::Qubit : Sym::Qdone;
  s[L - 1] = Sym::GateF;
  return Shape(alphabet, n, std::move(s));
}

// qpend,qdone -> q; dead,unborn -> e; active sites unchanged.
inline Shape project_to_9state(const Shape& s) {
  if (s.alphabet != Alphabet::Twelve)
    throw std::invalid_argument("project_to_9state expects a 12-state shape");
  std::vector<Sym> out(s.sym.size());
  for (size_t i = 0; i < s.sym.size(); ++i) {
    switch (s.sym[i]) {
      case Sym::Qdone:
      case Sym::Qpend: out[i] = Sym::Qubit; break;
      case Sym::Dead:
      case Sym::Unborn: out[i] = Sym::Empty; break;
      default: out[i] = s.sym[i];
    }
  }
  return Shape(Alphabet::Nine, s.n, std::move(out));
}

// Dense mixed-radix code over the alphabet's symbol set; site 0 is the least
// significant digit. Used as a compact key for enumeration.
inline const std::vector<Sym>& alphabet_symbols(Alphabet a) {
  static const std::vector<Sym> twelve = {Sym::Dead,  Sym::Unborn, Sym::Qdone,
                                          Sym::Qpend, Sym::GateF,  Sym::RightF,
                                          Sym::LeftF, Sym::TurnF};
  static const std::vector<Sym> thirteen = {
      Sym::Dead,   Sym::Unborn, Sym::Qdone, Sym::Qpend, Sym::GateF,
      Sym::RightF, Sym::LeftF,  Sym::TurnF, Sym::Start};
  static const std::vector<Sym> nine = {Sym::Empty, Sym::Qubit, Sym::GateF,
                                        Sym::RightF, Sym::LeftF, Sym::TurnF};
  switch (a) {
    case Alphabet::Twelve: return twelve;
    case Alphabet::Thirteen: return thirteen;
    case Alphabet::Nine: return nine;
  }
  throw std::logic_error("bad alphabet");
}

inline int sym_digit(Sym s, Alphabet a) {
  const auto& syms = alphabet_symbols(a);
  for (size_t i = 0; i < syms.size(); ++i)
    if (syms[i] == s) return static_cast<int>(i);
  throw std::invalid_argument("symbol not in alphabet");
}

inline uint64_t shape_code(const Shape& s) {
  const auto& syms = alphabet_symbols(s.alphabet);
  const uint64_t radix = syms.size();
  uint64_t code = 0;
  for (int i = s.size() - 1; i >= 0; --i)
    code = code * radix + static_cast<uint64_t>(sym_digit(s.sym[i], s.alphabet));
  return code;
}

inline Shape shape_from_code(uint64_t code, int L, int n, Alphabet a) {
  const auto& syms = alphabet_symbols(a);
  const uint64_t radix = syms.size();
  std::vector<Sym> out(static_cast<size_t>(L));
  for (int i = 0; i < L; ++i) {
    out[i] = syms[code % radix];
    code /= radix;
  }
  return Shape(a, n, std::move(out));
}

}  // namespace lineham
