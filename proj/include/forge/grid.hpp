#pragma once
// Codec between u-tuples of finite subsets of ℕ², R×R matrices of bitmask
// counts, and pattern words over {0..R}.
//
// Conventions: matrices are 1-indexed (entry (i,j), 1 <= i,j <= R); subset
// coordinates are 0-based, so cell (i,j) of the matrix describes point
// (i-1, j-1). Encoding is column-major: each column j contributes a leading 0
// followed by B_{1j} copies of letter 1, B_{2j} copies of letter 2, ..., and a
// single closing 0 ends the word — R+1 zeros in total. Decoding counts letters
// between consecutive zeros; the zero-index fallback (missing j-th zero maps
// to the last position) makes the decoder total on malformed words, which the
// fuzz tests rely on.

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "forge/errors.hpp"

namespace forge {

using Cell = std::pair<std::uint64_t, std::uint64_t>;
using CellSet = std::set<Cell>;

struct SubsetTuple {
  std::vector<CellSet> sets;  // sets[v-1] is X_v, v = 1..u
  std::uint64_t arity() const { return sets.size(); }
};

struct GridMatrix {
  std::uint64_t R = 0;
  std::vector<std::vector<std::uint64_t>> entries;  // entries[i-1][j-1]

  std::uint64_t at(std::uint64_t i, std::uint64_t j) const {
    if (i < 1 || i > R || j < 1 || j > R)
      throw DomainError("GridMatrix::at: index out of range (1-based)");
    return entries[i - 1][j - 1];
  }
};

struct PatternWord {
  std::vector<std::uint32_t> letters;
  std::uint32_t R = 0;  // alphabet bound: letters range over {0..R}
};

// B(X,R)_{i,j} = Σ_v χ_{X_v}(i-1, j-1) · 2^{v-1}; coordinates >= R are ignored
inline GridMatrix encode_matrix(const SubsetTuple& X, std::uint64_t R) {
  if (R < 1) throw DomainError("encode_matrix: R must be >= 1");
  if (X.arity() > 63) throw DomainError("encode_matrix: arity too large for bitmasks");
  GridMatrix B;
  B.R = R;
  B.entries.assign(R, std::vector<std::uint64_t>(R, 0));
  for (std::uint64_t v = 1; v <= X.arity(); ++v)
    for (const auto& [i, j] : X.sets[v - 1])
      if (i < R && j < R) B.entries[i][j] |= std::uint64_t{1} << (v - 1);
  return B;
}

// w(B) = 0 1^{B11} 2^{B21} ... R^{BR1} 0 ... 0 1^{B1R} ... R^{BRR} 0
inline PatternWord word_of_matrix(const GridMatrix& B) {
  PatternWord w;
  w.R = static_cast<std::uint32_t>(B.R);
  for (std::uint64_t j = 1; j <= B.R; ++j) {
    w.letters.push_back(0);
    for (std::uint64_t i = 1; i <= B.R; ++i)
      w.letters.insert(w.letters.end(), B.at(i, j), static_cast<std::uint32_t>(i));
  }
  w.letters.push_back(0);
  return w;
}

// positions p with r_p = 0, ascending
inline std::vector<std::size_t> zero_positions(const PatternWord& r) {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < r.letters.size(); ++p)
    if (r.letters[p] == 0) out.push_back(p);
  return out;
}

// the j-th zero position (j >= 1), falling back to the last index s when
// fewer than j zeros exist; total, empty word maps to 0
inline std::size_t z_index(const PatternWord& r, std::uint64_t j) {
  if (j < 1) throw DomainError("z_index: j must be >= 1");
  const auto zeros = zero_positions(r);
  if (j <= zeros.size()) return zeros[j - 1];
  return r.letters.empty() ? 0 : r.letters.size() - 1;
}

// C(r,i,j) = card{ p : Z(r,j) < p < Z(r,j+1), r_p = i }
inline std::uint64_t run_count(const PatternWord& r, std::uint64_t i, std::uint64_t j) {
  if (i < 1 || j < 1) throw DomainError("run_count: indices are 1-based");
  const std::size_t lo = z_index(r, j);
  const std::size_t hi = z_index(r, j + 1);
  std::uint64_t c = 0;
  for (std::size_t p = lo + 1; p + 1 <= hi && p < r.letters.size(); ++p)
    if (r.letters[p] == i) ++c;
  return c;
}

inline GridMatrix matrix_of_word(const PatternWord& r, std::uint64_t R) {
  if (R < 1) throw DomainError("matrix_of_word: R must be >= 1");
  GridMatrix B;
  B.R = R;
  B.entries.assign(R, std::vector<std::uint64_t>(R, 0));
  for (std::uint64_t i = 1; i <= R; ++i)
    for (std::uint64_t j = 1; j <= R; ++j) B.entries[i - 1][j - 1] = run_count(r, i, j);
  return B;
}

// bit v-1 of a matrix entry, v >= 1
inline bool bit_member(std::uint64_t v, std::uint64_t entry) {
  if (v < 1) throw DomainError("bit_member: v must be >= 1");
  if (v > 64) return false;
  return (entry >> (v - 1)) & 1;
}

// (i,j) ∈ X_v iff bit v-1 of C(r, i+1, j+1), for 0 <= i,j < R
inline SubsetTuple decode_subsets(const PatternWord& r, std::uint64_t R,
                                  std::uint64_t u) {
  SubsetTuple X;
  X.sets.assign(u, {});
  for (std::uint64_t i = 0; i < R; ++i)
    for (std::uint64_t j = 0; j < R; ++j) {
      const std::uint64_t c = run_count(r, i + 1, j + 1);
      for (std::uint64_t v = 1; v <= u; ++v)
        if (bit_member(v, c)) X.sets[v - 1].insert({i, j});
    }
  return X;
}

// external text form: contiguous digits when R <= 9, else comma-separated
inline std::string format_word(const PatternWord& w) {
  std::string out;
  if (w.R <= 9) {
    for (auto c : w.letters) out += static_cast<char>('0' + c);
  } else {
    for (std::size_t p = 0; p < w.letters.size(); ++p) {
      if (p) out += ',';
      out += std::to_string(w.letters[p]);
    }
  }
  return out;
}

inline PatternWord parse_word(const std::string& text, std::uint32_t R) {
  PatternWord w;
  w.R = R;
  if (text.find(',') == std::string::npos && R <= 9) {
    for (std::size_t p = 0; p < text.size(); ++p) {
      const char c = text[p];
      if (c < '0' || c > '9') throw ParseError("parse_word: expected digit", p);
      const auto letter = static_cast<std::uint32_t>(c - '0');
      if (letter > R) throw ParseError("parse_word: letter exceeds alphabet bound", p);
      w.letters.push_back(letter);
    }
  } else {
    std::size_t p = 0;
    while (p < text.size()) {
      std::size_t q = p;
      while (q < text.size() && text[q] != ',') ++q;
      const std::string tok = text.substr(p, q - p);
      if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("parse_word: expected decimal letter", p);
      const auto letter = static_cast<std::uint32_t>(std::stoul(tok));
      if (letter > R) throw ParseError("parse_word: letter exceeds alphabet bound", p);
      w.letters.push_back(letter);
      p = q + (q < text.size() ? 1 : 0);
    }
  }
  return w;
}

}  // namespace forge
