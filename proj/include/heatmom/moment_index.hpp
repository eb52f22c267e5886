#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace heatmom {

// Fourier mode index on the torus.
using Frequency = int;

// Moment y_{l, n_1..n_k}: a time degree plus a multiset of frequencies,
// stored sorted ascending so that permuted indices compare equal.
struct MomentIndex {
  int time_degree = 0;
  std::vector<Frequency> freqs;

  MomentIndex() = default;
  MomentIndex(int ell, std::vector<Frequency> f)
      : time_degree(ell), freqs(std::move(f)) {
    std::ranges::sort(freqs);
  }

  std::size_t algebraic_degree() const { return freqs.size(); }

  int harmonic_degree() const {
    int h = 0;
    for (Frequency n : freqs) h = std::max(h, std::abs(n));
    return h;
  }

  // Sum of squared frequencies, the decay rate of the linear heat flow.
  long long squared_norm() const {
    long long s = 0;
    for (Frequency n : freqs) s += static_cast<long long>(n) * n;
    return s;
  }

  auto operator<=>(const MomentIndex&) const = default;
  bool operator==(const MomentIndex&) const = default;
};

inline std::vector<Frequency> negated_sorted(const std::vector<Frequency>& freqs) {
  std::vector<Frequency> out(freqs.rbegin(), freqs.rend());
  for (auto& n : out) n = -n;
  return out;
}

inline MomentIndex negate(const MomentIndex& idx) {
  MomentIndex out;
  out.time_degree = idx.time_degree;
  out.freqs = negated_sorted(idx.freqs);
  return out;
}

inline bool is_self_conjugate(const MomentIndex& idx) {
  return negated_sorted(idx.freqs) == idx.freqs;
}

struct CanonicalIndex {
  MomentIndex index;
  bool conjugated = false;
};

// Picks the lexicographically smaller of the multiset and its negation.
// conjugated is set when the stored representative is the negation, so the
// original moment is the complex conjugate of the canonical one.
inline CanonicalIndex canonicalize(const MomentIndex& idx) {
  auto neg = negated_sorted(idx.freqs);
  if (neg < idx.freqs) {
    MomentIndex c;
    c.time_degree = idx.time_degree;
    c.freqs = std::move(neg);
    return {std::move(c), true};
  }
  return {idx, false};
}

inline bool is_canonical(const MomentIndex& idx) {
  return !(negated_sorted(idx.freqs) < idx.freqs);
}

// "n1|n2|..."; empty for k = 0.
inline std::string freqs_to_string(const std::vector<Frequency>& freqs) {
  std::string s;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (i) s += '|';
    s += std::to_string(freqs[i]);
  }
  return s;
}

inline std::vector<Frequency> freqs_from_string(const std::string& text) {
  std::vector<Frequency> out;
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto bar = text.find('|', pos);
    if (bar == std::string::npos) bar = text.size();
    auto token = text.substr(pos, bar - pos);
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(token, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad frequency token '" + token + "'");
    }
    if (used != token.size())
      throw std::invalid_argument("bad frequency token '" + token + "'");
    out.push_back(value);
    pos = bar + 1;
  }
  std::ranges::sort(out);
  return out;
}

inline std::string to_string(const MomentIndex& idx) {
  return "(l=" + std::to_string(idx.time_degree) + ", [" + freqs_to_string(idx.freqs) + "])";
}

// Truncation of every index set in the relaxation.
struct TruncationDegrees {
  int time = 0;
  int algebraic = 0;
  int harmonic = 0;

  bool operator==(const TruncationDegrees&) const = default;
};

inline std::string to_string(const TruncationDegrees& d) {
  return "(" + std::to_string(d.time) + "," + std::to_string(d.algebraic) + "," +
         std::to_string(d.harmonic) + ")";
}

inline void require_enumerable(const TruncationDegrees& d) {
  if (d.time < 0 || d.algebraic < 0 || d.harmonic < 0)
    throw std::invalid_argument("truncation degrees must be nonnegative, got " + to_string(d));
}

// Degrees usable for a relaxation: even time/algebraic degree, at least 2.
inline void require_solvable(const TruncationDegrees& d) {
  require_enumerable(d);
  if (d.time < 2 || d.time % 2 != 0)
    throw std::invalid_argument("time degree must be even and >= 2, got " + to_string(d));
  if (d.algebraic < 2 || d.algebraic % 2 != 0)
    throw std::invalid_argument("algebraic degree must be even and >= 2, got " + to_string(d));
}

// Row/column label of a moment (or localizing) matrix.
struct BasisMonomial {
  int time_half_degree = 0;
  std::vector<Frequency> freqs;

  auto operator<=>(const BasisMonomial&) const = default;
  bool operator==(const BasisMonomial&) const = default;
};

// Exact binomial coefficient; throws if the result overflows 64 bits.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i is exact at every step.
    std::uint64_t num = n - k + i;
    std::uint64_t g = std::gcd(r, i);
    std::uint64_t rr = r / g, ii = i / g;
    std::uint64_t nn = num / ii;  // ii divides num after removing gcd with r
    if (nn != 0 && rr > UINT64_MAX / nn) throw std::overflow_error("binomial overflow");
    r = rr * nn;
  }
  return r;
}

// Number of sorted multisets of size <= max_k drawn from [-h, h].
inline std::uint64_t multiset_count(int max_k, int harmonic) {
  std::uint64_t total = 0;
  const auto alphabet = static_cast<std::uint64_t>(2 * harmonic);
  for (int k = 0; k <= max_k; ++k) total += binomial(alphabet + k, k);
  return total;
}

inline std::uint64_t moment_vector_size(const TruncationDegrees& d) {
  require_enumerable(d);
  return static_cast<std::uint64_t>(d.time + 1) * multiset_count(d.algebraic, d.harmonic);
}

inline std::uint64_t matrix_basis_size(const TruncationDegrees& d) {
  require_enumerable(d);
  return static_cast<std::uint64_t>(d.time / 2 + 1) * multiset_count(d.algebraic / 2, d.harmonic);
}

// Visits every sorted multiset of size exactly k over [-h, h] in
// lexicographic order.
template <typename Visitor>
void for_each_multiset(int k, int harmonic, Visitor&& visit) {
  std::vector<Frequency> cur(static_cast<std::size_t>(k), -harmonic);
  if (k == 0) {
    visit(cur);
    return;
  }
  while (true) {
    visit(std::as_const(cur));
    int pos = k - 1;
    while (pos >= 0 && cur[pos] == harmonic) --pos;
    if (pos < 0) return;
    ++cur[pos];
    for (int j = pos + 1; j < k; ++j) cur[j] = cur[pos];
  }
}

inline std::vector<std::vector<Frequency>> multisets_up_to(int max_k, int harmonic) {
  std::vector<std::vector<Frequency>> out;
  for (int k = 0; k <= max_k; ++k)
    for_each_multiset(k, harmonic, [&](const std::vector<Frequency>& f) { out.push_back(f); });
  return out;
}

// All indices with l <= d_t, k <= d_a, |n_j| <= d_h; ordered by l, then k,
// then lexicographically. One entry per multiset, conjugate pairs included.
inline std::vector<MomentIndex> enumerate_moment_vector(const TruncationDegrees& d) {
  require_enumerable(d);
  const auto sets = multisets_up_to(d.algebraic, d.harmonic);
  std::vector<MomentIndex> out;
  out.reserve(sets.size() * static_cast<std::size_t>(d.time + 1));
  for (int ell = 0; ell <= d.time; ++ell)
    for (const auto& f : sets) {
      MomentIndex idx;
      idx.time_degree = ell;
      idx.freqs = f;
      out.push_back(std::move(idx));
    }
  return out;
}

inline std::vector<BasisMonomial> enumerate_basis(int max_time_half, int max_alg_half, int harmonic) {
  const auto sets = multisets_up_to(max_alg_half, harmonic);
  std::vector<BasisMonomial> out;
  for (int t = 0; t <= max_time_half; ++t)
    for (const auto& f : sets) out.push_back({t, f});
  return out;
}

// Row/column labels of the moment matrix: half time degree, half algebraic
// degree, full harmonic degree.
inline std::vector<BasisMonomial> enumerate_matrix_basis(const TruncationDegrees& d) {
  require_enumerable(d);
  return enumerate_basis(d.time / 2, d.algebraic / 2, d.harmonic);
}

// Moment addressed by entry (row, col): y_{l+l', n_1..n_k, -n'_1..-n'_k'}.
inline MomentIndex entry_index(const BasisMonomial& row, const BasisMonomial& col) {
  std::vector<Frequency> f = row.freqs;
  for (Frequency n : col.freqs) f.push_back(-n);
  return MomentIndex(row.time_half_degree + col.time_half_degree, std::move(f));
}

}  // namespace heatmom
