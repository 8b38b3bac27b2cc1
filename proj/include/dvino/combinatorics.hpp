#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dvino/error.hpp"
#include "dvino/parallel.hpp"
#include "dvino/rational.hpp"

namespace dvino {

/// Non-increasing sequence of rationals in [0, 1].
class ValueSequence {
 public:
  ValueSequence() = default;
  ValueSequence(std::vector<Rational> values) : values_(std::move(values)) {  // NOLINT(implicit)
    if (values_.empty()) fail(ErrorKind::InvalidArgument, "value sequence must be non-empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] < Rational(0) || values_[i] > Rational(1)) {
        fail(ErrorKind::InvalidArgument, "value " + values_[i].str() + " outside [0,1]");
      }
      if (i > 0 && values_[i] > values_[i - 1]) {
        fail(ErrorKind::InvalidArgument, "value sequence must be non-increasing");
      }
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] const Rational& operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] const std::vector<Rational>& values() const noexcept { return values_; }
  [[nodiscard]] Rational sum() const {
    Rational s;
    for (const auto& v : values_) s += v;
    return s;
  }
  /// Largest index holding a nonzero value, if any.
  [[nodiscard]] std::optional<std::size_t> last_nonzero() const {
    for (std::size_t i = values_.size(); i-- > 0;)
      if (values_[i].is_positive()) return i;
    return std::nullopt;
  }

 private:
  std::vector<Rational> values_;
};

struct SelectionWitness {
  std::vector<std::size_t> indices;
  std::size_t index_sum = 0;
  Rational value_sum;
  Rational threshold;
  bool all_positive = false;

  [[nodiscard]] bool exceeds_threshold() const { return value_sum > threshold; }
};

namespace detail {

inline SelectionWitness make_witness(std::span<const ValueSequence> cols,
                                     const std::vector<std::size_t>& idx,
                                     const Rational& threshold) {
  SelectionWitness w;
  w.indices = idx;
  w.threshold = threshold;
  w.all_positive = true;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    w.index_sum += idx[j];
    const Rational& v = cols[j][idx[j]];
    w.value_sum += v;
    if (!v.is_positive()) w.all_positive = false;
  }
  return w;
}

/// Maximum of sum_j cols[j][i_j] over tuples with positive entries and
/// sum_j i_j >= floor. Among maximisers, the lexicographically smallest tuple.
/// Dynamic programme over (column, index sum capped at floor).
inline std::optional<std::vector<std::size_t>> optimal_selection(std::span<const ValueSequence> cols,
                                                                 std::size_t floor) {
  const std::size_t k = cols.size();
  const std::size_t states = floor + 1;
  // best[j][s]: best value obtainable from columns j.. when the index sum so far is s
  std::vector<std::vector<std::optional<Rational>>> best(k + 1, std::vector<std::optional<Rational>>(states));
  best[k][floor] = Rational(0);
  for (std::size_t j = k; j-- > 0;) {
    const auto& col = cols[j];
    for (std::size_t s = 0; s < states; ++s) {
      std::optional<Rational> top;
      for (std::size_t i = 0; i < col.size(); ++i) {
        if (!col[i].is_positive()) break;  // non-increasing: the rest are zero
        const auto& tail = best[j + 1][std::min(floor, s + i)];
        if (!tail) continue;
        Rational cand = col[i] + *tail;
        if (!top || cand > *top) top = cand;
      }
      best[j][s] = top;
    }
  }
  if (!best[0][0]) return std::nullopt;
  std::vector<std::size_t> idx(k);
  std::size_t s = 0;
  Rational remaining = *best[0][0];
  for (std::size_t j = 0; j < k; ++j) {
    const auto& col = cols[j];
    for (std::size_t i = 0; i < col.size() && col[i].is_positive(); ++i) {
      const auto& tail = best[j + 1][std::min(floor, s + i)];
      if (tail && col[i] + *tail == remaining) {
        idx[j] = i;
        remaining -= col[i];
        s = std::min(floor, s + i);
        break;
      }
    }
  }
  return idx;
}

/// Returns the first construction tuple that is admissible and optimal,
/// otherwise the lexicographically smallest optimal tuple.
inline std::optional<SelectionWitness> select_with_constructions(
    std::span<const ValueSequence> cols, std::size_t floor, const Rational& threshold,
    const std::vector<std::vector<std::size_t>>& constructions) {
  auto opt = optimal_selection(cols, floor);
  if (!opt) return std::nullopt;
  SelectionWitness best = make_witness(cols, *opt, threshold);
  for (const auto& cand : constructions) {
    if (cand.size() != cols.size()) continue;
    bool in_range = true;
    for (std::size_t j = 0; j < cand.size(); ++j) in_range = in_range && cand[j] < cols[j].size();
    if (!in_range) continue;
    SelectionWitness w = make_witness(cols, cand, threshold);
    if (w.all_positive && w.index_sum >= floor && w.value_sum == best.value_sum) return w;
  }
  return best;
}

inline void require_witness(const std::optional<SelectionWitness>& w, const char* lemma) {
  if (!w || !w->exceeds_threshold() || !w->all_positive) {
    fail(ErrorKind::NoWitness, std::string(lemma) + ": no admissible tuple beats the threshold" +
                                   (w ? " (best " + w->value_sum.str() + " vs " + w->threshold.str() + ")" : ""));
  }
}

}  // namespace detail

/// Soundness check usable on any witness: recomputes every field from the data.
inline bool witness_is_sound(std::span<const ValueSequence> cols, const SelectionWitness& w,
                             std::size_t floor) {
  if (w.indices.size() != cols.size()) return false;
  for (std::size_t j = 0; j < cols.size(); ++j)
    if (w.indices[j] >= cols[j].size()) return false;
  SelectionWitness re = detail::make_witness(cols, w.indices, w.threshold);
  return re.index_sum == w.index_sum && re.value_sum == w.value_sum && re.all_positive &&
         w.all_positive && re.index_sum >= floor && re.value_sum > re.threshold;
}

// ---------------------------------------------------------------------------

/// One non-increasing sequence of even length n (odd n only with allow_odd),
/// k >= 4 draws, c > 1/2, sum > n*c. Finds indices with index sum >= n,
/// value sum > c*k, every selected value positive.
inline SelectionWitness select_single(const ValueSequence& a, int k, const Rational& c,
                                      bool allow_odd = false) {
  const std::size_t n = a.size();
  if (k < 4) fail(ErrorKind::HypothesisUnmet, "need k >= 4");
  if (n < 2) fail(ErrorKind::HypothesisUnmet, "need n >= 2");
  if (n % 2 != 0 && !allow_odd) fail(ErrorKind::HypothesisUnmet, "n must be even");
  if (!(c > Rational(1, 2))) fail(ErrorKind::HypothesisUnmet, "need c > 1/2");
  if (!(a.sum() > Rational(static_cast<std::int64_t>(n)) * c)) {
    fail(ErrorKind::HypothesisUnmet, "sequence sum does not exceed n*c");
  }
  std::vector<ValueSequence> cols(static_cast<std::size_t>(k), a);
  // alternating (0, n/2, 0, n/2, ...) tuple from the induction step
  std::vector<std::size_t> alternating(static_cast<std::size_t>(k));
  for (std::size_t j = 1; j < alternating.size(); j += 2) alternating[j] = (n + 1) / 2;
  auto w = detail::select_with_constructions(cols, n, c * Rational(k), {alternating});
  detail::require_witness(w, "select_single");
  return *w;
}

/// Four non-increasing sequences of length 2 with a0*b0*c0*d0 > 0 and total
/// sum > 8*cp, cp > 5/8. Value sum must exceed (16/3)*cp - 1.
inline SelectionWitness select_sharp4(const ValueSequence& a, const ValueSequence& b,
                                      const ValueSequence& c, const ValueSequence& d,
                                      const Rational& cp) {
  std::vector<ValueSequence> cols{a, b, c, d};
  for (const auto& col : cols) {
    if (col.size() != 2) fail(ErrorKind::BadShape, "select_sharp4 needs sequences of length 2");
    if (!col[0].is_positive()) fail(ErrorKind::HypothesisUnmet, "leading entries must be positive");
  }
  if (!(cp > Rational(5, 8))) fail(ErrorKind::HypothesisUnmet, "need cp > 5/8");
  Rational total;
  for (const auto& col : cols) total += col.sum();
  if (!(total > Rational(8) * cp)) fail(ErrorKind::HypothesisUnmet, "total does not exceed 8*cp");
  const Rational threshold = Rational(16, 3) * cp - Rational(1);
  // candidate tuples in the order the case analysis produces them
  std::vector<std::vector<std::size_t>> constructions = {
      {1, 1, 0, 0}, {0, 0, 1, 1}, {0, 1, 1, 0}, {1, 0, 1, 0}};
  auto w = detail::select_with_constructions(cols, 2, threshold, constructions);
  detail::require_witness(w, "select_sharp4");
  return *w;
}

/// k non-increasing sequences of common length n with (n >= 3, k >= 4) or
/// (n = 2, k >= 5), positive leading entries, c > (k+1)/(2k), total > c*n*k.
inline SelectionWitness select_multi(std::span<const ValueSequence> cols, const Rational& c) {
  const std::size_t k = cols.size();
  if (k < 4) fail(ErrorKind::BadShape, "select_multi needs k >= 4 columns");
  const std::size_t n = cols[0].size();
  for (const auto& col : cols)
    if (col.size() != n) fail(ErrorKind::BadShape, "columns must share a length");
  if (!((n >= 3 && k >= 4) || (n == 2 && k >= 5))) {
    fail(ErrorKind::BadShape, "(n, k) = (" + std::to_string(n) + ", " + std::to_string(k) +
                                  ") not covered; n = 2, k = 4 is select_sharp4");
  }
  const auto kk = static_cast<std::int64_t>(k);
  if (!(c > Rational(kk + 1, 2 * kk))) fail(ErrorKind::HypothesisUnmet, "need c > (k+1)/(2k)");
  Rational total;
  for (const auto& col : cols) {
    if (!col[0].is_positive()) fail(ErrorKind::HypothesisUnmet, "leading entries must be positive");
    total += col.sum();
  }
  if (!(total > c * Rational(static_cast<std::int64_t>(n) * kk))) {
    fail(ErrorKind::HypothesisUnmet, "total does not exceed c*n*k");
  }

  std::vector<std::vector<std::size_t>> constructions;
  if (n == 2) {
    std::vector<std::size_t> front(k, 0), back(k, 1);
    front[0] = front[1] = 1;
    back[0] = back[1] = 0;
    constructions = {front, back};
  } else if (n == 3 && k == 4) {
    constructions = {{1, 1, 1, 0}, {2, 1, 0, 0}, {1, 2, 0, 0}, {2, 1, 1, 0},
                     {1, 0, 1, 1}, {0, 2, 1, 1}, {1, 1, 0, 1}, {2, 0, 1, 0}};
  }
  // closing construction of the induction: (0, s_2, n-1, ..., n-1)
  if (auto s2 = cols[1].last_nonzero()) {
    std::vector<std::size_t> tail(k, n - 1);
    tail[0] = 0;
    tail[1] = *s2;
    constructions.push_back(tail);
  }
  auto w = detail::select_with_constructions(cols, n, c * Rational(kk), constructions);
  detail::require_witness(w, "select_multi");
  return *w;
}

/// Exhaustive oracle: maximises the value sum over every index tuple with
/// positive entries and index sum >= floor. Columns of length 1 are allowed.
/// A single column with k > 1 is replicated k times.
inline std::optional<SelectionWitness> brute_force_select(std::span<const ValueSequence> cols_in, int k,
                                                          std::size_t floor,
                                                          std::uint64_t budget = 10'000'000) {
  std::vector<ValueSequence> cols(cols_in.begin(), cols_in.end());
  if (cols.size() == 1 && k > 1) cols.assign(static_cast<std::size_t>(k), cols_in[0]);
  if (cols.size() != static_cast<std::size_t>(k)) {
    fail(ErrorKind::InvalidArgument, "need one column or exactly k columns");
  }
  std::uint64_t total = 1;
  for (const auto& col : cols) {
    total *= col.size();
    if (total > budget) fail(ErrorKind::TooLarge, "enumeration exceeds budget");
  }
  std::vector<std::size_t> idx(cols.size(), 0);
  std::optional<SelectionWitness> best;
  for (std::uint64_t t = 0; t < total; ++t) {
    SelectionWitness w = detail::make_witness(cols, idx, Rational(0));
    if (w.all_positive && w.index_sum >= floor && (!best || w.value_sum > best->value_sum)) best = w;
    for (std::size_t j = idx.size(); j-- > 0;) {
      if (++idx[j] < cols[j].size()) break;
      idx[j] = 0;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Exhaustive grid verification

enum class LemmaId { Single, Sharp4, Multi };

inline std::string to_string(LemmaId id) {
  switch (id) {
    case LemmaId::Single: return "3.1";
    case LemmaId::Sharp4: return "3.2";
    case LemmaId::Multi: return "3.3";
  }
  return "?";
}

inline LemmaId parse_lemma(const std::string& s) {
  if (s == "3.1" || s == "single") return LemmaId::Single;
  if (s == "3.2" || s == "sharp4") return LemmaId::Sharp4;
  if (s == "3.3" || s == "multi") return LemmaId::Multi;
  fail(ErrorKind::InvalidArgument, "unknown lemma '" + s + "'");
}

struct GridFailure {
  std::vector<std::vector<Rational>> columns;
  std::string reason;
};

struct GridReport {
  LemmaId lemma = LemmaId::Single;
  std::size_t n = 0;
  int k = 0;
  Rational c;
  std::uint64_t instances_checked = 0;
  std::uint64_t hypothesis_hits = 0;
  std::uint64_t oracle_checked = 0;
  std::uint64_t failure_count = 0;
  std::vector<GridFailure> failures;  // first few only
};

/// All non-increasing length-n sequences over the grid.
inline std::vector<ValueSequence> nonincreasing_sequences(std::vector<Rational> grid, std::size_t n) {
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::reverse(grid.begin(), grid.end());
  std::vector<ValueSequence> out;
  std::vector<std::size_t> pos(n, 0);
  while (true) {
    std::vector<Rational> vals(n);
    for (std::size_t i = 0; i < n; ++i) vals[i] = grid[pos[i]];
    out.emplace_back(std::move(vals));
    // next non-decreasing position vector (descending grid => non-increasing values)
    std::size_t i = n;
    while (i-- > 0) {
      if (pos[i] + 1 < grid.size()) break;
    }
    if (i == static_cast<std::size_t>(-1)) break;
    ++pos[i];
    for (std::size_t j = i + 1; j < n; ++j) pos[j] = pos[i];
  }
  return out;
}

/// Enumerates every non-increasing instance over the grid, runs the selector
/// on those meeting the hypothesis, and checks the witness (and, when the
/// tuple space is at most oracle_limit, optimality against brute force).
inline GridReport grid_verify(LemmaId lemma, std::size_t n, int k, const std::vector<Rational>& grid,
                              const Rational& c, unsigned threads = 1,
                              std::uint64_t budget = 100'000'000, std::uint64_t oracle_limit = 100'000) {
  if (grid.empty()) fail(ErrorKind::InvalidArgument, "empty value grid");
  for (const auto& g : grid)
    if (g < Rational(0) || g > Rational(1)) fail(ErrorKind::InvalidArgument, "grid value outside [0,1]");
  if (lemma == LemmaId::Sharp4) {
    n = 2;
    k = 4;
  }
  GridReport rep;
  rep.lemma = lemma;
  rep.n = n;
  rep.k = k;
  rep.c = c;
  const std::vector<ValueSequence> seqs = nonincreasing_sequences(grid, n);
  const std::size_t columns = lemma == LemmaId::Single ? 1 : static_cast<std::size_t>(k);
  std::uint64_t total = 1;
  for (std::size_t j = 0; j < columns; ++j) {
    total *= seqs.size();
    if (total > budget) fail(ErrorKind::TooLarge, "grid enumeration exceeds budget");
  }
  std::uint64_t tuple_space = 1;
  for (int j = 0; j < k; ++j) tuple_space *= n;
  const bool use_oracle = tuple_space <= oracle_limit;
  const std::size_t floor = n;

  const std::size_t chunks = std::min<std::uint64_t>(total, 64);
  std::vector<GridReport> partial(chunks);
  parallel_chunks(total, chunks, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    GridReport& part = partial[chunk];
    std::vector<ValueSequence> cols(columns);
    for (std::size_t t = begin; t < end; ++t) {
      std::size_t rem = t;
      for (std::size_t j = columns; j-- > 0;) {
        cols[j] = seqs[rem % seqs.size()];
        rem /= seqs.size();
      }
      ++part.instances_checked;
      std::vector<ValueSequence> full =
          columns == 1 ? std::vector<ValueSequence>(static_cast<std::size_t>(k), cols[0]) : cols;
      auto record = [&](std::string reason) {
        ++part.failure_count;
        if (part.failures.size() < 20) {
          GridFailure f;
          for (const auto& col : cols) f.columns.push_back(col.values());
          f.reason = std::move(reason);
          part.failures.push_back(std::move(f));
        }
      };
      SelectionWitness w;
      try {
        switch (lemma) {
          case LemmaId::Single: w = select_single(cols[0], k, c); break;
          case LemmaId::Sharp4: w = select_sharp4(cols[0], cols[1], cols[2], cols[3], c); break;
          case LemmaId::Multi: w = select_multi(cols, c); break;
        }
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::HypothesisUnmet) continue;
        ++part.hypothesis_hits;
        record(std::string(dvino::to_string(e.kind())) + ": " + e.what());
        continue;
      }
      ++part.hypothesis_hits;
      if (!witness_is_sound(full, w, floor)) {
        record("unsound witness");
        continue;
      }
      if (use_oracle) {
        ++part.oracle_checked;
        auto best = brute_force_select(full, k, floor);
        if (!best || best->value_sum != w.value_sum) record("selector value differs from exhaustive optimum");
      }
    }
  });
  for (auto& part : partial) {
    rep.instances_checked += part.instances_checked;
    rep.hypothesis_hits += part.hypothesis_hits;
    rep.oracle_checked += part.oracle_checked;
    rep.failure_count += part.failure_count;
    for (auto& f : part.failures)
      if (rep.failures.size() < 20) rep.failures.push_back(std::move(f));
  }
  return rep;
}

}  // namespace dvino
