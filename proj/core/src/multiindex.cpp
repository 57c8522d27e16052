#include "wce/multiindex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wce {

MultiIndex::MultiIndex(std::initializer_list<Entry> entries) : entries_(entries) { canonicalize(); }

MultiIndex::MultiIndex(std::vector<Entry> entries) : entries_(std::move(entries)) { canonicalize(); }

MultiIndex MultiIndex::unit(int i, int k) { return MultiIndex{{Slot{i, k}, 1}}; }

void MultiIndex::canonicalize() {
  for (const auto& [slot, value] : entries_) {
    if (slot.i < 1 || slot.k < 1) throw std::invalid_argument("multi-index slots are 1-based");
    if (value < 0) throw std::invalid_argument("multi-index exponents must be nonnegative");
  }
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  std::vector<Entry> merged;
  merged.reserve(entries_.size());
  for (const auto& e : entries_) {
    if (!merged.empty() && merged.back().first == e.first) {
      merged.back().second += e.second;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const Entry& e) { return e.second == 0; });
  entries_ = std::move(merged);
  order_ = 0;
  for (const auto& e : entries_) order_ += e.second;
}

int MultiIndex::at(int i, int k) const {
  const Slot s{i, k};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                             [](const Entry& e, const Slot& key) { return e.first < key; });
  return (it != entries_.end() && it->first == s) ? it->second : 0;
}

int MultiIndex::max_time_mode() const {
  int m = 0;
  for (const auto& e : entries_) m = std::max(m, e.first.i);
  return m;
}

int MultiIndex::max_channel() const {
  int m = 0;
  for (const auto& e : entries_) m = std::max(m, e.first.k);
  return m;
}

MultiIndex MultiIndex::raised(int i, int k) const {
  auto entries = entries_;
  entries.push_back({Slot{i, k}, 1});
  return MultiIndex(std::move(entries));
}

MultiIndex MultiIndex::lowered(int i, int k) const {
  auto entries = entries_;
  for (auto& e : entries) {
    if (e.first == Slot{i, k}) e.second -= 1;
  }
  return MultiIndex(std::move(entries));
}

namespace {

// Merge-walk over the union of supports.
template <class F>
MultiIndex combine(const MultiIndex& a, const MultiIndex& b, F&& op) {
  std::vector<MultiIndex::Entry> out;
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  std::size_t p = 0, q = 0;
  while (p < ea.size() || q < eb.size()) {
    if (q == eb.size() || (p < ea.size() && ea[p].first < eb[q].first)) {
      out.push_back({ea[p].first, op(ea[p].second, 0)});
      ++p;
    } else if (p == ea.size() || eb[q].first < ea[p].first) {
      out.push_back({eb[q].first, op(0, eb[q].second)});
      ++q;
    } else {
      out.push_back({ea[p].first, op(ea[p].second, eb[q].second)});
      ++p;
      ++q;
    }
  }
  return MultiIndex(std::move(out));
}

}  // namespace

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  return combine(*this, other, [](int x, int y) { return x + y; });
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  return combine(*this, other, [](int x, int y) {
    if (x < y) throw std::invalid_argument("multi-index difference would be negative");
    return x - y;
  });
}

MultiIndex MultiIndex::scaled(int factor) const {
  auto entries = entries_;
  for (auto& e : entries) e.second *= factor;
  return MultiIndex(std::move(entries));
}

MultiIndex MultiIndex::min_with(const MultiIndex& other) const {
  return combine(*this, other, [](int x, int y) { return std::min(x, y); });
}

MultiIndex MultiIndex::abs_diff(const MultiIndex& other) const {
  return combine(*this, other, [](int x, int y) { return std::abs(x - y); });
}

bool MultiIndex::le(const MultiIndex& other) const {
  for (const auto& [slot, value] : entries_) {
    if (value > other.at(slot)) return false;
  }
  return true;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t p = 0; p < entries_.size(); ++p) {
    if (p) os << ',';
    os << '(' << entries_[p].first.i << ',' << entries_[p].first.k << ")^" << entries_[p].second;
  }
  os << '}';
  return os.str();
}

std::strong_ordering canonical_compare(const MultiIndex& a, const MultiIndex& b) {
  if (a.order() != b.order()) return a.order() <=> b.order();
  // First slot (in i-major order) where the exponents differ decides; the
  // larger exponent sorts first.
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  std::size_t p = 0, q = 0;
  while (p < ea.size() || q < eb.size()) {
    if (q == eb.size() || (p < ea.size() && ea[p].first < eb[q].first)) return std::strong_ordering::less;
    if (p == ea.size() || eb[q].first < ea[p].first) return std::strong_ordering::greater;
    if (ea[p].second != eb[q].second) return eb[q].second <=> ea[p].second;
    ++p;
    ++q;
  }
  return std::strong_ordering::equal;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& a) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
  };
  for (const auto& [slot, value] : a.entries()) {
    mix(static_cast<std::uint64_t>(slot.i));
    mix(static_cast<std::uint64_t>(slot.k) << 20);
    mix(static_cast<std::uint64_t>(value) << 40);
  }
  return static_cast<std::size_t>(h);
}

std::size_t truncation_size(const TruncationSpec& spec) {
  const int slots = spec.time_modes * spec.channels;
  // binom(slots + N, N) without overflow for the sizes we handle.
  long double c = 1.0L;
  for (int j = 1; j <= spec.max_order; ++j) c = c * (slots + j) / j;
  return static_cast<std::size_t>(std::llround(c));
}

int order(const MultiIndex& alpha) { return alpha.order(); }

BigInt big_factorial(int n) {
  BigInt f = 1;
  for (int j = 2; j <= n; ++j) f *= j;
  return f;
}

BigInt big_binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt c = 1;
  for (int j = 1; j <= k; ++j) {
    c *= n - k + j;
    c /= j;
  }
  return c;
}

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

BigInt factorial(const MultiIndex& alpha) {
  BigInt f = 1;
  for (const auto& e : alpha.entries()) f *= big_factorial(e.second);
  return f;
}

double log_factorial(const MultiIndex& alpha) {
  double s = 0.0;
  for (const auto& e : alpha.entries()) s += log_factorial(e.second);
  return s;
}

MultiIndex lower(const MultiIndex& alpha, int i, int k) { return alpha.lowered(i, k); }

MultiIndex raise(const MultiIndex& alpha, int i, int k) { return alpha.raised(i, k); }

CharacteristicSet characteristic_set(const MultiIndex& alpha) {
  CharacteristicSet set;
  set.reserve(static_cast<std::size_t>(alpha.order()));
  for (const auto& [slot, value] : alpha.entries()) {
    for (int j = 0; j < value; ++j) set.push_back(slot);
  }
  return set;
}

MultiIndex from_characteristic_set(const CharacteristicSet& set) {
  std::vector<MultiIndex::Entry> entries;
  entries.reserve(set.size());
  for (const auto& s : set) entries.push_back({s, 1});
  return MultiIndex(std::move(entries));
}

std::vector<MultiIndex> enumerate(const TruncationSpec& spec) {
  if (spec.max_order < 0 || spec.time_modes < 1 || spec.channels < 1) {
    throw std::invalid_argument("truncation needs N >= 0, n >= 1, r >= 1");
  }
  const int slots = spec.time_modes * spec.channels;
  std::vector<MultiIndex> out;
  out.reserve(truncation_size(spec));
  std::vector<int> dense(static_cast<std::size_t>(slots), 0);

  auto emit = [&] {
    std::vector<MultiIndex::Entry> entries;
    for (int s = 0; s < slots; ++s) {
      if (dense[static_cast<std::size_t>(s)] != 0) {
        entries.push_back({Slot{s / spec.channels + 1, s % spec.channels + 1}, dense[static_cast<std::size_t>(s)]});
      }
    }
    out.emplace_back(std::move(entries));
  };

  // Fill slot `s` with every value from `remaining` down to 0 so that the
  // dense vectors come out lexicographically descending.
  auto fill = [&](auto&& self, int s, int remaining) -> void {
    if (s == slots - 1) {
      dense[static_cast<std::size_t>(s)] = remaining;
      emit();
      dense[static_cast<std::size_t>(s)] = 0;
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      dense[static_cast<std::size_t>(s)] = v;
      self(self, s + 1, remaining - v);
    }
    dense[static_cast<std::size_t>(s)] = 0;
  };

  for (int m = 0; m <= spec.max_order; ++m) fill(fill, 0, m);
  return out;
}

bool is_complete(const MultiIndex& alpha, const MultiIndex& beta, const MultiIndex& gamma) {
  const MultiIndex sum = alpha + beta + gamma;
  for (const auto& e : sum.entries()) {
    if (e.second % 2 != 0) return false;
  }
  const MultiIndex lo = alpha.abs_diff(beta);
  const MultiIndex hi = alpha + beta;
  return lo.le(gamma) && gamma.le(hi);
}

namespace {

// Half-differences (alpha - beta + gamma)/2 etc. for a complete triple.
struct TripleHalves {
  MultiIndex a, b, c;
};

TripleHalves halves(const MultiIndex& alpha, const MultiIndex& beta, const MultiIndex& gamma) {
  auto half = [](const MultiIndex& m) {
    auto entries = m.entries();
    for (auto& e : entries) e.second /= 2;
    return MultiIndex(std::move(entries));
  };
  return {half(alpha + gamma - beta), half(beta + gamma - alpha), half(alpha + beta - gamma)};
}

}  // namespace

double psi(const MultiIndex& alpha, const MultiIndex& beta, const MultiIndex& gamma) {
  if (!is_complete(alpha, beta, gamma)) {
    throw IncompleteTripleError("psi: triple " + alpha.to_string() + ", " + beta.to_string() + ", " +
                                gamma.to_string() + " is not complete");
  }
  const auto h = halves(alpha, beta, gamma);
  const double log_value = 0.5 * (log_factorial(alpha) + log_factorial(beta) + log_factorial(gamma)) -
                           log_factorial(h.a) - log_factorial(h.b) - log_factorial(h.c);
  return std::exp(log_value);
}

std::pair<BigInt, BigInt> psi_squared_exact(const MultiIndex& alpha, const MultiIndex& beta,
                                            const MultiIndex& gamma) {
  if (!is_complete(alpha, beta, gamma)) {
    throw IncompleteTripleError("psi_squared_exact: incomplete triple");
  }
  const auto h = halves(alpha, beta, gamma);
  const BigInt den = factorial(h.a) * factorial(h.b) * factorial(h.c);
  return {factorial(alpha) * factorial(beta) * factorial(gamma), den * den};
}

double c_coeff(const MultiIndex& gamma, const MultiIndex& beta, const MultiIndex& mu) {
  if (!mu.le(gamma.min_with(beta))) {
    throw InvalidMuError("c_coeff: mu " + mu.to_string() + " exceeds gamma ^ beta");
  }
  double log_value = 0.0;
  auto log_binom = [](int n, int k) { return log_factorial(n) - log_factorial(k) - log_factorial(n - k); };
  const MultiIndex support = gamma + beta;
  for (const auto& [slot, total] : support.entries()) {
    const int g = gamma.at(slot), b = beta.at(slot), m = mu.at(slot);
    log_value += log_binom(total - 2 * m, g - m) + log_binom(g, m) + log_binom(b, m);
  }
  return std::exp(0.5 * log_value);
}

std::vector<ProductTerm> product_expand(const MultiIndex& gamma, const MultiIndex& beta) {
  const MultiIndex cap = gamma.min_with(beta);
  const auto& slots = cap.entries();
  std::vector<ProductTerm> out;
  std::vector<int> mu(slots.size(), 0);
  const MultiIndex sum = gamma + beta;
  while (true) {
    std::vector<MultiIndex::Entry> mu_entries;
    for (std::size_t s = 0; s < slots.size(); ++s) mu_entries.push_back({slots[s].first, mu[s]});
    const MultiIndex m(std::move(mu_entries));
    out.push_back({sum - m.scaled(2), c_coeff(gamma, beta, m)});
    // odometer over 0..cap
    std::size_t s = 0;
    while (s < slots.size() && mu[s] == slots[s].second) {
      mu[s] = 0;
      ++s;
    }
    if (s == slots.size()) break;
    ++mu[s];
  }
  std::sort(out.begin(), out.end(),
            [](const ProductTerm& a, const ProductTerm& b) { return canonical_compare(a.index, b.index) > 0; });
  return out;
}

IndexSet::IndexSet(const TruncationSpec& spec) : spec_(spec), indices_(enumerate(spec)) {
  lookup_.reserve(indices_.size());
  for (std::size_t p = 0; p < indices_.size(); ++p) lookup_.emplace(indices_[p], p);
  levels_.resize(static_cast<std::size_t>(spec.max_order) + 1);
  edges_.resize(indices_.size());
  for (std::size_t p = 0; p < indices_.size(); ++p) {
    const MultiIndex& alpha = indices_[p];
    levels_[static_cast<std::size_t>(alpha.order())].push_back(p);
    for (const auto& [slot, value] : alpha.entries()) {
      edges_[p].push_back(Edge{find(alpha.lowered(slot.i, slot.k)), slot.i, slot.k,
                               std::sqrt(static_cast<double>(value))});
    }
  }
}

std::size_t IndexSet::find(const MultiIndex& alpha) const {
  auto it = lookup_.find(alpha);
  return it == lookup_.end() ? indices_.size() : it->second;
}

}  // namespace wce
