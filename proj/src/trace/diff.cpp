#include "lcfi/trace/diff.hpp"

#include <algorithm>
#include <cstdio>

namespace lcfi::trace {

std::string_view diff_class_name(DiffClass c) {
  switch (c) {
    case DiffClass::Identical: return "identical";
    case DiffClass::ValueDivergence: return "value_divergence";
    case DiffClass::ControlDivergence: return "control_divergence";
    case DiffClass::Both: return "both";
  }
  return "?";
}

namespace {

using Ops = std::vector<AlignedPair>;

// Myers' greedy shortest edit script over a[0..n) and b[0..m). Returns false
// when the edit distance exceeds `limit`.
bool myers(const std::vector<std::uint32_t>& a, std::size_t a0, std::size_t n, const std::vector<std::uint32_t>& b,
           std::size_t b0, std::size_t m, std::size_t limit, Ops& out) {
  const long N = static_cast<long>(n), M = static_cast<long>(m);
  const long max_d = std::min<long>(N + M, static_cast<long>(limit));
  const long off = max_d + 1;
  std::vector<long> v(2 * off + 1, 0);
  std::vector<std::vector<long>> history;
  long found = -1;
  for (long d = 0; d <= max_d && found < 0; ++d) {
    history.emplace_back(v.begin() + (off - d - 1), v.begin() + (off + d + 2));
    for (long k = -d; k <= d; k += 2) {
      long x = (k == -d || (k != d && v[off + k - 1] < v[off + k + 1])) ? v[off + k + 1] : v[off + k - 1] + 1;
      long y = x - k;
      while (x < N && y < M && a[a0 + x] == b[b0 + y]) ++x, ++y;
      v[off + k] = x;
      if (x >= N && y >= M) {
        found = d;
        break;
      }
    }
  }
  if (found < 0) return false;

  Ops rev;
  long x = N, y = M;
  for (long d = found; d > 0; --d) {
    const auto& prev = history[d];  // state before step d, covering k in [-d-1, d+1]
    auto at = [&](long k) { return prev[k + d + 1]; };
    const long k = x - y;
    const bool down = (k == -d || (k != d && at(k - 1) < at(k + 1)));
    const long pk = down ? k + 1 : k - 1;
    const long px = at(pk), py = px - pk;
    while (x > px + (down ? 0 : 1) && y > py + (down ? 1 : 0)) {
      --x, --y;
      rev.push_back({a0 + x, b0 + y, false});
    }
    if (down) {
      rev.push_back({std::nullopt, b0 + py, true});
    } else {
      rev.push_back({a0 + px, std::nullopt, true});
    }
    x = px, y = py;
  }
  while (x > 0 && y > 0) {
    --x, --y;
    rev.push_back({a0 + x, b0 + y, false});
  }
  out.insert(out.end(), rev.rbegin(), rev.rend());
  return true;
}

void windowed(const std::vector<std::uint32_t>& a, std::size_t a0, std::size_t n, const std::vector<std::uint32_t>& b,
              std::size_t b0, std::size_t m, std::size_t window, Ops& out) {
  std::size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (a[a0 + i] == b[b0 + j]) {
      out.push_back({a0 + i++, b0 + j++, false});
      continue;
    }
    std::size_t skip_a = 0, skip_b = 0;
    bool found = false;
    for (std::size_t s = 1; s <= window && !found; ++s) {
      if (i + s < n && a[a0 + i + s] == b[b0 + j]) skip_a = s, found = true;
      else if (j + s < m && a[a0 + i] == b[b0 + j + s]) skip_b = s, found = true;
    }
    if (!found) {
      out.push_back({a0 + i++, std::nullopt, true});
      out.push_back({std::nullopt, b0 + j++, true});
      continue;
    }
    for (std::size_t s = 0; s < skip_a; ++s) out.push_back({a0 + i++, std::nullopt, true});
    for (std::size_t s = 0; s < skip_b; ++s) out.push_back({std::nullopt, b0 + j++, true});
  }
  while (i < n) out.push_back({a0 + i++, std::nullopt, true});
  while (j < m) out.push_back({std::nullopt, b0 + j++, true});
}

}  // namespace

DiffReport trace_diff(Trace golden, Trace faulty, const DiffOptions& options) {
  DiffReport rep;
  rep.golden = std::move(golden);
  rep.faulty = std::move(faulty);
  const auto& g = rep.golden;
  const auto& f = rep.faulty;

  std::vector<std::uint32_t> a(g.size()), b(f.size());
  for (std::size_t i = 0; i < g.size(); ++i) a[i] = g[i].index;
  for (std::size_t i = 0; i < f.size(); ++i) b[i] = f[i].index;

  std::size_t pre = 0;
  while (pre < a.size() && pre < b.size() && a[pre] == b[pre]) ++pre;
  std::size_t suf = 0;
  while (suf < a.size() - pre && suf < b.size() - pre && a[a.size() - 1 - suf] == b[b.size() - 1 - suf]) ++suf;

  Ops ops;
  ops.reserve(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < pre; ++i) ops.push_back({i, i, false});
  const std::size_t n = a.size() - pre - suf, m = b.size() - pre - suf;
  if (!myers(a, pre, n, b, pre, m, options.max_edits, ops)) {
    rep.approximate = true;
    windowed(a, pre, n, b, pre, m, options.fallback_window, ops);
  }
  for (std::size_t s = suf; s > 0; --s) ops.push_back({a.size() - s, b.size() - s, false});

  for (auto& p : ops) {
    Divergence d;
    d.golden_position = p.golden;
    d.faulty_position = p.faulty;
    if (p.golden) {
      d.index = g[*p.golden].index;
      d.golden_bits = g[*p.golden].bits;
    }
    if (p.faulty) {
      d.index = f[*p.faulty].index;
      d.faulty_bits = f[*p.faulty].bits;
    }
    if (p.matched()) {
      p.mismatch = g[*p.golden].bits != f[*p.faulty].bits || g[*p.golden].width != f[*p.faulty].width;
      if (!p.mismatch) continue;
      rep.value_divergences.push_back(d);
      if (!rep.first_value_divergence) rep.first_value_divergence = d;
    } else {
      rep.control_flow_divergences.push_back(d);
    }
    if (!rep.first_divergence) rep.first_divergence = d;
  }
  rep.pairs = std::move(ops);

  const bool value = !rep.value_divergences.empty();
  const bool control = !rep.control_flow_divergences.empty();
  rep.classification = value && control ? DiffClass::Both
                       : value          ? DiffClass::ValueDivergence
                       : control        ? DiffClass::ControlDivergence
                                        : DiffClass::Identical;
  return rep;
}

namespace {

std::string hex(std::uint64_t bits, std::uint8_t width) {
  char buf[17];
  if (width == 8)
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(bits));
  else
    std::snprintf(buf, sizeof buf, "%08llx", static_cast<unsigned long long>(bits));
  return buf;
}

std::string describe(const DiffReport& r, const Divergence& d) {
  std::string s = "ID " + std::to_string(d.index);
  if (d.is_value()) {
    s += " (golden #" + std::to_string(*d.golden_position) + ", faulty #" + std::to_string(*d.faulty_position) +
         "): golden " + hex(*d.golden_bits, r.golden[*d.golden_position].width) + " faulty " +
         hex(*d.faulty_bits, r.faulty[*d.faulty_position].width);
  } else if (d.golden_position) {
    const auto& rec = r.golden[*d.golden_position];
    s += " (golden #" + std::to_string(*d.golden_position) + "): present in golden only, OPCode " + rec.opcode +
         " Value " + hex(rec.bits, rec.width);
  } else {
    const auto& rec = r.faulty[*d.faulty_position];
    s += " (faulty #" + std::to_string(*d.faulty_position) + "): present in faulty only, OPCode " + rec.opcode +
         " Value " + hex(rec.bits, rec.width);
  }
  return s;
}

}  // namespace

std::string format_diff(const DiffReport& r) {
  std::string out = "classification: " + std::string(diff_class_name(r.classification)) + "\n";
  out += "records: golden " + std::to_string(r.golden.size()) + ", faulty " + std::to_string(r.faulty.size()) + "\n";
  if (r.approximate) out += "alignment: approximate (edit limit exceeded)\n";
  if (r.first_divergence) out += "first divergence: " + describe(r, *r.first_divergence) + "\n";
  if (r.first_value_divergence) out += "first value divergence: " + describe(r, *r.first_value_divergence) + "\n";
  out += "value divergences: " + std::to_string(r.value_divergences.size()) + "\n";
  for (const auto& d : r.value_divergences) out += "  " + describe(r, d) + "\n";
  out += "control-flow divergences: " + std::to_string(r.control_flow_divergences.size()) + "\n";
  for (const auto& d : r.control_flow_divergences) out += "  " + describe(r, d) + "\n";
  return out;
}

}  // namespace lcfi::trace
