#include "treeduce/pattern.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace treeduce {

const char* to_string(Eligibility e) {
  switch (e) {
    case Eligibility::Eligible: return "eligible";
    case Eligibility::ExternalDependent: return "external-dependent";
    case Eligibility::NotFullyConnected: return "not-fully-connected";
    case Eligibility::NonProjective: return "non-projective";
  }
  return "?";
}

std::string serialize(const HeadPattern& p) {
  std::ostringstream out;
  for (int h : p.heads) {
    if (h == kOutside)
      out << "- ";
    else
      out << h << ' ';
  }
  out << (p.external ? "true" : "false");
  return out.str();
}

std::string serialize(const LabelPattern& p) {
  std::ostringstream out;
  for (const auto& l : p.labels) out << l << ' ';
  out << (p.external ? "true" : "false");
  return out.str();
}

namespace {

std::vector<std::string> split_spaces(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> parts;
  std::string part;
  while (in >> part) parts.push_back(part);
  return parts;
}

bool parse_flag(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("bad external flag '" + s + "'");
}

}  // namespace

HeadPattern parse_head_pattern(const std::string& text) {
  auto parts = split_spaces(text);
  if (parts.size() < 3)
    throw std::invalid_argument("bad head pattern '" + text + "'");
  HeadPattern p;
  p.external = parse_flag(parts.back());
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    if (parts[i] == "-") {
      p.heads.push_back(kOutside);
    } else {
      p.heads.push_back(std::stoi(parts[i]));
    }
  }
  return p;
}

LabelPattern parse_label_pattern(const std::string& text) {
  auto parts = split_spaces(text);
  if (parts.size() < 3)
    throw std::invalid_argument("bad label pattern '" + text + "'");
  LabelPattern p;
  p.external = parse_flag(parts.back());
  p.labels.assign(parts.begin(), parts.end() - 1);
  return p;
}

bool is_connected_single_head(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  int root = -1;
  for (int i = 0; i < n; ++i) {
    if (heads[i] == kOutside) {
      if (root >= 0) return false;
      root = i;
    }
  }
  if (root < 0) return false;
  for (int i = 0; i < n; ++i) {
    int cur = i;
    int steps = 0;
    while (cur != root) {
      cur = heads[cur];
      if (cur == kOutside || ++steps > n) return false;
    }
  }
  return true;
}

bool internal_arcs_projective(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  for (int i = 0; i < n; ++i) {
    if (heads[i] == kOutside) continue;
    const int lo = std::min(i, heads[i]);
    const int hi = std::max(i, heads[i]);
    for (int k = lo + 1; k < hi; ++k) {
      if (heads[k] == kOutside || heads[k] < lo || heads[k] > hi) return false;
    }
  }
  return true;
}

std::pair<HeadPattern, LabelPattern> extract_pattern(const Sentence& sent,
                                                     size_t start, size_t n) {
  if (n < 2 || n > 3) throw std::out_of_range("fragment size must be 2 or 3");
  if (start + n > sent.tokens.size())
    throw std::out_of_range("fragment span exceeds sentence");

  HeadPattern hp;
  LabelPattern lp;
  const int lo_id = static_cast<int>(start) + 1;  // 1-based span bounds
  const int hi_id = lo_id + static_cast<int>(n) - 1;
  for (size_t i = 0; i < n; ++i) {
    const Token& t = sent.tokens[start + i];
    if (t.head >= lo_id && t.head <= hi_id) {
      hp.heads.push_back(t.head - lo_id);
      lp.labels.push_back(t.deprel);
    } else {
      hp.heads.push_back(kOutside);
      lp.labels.push_back("-");
    }
  }

  if (is_connected_single_head(hp.heads)) {
    for (const Token& u : sent.tokens) {
      if (u.id >= lo_id && u.id <= hi_id) continue;
      if (u.head < lo_id || u.head > hi_id) continue;
      // u hangs off span word u.head; external only counts dependents of
      // the fragment's internal dependents, not of its head word.
      const int owner = u.head - lo_id;
      if (hp.heads[owner] != kOutside) {
        hp.external = true;
        break;
      }
    }
  }
  lp.external = hp.external;
  return {std::move(hp), std::move(lp)};
}

Eligibility classify(const HeadPattern& pattern) {
  if (pattern.external) return Eligibility::ExternalDependent;
  if (!is_connected_single_head(pattern.heads))
    return Eligibility::NotFullyConnected;
  if (!internal_arcs_projective(pattern.heads))
    return Eligibility::NonProjective;
  return Eligibility::Eligible;
}

PatternEnumeration enumerate_patterns(int n) {
  if (n != 2 && n != 3)
    throw std::out_of_range("pattern enumeration is defined for n in {2,3}");

  PatternEnumeration out;
  // Each word's head takes one of n values: kOutside or another index.
  std::vector<int> choice(n, 0);
  const int base = n;  // 0 => outside, 1..n-1 => the other indices
  std::vector<int> heads(n);
  while (true) {
    for (int i = 0; i < n; ++i) {
      if (choice[i] == 0) {
        heads[i] = kOutside;
      } else {
        int idx = choice[i] - 1;
        heads[i] = idx >= i ? idx + 1 : idx;  // skip self
      }
    }

    // Realizable from a gold tree: internal arcs form a forest.
    bool acyclic = true;
    for (int i = 0; i < n && acyclic; ++i) {
      int cur = i;
      int steps = 0;
      while (cur != kOutside) {
        cur = heads[cur];
        if (++steps > n) {
          acyclic = false;
          break;
        }
      }
    }
    // Realizable from a *projective* gold tree: an internal arc may not
    // span a word that is headed outside the arc's interval.
    if (acyclic && internal_arcs_projective(heads)) {
      if (is_connected_single_head(heads)) {
        out.connected_internal.push_back({heads, false});
        out.connected_external.push_back({heads, true});
      } else {
        out.not_connected.push_back({heads, false});
      }
    }

    int pos = n - 1;
    while (pos >= 0 && choice[pos] == base - 1) {
      choice[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++choice[pos];
  }

  auto by_serialization = [](const HeadPattern& a, const HeadPattern& b) {
    return serialize(a) < serialize(b);
  };
  std::sort(out.connected_internal.begin(), out.connected_internal.end(), by_serialization);
  std::sort(out.connected_external.begin(), out.connected_external.end(), by_serialization);
  std::sort(out.not_connected.begin(), out.not_connected.end(), by_serialization);
  return out;
}

bool is_projective_tree(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  // Subtree of every node must cover a contiguous interval of positions.
  std::vector<int> lo(n + 1), hi(n + 1), size(n + 1, 1);
  for (int i = 1; i <= n; ++i) lo[i] = hi[i] = i;
  // Accumulate bottom-up; order by repeatedly relaxing (n is small enough
  // that the O(n * depth) pass via parent chains is fine).
  for (int i = 1; i <= n; ++i) {
    int cur = heads[i - 1];
    int steps = 0;
    while (cur != 0) {
      if (cur < 0 || cur > n || ++steps > n) return false;  // not a tree
      lo[cur] = std::min(lo[cur], i);
      hi[cur] = std::max(hi[cur], i);
      ++size[cur];
      cur = heads[cur - 1];
    }
  }
  for (int i = 1; i <= n; ++i) {
    if (hi[i] - lo[i] + 1 != size[i]) return false;
  }
  return true;
}

}  // namespace treeduce
