#pragma once

// Multi-pattern dictionary matching with an Aho-Corasick automaton and a
// gazetteer built on top of it for entity linking.
//
// Matching is ASCII case-insensitive. A label only matches on token
// boundaries: at both ends either the text ends or one of the two adjacent
// bytes is not a word byte (ASCII letter/digit or any non-ASCII byte).
// Overlapping matches are resolved leftmost-longest.

#include <algorithm>
#include <cctype>
#include <map>
#include <queue>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tabrml/error.hpp"

namespace tabrml {

struct PatternMatch {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t pattern = 0;

  friend bool operator==(const PatternMatch&, const PatternMatch&) = default;
};

class AhoCorasick {
 public:
  AhoCorasick() : nodes_(1) {}

  explicit AhoCorasick(const std::vector<std::string>& patterns) : nodes_(1) {
    for (std::size_t i = 0; i < patterns.size(); ++i) add(patterns[i], i);
    compile();
  }

  std::size_t pattern_count() const { return lengths_.size(); }

  // Every occurrence of every pattern, ordered by end offset then by
  // decreasing length.
  std::vector<PatternMatch> find_all(std::string_view text) const {
    std::vector<PatternMatch> out;
    std::size_t state = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
      unsigned char c = fold(text[i]);
      state = next(state, c);
      for (std::size_t p : nodes_[state].outputs) {
        std::size_t len = lengths_[p];
        out.push_back({i + 1 - len, i + 1, p});
      }
    }
    return out;
  }

  static unsigned char fold(char c) { return static_cast<unsigned char>(std::tolower(static_cast<unsigned char>(c))); }

 private:
  struct Node {
    std::map<unsigned char, std::size_t> children;
    std::size_t fail = 0;
    std::vector<std::size_t> outputs;  // own pattern first, then by suffix
  };

  void add(std::string_view pattern, std::size_t id) {
    if (pattern.empty()) throw Error("empty pattern");
    std::size_t node = 0;
    for (char ch : pattern) {
      unsigned char c = fold(ch);
      auto it = nodes_[node].children.find(c);
      if (it == nodes_[node].children.end()) {
        nodes_.push_back({});
        it = nodes_[node].children.emplace(c, nodes_.size() - 1).first;
      }
      node = it->second;
    }
    nodes_[node].outputs.push_back(id);
    lengths_.resize(std::max(lengths_.size(), id + 1));
    lengths_[id] = pattern.size();
  }

  void compile() {
    std::queue<std::size_t> queue;
    for (const auto& [c, child] : nodes_[0].children) {
      nodes_[child].fail = 0;
      queue.push(child);
    }
    while (!queue.empty()) {
      std::size_t node = queue.front();
      queue.pop();
      for (const auto& [c, child] : nodes_[node].children) {
        std::size_t f = nodes_[node].fail;
        while (f != 0 && !nodes_[f].children.contains(c)) f = nodes_[f].fail;
        auto it = nodes_[f].children.find(c);
        nodes_[child].fail = (it != nodes_[f].children.end() && it->second != child) ? it->second : 0;
        const auto& inherited = nodes_[nodes_[child].fail].outputs;
        nodes_[child].outputs.insert(nodes_[child].outputs.end(), inherited.begin(), inherited.end());
        queue.push(child);
      }
    }
  }

  std::size_t next(std::size_t state, unsigned char c) const {
    for (;;) {
      auto it = nodes_[state].children.find(c);
      if (it != nodes_[state].children.end()) return it->second;
      if (state == 0) return 0;
      state = nodes_[state].fail;
    }
  }

  std::vector<Node> nodes_;
  std::vector<std::size_t> lengths_;
};

inline bool is_word_byte(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u);
}

inline bool is_token_boundary(std::string_view text, std::size_t pos) {
  return pos == 0 || pos >= text.size() || !is_word_byte(text[pos - 1]) || !is_word_byte(text[pos]);
}

// Keeps boundary-respecting matches and resolves overlaps leftmost-longest.
inline std::vector<PatternMatch> select_leftmost_longest(std::string_view text, std::vector<PatternMatch> matches) {
  std::erase_if(matches, [&](const PatternMatch& m) {
    return !is_token_boundary(text, m.begin) || !is_token_boundary(text, m.end);
  });
  std::sort(matches.begin(), matches.end(), [](const PatternMatch& a, const PatternMatch& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    if (a.end != b.end) return a.end > b.end;
    return a.pattern < b.pattern;
  });
  std::vector<PatternMatch> out;
  std::size_t last_end = 0;
  for (const PatternMatch& m : matches) {
    if (!out.empty() && m.begin < last_end) continue;
    out.push_back(m);
    last_end = m.end;
  }
  return out;
}

// Label -> IRI dictionary, in insertion order.
struct Gazetteer {
  std::vector<std::pair<std::string, std::string>> entries;

  friend bool operator==(const Gazetteer&, const Gazetteer&) = default;
};

// A gazetteer compiled into an automaton. Immutable after construction.
class CompiledGazetteer {
 public:
  CompiledGazetteer() = default;

  explicit CompiledGazetteer(const Gazetteer& gazetteer) {
    std::vector<std::string> labels;
    std::unordered_set<std::string> seen;
    for (const auto& [label, iri] : gazetteer.entries) {
      if (label.empty()) throw Error("gazetteer labels must be non-empty");
      std::string folded = label;
      for (char& c : folded) c = static_cast<char>(AhoCorasick::fold(c));
      // The first IRI registered for a label wins.
      if (!seen.insert(folded).second) continue;
      labels.push_back(label);
      iris_.push_back(iri);
    }
    automaton_ = AhoCorasick(labels);
  }

  // Distinct IRIs of the entities mentioned in `text`, in order of first
  // occurrence.
  std::vector<std::string> link(std::string_view text) const {
    std::vector<std::string> out;
    if (iris_.empty()) return out;
    std::unordered_set<std::string_view> seen;
    for (const PatternMatch& m : select_leftmost_longest(text, automaton_.find_all(text))) {
      const std::string& iri = iris_[m.pattern];
      if (seen.insert(iri).second) out.push_back(iri);
    }
    return out;
  }

 private:
  AhoCorasick automaton_;
  std::vector<std::string> iris_;
};

}  // namespace tabrml
