#pragma once

// Greedy injective resource matching between two statement lists and
// cell-level precision/recall over provenance-annotated graphs.

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabrml/error.hpp"
#include "tabrml/rdf.hpp"
#include "tabrml/rml.hpp"

namespace tabrml {

// Injective map between the resources of two graphs, kept together with its
// inverse. Literals are never mapped.
class MatchFunction {
 public:
  const Term* forward(const Term& r) const {
    auto it = forward_.find(r);
    return it == forward_.end() ? nullptr : &it->second;
  }
  const Term* inverse(const Term& r) const {
    auto it = inverse_.find(r);
    return it == inverse_.end() ? nullptr : &it->second;
  }

  // True if binding a -> b keeps the map injective (or is already present).
  bool compatible(const Term& a, const Term& b) const {
    const Term* f = forward(a);
    const Term* i = inverse(b);
    return (!f || *f == b) && (!i || *i == a);
  }

  void bind(const Term& a, const Term& b) {
    forward_.emplace(a, b);
    inverse_.emplace(b, a);
  }

  std::size_t size() const { return forward_.size(); }
  std::size_t identities() const {
    return static_cast<std::size_t>(
        std::count_if(forward_.begin(), forward_.end(), [](const auto& kv) { return kv.first == kv.second; }));
  }

  MatchFunction inverted() const {
    MatchFunction m;
    m.forward_ = inverse_;
    m.inverse_ = forward_;
    return m;
  }

  Term apply(const Term& t) const {
    if (!t.is_resource()) return t;
    const Term* f = forward(t);
    return f ? *f : t;
  }
  Triple apply(const Triple& t) const { return {apply(t.subject), apply(t.predicate), apply(t.object)}; }

  const std::map<Term, Term>& pairs() const { return forward_; }

  friend bool operator==(const MatchFunction& a, const MatchFunction& b) { return a.forward_ == b.forward_; }

 private:
  std::map<Term, Term> forward_;
  std::map<Term, Term> inverse_;
};

inline constexpr double kMismatchDistance = 1.0;

// 0 if the two statements can be aligned under m (recording the new
// bindings), otherwise the mismatch distance with m left untouched.
// Resources are checked against m and its inverse even when equal, so the
// match stays injective; a literal never aligns with a resource.
inline double distance(const Triple& a, const Triple& b, MatchFunction& m) {
  std::vector<std::pair<const Term*, const Term*>> pending;
  auto check = [&](const Term& x, const Term& y) {
    if (x.is_literal() || y.is_literal()) return x == y;
    for (const auto& [px, py] : pending) {
      if (*px == x && !(*py == y)) return false;
      if (*py == y && !(*px == x)) return false;
    }
    if (!m.compatible(x, y)) return false;
    pending.emplace_back(&x, &y);
    return true;
  };
  if (!check(a.subject, b.subject) || !check(a.predicate, b.predicate) || !check(a.object, b.object))
    return kMismatchDistance;
  for (const auto& [x, y] : pending) m.bind(*x, *y);
  return 0.0;
}

// Literal-object statements move to the end; the order is otherwise kept.
inline std::vector<Triple> order_for_matching(std::vector<Triple> statements) {
  std::stable_partition(statements.begin(), statements.end(), [](const Triple& t) { return !t.object.is_literal(); });
  return statements;
}

// |m(A) ∩ B| over distinct statements.
inline std::size_t matched_statements(const std::vector<Triple>& a, const std::set<Triple>& b, const MatchFunction& m) {
  std::set<Triple> mapped;
  for (const Triple& t : a) mapped.insert(m.apply(t));
  std::size_t n = 0;
  for (const Triple& t : mapped) n += b.contains(t);
  return n;
}

namespace detail {

class GreedyMatcher {
 public:
  GreedyMatcher(std::vector<Triple> a, const std::vector<Triple>& b, double threshold)
      : a_(std::move(a)), b_(b), b_set_(b.begin(), b.end()), threshold_(threshold) {}

  MatchFunction run(const MatchFunction& m0) {
    consider(m0);
    enumerate(a_.size(), b_.size(), m0, 0.0);
    return best_;
  }

 private:
  // Candidates rank by matched statements, then matched resources, then
  // identity pairs; the first one found wins remaining ties.
  void consider(const MatchFunction& m) {
    Score s{matched_statements(a_, b_set_, m), m.size(), m.identities()};
    if (!have_best_ || s > best_score_) {
      best_ = m;
      best_score_ = s;
      have_best_ = true;
      done_ = s.statements >= b_set_.size();
    }
  }

  // Positions [n, |A|) of A are fixed and zipped right to left with the
  // tail of B; each level fixes one more position.
  void enumerate(std::size_t n, std::size_t depth, const MatchFunction& mk, double sum) {
    if (depth == 0 || n == 0 || done_) return;
    const std::size_t j = n - 1;
    const std::size_t partner = b_.size() - a_.size() + j;
    for (std::size_t step = 0; step < n && !done_; ++step) {
      // Try the statement already in place first so identical inputs
      // resolve to the identity.
      std::size_t i = n - 1 - step;
      std::swap(a_[i], a_[j]);
      MatchFunction next = mk;
      double d = sum + distance(a_[j], b_[partner], next);
      if (d <= threshold_) {
        consider(next);
        enumerate(n - 1, depth - 1, next, d);
      }
      std::swap(a_[i], a_[j]);
    }
  }

  struct Score {
    std::size_t statements = 0, resources = 0, identities = 0;
    friend auto operator<=>(const Score&, const Score&) = default;
  };

  std::vector<Triple> a_;
  const std::vector<Triple>& b_;
  std::set<Triple> b_set_;
  double threshold_;
  MatchFunction best_;
  Score best_score_;
  bool have_best_ = false;
  bool done_ = false;
};

}  // namespace detail

// Extends m0 with resource pairs aligning A to B. Branches whose summed
// distance exceeds `threshold` are cut. When A is shorter than B the roles
// swap and the result is inverted back.
inline MatchFunction greedy_match(const std::vector<Triple>& a, const std::vector<Triple>& b,
                                  const MatchFunction& m0 = {}, double threshold = 0.0) {
  if (b.empty() || a.empty()) return m0;
  if (a.size() < b.size()) return greedy_match(b, a, m0.inverted(), threshold).inverted();
  return detail::GreedyMatcher(a, b, threshold).run(m0);
}

struct MetricsReport {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  double precision = 0.0;
  double recall = 0.0;
  double fmeasure = 0.0;

  void finalize() {
    precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    fmeasure = precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
  }

  MetricsReport& operator+=(const MetricsReport& o) {
    tp += o.tp;
    fn += o.fn;
    fp += o.fp;
    finalize();
    return *this;
  }
};

struct CellCounts {
  std::uint32_t column = 0;
  std::uint32_t row = 0;
  std::size_t tp = 0, fn = 0, fp = 0;
  std::size_t expected = 0;       // |c_E|
  std::size_t mapped_actual = 0;  // |m(c_A)|
};

struct SheetEvaluation {
  MetricsReport metrics;
  std::vector<CellCounts> cells;  // row-major
  MatchFunction match;
};

// Compares the statements of one sheet cell by cell. One match function
// evolves over the cells in row-major order; bindings are never revised.
inline SheetEvaluation evaluate_sheet_detailed(const std::vector<ProvenancedStatement>& actual,
                                               const std::vector<ProvenancedStatement>& expected,
                                               double threshold = 0.0) {
  std::string sheet;
  bool have_sheet = false;
  for (const auto* side : {&actual, &expected})
    for (const ProvenancedStatement& s : *side) {
      if (!have_sheet) {
        sheet = s.sheet;
        have_sheet = true;
      } else if (s.sheet != sheet) {
        throw EvaluationError("statements from different sheets: '" + sheet + "' and '" + s.sheet + "'");
      }
    }

  using Key = std::pair<std::uint32_t, std::uint32_t>;  // (row, column)
  std::map<Key, std::pair<std::vector<Triple>, std::vector<Triple>>> cells;
  auto add_unique = [](std::vector<Triple>& v, const Triple& t) {
    if (std::find(v.begin(), v.end(), t) == v.end()) v.push_back(t);
  };
  for (const ProvenancedStatement& s : actual) add_unique(cells[{s.row, s.column}].first, s.triple);
  for (const ProvenancedStatement& s : expected) add_unique(cells[{s.row, s.column}].second, s.triple);

  SheetEvaluation out;
  for (auto& [key, graphs] : cells) {
    std::vector<Triple> a = order_for_matching(graphs.first);
    std::vector<Triple> e = order_for_matching(graphs.second);
    out.match = greedy_match(a, e, out.match, threshold);

    std::set<Triple> mapped;
    for (const Triple& t : a) mapped.insert(out.match.apply(t));
    std::set<Triple> exp(e.begin(), e.end());
    CellCounts c;
    c.row = key.first;
    c.column = key.second;
    for (const Triple& t : exp) (mapped.contains(t) ? c.tp : c.fn)++;
    for (const Triple& t : mapped) c.fp += !exp.contains(t);
    c.expected = exp.size();
    c.mapped_actual = mapped.size();
    out.metrics.tp += c.tp;
    out.metrics.fn += c.fn;
    out.metrics.fp += c.fp;
    out.cells.push_back(c);
  }
  out.metrics.finalize();
  return out;
}

inline MetricsReport evaluate_sheet(const std::vector<ProvenancedStatement>& actual,
                                    const std::vector<ProvenancedStatement>& expected, double threshold = 0.0) {
  return evaluate_sheet_detailed(actual, expected, threshold).metrics;
}

// Per-sheet metrics over all sheets mentioned on either side, plus totals.
struct EvaluationReport {
  std::vector<std::pair<std::string, MetricsReport>> sheets;
  MetricsReport total;
};

inline EvaluationReport evaluate(const std::vector<ProvenancedStatement>& actual,
                                 const std::vector<ProvenancedStatement>& expected, double threshold = 0.0) {
  std::vector<std::string> names;
  for (const auto* side : {&actual, &expected})
    for (const ProvenancedStatement& s : *side)
      if (std::find(names.begin(), names.end(), s.sheet) == names.end()) names.push_back(s.sheet);
  EvaluationReport report;
  for (const std::string& name : names) {
    std::vector<ProvenancedStatement> a, e;
    std::copy_if(actual.begin(), actual.end(), std::back_inserter(a), [&](const auto& s) { return s.sheet == name; });
    std::copy_if(expected.begin(), expected.end(), std::back_inserter(e),
                 [&](const auto& s) { return s.sheet == name; });
    MetricsReport m = evaluate_sheet(a, e, threshold);
    report.total += m;
    report.sheets.emplace_back(name, m);
  }
  report.total.finalize();
  return report;
}

inline nlohmann::ordered_json to_json(const MetricsReport& m) {
  nlohmann::ordered_json j;
  j["tp"] = m.tp;
  j["fn"] = m.fn;
  j["fp"] = m.fp;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["fmeasure"] = m.fmeasure;
  return j;
}

inline std::string report_json(const EvaluationReport& r) {
  nlohmann::ordered_json j;
  j["sheets"] = nlohmann::ordered_json::array();
  for (const auto& [name, m] : r.sheets) {
    nlohmann::ordered_json s = to_json(m);
    s["sheet"] = name;
    j["sheets"].push_back(std::move(s));
  }
  j["total"] = to_json(r.total);
  return j.dump(2) + "\n";
}

inline std::string report_text(const EvaluationReport& r) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24s %6s %6s %6s %9s %9s %9s\n", "sheet", "tp", "fn", "fp", "precision", "recall",
                "f");
  out += buf;
  auto row = [&](const std::string& name, const MetricsReport& m) {
    std::snprintf(buf, sizeof buf, "%-24s %6zu %6zu %6zu %9.4f %9.4f %9.4f\n", name.c_str(), m.tp, m.fn, m.fp,
                  m.precision, m.recall, m.fmeasure);
    out += buf;
  };
  for (const auto& [name, m] : r.sheets) row(name, m);
  row("(total)", r.total);
  return out;
}

}  // namespace tabrml
