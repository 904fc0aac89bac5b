#include "uaradar/domstruct.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <tuple>

#include "uaradar/error.hpp"

namespace uaradar {

std::size_t MatchGraph::updated_count() const {
  return static_cast<std::size_t>(std::count_if(
      matched.begin(), matched.end(),
      [](const NodeMatch& m) { return m.label == MatchLabel::updated; }));
}

std::size_t MatchGraph::edge_count() const {
  return matched.size() + unmatched_left.size() + unmatched_right.size();
}

std::size_t MatchGraph::edit_op_count() const {
  return updated_count() + unmatched_left.size() + unmatched_right.size();
}

double structure_similarity(const MatchGraph& graph) {
  const std::size_t edges = graph.edge_count();
  if (edges == 0) return 1.0;
  return 1.0 - static_cast<double>(graph.edit_op_count()) / static_cast<double>(edges);
}

namespace {

struct WeightedVector {
  std::vector<std::pair<int, double>> entries;  // ascending token id
  double norm = 0.0;
};

struct Candidate {
  int j;
  double base;
  double score;
};

// Sparse score matrix: for every left node, candidate right nodes sorted by id.
class ScoreMatrix {
 public:
  explicit ScoreMatrix(std::size_t rows) : rows_(rows) {}

  std::vector<Candidate>& row(int i) { return rows_[static_cast<std::size_t>(i)]; }
  const std::vector<Candidate>& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }

  double score(int i, int j) const {
    const auto& r = row(i);
    auto it = std::lower_bound(r.begin(), r.end(), j,
                               [](const Candidate& c, int v) { return c.j < v; });
    return (it != r.end() && it->j == j) ? it->score : 0.0;
  }

 private:
  std::vector<std::vector<Candidate>> rows_;
};

std::vector<WeightedVector> weigh(const DomTree& t, const std::map<std::string, int>& ids,
                                  const std::vector<double>& idf) {
  std::vector<WeightedVector> out(t.size());
  for (std::size_t n = 0; n < t.size(); ++n) {
    std::map<int, int> tf;
    for (const auto& tok : t.nodes[n].signature_tokens) ++tf[ids.at(tok)];
    WeightedVector& v = out[n];
    double sq = 0.0;
    for (auto [id, count] : tf) {
      const double w = count * idf[static_cast<std::size_t>(id)];
      v.entries.emplace_back(id, w);
      sq += w * w;
    }
    v.norm = std::sqrt(sq);
  }
  return out;
}

double propagated(const ScoreMatrix& prev, const DomTree& a, const DomTree& b, int i, int j,
                  const std::vector<int>& parent_a, const std::vector<int>& parent_b) {
  double parent_term = 0.0;
  std::size_t count = 0;
  const int pa = parent_a[static_cast<std::size_t>(i)];
  const int pb = parent_b[static_cast<std::size_t>(j)];
  if (pa >= 0 && pb >= 0) {
    parent_term = prev.score(pa, pb);
    ++count;
  }
  const auto& ca = a[i].children;
  const auto& cb = b[j].children;
  // Best correspondences of each child, summed per side so the value is
  // bit-identical when the trees are swapped.
  double left_sum = 0.0;
  for (int c : ca) {
    double best = 0.0;
    for (const Candidate& cand : prev.row(c)) {
      if (parent_b[static_cast<std::size_t>(cand.j)] == j) best = std::max(best, cand.score);
    }
    left_sum += best;
  }
  double right_sum = 0.0;
  if (!cb.empty()) {
    std::vector<double> best(cb.size(), 0.0);
    for (int c : ca) {
      for (const Candidate& cand : prev.row(c)) {
        if (parent_b[static_cast<std::size_t>(cand.j)] != j) continue;
        auto pos = std::lower_bound(cb.begin(), cb.end(), cand.j) - cb.begin();
        best[static_cast<std::size_t>(pos)] = std::max(best[static_cast<std::size_t>(pos)], cand.score);
      }
    }
    for (double v : best) right_sum += v;
  }
  count += ca.size() + cb.size();
  if (count == 0) return 0.0;
  return (parent_term + (left_sum + right_sum)) / static_cast<double>(count);
}

}  // namespace

MatchGraph sftm_match(const DomTree& a, const DomTree& b, const SftmOptions& opt) {
  if (a.size() == 0 || b.size() == 0) throw Error(ErrorCode::EmptyTree, "sftm_match");

  // Token ids follow lexicographic order so both argument orders accumulate
  // dot products identically.
  std::map<std::string, int> ids;
  std::map<std::string, int> df;
  for (const DomTree* t : {&a, &b}) {
    for (const auto& n : t->nodes) {
      std::vector<std::string> uniq = n.signature_tokens;
      uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
      for (const auto& tok : uniq) ++df[tok];
    }
  }
  std::vector<double> idf;
  idf.reserve(df.size());
  const double total = static_cast<double>(a.size() + b.size());
  for (const auto& [tok, count] : df) {
    ids.emplace(tok, static_cast<int>(idf.size()));
    idf.push_back(std::log(1.0 + total / count));
  }
  const auto va = weigh(a, ids, idf);
  const auto vb = weigh(b, ids, idf);

  // Inverted index over the right tree.
  std::vector<std::vector<std::pair<int, double>>> postings(idf.size());
  for (std::size_t j = 0; j < vb.size(); ++j) {
    for (auto [tok, w] : vb[j].entries) postings[static_cast<std::size_t>(tok)].emplace_back(static_cast<int>(j), w);
  }

  ScoreMatrix base(a.size());
  std::vector<double> acc(b.size(), 0.0);
  std::vector<int> touched;
  for (std::size_t i = 0; i < va.size(); ++i) {
    touched.clear();
    for (auto [tok, wi] : va[i].entries) {
      for (auto [j, wj] : postings[static_cast<std::size_t>(tok)]) {
        if (acc[static_cast<std::size_t>(j)] == 0.0) touched.push_back(j);
        acc[static_cast<std::size_t>(j)] += wi * wj;
      }
    }
    std::sort(touched.begin(), touched.end());
    auto& row = base.row(static_cast<int>(i));
    row.reserve(touched.size());
    for (int j : touched) {
      const double denom = va[i].norm * vb[static_cast<std::size_t>(j)].norm;
      const double cos = denom > 0.0 ? acc[static_cast<std::size_t>(j)] / denom : 0.0;
      row.push_back({j, cos, cos});
      acc[static_cast<std::size_t>(j)] = 0.0;
    }
  }

  std::vector<int> parent_a(a.size()), parent_b(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) parent_a[i] = a.nodes[i].parent;
  for (std::size_t j = 0; j < b.size(); ++j) parent_b[j] = b.nodes[j].parent;

  ScoreMatrix current = base;
  for (int round = 0; round < opt.propagation_rounds; ++round) {
    ScoreMatrix next = current;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (Candidate& c : next.row(static_cast<int>(i))) {
        c.score = c.base + opt.propagation_weight *
                               propagated(current, a, b, static_cast<int>(i), c.j, parent_a, parent_b);
      }
    }
    current = std::move(next);
  }

  struct Pick {
    double score;
    long long offset;
    int lo;
    int i;
    int j;
  };
  std::vector<Pick> picks;
  const long long n1 = static_cast<long long>(a.size());
  const long long n2 = static_cast<long long>(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (const Candidate& c : current.row(static_cast<int>(i))) {
      if (c.score < opt.threshold) continue;
      const long long off = std::llabs(static_cast<long long>(i) * n2 - c.j * n1);
      picks.push_back({c.score, off, std::min(static_cast<int>(i), c.j), static_cast<int>(i), c.j});
    }
  }
  std::sort(picks.begin(), picks.end(), [](const Pick& x, const Pick& y) {
    if (x.score != y.score) return x.score > y.score;
    return std::tie(x.offset, x.lo, x.i) < std::tie(y.offset, y.lo, y.i);
  });

  std::vector<int> partner_a(a.size(), -1), partner_b(b.size(), -1);
  std::vector<double> score_a(a.size(), 0.0);
  for (const Pick& p : picks) {
    if (partner_a[static_cast<std::size_t>(p.i)] >= 0 || partner_b[static_cast<std::size_t>(p.j)] >= 0) continue;
    partner_a[static_cast<std::size_t>(p.i)] = p.j;
    partner_b[static_cast<std::size_t>(p.j)] = p.i;
    score_a[static_cast<std::size_t>(p.i)] = p.score;
  }

  MatchGraph g;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int j = partner_a[i];
    if (j < 0) {
      g.unmatched_left.push_back(static_cast<int>(i));
      continue;
    }
    const bool same = same_content(a.nodes[i], b.nodes[static_cast<std::size_t>(j)]);
    g.matched.push_back({static_cast<int>(i), j, same ? MatchLabel::unchanged : MatchLabel::updated,
                         score_a[i]});
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (partner_b[j] < 0) g.unmatched_right.push_back(static_cast<int>(j));
  }
  return g;
}

std::size_t ted_oracle(const DomTree& t1, const DomTree& t2) {
  const std::uint64_t n1 = t1.size();
  const std::uint64_t n2 = t2.size();
  if (n1 * n2 > kTedMaxCells) {
    throw Error(ErrorCode::InstanceTooLarge,
                std::to_string(n1) + "x" + std::to_string(n2) + " nodes");
  }
  if (n1 == 0 || n2 == 0) return static_cast<std::size_t>(n1 + n2);

  // Post-order numbering (1-based), leftmost-leaf descendants and keyroots.
  struct Post {
    std::vector<int> node;  // post index -> tree id
    std::vector<int> lml;   // post index -> post index of leftmost leaf
    std::vector<int> keyroots;
  };
  auto prepare = [](const DomTree& t) {
    Post p;
    p.node.assign(t.size() + 1, -1);
    p.lml.assign(t.size() + 1, 0);
    std::vector<int> post_of(t.size(), 0);
    int counter = 0;
    std::vector<std::pair<int, std::size_t>> stack{{t.root, 0}};
    while (!stack.empty()) {
      auto& [id, next] = stack.back();
      const auto& kids = t[id].children;
      if (next < kids.size()) {
        int child = kids[next++];
        stack.emplace_back(child, 0);
        continue;
      }
      ++counter;
      post_of[static_cast<std::size_t>(id)] = counter;
      p.node[static_cast<std::size_t>(counter)] = id;
      p.lml[static_cast<std::size_t>(counter)] =
          kids.empty() ? counter : p.lml[static_cast<std::size_t>(post_of[static_cast<std::size_t>(kids.front())])];
      stack.pop_back();
    }
    // Keyroots: highest post index for each distinct leftmost leaf.
    std::map<int, int> by_lml;
    for (int k = 1; k <= counter; ++k) by_lml[p.lml[static_cast<std::size_t>(k)]] = k;
    for (auto& [l, k] : by_lml) p.keyroots.push_back(k);
    std::sort(p.keyroots.begin(), p.keyroots.end());
    return p;
  };
  const Post a = prepare(t1);
  const Post b = prepare(t2);
  const int m = static_cast<int>(n1);
  const int n = static_cast<int>(n2);

  std::vector<std::vector<int>> td(static_cast<std::size_t>(m + 1), std::vector<int>(static_cast<std::size_t>(n + 1), 0));
  std::vector<std::vector<int>> fd(static_cast<std::size_t>(m + 2), std::vector<int>(static_cast<std::size_t>(n + 2), 0));
  auto relabel = [&](int i, int j) {
    return same_content(t1[a.node[static_cast<std::size_t>(i)]], t2[b.node[static_cast<std::size_t>(j)]]) ? 0 : 1;
  };

  for (int kx : a.keyroots) {
    for (int ky : b.keyroots) {
      const int li = a.lml[static_cast<std::size_t>(kx)];
      const int lj = b.lml[static_cast<std::size_t>(ky)];
      // fd indices are offset so that li-1 maps to 0.
      auto F = [&](int i, int j) -> int& {
        return fd[static_cast<std::size_t>(i - li + 1)][static_cast<std::size_t>(j - lj + 1)];
      };
      F(li - 1, lj - 1) = 0;
      for (int i = li; i <= kx; ++i) F(i, lj - 1) = F(i - 1, lj - 1) + 1;
      for (int j = lj; j <= ky; ++j) F(li - 1, j) = F(li - 1, j - 1) + 1;
      for (int i = li; i <= kx; ++i) {
        for (int j = lj; j <= ky; ++j) {
          const int del = F(i - 1, j) + 1;
          const int ins = F(i, j - 1) + 1;
          if (a.lml[static_cast<std::size_t>(i)] == li && b.lml[static_cast<std::size_t>(j)] == lj) {
            const int sub = F(i - 1, j - 1) + relabel(i, j);
            F(i, j) = std::min({del, ins, sub});
            td[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = F(i, j);
          } else {
            const int sub = F(a.lml[static_cast<std::size_t>(i)] - 1, b.lml[static_cast<std::size_t>(j)] - 1) +
                            td[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            F(i, j) = std::min({del, ins, sub});
          }
        }
      }
    }
  }
  return static_cast<std::size_t>(td[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)]);
}

DomTree prune_tree(const DomTree& tree, const std::vector<bool>& keep) {
  DomTree work = tree;
  for (std::size_t id = 0; id < work.size(); ++id) {
    DomNode& n = work.nodes[id];
    // Text runs are positioned by element-child index; remap to kept children.
    std::vector<std::size_t> kept_before(n.children.size() + 1, 0);
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      kept_before[c + 1] = kept_before[c] + (keep[static_cast<std::size_t>(n.children[c])] ? 1 : 0);
    }
    for (auto& [pos, run] : n.text_runs) pos = kept_before[std::min(pos, n.children.size())];
    std::vector<int> kids;
    for (int c : n.children) {
      if (keep[static_cast<std::size_t>(c)]) kids.push_back(c);
    }
    n.children = std::move(kids);
  }
  return normalize_tree(std::move(work));
}

}  // namespace uaradar
