#include "uaradar/gumtree.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <string>
#include <unordered_map>

#include "uaradar/detail/sequence_diff.hpp"
#include "uaradar/error.hpp"

namespace uaradar {

std::string_view to_string(EditAction a) noexcept {
  switch (a) {
    case EditAction::insert: return "insert";
    case EditAction::remove: return "delete";
    case EditAction::update: return "update";
    case EditAction::move: return "move";
  }
  return "?";
}

namespace {

// Heap of nodes keyed by height, popped one height class at a time.
class HeightQueue {
 public:
  explicit HeightQueue(const SyntaxTree& t) : t_(t) {
    if (!t.empty()) push(t.root());
  }
  int peek_max() const { return by_height_.empty() ? 0 : by_height_.begin()->first; }
  std::vector<int> pop() {
    auto it = by_height_.begin();
    std::vector<int> out = std::move(it->second);
    by_height_.erase(it);
    std::sort(out.begin(), out.end());
    return out;
  }
  void push(int id) { by_height_[t_[id].height].push_back(id); }
  void open(int id) {
    for (int c : t_[id].children) push(c);
  }

 private:
  const SyntaxTree& t_;
  std::map<int, std::vector<int>, std::greater<>> by_height_;
};

std::size_t index_in(const std::vector<int>& v, int id) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), id) - v.begin());
}

class Matcher {
 public:
  Matcher(const SyntaxTree& a, const SyntaxTree& b, const GumtreeOptions& o)
      : t1_(a), t2_(b), opt_(o), m12_(a.size(), -1), m21_(b.size(), -1) {}

  std::vector<std::pair<int, int>> run() {
    if (t1_.empty() || t2_.empty()) return {};
    top_down();
    bottom_up();
    recover();
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < static_cast<int>(t1_.size()); ++i) {
      if (m12_[static_cast<std::size_t>(i)] >= 0) out.emplace_back(i, m12_[static_cast<std::size_t>(i)]);
    }
    return out;
  }

 private:
  bool free1(int i) const { return m12_[static_cast<std::size_t>(i)] < 0; }
  bool free2(int j) const { return m21_[static_cast<std::size_t>(j)] < 0; }

  void link(int i, int j) {
    m12_[static_cast<std::size_t>(i)] = j;
    m21_[static_cast<std::size_t>(j)] = i;
  }

  // Isomorphic subtrees share their pre-order layout.
  void link_subtree(int i, int j) {
    for (int k = 0; k < t1_[i].size; ++k) {
      if (free1(i + k) && free2(j + k)) link(i + k, j + k);
    }
  }

  double dice(int i, int j) const {
    if (i < 0 || j < 0) return 0.0;
    const int n1 = t1_[i].size - 1;
    const int n2 = t2_[j].size - 1;
    if (n1 + n2 == 0) return 0.0;
    int common = 0;
    for (int d = i + 1; d < i + t1_[i].size; ++d) {
      const int p = m12_[static_cast<std::size_t>(d)];
      if (p > j && p < j + t2_[j].size) ++common;
    }
    return 2.0 * common / (n1 + n2);
  }

  void top_down() {
    HeightQueue q1(t1_), q2(t2_);
    while (std::min(q1.peek_max(), q2.peek_max()) >= opt_.min_height) {
      const int h1 = q1.peek_max();
      const int h2 = q2.peek_max();
      if (h1 != h2) {
        if (h1 > h2) {
          for (int t : q1.pop()) q1.open(t);
        } else {
          for (int t : q2.pop()) q2.open(t);
        }
        continue;
      }
      const auto H1 = q1.pop();
      const auto H2 = q2.pop();
      std::map<std::uint64_t, std::pair<std::vector<int>, std::vector<int>>> groups;
      for (int t : H1) groups[t1_[t].hash].first.push_back(t);
      for (int t : H2) groups[t2_[t].hash].second.push_back(t);

      std::vector<std::pair<int, int>> ambiguous;
      std::vector<char> held1(t1_.size(), 0), held2(t2_.size(), 0);
      for (const auto& [hash, g] : groups) {
        std::vector<std::pair<int, int>> iso;
        for (int a : g.first) {
          for (int b : g.second) {
            if (isomorphic(t1_, a, t2_, b)) iso.emplace_back(a, b);
          }
        }
        if (iso.size() == 1 && g.first.size() == 1 && g.second.size() == 1) {
          link_subtree(iso[0].first, iso[0].second);
        } else {
          for (auto p : iso) {
            ambiguous.push_back(p);
            held1[static_cast<std::size_t>(p.first)] = 1;
            held2[static_cast<std::size_t>(p.second)] = 1;
          }
        }
      }
      for (int t : H1) {
        if (free1(t) && !held1[static_cast<std::size_t>(t)]) q1.open(t);
      }
      for (int t : H2) {
        if (free2(t) && !held2[static_cast<std::size_t>(t)]) q2.open(t);
      }

      struct Ranked {
        double dice;
        std::size_t offset;
        int a, b;
      };
      std::vector<Ranked> ranked;
      ranked.reserve(ambiguous.size());
      for (auto [a, b] : ambiguous) {
        const int pa = t1_[a].parent, pb = t2_[b].parent;
        const std::size_t ia = pa < 0 ? 0 : index_in(t1_[pa].children, a);
        const std::size_t ib = pb < 0 ? 0 : index_in(t2_[pb].children, b);
        ranked.push_back({dice(pa, pb), ia > ib ? ia - ib : ib - ia, a, b});
      }
      std::sort(ranked.begin(), ranked.end(), [](const Ranked& x, const Ranked& y) {
        if (x.dice != y.dice) return x.dice > y.dice;
        if (x.offset != y.offset) return x.offset < y.offset;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
      });
      for (const Ranked& r : ranked) {
        if (free1(r.a) && free2(r.b)) link_subtree(r.a, r.b);
      }
    }
  }

  void bottom_up() {
    std::vector<char> seen(t2_.size(), 0);
    std::vector<int> touched;
    for (int t : t1_.postorder()) {
      if (!free1(t)) continue;
      if (t == t1_.root()) {
        if (free2(t2_.root()) && t1_[t].kind == t2_[t2_.root()].kind) link(t, t2_.root());
        continue;
      }
      if (t1_[t].children.empty()) continue;
      std::vector<int> candidates;
      for (int d = t + 1; d < t + t1_[t].size; ++d) {
        const int p = m12_[static_cast<std::size_t>(d)];
        if (p < 0) continue;
        for (int a = t2_[p].parent; a >= 0 && !seen[static_cast<std::size_t>(a)]; a = t2_[a].parent) {
          seen[static_cast<std::size_t>(a)] = 1;
          touched.push_back(a);
          if (free2(a) && t2_[a].kind == t1_[t].kind) candidates.push_back(a);
        }
      }
      for (int a : touched) seen[static_cast<std::size_t>(a)] = 0;
      touched.clear();
      int best = -1;
      double best_dice = opt_.min_dice;
      std::sort(candidates.begin(), candidates.end());
      for (int c : candidates) {
        const double d = dice(t, c);
        if (d > best_dice) {
          best_dice = d;
          best = c;
        }
      }
      if (best >= 0) link(t, best);
    }
  }

  // Aligns still-unmapped children below every mapped pair, in pre-order, so
  // that a container whose descendants all changed a little is still matched
  // child by child. Three passes with progressively looser keys: identical
  // subtree, same kind and label, same kind.
  void recover() {
    for (int a = 0; a < static_cast<int>(t1_.size()); ++a) {
      const int b = m12_[static_cast<std::size_t>(a)];
      if (b < 0) continue;
      for (int pass = 0; pass < 3; ++pass) align(a, b, pass);
    }
  }

  void align(int a, int b, int pass) {
    std::vector<int> u1, u2;
    for (int c : t1_[a].children) {
      if (free1(c)) u1.push_back(c);
    }
    for (int c : t2_[b].children) {
      if (free2(c)) u2.push_back(c);
    }
    if (u1.empty() || u2.empty()) return;
    std::unordered_map<std::string, int> ids;
    auto key = [&](const SyntaxNode& n) {
      std::string k = n.kind;
      if (pass == 0) {
        k += '\x1f';
        k += std::to_string(n.hash);
      } else if (pass == 1) {
        k += '\x1f';
        k += n.label;
      }
      return ids.emplace(std::move(k), static_cast<int>(ids.size())).first->second;
    };
    std::vector<int> k1, k2;
    for (int c : u1) k1.push_back(key(t1_[c]));
    for (int c : u2) k2.push_back(key(t2_[c]));
    detail::SequenceDiff<int> sd{std::span<const int>(k1), std::span<const int>(k2)};
    for (const detail::Run& r : sd.run()) {
      if (r.op != DiffOp::equal) continue;
      for (std::size_t k = 0; k < r.len; ++k) {
        const int x = u1[r.a_pos + k];
        const int y = u2[r.b_pos + k];
        if (pass == 0) {
          if (isomorphic(t1_, x, t2_, y)) link_subtree(x, y);
        } else {
          link(x, y);
        }
      }
    }
  }

  const SyntaxTree& t1_;
  const SyntaxTree& t2_;
  GumtreeOptions opt_;
  std::vector<int> m12_;
  std::vector<int> m21_;
};

struct WorkNode {
  std::string kind;
  std::string label;
  int parent = -1;
  std::vector<int> children;
};

// Mutable copy of t1 under a virtual root, shared by the script generator
// and the replayer.
class WorkTree {
 public:
  explicit WorkTree(const SyntaxTree& t) {
    nodes_.reserve(t.size());
    for (const SyntaxNode& n : t.nodes()) nodes_.push_back({n.kind, n.label, n.parent, n.children});
    if (!t.empty()) vroot_.push_back(0);
  }

  std::size_t size() const { return nodes_.size(); }
  WorkNode& operator[](int id) { return nodes_[static_cast<std::size_t>(id)]; }
  std::vector<int>& kids(int parent) { return parent < 0 ? vroot_ : nodes_[static_cast<std::size_t>(parent)].children; }

  int add(std::string kind, std::string label) {
    nodes_.push_back({std::move(kind), std::move(label), -2, {}});
    return static_cast<int>(nodes_.size()) - 1;
  }

  // Returns the index the node occupied.
  std::size_t detach(int id) {
    auto& siblings = kids(nodes_[static_cast<std::size_t>(id)].parent);
    const std::size_t at = index_in(siblings, id);
    if (at == siblings.size()) throw Error(ErrorCode::InvalidArgument, "edit script: detached node");
    siblings.erase(siblings.begin() + static_cast<std::ptrdiff_t>(at));
    nodes_[static_cast<std::size_t>(id)].parent = -2;
    return at;
  }

  void attach(int id, int parent, std::size_t pos) {
    if (parent >= static_cast<int>(nodes_.size()) || (parent >= 0 && nodes_[static_cast<std::size_t>(parent)].parent == -2)) {
      throw Error(ErrorCode::InvalidArgument, "edit script: bad parent");
    }
    auto& siblings = kids(parent);
    if (pos > siblings.size()) throw Error(ErrorCode::InvalidArgument, "edit script: bad position");
    siblings.insert(siblings.begin() + static_cast<std::ptrdiff_t>(pos), id);
    nodes_[static_cast<std::size_t>(id)].parent = parent;
  }

  std::vector<int> postorder() {
    std::vector<int> out;
    std::vector<std::pair<int, std::size_t>> work;
    for (int r : vroot_) {
      work.emplace_back(r, 0);
      while (!work.empty()) {
        auto& [id, next] = work.back();
        const auto& ch = nodes_[static_cast<std::size_t>(id)].children;
        if (next < ch.size()) {
          const int c = ch[next++];
          work.emplace_back(c, 0);
        } else {
          out.push_back(id);
          work.pop_back();
        }
      }
    }
    return out;
  }

  SyntaxTree to_tree() const {
    if (vroot_.size() > 1) throw Error(ErrorCode::InvalidArgument, "edit script: several roots remain");
    std::vector<SyntaxNode> nodes(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      nodes[i].kind = nodes_[i].kind;
      nodes[i].label = nodes_[i].label;
      nodes[i].children = nodes_[i].children;
    }
    return SyntaxTree::from_nodes(nodes, vroot_.empty() ? -1 : vroot_.front());
  }

 private:
  std::vector<WorkNode> nodes_;
  std::vector<int> vroot_;
};

class ScriptBuilder {
 public:
  ScriptBuilder(const SyntaxTree& t1, const SyntaxTree& t2, const std::vector<std::pair<int, int>>& mapping)
      : t2_(t2), n1_(static_cast<int>(t1.size())), w_(t1), w2_(t1.size(), -1), p2w_(t2.size(), -1),
        in_w_(t1.size(), 0), in_2_(t2.size(), 0) {
    for (auto [a, b] : mapping) {
      w2_[static_cast<std::size_t>(a)] = b;
      p2w_[static_cast<std::size_t>(b)] = a;
    }
  }

  std::vector<EditOp> run() {
    std::deque<int> bfs;
    if (!t2_.empty()) bfs.push_back(t2_.root());
    while (!bfs.empty()) {
      const int x = bfs.front();
      bfs.pop_front();
      for (int c : t2_[x].children) bfs.push_back(c);
      visit(x);
    }
    for (int id : w_.postorder()) {
      if (partner(id) >= 0) continue;
      w_.detach(id);
      EditOp op;
      op.action = EditAction::remove;
      op.node = id;
      op.left = id < n1_ ? id : -1;
      ops_.push_back(std::move(op));
    }
    return std::move(ops_);
  }

 private:
  int partner(int w) const { return w2_[static_cast<std::size_t>(w)]; }
  int pw(int x) const { return p2w_[static_cast<std::size_t>(x)]; }
  char& in_w(int w) { return in_w_[static_cast<std::size_t>(w)]; }
  char& in_2(int x) { return in_2_[static_cast<std::size_t>(x)]; }

  std::vector<int> children2(int x) const {
    if (x < 0) return t2_.empty() ? std::vector<int>{} : std::vector<int>{t2_.root()};
    return t2_[x].children;
  }

  void visit(int x) {
    const int y = t2_[x].parent;
    const int z = y < 0 ? -1 : pw(y);
    int w = pw(x);
    if (w < 0) {
      const std::size_t k = find_pos(x);
      w = w_.add(t2_[x].kind, t2_[x].label);
      w2_.push_back(x);
      in_w_.push_back(0);
      p2w_[static_cast<std::size_t>(x)] = w;
      w_.attach(w, z, k);
      EditOp op;
      op.action = EditAction::insert;
      op.node = w;
      op.right = x;
      op.parent = z;
      op.position = k;
      op.kind = t2_[x].kind;
      op.label = t2_[x].label;
      ops_.push_back(std::move(op));
    } else {
      if (w_[w].label != t2_[x].label) {
        w_[w].label = t2_[x].label;
        EditOp op;
        op.action = EditAction::update;
        op.node = w;
        op.left = w;
        op.right = x;
        op.label = t2_[x].label;
        ops_.push_back(std::move(op));
      }
      if (w_[w].parent != z) move(w, x, z);
    }
    in_w(w) = 1;
    in_2(x) = 1;
    align_children(w, x);
  }

  void move(int w, int x, int z) {
    std::size_t k = find_pos(x);
    const int old_parent = w_[w].parent;
    const std::size_t old_index = w_.detach(w);
    if (old_parent == z && old_index < k) --k;
    w_.attach(w, z, k);
    EditOp op;
    op.action = EditAction::move;
    op.node = w;
    op.left = w < n1_ ? w : -1;
    op.right = x;
    op.parent = z;
    op.position = k;
    ops_.push_back(std::move(op));
  }

  std::size_t find_pos(int x) {
    const auto siblings = children2(t2_[x].parent);
    for (int c : siblings) {
      if (in_2(c)) {
        if (c == x) return 0;
        break;
      }
    }
    int v = -1;
    for (int c : siblings) {
      if (c == x) break;
      if (in_2(c)) v = c;
    }
    if (v < 0) return 0;
    const int u = pw(v);
    return index_in(w_.kids(w_[u].parent), u) + 1;
  }

  void align_children(int w, int x) {
    const std::vector<int> wk = w_.kids(w);
    const std::vector<int> xk = children2(x);
    for (int c : wk) in_w(c) = 0;
    for (int c : xk) in_2(c) = 0;
    std::vector<int> s1, s2;
    for (int c : wk) {
      const int p = partner(c);
      if (p >= 0 && t2_[p].parent == x) s1.push_back(p);
    }
    for (int c : xk) {
      const int p = pw(c);
      if (p >= 0 && w_[p].parent == w) s2.push_back(c);
    }
    if (s1.empty() || s2.empty()) return;
    detail::SequenceDiff<int> sd{std::span<const int>(s1), std::span<const int>(s2)};
    for (const detail::Run& r : sd.run()) {
      if (r.op != DiffOp::equal) continue;
      for (std::size_t k = 0; k < r.len; ++k) {
        const int b = s2[r.b_pos + k];
        in_2(b) = 1;
        in_w(pw(b)) = 1;
      }
    }
    for (int b : s2) {
      if (in_2(b)) continue;
      const int a = pw(b);
      move(a, b, w);
      in_w(a) = 1;
      in_2(b) = 1;
    }
  }

  const SyntaxTree& t2_;
  int n1_;
  WorkTree w_;
  std::vector<int> w2_;
  std::vector<int> p2w_;
  std::vector<char> in_w_;
  std::vector<char> in_2_;
  std::vector<EditOp> ops_;
};

}  // namespace

std::vector<std::pair<int, int>> gumtree_match(const SyntaxTree& t1, const SyntaxTree& t2,
                                               const GumtreeOptions& options) {
  return Matcher(t1, t2, options).run();
}

EditScript gumtree_diff(const SyntaxTree& t1, const SyntaxTree& t2, const GumtreeOptions& options) {
  EditScript s;
  s.mapping = gumtree_match(t1, t2, options);
  s.ops = ScriptBuilder(t1, t2, s.mapping).run();
  s.mapped_count = s.mapping.size();
  s.total_units = t1.size() + t2.size() - s.mapped_count;
  return s;
}

SyntaxTree apply_edit_script(const SyntaxTree& t1, const EditScript& script) {
  WorkTree w(t1);
  for (const EditOp& op : script.ops) {
    const bool existing = op.node >= 0 && op.node < static_cast<int>(w.size());
    switch (op.action) {
      case EditAction::insert:
        if (op.node != static_cast<int>(w.size())) throw Error(ErrorCode::InvalidArgument, "edit script: insert id");
        w.attach(w.add(op.kind, op.label), op.parent, op.position);
        break;
      case EditAction::update:
        if (!existing) throw Error(ErrorCode::InvalidArgument, "edit script: update id");
        w[op.node].label = op.label;
        break;
      case EditAction::move:
        if (!existing) throw Error(ErrorCode::InvalidArgument, "edit script: move id");
        w.detach(op.node);
        w.attach(op.node, op.parent, op.position);
        break;
      case EditAction::remove:
        if (!existing || !w[op.node].children.empty()) {
          throw Error(ErrorCode::InvalidArgument, "edit script: delete of a non-leaf");
        }
        w.detach(op.node);
        break;
    }
  }
  return w.to_tree();
}

}  // namespace uaradar
