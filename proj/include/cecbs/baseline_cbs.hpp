#pragma once

// Discrete CBS over a 4-connected unit grid with space-time A* as the low
// level. Used as the comparison baseline.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cecbs/errors.hpp"
#include "cecbs/scenario.hpp"

namespace cecbs::discrete {

struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

class Grid {
 public:
  Grid(int width, int height) : width_(width), height_(height), blocked_(static_cast<std::size_t>(width * height), 0) {
    if (width <= 0 || height <= 0) throw InvalidInput("grid dimensions must be positive");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool blocked(Cell c) const { return blocked_[index(c)] != 0; }
  bool free(Cell c) const { return in_bounds(c) && !blocked(c); }
  void set_blocked(Cell c, bool b = true) { blocked_[index(c)] = b ? 1 : 0; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x); }
  std::size_t blocked_count() const { return static_cast<std::size_t>(std::count(blocked_.begin(), blocked_.end(), 1)); }

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> blocked_;
};

struct GridAgent {
  AgentId id = 0;
  Cell start;
  Cell goal;
};

struct Rasterized {
  Grid grid;
  std::vector<GridAgent> agents;
  double cell_size = 1.0;
};

inline Cell cell_of(Point p, double cell_size, const Grid& g) {
  const int x = std::clamp(static_cast<int>(std::floor(p.x / cell_size)), 0, g.width() - 1);
  const int y = std::clamp(static_cast<int>(std::floor(p.y / cell_size)), 0, g.height() - 1);
  return {x, y};
}

// A cell is blocked when an obstacle reaches into its open square.
inline Rasterized rasterize(const Scenario& sc, double cell_size) {
  if (!(cell_size > 0.0)) throw InvalidInput("cell size must be positive");
  const int w = std::max(1, static_cast<int>(std::ceil(sc.width / cell_size - 1e-9)));
  const int h = std::max(1, static_cast<int>(std::ceil(sc.height / cell_size - 1e-9)));
  Rasterized out{Grid(w, h), {}, cell_size};
  for (const Rect& r : sc.obstacles) {
    const int x0 = std::max(0, static_cast<int>(std::floor(r.x / cell_size)) - 1);
    const int x1 = std::min(w - 1, static_cast<int>(std::floor(r.x_max() / cell_size)) + 1);
    const int y0 = std::max(0, static_cast<int>(std::floor(r.y / cell_size)) - 1);
    const int y1 = std::min(h - 1, static_cast<int>(std::floor(r.y_max() / cell_size)) + 1);
    for (int cy = y0; cy <= y1; ++cy) {
      for (int cx = x0; cx <= x1; ++cx) {
        const double lx = cx * cell_size;
        const double ly = cy * cell_size;
        if (r.x < lx + cell_size && r.x_max() > lx && r.y < ly + cell_size && r.y_max() > ly) {
          out.grid.set_blocked({cx, cy});
        }
      }
    }
  }
  for (std::size_t k = 0; k < sc.agents.size(); ++k) {
    const AgentSpec& a = sc.agents[k];
    const GridAgent ga{a.id, cell_of(a.start, cell_size, out.grid), cell_of(a.goal, cell_size, out.grid)};
    if (out.grid.blocked(ga.start)) throw InvalidScenario(agent_field(k, "start"), "start cell is blocked");
    if (out.grid.blocked(ga.goal)) throw InvalidScenario(agent_field(k, "goal"), "goal cell is blocked");
    out.agents.push_back(ga);
  }
  return out;
}

// The agent may not occupy `cell` at time t.
struct VertexConstraint {
  AgentId agent = 0;
  Cell cell;
  int t = 0;
};

// The agent may not move from `from` to `to` between t and t + 1.
struct EdgeConstraint {
  AgentId agent = 0;
  Cell from;
  Cell to;
  int t = 0;
};

struct Constraints {
  std::vector<VertexConstraint> vertex;
  std::vector<EdgeConstraint> edge;
};

// Cell occupied at every timestep; cost is the number of steps until the
// final arrival.
struct GridPath {
  std::vector<Cell> cells;

  int cost() const { return cells.empty() ? 0 : static_cast<int>(cells.size()) - 1; }
  Cell at(int t) const { return cells[static_cast<std::size_t>(std::min<int>(t, cost()))]; }
};

inline constexpr int kDx[5] = {0, 1, -1, 0, 0};
inline constexpr int kDy[5] = {0, 0, 0, 1, -1};

inline bool reachable(const Grid& g, Cell s, Cell goal) {
  std::vector<char> seen(static_cast<std::size_t>(g.width() * g.height()), 0);
  std::deque<Cell> q{s};
  seen[g.index(s)] = 1;
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop_front();
    if (c == goal) return true;
    for (int k = 1; k < 5; ++k) {
      const Cell n{c.x + kDx[k], c.y + kDy[k]};
      if (g.free(n) && !seen[g.index(n)]) {
        seen[g.index(n)] = 1;
        q.push_back(n);
      }
    }
  }
  return false;
}

// Optimal single-agent path under unit moves and waits. Constraints of other
// agents are ignored. A state (cell, t) reached by a move is skipped when the
// cell was already expanded at an earlier time and waiting there until t
// breaks no vertex constraint. Waits are generated only while some constraint
// on the cell or a neighbour still lies ahead; otherwise moving on and waiting
// at the next cell reaches the same states no later.
inline std::optional<GridPath> astar(const Grid& g, Cell start, Cell goal, const Constraints& cons, AgentId agent = 0) {
  if (!g.free(start) || !g.free(goal)) return std::nullopt;
  if (!reachable(g, start, goal)) return std::nullopt;

  std::unordered_map<std::size_t, std::vector<int>> vbanned;  // cell index -> sorted times
  std::set<std::tuple<int, int, int, int, int>> ebanned;
  int goal_block = -1;  // latest time the goal cell is forbidden
  for (const auto& c : cons.vertex) {
    if (c.agent != agent || !g.in_bounds(c.cell)) continue;
    vbanned[g.index(c.cell)].push_back(c.t);
    if (c.cell == goal) goal_block = std::max(goal_block, c.t);
  }
  for (auto& [cell, times] : vbanned) std::sort(times.begin(), times.end());
  std::unordered_map<std::size_t, int> edge_last;  // from-cell index -> latest edge constraint
  for (const auto& c : cons.edge) {
    if (c.agent != agent || !g.in_bounds(c.from)) continue;
    ebanned.emplace(c.from.x, c.from.y, c.to.x, c.to.y, c.t);
    int& last = edge_last[g.index(c.from)];
    last = std::max(last, c.t);
  }
  auto wait_useful = [&](Cell c, int t) {
    if (const auto it = edge_last.find(g.index(c)); it != edge_last.end() && it->second >= t) return true;
    for (int k = 0; k < 5; ++k) {
      const Cell n{c.x + kDx[k], c.y + kDy[k]};
      if (!g.in_bounds(n)) continue;
      const auto it = vbanned.find(g.index(n));
      if (it != vbanned.end() && it->second.back() > t) return true;
    }
    return false;
  };
  auto banned_in = [&](std::size_t cell, int lo, int hi) {  // any constraint in (lo, hi]
    const auto it = vbanned.find(cell);
    if (it == vbanned.end()) return false;
    const auto k = std::upper_bound(it->second.begin(), it->second.end(), lo);
    return k != it->second.end() && *k <= hi;
  };
  if (banned_in(g.index(start), -1, 0)) return std::nullopt;

  std::unordered_map<std::size_t, std::vector<int>> expanded;
  auto dominated = [&](std::size_t cell, int t, bool waited) {
    const auto it = expanded.find(cell);
    if (it == expanded.end()) return false;
    for (int te : it->second) {
      if (te == t || (!waited && te < t && !banned_in(cell, te, t))) return true;
    }
    return false;
  };

  struct Rec {
    int parent;
    Cell c;
    int t;
    bool waited;
  };
  std::vector<Rec> recs;
  auto h = [&](Cell c) { return std::hypot(static_cast<double>(c.x - goal.x), static_cast<double>(c.y - goal.y)); };

  // (f, h, insertion order, record)
  using Entry = std::tuple<double, double, long long, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  long long order = 0;
  recs.push_back({-1, start, 0, false});
  open.emplace(h(start), h(start), order++, 0);
  while (!open.empty()) {
    const int ri = std::get<3>(open.top());
    open.pop();
    const Rec r = recs[static_cast<std::size_t>(ri)];
    const std::size_t ci = g.index(r.c);
    if (dominated(ci, r.t, r.waited)) continue;
    expanded[ci].push_back(r.t);
    if (r.c == goal && r.t > goal_block) {
      GridPath p;
      for (int k = ri; k >= 0; k = recs[static_cast<std::size_t>(k)].parent) {
        p.cells.push_back(recs[static_cast<std::size_t>(k)].c);
      }
      std::reverse(p.cells.begin(), p.cells.end());
      return p;
    }
    for (int k = 0; k < 5; ++k) {
      const bool wait = k == 0;
      if (wait && !wait_useful(r.c, r.t)) continue;
      const Cell n{r.c.x + kDx[k], r.c.y + kDy[k]};
      const int nt = r.t + 1;
      if (!g.free(n)) continue;
      const std::size_t ni = g.index(n);
      if (banned_in(ni, r.t, nt) || ebanned.count({r.c.x, r.c.y, n.x, n.y, r.t}) || dominated(ni, nt, wait)) continue;
      recs.push_back({ri, n, nt, wait});
      const double hn = h(n);
      open.emplace(nt + hn, hn, order++, static_cast<int>(recs.size()) - 1);
    }
  }
  return std::nullopt;
}

enum class DiscreteStatus { solved, node_budget_exhausted, planning_failure };

struct DiscreteSolution {
  DiscreteStatus status = DiscreteStatus::planning_failure;
  std::map<AgentId, GridPath> paths;
  int soc = 0;  // in cells
  int expanded = 0;

  bool solved() const { return status == DiscreteStatus::solved; }
};

struct GridConflict {
  bool is_edge = false;
  AgentId a = 0;
  AgentId b = 0;
  Cell u;  // vertex conflict cell, or a's move u -> v
  Cell v;
  int t = 0;
};

// Earliest vertex or swap conflict; vertex conflicts at t precede swaps
// during [t, t + 1].
inline std::optional<GridConflict> first_grid_conflict(const std::map<AgentId, GridPath>& paths) {
  int horizon = 0;
  for (const auto& [id, p] : paths) horizon = std::max(horizon, p.cost());
  for (int t = 0; t <= horizon; ++t) {
    for (auto i = paths.begin(); i != paths.end(); ++i) {
      for (auto j = std::next(i); j != paths.end(); ++j) {
        if (i->second.at(t) == j->second.at(t)) return GridConflict{false, i->first, j->first, i->second.at(t), {}, t};
      }
    }
    for (auto i = paths.begin(); i != paths.end(); ++i) {
      for (auto j = std::next(i); j != paths.end(); ++j) {
        const Cell a0 = i->second.at(t), a1 = i->second.at(t + 1);
        const Cell b0 = j->second.at(t), b1 = j->second.at(t + 1);
        if (!(a0 == a1) && a0 == b1 && a1 == b0) return GridConflict{true, i->first, j->first, a0, a1, t};
      }
    }
  }
  return std::nullopt;
}

inline int grid_soc(const std::map<AgentId, GridPath>& paths) {
  int s = 0;
  for (const auto& [id, p] : paths) s += p.cost();
  return s;
}

inline DiscreteSolution cbs_solve(const Grid& g, const std::vector<GridAgent>& agents, int max_nodes = 20000) {
  struct Node {
    Constraints cons;
    std::map<AgentId, GridPath> paths;
    int soc = 0;
  };
  DiscreteSolution out;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (agents[i].start == agents[j].start || agents[i].goal == agents[j].goal) {
        throw InvalidInput("agents must have distinct start and goal cells");
      }
    }
  }
  std::vector<Node> nodes;
  Node root;
  for (const GridAgent& a : agents) {
    auto p = astar(g, a.start, a.goal, root.cons, a.id);
    if (!p) return out;
    root.paths.emplace(a.id, std::move(*p));
  }
  root.soc = grid_soc(root.paths);
  nodes.push_back(std::move(root));

  using Entry = std::pair<int, int>;  // (soc, insertion order)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  open.emplace(nodes[0].soc, 0);
  auto agent_of = [&](AgentId id) -> const GridAgent& {
    return *std::find_if(agents.begin(), agents.end(), [&](const GridAgent& a) { return a.id == id; });
  };
  while (!open.empty()) {
    if (out.expanded >= max_nodes) {
      out.status = DiscreteStatus::node_budget_exhausted;
      return out;
    }
    const int idx = open.top().second;
    open.pop();
    ++out.expanded;
    const auto conflict = first_grid_conflict(nodes[static_cast<std::size_t>(idx)].paths);
    if (!conflict) {
      out.status = DiscreteStatus::solved;
      out.paths = nodes[static_cast<std::size_t>(idx)].paths;
      out.soc = nodes[static_cast<std::size_t>(idx)].soc;
      return out;
    }
    for (int side = 0; side < 2; ++side) {
      Node child;
      child.cons = nodes[static_cast<std::size_t>(idx)].cons;
      child.paths = nodes[static_cast<std::size_t>(idx)].paths;
      const AgentId who = side == 0 ? conflict->a : conflict->b;
      if (conflict->is_edge) {
        child.cons.edge.push_back(side == 0 ? EdgeConstraint{who, conflict->u, conflict->v, conflict->t}
                                            : EdgeConstraint{who, conflict->v, conflict->u, conflict->t});
      } else {
        child.cons.vertex.push_back({who, conflict->u, conflict->t});
      }
      const GridAgent& ga = agent_of(who);
      auto p = astar(g, ga.start, ga.goal, child.cons, who);
      if (!p) continue;
      child.paths[who] = std::move(*p);
      child.soc = grid_soc(child.paths);
      open.emplace(child.soc, static_cast<int>(nodes.size()));
      nodes.push_back(std::move(child));
    }
  }
  out.status = DiscreteStatus::planning_failure;
  return out;
}

}  // namespace cecbs::discrete
