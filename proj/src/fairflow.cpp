#include "faircoreset/fairflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace faircoreset {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Min-cost flow on a small graph, successive shortest paths with Johnson
// potentials. Capacities and costs are doubles; arc costs must be
// nonnegative on entry so the first Dijkstra needs no Bellman-Ford pass.
class MinCostFlow {
 public:
  explicit MinCostFlow(int n) : head_(n, -1) {}

  int add_edge(int from, int to, double cap, double cost) {
    int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, head_[from], cap, cost});
    head_[from] = id;
    arcs_.push_back({from, head_[to], 0.0, -cost});
    head_[to] = id + 1;
    return id;
  }

  double flow_on(int edge_id) const { return arcs_[edge_id ^ 1].cap; }

  // Pushes up to `target` units from s to t, returns (flow, cost).
  std::pair<double, double> run(int s, int t, double target) {
    int n = static_cast<int>(head_.size());
    std::vector<double> pot(n, 0.0), dist(n);
    std::vector<int> par_arc(n);
    std::vector<char> done(n);
    double pushed = 0.0, cost = 0.0;
    double eps = 1e-12 * (1.0 + target);

    while (target - pushed > eps) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(done.begin(), done.end(), 0);
      dist[s] = 0.0;
      using Item = std::pair<double, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
      pq.push({0.0, s});
      while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        for (int e = head_[u]; e >= 0; e = arcs_[e].next) {
          const Arc& a = arcs_[e];
          if (a.cap <= 0.0 || done[a.to]) continue;
          double nd = d + a.cost + pot[u] - pot[a.to];
          if (nd < dist[a.to]) {
            dist[a.to] = nd;
            par_arc[a.to] = e;
            pq.push({nd, a.to});
          }
        }
      }
      if (dist[t] == kInf) break;
      for (int v = 0; v < n; ++v)
        if (dist[v] < kInf) pot[v] += dist[v];

      double delta = target - pushed;
      for (int v = t; v != s; v = arcs_[par_arc[v] ^ 1].to)
        delta = std::min(delta, arcs_[par_arc[v]].cap);
      if (delta <= 0.0) break;
      for (int v = t; v != s; v = arcs_[par_arc[v] ^ 1].to) {
        arcs_[par_arc[v]].cap -= delta;
        arcs_[par_arc[v] ^ 1].cap += delta;
        cost += delta * arcs_[par_arc[v]].cost;
      }
      pushed += delta;
    }
    return {pushed, cost};
  }

 private:
  struct Arc {
    int to;
    int next;
    double cap;
    double cost;
  };
  std::vector<int> head_;
  std::vector<Arc> arcs_;
};

// Transportation specialization for few consumers: suppliers never appear as
// Dijkstra nodes. Entry into consumer a is the cheapest unsaturated supplier
// by c[i][a]; moving mass from a to b re-routes the supplier with the
// smallest regret c[i][b] - c[i][a] among those currently flowing into a.
// Both orderings are potential-independent, so static keyed heaps with lazy
// deletion suffice, and each shortest-path round costs O(k^2) plus the
// amortized heap traffic.
class SmallKTransport {
 public:
  SmallKTransport(const std::vector<std::vector<double>>& costs,
                  const std::vector<double>& supplies, std::vector<double> demands)
      : costs_(costs),
        resid_supply_(supplies),
        resid_demand_(std::move(demands)),
        m_(supplies.size()),
        k_(resid_demand_.size()),
        flow_(supplies.size(), std::vector<double>(resid_demand_.size(), 0.0)),
        entry_(resid_demand_.size()),
        move_(resid_demand_.size() * resid_demand_.size()),
        pot_(resid_demand_.size() + 1, 0.0) {
    for (std::size_t i = 0; i < m_; ++i)
      if (resid_supply_[i] > 0.0)
        for (std::size_t a = 0; a < k_; ++a)
          if (resid_demand_[a] > 0.0) entry_[a].push({costs_[i][a], static_cast<int>(i)});
  }

  TransportResult run(double target) {
    double pushed = 0.0;
    double eps = 1e-12 * (1.0 + target);
    std::size_t sink = k_;
    while (target - pushed > eps) {
      // Dijkstra over the k consumers plus the sink.
      std::vector<double> dist(k_ + 1, kInf);
      std::vector<char> done(k_ + 1, 0);
      std::vector<int> via_supplier(k_, -1);
      std::vector<int> from_consumer(k_ + 1, -1);
      for (std::size_t a = 0; a < k_; ++a) {
        int i = entry_top(a);
        if (i >= 0) dist[a] = std::max(0.0, costs_[static_cast<std::size_t>(i)][a] - pot_[a]);
        via_supplier[a] = i;
      }
      for (std::size_t round = 0; round <= k_; ++round) {
        std::size_t u = k_ + 1;
        double best = kInf;
        for (std::size_t v = 0; v <= k_; ++v)
          if (!done[v] && dist[v] < best) {
            best = dist[v];
            u = v;
          }
        if (u > k_) break;
        done[u] = 1;
        if (u == sink) break;
        if (resid_demand_[u] > 0.0) {
          double w = dist[u] + std::max(0.0, pot_[u] - pot_[sink]);
          if (w < dist[sink]) {
            dist[sink] = w;
            from_consumer[sink] = static_cast<int>(u);
          }
        }
        for (std::size_t b = 0; b < k_; ++b) {
          if (done[b] || b == u) continue;
          int i = move_top(u, b);
          if (i < 0) continue;
          double key = costs_[static_cast<std::size_t>(i)][b] - costs_[static_cast<std::size_t>(i)][u];
          double w = dist[u] + std::max(0.0, key + pot_[u] - pot_[b]);
          if (w < dist[b]) {
            dist[b] = w;
            from_consumer[b] = static_cast<int>(u);
            via_supplier[b] = i;  // the move supplier for the arc u -> b
          }
        }
      }
      if (dist[sink] == kInf) break;

      // Walk back sink -> ... -> entry consumer, collecting the chain.
      std::vector<std::pair<std::size_t, int>> hops;  // (consumer, supplier feeding it)
      std::size_t exit_consumer = static_cast<std::size_t>(from_consumer[sink]);
      std::size_t a = exit_consumer;
      while (from_consumer[a] >= 0) {
        hops.push_back({a, via_supplier[a]});
        a = static_cast<std::size_t>(from_consumer[a]);
      }
      std::size_t entry_consumer = a;
      int entry_supplier = via_supplier[entry_consumer];

      double delta = std::min(target - pushed, resid_demand_[exit_consumer]);
      delta = std::min(delta, resid_supply_[static_cast<std::size_t>(entry_supplier)]);
      for (std::size_t h = hops.size(); h-- > 0;) {
        std::size_t from = h + 1 < hops.size() ? hops[h + 1].first : entry_consumer;
        delta = std::min(delta, flow_[static_cast<std::size_t>(hops[h].second)][from]);
      }
      if (delta <= 0.0) break;

      resid_supply_[static_cast<std::size_t>(entry_supplier)] -= delta;
      add_flow(static_cast<std::size_t>(entry_supplier), entry_consumer, delta);
      for (std::size_t h = hops.size(); h-- > 0;) {
        std::size_t from = h + 1 < hops.size() ? hops[h + 1].first : entry_consumer;
        std::size_t to = hops[h].first;
        int i = hops[h].second;
        flow_[static_cast<std::size_t>(i)][from] -= delta;
        add_flow(static_cast<std::size_t>(i), to, delta);
      }
      resid_demand_[exit_consumer] -= delta;
      pushed += delta;

      for (std::size_t v = 0; v <= k_; ++v)
        if (dist[v] < kInf) pot_[v] += dist[v];
    }

    TransportResult out;
    out.flow = std::move(flow_);
    out.cost = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < k_; ++j)
        if (out.flow[i][j] > 0.0) out.cost += out.flow[i][j] * costs_[i][j];
    pushed_ = pushed;
    return out;
  }

  double pushed() const { return pushed_; }

 private:
  using HeapItem = std::pair<double, int>;
  using Heap = std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<HeapItem>>;

  int entry_top(std::size_t a) {
    Heap& h = entry_[a];
    while (!h.empty() && resid_supply_[static_cast<std::size_t>(h.top().second)] <= 0.0) h.pop();
    return h.empty() ? -1 : h.top().second;
  }

  int move_top(std::size_t a, std::size_t b) {
    Heap& h = move_[a * k_ + b];
    while (!h.empty() && flow_[static_cast<std::size_t>(h.top().second)][a] <= 0.0) h.pop();
    return h.empty() ? -1 : h.top().second;
  }

  void add_flow(std::size_t i, std::size_t a, double delta) {
    bool was_zero = flow_[i][a] <= 0.0;
    flow_[i][a] += delta;
    if (was_zero)
      for (std::size_t b = 0; b < k_; ++b)
        if (b != a) move_[a * k_ + b].push({costs_[i][b] - costs_[i][a], static_cast<int>(i)});
  }

  const std::vector<std::vector<double>>& costs_;
  std::vector<double> resid_supply_;
  std::vector<double> resid_demand_;
  std::size_t m_;
  std::size_t k_;
  std::vector<std::vector<double>> flow_;
  std::vector<Heap> entry_;
  std::vector<Heap> move_;
  std::vector<double> pot_;
  double pushed_ = 0.0;
};

}  // namespace

std::vector<double> ProfileConstraint::column_sums() const {
  std::vector<double> sums(static_cast<std::size_t>(profile_count()), 0.0);
  for (const auto& row : quotas)
    for (std::size_t t = 0; t < sums.size(); ++t) sums[t] += row[t];
  return sums;
}

TransportResult solve_transportation(const std::vector<std::vector<double>>& costs,
                                     const std::vector<double>& supplies,
                                     const std::vector<double>& demands) {
  std::size_t m = supplies.size();
  std::size_t k = demands.size();
  if (costs.size() != m) throw std::invalid_argument("cost matrix row count mismatch");
  for (const auto& row : costs) {
    if (row.size() != k) throw std::invalid_argument("cost matrix column count mismatch");
    for (double c : row)
      if (!std::isfinite(c) || c < 0.0)
        throw std::invalid_argument("costs must be finite and nonnegative");
  }
  double supply_total = 0.0, demand_total = 0.0;
  for (double s : supplies) {
    if (!std::isfinite(s) || s < 0.0) throw std::invalid_argument("negative supply");
    supply_total += s;
  }
  for (double d : demands) {
    if (!std::isfinite(d) || d < 0.0) throw std::invalid_argument("negative demand");
    demand_total += d;
  }
  double scale = std::max({supply_total, demand_total, 1.0});
  if (std::abs(supply_total - demand_total) > 1e-9 * scale)
    throw std::invalid_argument("unbalanced");

  TransportResult out;
  out.flow.assign(m, std::vector<double>(k, 0.0));
  if (supply_total <= 0.0) return out;

  // Rescale demands so both sides sum to the same double exactly; the
  // relative perturbation is at most the balance tolerance.
  double ratio = supply_total / demand_total;

  if (k <= 8) {
    std::vector<double> scaled = demands;
    for (double& d : scaled) d *= ratio;
    SmallKTransport solver(costs, supplies, std::move(scaled));
    out = solver.run(supply_total);
    if (supply_total - solver.pushed() > 1e-9 * scale)
      throw std::runtime_error("transportation did not saturate supplies");
    return out;
  }

  int source = static_cast<int>(m + k);
  int sink = source + 1;
  MinCostFlow mcf(static_cast<int>(m + k) + 2);
  std::vector<std::vector<int>> arc_id(m, std::vector<int>(k, -1));
  for (std::size_t i = 0; i < m; ++i) {
    if (supplies[i] <= 0.0) continue;
    mcf.add_edge(source, static_cast<int>(i), supplies[i], 0.0);
    for (std::size_t j = 0; j < k; ++j)
      if (demands[j] > 0.0)
        arc_id[i][j] = mcf.add_edge(static_cast<int>(i), static_cast<int>(m + j), kInf, costs[i][j]);
  }
  for (std::size_t j = 0; j < k; ++j)
    if (demands[j] > 0.0)
      mcf.add_edge(static_cast<int>(m + j), sink, demands[j] * ratio, 0.0);

  auto [pushed, cost] = mcf.run(source, sink, supply_total);
  if (supply_total - pushed > 1e-9 * scale)
    throw std::runtime_error("transportation did not saturate supplies");
  out.cost = cost;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (arc_id[i][j] >= 0) out.flow[i][j] = mcf.flow_on(arc_id[i][j]);
  return out;
}

AssignmentPlan evaluate_objective(const WeightedPointSet& s, const ProfileConstraint& f,
                                  const CenterSet& c, int z) {
  if (z != 1 && z != 2) throw std::invalid_argument("z must be 1 or 2");
  int k = c.k();
  if (f.k() != k) throw std::invalid_argument("constraint k does not match center count");
  int gamma = f.profile_count();

  std::vector<double> masses = s.profile_masses(gamma);
  std::vector<double> quota_sums = f.column_sums();
  for (int t = 0; t < gamma; ++t) {
    for (int i = 0; i < k; ++i)
      if (f.quotas[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] < 0.0)
        throw std::invalid_argument("infeasible constraint");
    double tol = 1e-9 * std::max({masses[static_cast<std::size_t>(t)],
                                  quota_sums[static_cast<std::size_t>(t)], 1.0});
    if (std::abs(masses[static_cast<std::size_t>(t)] - quota_sums[static_cast<std::size_t>(t)]) > tol)
      throw std::invalid_argument("infeasible constraint");
  }
  for (int p : s.profile_of)
    if (p < 0 || p >= gamma) throw std::invalid_argument("profile id outside constraint");

  AssignmentPlan plan;
  for (int t = 0; t < gamma; ++t) {
    std::vector<int> members;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.profile_of[i] == t) members.push_back(static_cast<int>(i));
    if (members.empty()) continue;

    std::vector<std::vector<double>> costs(members.size(), std::vector<double>(static_cast<std::size_t>(k)));
    std::vector<double> supplies(members.size());
    std::vector<double> demands(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < members.size(); ++i) {
      supplies[i] = s.weights[static_cast<std::size_t>(members[i])];
      for (int j = 0; j < k; ++j)
        costs[i][static_cast<std::size_t>(j)] =
            dist_pow(s.points[static_cast<std::size_t>(members[i])], c.centers[static_cast<std::size_t>(j)], z);
    }
    for (int j = 0; j < k; ++j)
      demands[static_cast<std::size_t>(j)] = f.quotas[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];

    TransportResult sub = solve_transportation(costs, supplies, demands);
    plan.objective += sub.cost;
    for (std::size_t i = 0; i < members.size(); ++i)
      for (int j = 0; j < k; ++j)
        if (sub.flow[i][static_cast<std::size_t>(j)] > 0.0)
          plan.flows.push_back({members[i], j, sub.flow[i][static_cast<std::size_t>(j)]});
  }
  return plan;
}

namespace {

void brute_assign(const Dataset& x, const CenterSet& c, int z, std::size_t idx,
                  std::vector<std::vector<double>>& remaining, double cost_so_far,
                  double& best) {
  if (cost_so_far >= best) return;
  if (idx == x.size()) {
    best = cost_so_far;
    return;
  }
  int t = x.profile_of[idx];
  for (int i = 0; i < c.k(); ++i) {
    auto& slot = remaining[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
    if (slot < 0.5) continue;
    slot -= 1.0;
    brute_assign(x, c, z, idx + 1, remaining,
                 cost_so_far + dist_pow(x.points[idx], c.centers[static_cast<std::size_t>(i)], z), best);
    slot += 1.0;
  }
}

}  // namespace

double brute_force_objective(const Dataset& x, const ProfileConstraint& f,
                             const CenterSet& c, int z) {
  if (x.size() > 12) throw std::invalid_argument("oracle guard");
  if (f.k() != c.k()) throw std::invalid_argument("constraint k does not match center count");
  std::vector<double> masses = x.profile_masses();
  std::vector<double> sums = f.column_sums();
  for (std::size_t t = 0; t < masses.size(); ++t) {
    for (int i = 0; i < f.k(); ++i) {
      double q = f.quotas[static_cast<std::size_t>(i)][t];
      if (q < 0.0 || std::abs(q - std::round(q)) > 1e-9)
        throw std::invalid_argument("infeasible constraint");
    }
    if (std::abs(masses[t] - sums[t]) > 1e-9)
      throw std::invalid_argument("infeasible constraint");
  }

  std::vector<std::vector<double>> remaining = f.quotas;
  double best = kInf;
  brute_assign(x, c, z, 0, remaining, 0.0, best);
  if (best == kInf) throw std::invalid_argument("infeasible constraint");
  return best;
}

std::vector<std::vector<long long>> group_level_view(const ProfileConstraint& f,
                                                     const std::vector<GroupProfile>& profiles,
                                                     int l) {
  int k = f.k();
  int gamma = f.profile_count();
  if (static_cast<int>(profiles.size()) != gamma)
    throw std::invalid_argument("profile list size does not match constraint");
  std::vector<std::vector<long long>> out(static_cast<std::size_t>(k),
                                          std::vector<long long>(static_cast<std::size_t>(l), 0));
  for (int i = 0; i < k; ++i)
    for (int t = 0; t < gamma; ++t) {
      double q = f.quotas[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
      if (std::abs(q - std::round(q)) > 1e-9) throw std::invalid_argument("non-integral quota");
      long long qi = static_cast<long long>(std::llround(q));
      for (int g : profiles[static_cast<std::size_t>(t)].member_groups)
        out[static_cast<std::size_t>(i)][static_cast<std::size_t>(g)] += qi;
    }
  return out;
}

}  // namespace faircoreset
