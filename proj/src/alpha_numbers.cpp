#include "rdlab/alpha_numbers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

#include "rdlab/kernel.hpp"
#include "rdlab/optim.hpp"

namespace rdlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Min-cost flow scaffolding: arcs stored forward/backward paired; backward
// slots carry the residual of their partner.
struct FlowGraph {
  struct Arc {
    std::uint32_t to;
    double cost;
    double cap;
  };
  std::vector<Arc> arcs;
  std::vector<std::vector<std::uint32_t>> adj;

  explicit FlowGraph(std::size_t nodes) : adj(nodes) {}

  void add_edge(std::uint32_t u, std::uint32_t v, double cost) {
    adj[u].push_back(static_cast<std::uint32_t>(arcs.size()));
    arcs.push_back({v, cost, kInf});
    adj[v].push_back(static_cast<std::uint32_t>(arcs.size()));
    arcs.push_back({u, -cost, 0.0});
  }
};

double node_dist(const TransportInstance& inst, std::size_t a, std::size_t b) {
  return std::sqrt(dist2(inst.node(a), inst.node(b)));
}

// Sparse constraint graph: 32-NN plus hub arcs through representatives of
// the top two levels of a median-split cluster tree.
void sparse_pairs(const TransportInstance& inst, int knn,
                  std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs) {
  const std::size_t K = inst.size();
  pairs.clear();
  std::vector<std::pair<double, std::uint32_t>> cand;
  for (std::uint32_t i = 0; i < K; ++i) {
    cand.clear();
    for (std::uint32_t j = 0; j < K; ++j)
      if (j != i) cand.emplace_back(node_dist(inst, i, j), j);
    const std::size_t keep = std::min<std::size_t>(knn, cand.size());
    std::partial_sort(cand.begin(), cand.begin() + keep, cand.end());
    for (std::size_t t = 0; t < keep; ++t) {
      const auto [d, j] = cand[t];
      if (i < j) pairs.emplace_back(i, j);
      else pairs.emplace_back(j, i);
    }
  }

  // Representatives: median split along the widest axis, two levels deep.
  struct Cell {
    std::vector<std::uint32_t> ids;
  };
  std::vector<Cell> cells{Cell{}};
  cells[0].ids.resize(K);
  for (std::uint32_t i = 0; i < K; ++i) cells[0].ids[i] = i;
  for (int level = 0; level < 2; ++level) {
    std::vector<Cell> next;
    for (auto& cell : cells) {
      if (cell.ids.size() < 2) {
        next.push_back(cell);
        continue;
      }
      int axis = 0;
      double best = -1.0;
      for (int a = 0; a < inst.n; ++a) {
        double lo = kInf, hi = -kInf;
        for (const auto id : cell.ids) {
          lo = std::min(lo, inst.node(id)[a]);
          hi = std::max(hi, inst.node(id)[a]);
        }
        if (hi - lo > best) {
          best = hi - lo;
          axis = a;
        }
      }
      std::sort(cell.ids.begin(), cell.ids.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double va = inst.node(a)[axis], vb = inst.node(b)[axis];
        if (va != vb) return va < vb;
        return a < b;
      });
      Cell lo, hi;
      lo.ids.assign(cell.ids.begin(), cell.ids.begin() + cell.ids.size() / 2);
      hi.ids.assign(cell.ids.begin() + cell.ids.size() / 2, cell.ids.end());
      next.push_back(lo);
      next.push_back(hi);
    }
    cells = next;
  }
  std::vector<std::uint32_t> reps;
  for (const auto& cell : cells) {
    if (cell.ids.empty()) continue;
    // Node nearest the cell mean.
    VecN mean{};
    for (const auto id : cell.ids)
      for (int a = 0; a < inst.n; ++a) mean[a] += inst.node(id)[a];
    for (int a = 0; a < inst.n; ++a) mean[a] /= static_cast<double>(cell.ids.size());
    std::uint32_t bestId = cell.ids[0];
    double bestD = kInf;
    for (const auto id : cell.ids) {
      const double d = dist2(inst.node(id), {mean.data(), static_cast<std::size_t>(inst.n)});
      if (d < bestD) {
        bestD = d;
        bestId = id;
      }
    }
    reps.push_back(bestId);
    for (const auto id : cell.ids)
      if (id != bestId) pairs.emplace_back(std::min(id, bestId), std::max(id, bestId));
  }
  for (std::size_t a = 0; a < reps.size(); ++a)
    for (std::size_t b = a + 1; b < reps.size(); ++b)
      pairs.emplace_back(std::min(reps[a], reps[b]), std::max(reps[a], reps[b]));

  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
}

}  // namespace

TransportSolution solve_transport(const TransportInstance& inst,
                                  const TransportOptions& opts) {
  const std::size_t K = inst.size();
  TransportSolution sol;
  sol.f.assign(K, 0.0);
  if (K == 0) return sol;

  double mass_scale = 0.0;
  for (const double m : inst.mass) mass_scale += std::abs(m);
  if (mass_scale == 0.0) return sol;
  const double mass_tol = 1e-13 * mass_scale;

  const std::uint32_t B = static_cast<std::uint32_t>(K);  // boundary node
  FlowGraph g(K + 1);
  if (K <= opts.dense_threshold) {
    for (std::uint32_t i = 0; i < K; ++i)
      for (std::uint32_t j = i + 1; j < K; ++j) {
        const double d = node_dist(inst, i, j);
        g.add_edge(i, j, d);
        g.add_edge(j, i, d);
      }
  } else {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    sparse_pairs(inst, opts.knn, pairs);
    for (const auto& [i, j] : pairs) {
      const double d = node_dist(inst, i, j);
      g.add_edge(i, j, d);
      g.add_edge(j, i, d);
    }
  }
  for (std::uint32_t i = 0; i < K; ++i) {
    g.add_edge(i, B, inst.ucap[i]);
    g.add_edge(B, i, inst.ucap[i]);
  }

  std::vector<double> excess(K + 1, 0.0);
  for (std::size_t i = 0; i < K; ++i) {
    excess[i] = inst.mass[i];
    excess[B] -= inst.mass[i];
  }

  std::vector<double> pot(K + 1, 0.0), dist(K + 1, 0.0);
  std::vector<std::int64_t> from_arc(K + 1, -1);
  std::vector<std::uint32_t> origin(K + 1, 0);
  std::vector<char> done(K + 1, 0);
  using Item = std::pair<double, std::uint32_t>;
  double total_cost = 0.0;

  for (;;) {
    bool have_excess = false;
    for (std::size_t i = 0; i <= K; ++i)
      if (excess[i] > mass_tol) have_excess = true;
    if (!have_excess) break;

    // Multi-source Dijkstra on the residual graph with reduced costs.
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(from_arc.begin(), from_arc.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (std::uint32_t i = 0; i <= K; ++i)
      if (excess[i] > mass_tol) {
        dist[i] = 0.0;
        origin[i] = i;
        heap.emplace(0.0, i);
      }
    std::int64_t target = -1;
    while (!heap.empty()) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (done[u]) continue;
      done[u] = 1;
      if (excess[u] < -mass_tol) {
        target = u;
        break;
      }
      for (const auto ai : g.adj[u]) {
        const auto& arc = g.arcs[ai];
        if (!(arc.cap > 0.0)) continue;
        const double nd = du + arc.cost - pot[u] + pot[arc.to];
        if (nd < dist[arc.to] - 1e-18) {
          dist[arc.to] = nd;
          from_arc[arc.to] = static_cast<std::int64_t>(ai);
          origin[arc.to] = origin[u];
          heap.emplace(nd, arc.to);
        }
      }
    }
    if (target < 0) throw std::runtime_error("transport: disconnected instance");

    const double d_t = dist[target];
    for (std::size_t v = 0; v <= K; ++v)
      pot[v] -= std::min(dist[v], d_t);  // keep reduced costs nonnegative

    // Amount: clears the originating source or the target sink.
    const std::uint32_t src = origin[target];
    double amount = std::min(excess[src], -excess[target]);
    std::int64_t ai = from_arc[target];
    while (ai >= 0) {
      const auto& arc = g.arcs[ai];
      amount = std::min(amount, arc.cap);
      ai = from_arc[g.arcs[ai ^ 1].to];
    }
    ai = from_arc[target];
    while (ai >= 0) {
      auto& arc = g.arcs[ai];
      auto& rev = g.arcs[ai ^ 1];
      arc.cap -= amount;
      rev.cap += amount;
      total_cost += amount * arc.cost;
      ai = from_arc[rev.to];
    }
    excess[src] -= amount;
    excess[target] += amount;
    ++sol.augmentations;
    if (sol.augmentations > 4 * (K + 2))
      throw std::runtime_error("transport: augmentation cap exceeded");
  }

  sol.value = total_cost;
  for (std::size_t i = 0; i < K; ++i) sol.f[i] = pot[i] - pot[B];
  return sol;
}

double coarsen_ball(const PointMeasure& m, const SpatialIndex& index,
                    std::span<const double> x, double r, std::size_t budget,
                    std::vector<double>& coords_out, std::vector<double>& mass_out) {
  const int n = m.ambient_dim;
  std::vector<std::uint32_t> ids;
  index.ball_points(x, r, ids);
  coords_out.clear();
  mass_out.clear();
  if (ids.size() <= budget) {
    for (const auto k : ids) {
      const auto p = index.point(k);
      for (int a = 0; a < n; ++a) coords_out.push_back(p[a]);
      mass_out.push_back(index.weight(k));
    }
    return 0.0;
  }

  // Cell-merge at growing dyadic sizes until the cell count fits the budget.
  double g = r * std::pow(static_cast<double>(budget), -1.0 / m.hausdorff_dim);
  for (;;) {
    std::map<std::array<std::int64_t, kMaxDim>, std::pair<VecN, double>> cells;
    for (const auto k : ids) {
      const auto p = index.point(k);
      std::array<std::int64_t, kMaxDim> key{};
      for (int a = 0; a < n; ++a)
        key[a] = static_cast<std::int64_t>(std::floor((p[a] - x[a]) / g));
      auto& cell = cells[key];
      const double w = index.weight(k);
      for (int a = 0; a < n; ++a) cell.first[a] += w * p[a];
      cell.second += w;
    }
    if (cells.size() <= budget) {
      for (const auto& [key, cell] : cells) {
        for (int a = 0; a < n; ++a) coords_out.push_back(cell.first[a] / cell.second);
        mass_out.push_back(cell.second);
      }
      return g;
    }
    g *= 2.0;
  }
}

namespace {

// Joint support: mu nodes (positive mass) and the discretized flat candidate
// (negative mass), coincident nodes merged so exact matches cancel.
TransportInstance build_instance(int n, std::span<const double> x, double r,
                                 const std::vector<double>& mu_coords,
                                 const std::vector<double>& mu_mass,
                                 const FlatMeasure& nu, double nu_step) {
  TransportInstance inst;
  inst.n = n;
  inst.x = make_vec(x);
  inst.r = r;

  const int d = nu.plane.d;
  const double cell_mass = nu.density * std::pow(nu_step, d);
  const VecN t0 = nu.plane.tangential(x);
  const long half = std::lround(std::ceil(r / nu_step)) + 1;

  std::vector<double> coords = mu_coords;
  std::vector<double> mass = mu_mass;

  std::vector<long> idx(d, -half);
  std::size_t nodes = 1;
  for (int a = 0; a < d; ++a) nodes *= static_cast<std::size_t>(2 * half + 1);
  VecN t{};
  for (std::size_t c = 0; c < nodes; ++c) {
    for (int a = 0; a < d; ++a) t[a] = t0[a] + nu_step * static_cast<double>(idx[a]);
    const VecN g = nu.plane.embed({t.data(), static_cast<std::size_t>(d)});
    double dd2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dv = g[i] - x[i];
      dd2 += dv * dv;
    }
    if (dd2 <= r * r) {
      for (int i = 0; i < n; ++i) coords.push_back(g[i]);
      mass.push_back(-cell_mass);
    }
    for (int a = 0; a < d; ++a) {
      if (++idx[a] <= half) break;
      idx[a] = -half;
    }
  }

  // Merge coincident nodes (snap at 1e-9 r) so matching discretizations
  // cancel exactly.
  const double snap = 1e-9 * r;
  std::map<std::array<std::int64_t, kMaxDim>, std::size_t> seen;
  const std::size_t count = mass.size();
  for (std::size_t k = 0; k < count; ++k) {
    std::array<std::int64_t, kMaxDim> key{};
    for (int a = 0; a < n; ++a)
      key[a] = static_cast<std::int64_t>(std::llround(coords[k * n + a] / snap));
    const auto it = seen.find(key);
    if (it == seen.end()) {
      const std::size_t slot = inst.mass.size();
      seen.emplace(key, slot);
      for (int a = 0; a < n; ++a) inst.coords.push_back(coords[k * n + a]);
      inst.mass.push_back(mass[k]);
    } else {
      inst.mass[it->second] += mass[k];
    }
  }

  // Drop cancelled nodes; by the triangle inequality their pairwise
  // constraints are implied by the remaining ones.
  double scale = 0.0;
  for (const double mm : inst.mass) scale += std::abs(mm);
  const double drop = 1e-15 * std::max(scale, 1e-300);
  std::vector<double> coords2, mass2;
  for (std::size_t k = 0; k < inst.mass.size(); ++k) {
    if (std::abs(inst.mass[k]) <= drop) continue;
    for (int a = 0; a < n; ++a) coords2.push_back(inst.coords[k * n + a]);
    mass2.push_back(inst.mass[k]);
  }
  inst.coords.swap(coords2);
  inst.mass.swap(mass2);

  inst.ucap.resize(inst.mass.size());
  for (std::size_t k = 0; k < inst.mass.size(); ++k) {
    double dd2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const double dv = inst.coords[k * n + a] - x[a];
      dd2 += dv * dv;
    }
    inst.ucap[k] = std::max(0.0, r - std::sqrt(dd2));
  }
  return inst;
}

}  // namespace

double flat_distance(const PointMeasure& m, const SpatialIndex& index,
                     std::span<const double> x, double r, const FlatMeasure& nu,
                     double nu_step, const TransportOptions& opts,
                     TransportInstance* inst_out, TransportSolution* sol_out) {
  std::vector<double> mu_coords, mu_mass;
  coarsen_ball(m, index, x, r, std::size_t{1} << 20, mu_coords, mu_mass);
  TransportInstance inst =
      build_instance(m.ambient_dim, x, r, mu_coords, mu_mass, nu, nu_step);
  TransportSolution sol = solve_transport(inst, opts);
  const double value = std::pow(r, -m.hausdorff_dim - 1.0) * sol.value;
  if (inst_out) *inst_out = std::move(inst);
  if (sol_out) *sol_out = std::move(sol);
  return value;
}

AlphaProblem alpha_number(const PointMeasure& m, const SpatialIndex& index,
                          std::span<const double> x, double r, const AlphaOptions& opts) {
  const double rd = std::round(m.hausdorff_dim);
  if (std::abs(m.hausdorff_dim - rd) > 1e-12)
    throw std::invalid_argument(
        "alpha_number needs integer d: flat comparison measures live on integer-"
        "dimensional planes");
  const int d = static_cast<int>(rd);
  const int n = m.ambient_dim;
  const int codim = n - d;

  std::vector<std::uint32_t> ids;
  index.ball_points(x, r, ids);
  if (ids.size() < static_cast<std::size_t>(d) + 1)
    throw std::invalid_argument("alpha_number: fewer than d+1 points in the ball");

  // Working mu support at the budgeted resolution (fixed across the search).
  std::vector<double> mu_coords, mu_mass;
  const double g_mu = coarsen_ball(m, index, x, r, opts.budget_mu, mu_coords, mu_mass);

  // Candidate grid step: the working resolution, opened up until the node
  // count fits the budget.
  const double base_step = g_mu > 0.0 ? g_mu : m.spacing;
  double nu_step = base_step;
  while (std::pow(2.0 * r / nu_step + 1.0, d) > static_cast<double>(opts.budget_nu))
    nu_step *= 2.0;

  const PcaFit seed = pca_plane(index, ids, d);
  const double ball_mass = index.ball_mass(x, r);
  const double rho = seed.frame.dist(x);
  const double cap2 = std::max(r * r - rho * rho, 0.25 * r * r);
  const double lambda0 =
      ball_mass / (unit_ball_volume(d) * std::pow(std::sqrt(cap2), d));

  auto candidate = [&](const std::vector<double>& p) {
    const std::span<const double> tilt(p.data(), static_cast<std::size_t>(d * codim));
    FlatMeasure cand;
    cand.plane = seed.frame.perturbed(tilt, {});
    for (int i = 0; i < n; ++i) cand.plane.base[i] += p[d * codim + 1 + i];
    cand.density = lambda0 * std::exp(p[d * codim]);
    return cand;
  };

  auto objective = [&](const std::vector<double>& p) {
    const FlatMeasure cand = candidate(p);
    TransportInstance inst = build_instance(n, x, r, mu_coords, mu_mass, cand, nu_step);
    const TransportSolution sol = solve_transport(inst, opts.lp);
    return std::pow(r, -m.hausdorff_dim - 1.0) * sol.value;
  };

  std::vector<double> p0(static_cast<std::size_t>(d * codim + 1 + n), 0.0);
  std::vector<double> step(p0.size(), 0.05);
  step[d * codim] = 0.1;  // log-density
  for (int i = 0; i < n; ++i) step[d * codim + 1 + i] = 0.05 * r;

  const NelderMeadResult nm = nelder_mead(objective, p0, step, opts.nm_iters);

  AlphaProblem out;
  out.x = make_vec(x);
  out.r = r;
  out.nu = candidate(nm.x);
  out.nu_step = nu_step;
  out.approximate = !nm.converged;
  out.mu_nodes = mu_mass.size();

  TransportInstance inst = build_instance(n, x, r, mu_coords, mu_mass, out.nu, nu_step);
  const TransportSolution sol = solve_transport(inst, opts.lp);
  out.lp_value = sol.value;
  out.alpha = std::pow(r, -m.hausdorff_dim - 1.0) * sol.value;
  out.nu_nodes = inst.size() >= mu_mass.size() ? inst.size() - mu_mass.size() : 0;
  out.f = sol.f;
  out.instance = std::move(inst);
  return out;
}

}  // namespace rdlab
