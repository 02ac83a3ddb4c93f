#include "faircoreset/lines.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "faircoreset/rng.hpp"

namespace faircoreset {

namespace {

int nearest_center(const Point& p, const CenterSet& c) {
  int best = 0;
  double best_d = sq_dist(p, c.centers[0]);
  for (int i = 1; i < c.k(); ++i) {
    double d = sq_dist(p, c.centers[static_cast<std::size_t>(i)]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

Point coordinatewise_median(std::span<const Point> pts, const std::vector<int>& members) {
  std::size_t dim = pts[0].dim();
  Point med;
  med.coords.resize(dim);
  std::vector<double> vals(members.size());
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < members.size(); ++i)
      vals[i] = pts[static_cast<std::size_t>(members[i])].coords[j];
    std::nth_element(vals.begin(), vals.begin() + static_cast<long>(vals.size() / 2), vals.end());
    double hi = vals[vals.size() / 2];
    if (vals.size() % 2 == 0) {
      double lo = *std::max_element(vals.begin(), vals.begin() + static_cast<long>(vals.size() / 2));
      med.coords[j] = 0.5 * (lo + hi);
    } else {
      med.coords[j] = hi;
    }
  }
  return med;
}

Point mean_of(std::span<const Point> pts, const std::vector<int>& members) {
  std::size_t dim = pts[0].dim();
  Point mu;
  mu.coords.assign(dim, 0.0);
  for (int i : members)
    for (std::size_t j = 0; j < dim; ++j) mu.coords[j] += pts[static_cast<std::size_t>(i)].coords[j];
  for (double& c : mu.coords) c /= static_cast<double>(members.size());
  return mu;
}

std::vector<double> normalize_or_axis(std::vector<double> v) {
  double norm = 0.0;
  for (double c : v) norm += c * c;
  norm = std::sqrt(norm);
  if (norm < 1e-300) {
    std::fill(v.begin(), v.end(), 0.0);
    v[0] = 1.0;
    return v;
  }
  for (double& c : v) c /= norm;
  return v;
}

// Flip sign so the first significantly nonzero component is positive.
void canonicalize_direction(std::vector<double>& dir) {
  for (double c : dir) {
    if (std::abs(c) > 1e-12) {
      if (c < 0.0)
        for (double& x : dir) x = -x;
      return;
    }
  }
}

double line_residual(const Point& p, const Line& line, double* position) {
  double pos = 0.0;
  for (std::size_t j = 0; j < p.coords.size(); ++j)
    pos += (p.coords[j] - line.origin.coords[j]) * line.direction[j];
  double sq = 0.0;
  for (std::size_t j = 0; j < p.coords.size(); ++j) {
    double r = p.coords[j] - (line.origin.coords[j] + pos * line.direction[j]);
    sq += r * r;
  }
  if (position) *position = pos;
  return std::sqrt(sq);
}

// Deterministic directions covering the unit sphere: exact half-circle grid
// for d=2, seeded unit Gaussians otherwise.
std::vector<std::vector<double>> net_directions(std::size_t dim, int count, std::uint64_t seed) {
  std::vector<std::vector<double>> dirs;
  if (dim == 1) {
    dirs.push_back({1.0});
    return dirs;
  }
  if (dim == 2) {
    for (int j = 0; j < count; ++j) {
      double theta = M_PI * j / count;
      dirs.push_back({std::cos(theta), std::sin(theta)});
    }
    return dirs;
  }
  Rng rng(seed);
  for (int j = 0; j < count; ++j) {
    std::vector<double> v(dim);
    for (double& c : v) c = rng.normal();
    dirs.push_back(normalize_or_axis(std::move(v)));
  }
  return dirs;
}

struct NearestLineState {
  std::vector<int> line_of;
  std::vector<double> residual;
  std::vector<double> position;
};

void assign_all(std::span<const Point> pts, const std::vector<Line>& lines,
                NearestLineState& st) {
  st.line_of.assign(pts.size(), 0);
  st.residual.assign(pts.size(), 0.0);
  st.position.assign(pts.size(), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < lines.size(); ++m) {
      double pos;
      double r = line_residual(pts[i], lines[m], &pos);
      if (r < best) {
        best = r;
        st.line_of[i] = static_cast<int>(m);
        st.residual[i] = r;
        st.position[i] = pos;
      }
    }
  }
}

// Update the running nearest-line assignment against one freshly added line.
void assign_new_line(std::span<const Point> pts, const std::vector<Line>& lines,
                     NearestLineState& st) {
  std::size_t m = lines.size() - 1;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double pos;
    double r = line_residual(pts[i], lines[m], &pos);
    if (r < st.residual[i]) {
      st.residual[i] = r;
      st.position[i] = pos;
      st.line_of[i] = static_cast<int>(m);
    }
  }
}

double projection_cost(const NearestLineState& st, int z) {
  double c = 0.0;
  for (double r : st.residual) c += z == 2 ? r * r : r;
  return c;
}

Line line_for_cluster(std::span<const Point> pts, const std::vector<int>& members,
                      const Point& origin) {
  std::vector<Point> sub;
  sub.reserve(members.size());
  for (int i : members) sub.push_back(pts[static_cast<std::size_t>(i)]);
  Line fitted = fit_principal_line(sub, {});
  return Line{origin, fitted.direction};
}

LineBuildResult build_lines_means(std::span<const Point> pts, double budget,
                                  std::uint64_t seed) {
  std::size_t n = pts.size();
  LineBuildResult out;
  out.budget = budget;
  for (int m = 1;; m *= 2) {
    int m_eff = std::min<int>(m, static_cast<int>(n));
    std::vector<Line> lines;
    if (m_eff >= static_cast<int>(n)) {
      for (const Point& p : pts) lines.push_back(Line{p, normalize_or_axis(std::vector<double>(p.dim(), 0.0))});
    } else {
      ApproxClustering seed_clusters = approx_cluster(pts, m_eff, 2, seed);
      std::vector<std::vector<int>> members(static_cast<std::size_t>(m_eff));
      for (std::size_t i = 0; i < n; ++i)
        members[static_cast<std::size_t>(seed_clusters.assignment[i])].push_back(static_cast<int>(i));
      for (int c = 0; c < m_eff; ++c)
        if (!members[static_cast<std::size_t>(c)].empty()) {
          std::vector<Point> sub;
          for (int i : members[static_cast<std::size_t>(c)]) sub.push_back(pts[static_cast<std::size_t>(i)]);
          lines.push_back(fit_principal_line(sub, {}));
        }
      // Line-Lloyd refinement: reassign to nearest line, refit per group.
      NearestLineState st;
      assign_all(pts, lines, st);
      double prev = projection_cost(st, 2);
      for (int round = 0; round < 10; ++round) {
        std::vector<std::vector<int>> groups(lines.size());
        for (std::size_t i = 0; i < n; ++i)
          groups[static_cast<std::size_t>(st.line_of[i])].push_back(static_cast<int>(i));
        for (std::size_t g = 0; g < lines.size(); ++g)
          if (!groups[g].empty()) {
            std::vector<Point> sub;
            for (int i : groups[g]) sub.push_back(pts[static_cast<std::size_t>(i)]);
            lines[g] = fit_principal_line(sub, {});
          }
        assign_all(pts, lines, st);
        double cost = projection_cost(st, 2);
        if (prev - cost < 1e-4 * std::max(prev, 1e-300)) {
          prev = cost;
          break;
        }
        prev = cost;
      }
    }
    NearestLineState st;
    assign_all(pts, lines, st);
    double cost = projection_cost(st, 2);
    if (cost <= budget || m_eff >= static_cast<int>(n)) {
      out.lines = std::move(lines);
      out.projection_cost = cost;
      return out;
    }
    out.rejected_m = static_cast<int>(lines.size());
    out.rejected_cost = cost;
  }
}

LineBuildResult build_lines_median(std::span<const Point> pts, int k, double budget,
                                   double epsilon, std::uint64_t seed) {
  std::size_t n = pts.size();
  std::size_t dim = pts[0].dim();
  LineBuildResult out;
  out.budget = budget;

  int k_eff = std::min<int>(k, static_cast<int>(n));
  ApproxClustering clusters = approx_cluster(pts, k_eff, 1, seed);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(k_eff));
  for (std::size_t i = 0; i < n; ++i)
    members[static_cast<std::size_t>(clusters.assignment[i])].push_back(static_cast<int>(i));

  std::vector<Line> lines;
  std::vector<int> line_center;  // provenance; -1 for per-point rescue lines
  std::vector<int> rays_of_center(static_cast<std::size_t>(k_eff), 0);
  std::vector<char> capped(static_cast<std::size_t>(k_eff), 0);
  for (int c = 0; c < k_eff; ++c) {
    if (members[static_cast<std::size_t>(c)].empty()) continue;
    lines.push_back(line_for_cluster(pts, members[static_cast<std::size_t>(c)],
                                     clusters.centers.centers[static_cast<std::size_t>(c)]));
    line_center.push_back(c);
    rays_of_center[static_cast<std::size_t>(c)] = 1;
  }

  double cap_raw = std::pow(30.0 / epsilon, static_cast<double>(dim) - 1.0);
  int net_cap = static_cast<int>(std::min<double>(std::max(1.0, std::ceil(cap_raw)),
                                                  static_cast<double>(n)));

  NearestLineState st;
  assign_all(pts, lines, st);
  while (true) {
    double cost = projection_cost(st, 1);
    if (cost <= budget) {
      out.lines = std::move(lines);
      out.projection_cost = cost;
      return out;
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (st.residual[i] > st.residual[worst]) worst = i;
    int c = clusters.assignment[worst];
    const Point& center = clusters.centers.centers[static_cast<std::size_t>(c)];
    out.rejected_m = static_cast<int>(lines.size());
    out.rejected_cost = cost;

    if (!capped[static_cast<std::size_t>(c)] && rays_of_center[static_cast<std::size_t>(c)] >= net_cap) {
      // Adaptive rays hit the net size: swap this center over to the explicit net.
      capped[static_cast<std::size_t>(c)] = 1;
      std::vector<Line> kept;
      std::vector<int> kept_center;
      for (std::size_t m = 0; m < lines.size(); ++m)
        if (line_center[m] != c) {
          kept.push_back(std::move(lines[m]));
          kept_center.push_back(line_center[m]);
        }
      lines = std::move(kept);
      line_center = std::move(kept_center);
      for (const auto& dir : net_directions(dim, net_cap, seed ^ (0x9e37u + static_cast<unsigned>(c)))) {
        lines.push_back(Line{center, dir});
        line_center.push_back(c);
      }
      assign_all(pts, lines, st);
      continue;
    }
    if (capped[static_cast<std::size_t>(c)]) {
      // Net in place and the point is still worst: pin it directly.
      lines.push_back(Line{pts[worst], net_directions(dim, 1, seed)[0]});
      line_center.push_back(-1);
      ++out.fallback_lines;
    } else {
      std::vector<double> dir(dim);
      for (std::size_t j = 0; j < dim; ++j) dir[j] = pts[worst].coords[j] - center.coords[j];
      lines.push_back(Line{center, normalize_or_axis(std::move(dir))});
      line_center.push_back(c);
      ++rays_of_center[static_cast<std::size_t>(c)];
    }
    assign_new_line(pts, lines, st);
  }
}

}  // namespace

ApproxClustering approx_cluster(std::span<const Point> pts, int k, int z, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (pts.size() < static_cast<std::size_t>(k))
    throw std::invalid_argument("fewer points than centers");
  if (z != 1 && z != 2) throw std::invalid_argument("z must be 1 or 2");

  Rng rng(seed);
  std::size_t n = pts.size();
  CenterSet centers;
  centers.centers.push_back(pts[static_cast<std::size_t>(rng.below(n))]);
  std::vector<double> min_pow(n);
  while (centers.k() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const Point& c : centers.centers) best = std::min(best, dist_pow(pts[i], c, z));
      min_pow[i] = best;
      total += best;
    }
    std::size_t pick;
    if (total <= 0.0) {
      pick = rng.below(n);  // all mass on existing centers (duplicates)
    } else {
      double target = rng.uniform01() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += min_pow[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    }
    centers.centers.push_back(pts[pick]);
  }

  std::vector<int> assignment(n, -1);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int a = nearest_center(pts[i], centers);
      if (a != assignment[i]) {
        assignment[i] = a;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i)
      members[static_cast<std::size_t>(assignment[i])].push_back(static_cast<int>(i));
    for (int c = 0; c < k; ++c) {
      auto& mem = members[static_cast<std::size_t>(c)];
      if (mem.empty()) {
        // Re-seed an empty center at the point farthest from its own center.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          double d = sq_dist(pts[i], centers.centers[static_cast<std::size_t>(assignment[i])]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centers.centers[static_cast<std::size_t>(c)] = pts[far];
        continue;
      }
      centers.centers[static_cast<std::size_t>(c)] =
          z == 2 ? mean_of(pts, mem) : coordinatewise_median(pts, mem);
    }
  }

  double cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    assignment[i] = nearest_center(pts[i], centers);
    cost += dist_pow(pts[i], centers.centers[static_cast<std::size_t>(assignment[i])], z);
  }
  return {std::move(centers), std::move(assignment), cost};
}

Line fit_principal_line(std::span<const Point> pts, std::span<const double> weights) {
  if (pts.empty()) throw std::invalid_argument("empty point set");
  std::size_t dim = pts[0].dim();
  std::size_t n = pts.size();

  double total = 0.0;
  Point mu;
  mu.coords.assign(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double w = weights.empty() ? 1.0 : weights[i];
    total += w;
    for (std::size_t j = 0; j < dim; ++j) mu.coords[j] += w * pts[i].coords[j];
  }
  if (total <= 0.0) throw std::invalid_argument("empty set");
  for (double& c : mu.coords) c /= total;

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<long>(dim), static_cast<long>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    double w = weights.empty() ? 1.0 : weights[i];
    Eigen::VectorXd diff(static_cast<long>(dim));
    for (std::size_t j = 0; j < dim; ++j) diff[static_cast<long>(j)] = pts[i].coords[j] - mu.coords[j];
    cov.noalias() += w * diff * diff.transpose();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  // Eigenvalues ascend; the top principal direction is the last column.
  Eigen::VectorXd top = solver.eigenvectors().col(static_cast<long>(dim) - 1);
  std::vector<double> dir(dim);
  for (std::size_t j = 0; j < dim; ++j) dir[j] = top[static_cast<long>(j)];
  dir = normalize_or_axis(std::move(dir));
  canonicalize_direction(dir);
  return Line{std::move(mu), std::move(dir)};
}

LineBuildResult build_lines(std::span<const Point> pts, int k, int z, double budget,
                            double epsilon, std::uint64_t seed) {
  if (pts.empty()) throw std::invalid_argument("empty point set");
  if (!(budget > 0.0)) throw std::invalid_argument("budget must be positive");
  if (z == 2) return build_lines_means(pts, budget, seed);
  if (z == 1) return build_lines_median(pts, k, budget, epsilon, seed);
  throw std::invalid_argument("z must be 1 or 2");
}

ProjectionResult project(std::span<const Point> pts, const std::vector<Line>& lines) {
  if (lines.empty()) throw std::invalid_argument("no lines");
  ProjectionResult out;
  out.map.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    ProjectionEntry entry;
    for (std::size_t m = 0; m < lines.size(); ++m) {
      double pos;
      double r = line_residual(pts[i], lines[m], &pos);
      if (r < best) {
        best = r;
        entry = {static_cast<int>(m), pos, r};
      }
    }
    out.map[i] = entry;
  }
  out.per_line.resize(lines.size());
  for (std::size_t m = 0; m < lines.size(); ++m) {
    out.per_line[m].origin = lines[m].origin;
    out.per_line[m].direction = lines[m].direction;
  }
  std::vector<std::vector<std::pair<double, int>>> buckets(lines.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    buckets[static_cast<std::size_t>(out.map[i].line)].emplace_back(out.map[i].position,
                                                                    static_cast<int>(i));
  for (std::size_t m = 0; m < lines.size(); ++m) {
    std::sort(buckets[m].begin(), buckets[m].end());
    for (const auto& [pos, idx] : buckets[m]) {
      out.per_line[m].positions.push_back(pos);
      out.per_line[m].source_indices.push_back(idx);
    }
  }
  return out;
}

}  // namespace faircoreset
