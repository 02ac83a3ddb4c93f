#include "faircoreset/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "faircoreset/line_coreset.hpp"
#include "faircoreset/lines.hpp"
#include "faircoreset/rng.hpp"

namespace faircoreset {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void fnv_mix(std::uint64_t& h, const void* data, std::size_t len) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Per-profile subset of a dataset, in source order.
std::vector<Point> class_points(const Dataset& d, int t) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.profile_of[i] == t) pts.push_back(d.points[i]);
  return pts;
}

void emit(WeightedPointSet& out, Point p, double w, int profile) {
  out.points.push_back(std::move(p));
  out.weights.push_back(w);
  out.profile_of.push_back(profile);
}

nlohmann::json log_to_json(const ProfileBuildLog& l) {
  return {{"profile", l.profile},
          {"n", l.n},
          {"opt_estimate", l.opt_estimate},
          {"budget", l.budget},
          {"m_lines", l.m_lines},
          {"projection_cost", l.projection_cost},
          {"rejected_m", l.rejected_m},
          {"rejected_cost", l.rejected_cost},
          {"fallback_lines", l.fallback_lines},
          {"batch_count", l.batch_count},
          {"points_emitted", l.points_emitted},
          {"degenerate", l.degenerate},
          {"elapsed_ms", l.elapsed_ms}};
}

ProfileBuildLog log_from_json(const nlohmann::json& j) {
  ProfileBuildLog l;
  l.profile = j.at("profile").get<int>();
  l.n = j.at("n").get<int>();
  l.opt_estimate = j.at("opt_estimate").get<double>();
  l.budget = j.at("budget").get<double>();
  l.m_lines = j.at("m_lines").get<int>();
  l.projection_cost = j.at("projection_cost").get<double>();
  l.rejected_m = j.at("rejected_m").get<int>();
  l.rejected_cost = j.at("rejected_cost").get<double>();
  l.fallback_lines = j.at("fallback_lines").get<int>();
  l.batch_count = j.at("batch_count").get<int>();
  l.points_emitted = j.at("points_emitted").get<int>();
  l.degenerate = j.at("degenerate").get<bool>();
  l.elapsed_ms = j.at("elapsed_ms").get<double>();
  return l;
}

}  // namespace

bool same_build(const CoresetArtifact& a, const CoresetArtifact& b) {
  if (!(a.points == b.points) || !(a.params == b.params) || a.method != b.method ||
      a.source_checksum != b.source_checksum || a.build_log.size() != b.build_log.size())
    return false;
  for (std::size_t i = 0; i < a.build_log.size(); ++i) {
    ProfileBuildLog x = a.build_log[i];
    ProfileBuildLog y = b.build_log[i];
    x.elapsed_ms = y.elapsed_ms = 0.0;
    if (!(x == y)) return false;
  }
  return true;
}

std::uint64_t dataset_checksum(const Dataset& d) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  std::uint64_t n = d.size();
  fnv_mix(h, &n, sizeof(n));
  for (std::size_t i = 0; i < d.size(); ++i) {
    fnv_mix(h, d.points[i].coords.data(), d.points[i].coords.size() * sizeof(double));
    fnv_mix(h, &d.profile_of[i], sizeof(int));
  }
  for (const auto& p : d.profiles)
    fnv_mix(h, p.member_groups.data(), p.member_groups.size() * sizeof(int));
  fnv_mix(h, &d.group_count, sizeof(int));
  return h;
}

CoresetArtifact build_fair_coreset(const Dataset& d, const CoresetParams& params) {
  check_params(params);
  if (d.size() == 0) throw std::invalid_argument("empty dataset");

  CoresetArtifact art;
  art.params = params;
  art.method = "fair";
  art.source_checksum = dataset_checksum(d);

  for (int t = 0; t < d.gamma(); ++t) {
    auto t0 = Clock::now();
    std::vector<Point> pts = class_points(d, t);
    if (pts.empty()) throw std::invalid_argument("empty profile class");

    ProfileBuildLog log;
    log.profile = t;
    log.n = static_cast<int>(pts.size());

    int k_eff = std::min<int>(params.k, static_cast<int>(pts.size()));
    ApproxClustering approx = approx_cluster(pts, k_eff, params.z, params.seed);
    log.opt_estimate = approx.cost;

    int emitted_before = static_cast<int>(art.points.size());
    if (approx.cost <= 0.0) {
      // At most k distinct locations: the class is its own exact summary.
      log.degenerate = true;
      std::vector<std::pair<Point, double>> distinct;
      for (const Point& p : pts) {
        bool found = false;
        for (auto& [q, w] : distinct)
          if (q == p) {
            w += 1.0;
            found = true;
            break;
          }
        if (!found) distinct.emplace_back(p, 1.0);
      }
      for (auto& [q, w] : distinct) emit(art.points, q, w, t);
    } else {
      double budget = params.z == 1
                          ? params.epsilon * approx.cost / 3.0
                          : params.epsilon * params.epsilon * approx.cost *
                                params.projection_budget_scale / 100.0;
      log.budget = budget;
      LineBuildResult lb = build_lines(pts, k_eff, params.z, budget, params.epsilon, params.seed);
      log.m_lines = static_cast<int>(lb.lines.size());
      log.projection_cost = lb.projection_cost;
      log.rejected_m = lb.rejected_m;
      log.rejected_cost = lb.rejected_cost;
      log.fallback_lines = lb.fallback_lines;

      ProjectionResult proj = project(pts, lb.lines);
      for (const LineDataset& line : proj.per_line) {
        if (line.positions.empty()) continue;
        WeightedPointSet line_set =
            params.z == 1 ? median_line_coreset(line, params.k, approx.cost, params.epsilon)
                          : means_line_coreset(line, params.k, approx.cost, params.epsilon);
        double xi = params.z == 1
                        ? params.epsilon * approx.cost / (30.0 * params.k)
                        : params.epsilon * params.epsilon * approx.cost /
                              (200.0 * params.k * params.k);
        log.batch_count += static_cast<int>(partition_batches(line, xi, params.z).size());
        for (std::size_t i = 0; i < line_set.size(); ++i)
          emit(art.points, lift_to_ambient(line, line_set.points[i].coords[0]),
               line_set.weights[i], t);
      }
    }
    log.points_emitted = static_cast<int>(art.points.size()) - emitted_before;
    log.elapsed_ms = ms_since(t0);
    art.build_log.push_back(log);
  }
  return art;
}

CoresetArtifact uniform_coreset(const Dataset& d, int total_size, std::uint64_t seed) {
  int gamma = d.gamma();
  if (total_size < gamma) throw std::invalid_argument("total_size below profile count");
  if (total_size > static_cast<int>(d.size()))
    throw std::invalid_argument("total_size exceeds dataset size");

  std::vector<double> masses = d.profile_masses();
  double n = static_cast<double>(d.size());

  // Largest-remainder apportionment with a floor of one sample per class.
  std::vector<int> shares(static_cast<std::size_t>(gamma));
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int t = 0; t < gamma; ++t) {
    double exact = total_size * masses[static_cast<std::size_t>(t)] / n;
    shares[static_cast<std::size_t>(t)] = static_cast<int>(std::floor(exact));
    assigned += shares[static_cast<std::size_t>(t)];
    remainders.emplace_back(-(exact - std::floor(exact)), t);
  }
  std::sort(remainders.begin(), remainders.end());
  for (int r = 0; r < total_size - assigned; ++r)
    ++shares[static_cast<std::size_t>(remainders[static_cast<std::size_t>(r)].second)];
  for (int t = 0; t < gamma; ++t) {
    while (shares[static_cast<std::size_t>(t)] == 0) {
      int donor = static_cast<int>(std::max_element(shares.begin(), shares.end()) - shares.begin());
      if (shares[static_cast<std::size_t>(donor)] <= 1)
        throw std::invalid_argument("total_size below profile count");
      --shares[static_cast<std::size_t>(donor)];
      ++shares[static_cast<std::size_t>(t)];
    }
  }

  CoresetArtifact art;
  art.method = "uniform";
  art.params = CoresetParams{};
  art.params.seed = seed;
  art.params.k = 0;
  art.params.z = 0;
  art.params.epsilon = 0.0;
  art.source_checksum = dataset_checksum(d);

  Rng rng(seed);
  for (int t = 0; t < gamma; ++t) {
    std::vector<int> members;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d.profile_of[i] == t) members.push_back(static_cast<int>(i));
    int s = shares[static_cast<std::size_t>(t)];
    // Partial Fisher-Yates draw without replacement.
    for (int j = 0; j < s; ++j) {
      std::size_t pick = static_cast<std::size_t>(j) +
                         static_cast<std::size_t>(rng.below(members.size() - static_cast<std::size_t>(j)));
      std::swap(members[static_cast<std::size_t>(j)], members[pick]);
    }
    std::vector<int> chosen(members.begin(), members.begin() + s);
    std::sort(chosen.begin(), chosen.end());
    double w = masses[static_cast<std::size_t>(t)] / s;
    ProfileBuildLog log;
    log.profile = t;
    log.n = static_cast<int>(members.size());
    log.points_emitted = s;
    art.build_log.push_back(log);
    for (int i : chosen) emit(art.points, d.points[static_cast<std::size_t>(i)], w, t);
  }
  return art;
}

void save_coreset(const CoresetArtifact& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  std::size_t dim = a.points.size() ? a.points.points[0].dim() : 0;
  out << "weight,profile";
  for (std::size_t j = 0; j < dim; ++j) out << ",feature_" << j;
  out << "\n";
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    out << format_double(a.points.weights[i]) << "," << a.points.profile_of[i];
    for (double c : a.points.points[i].coords) out << "," << format_double(c);
    out << "\n";
  }
  out.close();

  nlohmann::json meta;
  meta["method"] = a.method;
  meta["params"] = {{"epsilon", a.params.epsilon},
                    {"k", a.params.k},
                    {"z", a.params.z},
                    {"seed", a.params.seed},
                    {"projection_budget_scale", a.params.projection_budget_scale}};
  meta["source_checksum"] = a.source_checksum;
  meta["build_log"] = nlohmann::json::array();
  for (const auto& l : a.build_log) meta["build_log"].push_back(log_to_json(l));
  std::ofstream side(path + ".json");
  if (!side) throw std::runtime_error("cannot write " + path + ".json");
  side << meta.dump(2) << "\n";
}

CoresetArtifact load_coreset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("no header");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header.empty()) throw std::runtime_error("no header");

  std::size_t cols = 1 + static_cast<std::size_t>(std::count(header.begin(), header.end(), ','));
  if (cols < 2 || header.rfind("weight,profile", 0) != 0)
    throw std::runtime_error("parse error line 1: bad header");
  std::size_t dim = cols - 2;

  CoresetArtifact art;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (line.back() == ',') fields.push_back("");
    if (fields.size() != cols)
      throw std::runtime_error("parse error line " + std::to_string(lineno) +
                               ": expected " + std::to_string(cols) + " columns");
    try {
      std::size_t used = 0;
      double w = std::stod(fields[0], &used);
      if (used != fields[0].size()) throw std::invalid_argument("trailing");
      int profile = std::stoi(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("trailing");
      Point p;
      p.coords.resize(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        p.coords[j] = std::stod(fields[2 + j], &used);
        if (used != fields[2 + j].size()) throw std::invalid_argument("trailing");
      }
      art.points.points.push_back(std::move(p));
      art.points.weights.push_back(w);
      art.points.profile_of.push_back(profile);
    } catch (const std::exception&) {
      throw std::runtime_error("parse error line " + std::to_string(lineno) +
                               ": bad numeric field");
    }
  }

  std::ifstream side(path + ".json");
  if (side) {
    nlohmann::json meta = nlohmann::json::parse(side);
    art.method = meta.value("method", "unknown");
    if (meta.contains("params")) {
      const auto& p = meta["params"];
      art.params.epsilon = p.value("epsilon", 0.0);
      art.params.k = p.value("k", 0);
      art.params.z = p.value("z", 0);
      art.params.seed = p.value("seed", std::uint64_t{0});
      art.params.projection_budget_scale = p.value("projection_budget_scale", 1.0);
    }
    art.source_checksum = meta.value("source_checksum", std::uint64_t{0});
    if (meta.contains("build_log"))
      for (const auto& j : meta["build_log"]) art.build_log.push_back(log_from_json(j));
  } else {
    art.method = "unknown";
    art.params = CoresetParams{};
    art.params.epsilon = 0.0;
    art.params.k = 0;
    art.params.z = 0;
  }
  return art;
}

}  // namespace faircoreset
