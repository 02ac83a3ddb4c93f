#include "faircoreset/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "faircoreset/rng.hpp"

namespace faircoreset {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  try {
    std::size_t used = 0;
    *out = std::stod(s, &used);
    while (used < s.size() && (s[used] == ' ' || s[used] == '\t')) ++used;
    return used == s.size() && std::isfinite(*out);
  } catch (const std::exception&) {
    return false;
  }
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json config_to_json(const BenchConfig& c) {
  return {{"input", c.input},
          {"feature_columns", c.feature_columns},
          {"group_columns", c.group_columns},
          {"k", c.k},
          {"z", c.z},
          {"epsilons", c.epsilons},
          {"trials", c.trials},
          {"normalize", c.normalize},
          {"seed", c.seed},
          {"projection_budget_scale", c.projection_budget_scale},
          {"output", c.output}};
}

BenchConfig config_from_json(const nlohmann::json& j) {
  BenchConfig c;
  c.input = j.at("input").get<std::string>();
  c.feature_columns = j.at("feature_columns").get<std::vector<std::string>>();
  c.group_columns = j.at("group_columns").get<std::vector<std::string>>();
  c.k = j.at("k").get<int>();
  c.z = j.at("z").get<int>();
  c.epsilons = j.at("epsilons").get<std::vector<double>>();
  c.trials = j.at("trials").get<int>();
  c.normalize = j.at("normalize").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.projection_budget_scale = j.at("projection_budget_scale").get<double>();
  c.output = j.at("output").get<std::string>();
  return c;
}

}  // namespace

CsvLoad load_csv(const BenchConfig& config) {
  std::ifstream in(config.input);
  if (!in) throw std::runtime_error("cannot read " + config.input);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("no header");
  if (!header.empty() && header.back() == '\r') header.pop_back();

  std::vector<std::string> names = split_csv_line(header);
  for (auto& n : names) n = trim(n);
  auto column_index = [&](const std::string& name) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::runtime_error("column not found: " + name);
    return static_cast<std::size_t>(it - names.begin());
  };
  std::vector<std::size_t> feature_idx, group_idx;
  for (const auto& n : config.feature_columns) feature_idx.push_back(column_index(n));
  for (const auto& n : config.group_columns) group_idx.push_back(column_index(n));
  if (feature_idx.empty()) throw std::runtime_error("no feature columns configured");

  CsvLoad out;
  Dataset& d = out.dataset;
  // Group ids are assigned per (column, category) in first-occurrence order.
  std::vector<std::map<std::string, int>> category_of(group_idx.size());
  std::map<std::vector<int>, int> profile_ids;

  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != names.size()) {
      ++out.dropped_rows;
      continue;
    }
    Point p;
    p.coords.resize(feature_idx.size());
    bool ok = true;
    for (std::size_t j = 0; j < feature_idx.size(); ++j)
      if (!parse_double(trim(fields[feature_idx[j]]), &p.coords[j])) {
        ok = false;
        break;
      }
    std::vector<int> groups;
    if (ok)
      for (std::size_t g = 0; g < group_idx.size(); ++g) {
        std::string cat = trim(fields[group_idx[g]]);
        if (cat.empty()) {
          ok = false;
          break;
        }
        auto [it, inserted] = category_of[g].try_emplace(cat, -1);
        if (inserted) {
          it->second = static_cast<int>(out.group_labels.size());
          out.group_labels.push_back(config.group_columns[g] + "=" + cat);
        }
        groups.push_back(it->second);
      }
    if (!ok) {
      ++out.dropped_rows;
      continue;
    }
    std::sort(groups.begin(), groups.end());
    groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
    if (groups.empty()) {
      // No group columns configured: one implicit group covering everything.
      if (out.group_labels.empty()) out.group_labels.push_back("(all)");
      groups.push_back(0);
    }
    auto [it, inserted] = profile_ids.try_emplace(groups, d.gamma());
    if (inserted) d.profiles.push_back(GroupProfile{groups});
    d.points.push_back(std::move(p));
    d.profile_of.push_back(it->second);
  }
  d.group_count = static_cast<int>(out.group_labels.size());
  if (d.points.empty()) throw std::runtime_error("zero usable rows");
  return out;
}

Dataset normalize_minmax(const Dataset& d) {
  Dataset out = d;
  std::size_t dim = d.dim();
  for (std::size_t j = 0; j < dim; ++j) {
    double lo = d.points[0].coords[j], hi = lo;
    for (const Point& p : d.points) {
      lo = std::min(lo, p.coords[j]);
      hi = std::max(hi, p.coords[j]);
    }
    double span = hi - lo;
    for (Point& p : out.points)
      p.coords[j] = span > 0.0 ? (p.coords[j] - lo) / span : 0.0;
  }
  return out;
}

ProfileConstraint sample_constraint(const std::vector<double>& profile_masses, int k,
                                    std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  ProfileConstraint f;
  f.quotas.assign(static_cast<std::size_t>(k),
                  std::vector<double>(profile_masses.size(), 0.0));
  Rng rng(seed);
  for (std::size_t t = 0; t < profile_masses.size(); ++t) {
    double mass = profile_masses[t];
    long long n = std::llround(mass);
    if (n < 0 || std::abs(mass - static_cast<double>(n)) > 1e-6 * (1.0 + std::abs(mass)))
      throw std::invalid_argument("non-integral profile mass");
    // Stars and bars: k-1 distinct bar slots among n+k-1 positions.
    std::vector<long long> bars;
    if (k > 1) {
      long long slots = n + k - 1;
      std::vector<long long> pool(static_cast<std::size_t>(slots));
      for (long long i = 0; i < slots; ++i) pool[static_cast<std::size_t>(i)] = i;
      for (int j = 0; j < k - 1; ++j) {
        std::size_t pick = static_cast<std::size_t>(j) +
                           static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(slots - j)));
        std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
      }
      bars.assign(pool.begin(), pool.begin() + (k - 1));
      std::sort(bars.begin(), bars.end());
    }
    long long prev = -1;
    for (int i = 0; i < k; ++i) {
      long long next = i < k - 1 ? bars[static_cast<std::size_t>(i)] : n + k - 1;
      f.quotas[static_cast<std::size_t>(i)][t] = static_cast<double>(next - prev - 1);
      prev = next;
    }
  }
  return f;
}

ProfileConstraint sample_constraint(const Dataset& d, int k, std::uint64_t seed) {
  return sample_constraint(d.profile_masses(), k, seed);
}

ProfileConstraint sample_constraint(const WeightedPointSet& s, int gamma, int k,
                                    std::uint64_t seed) {
  return sample_constraint(s.profile_masses(gamma), k, seed);
}

CenterSet sample_centers(const Dataset& d, int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (d.size() < static_cast<std::size_t>(k))
    throw std::invalid_argument("fewer points than centers");
  Rng rng(seed);
  std::vector<int> idx(d.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  CenterSet c;
  for (int j = 0; j < k; ++j) {
    std::size_t pick = static_cast<std::size_t>(j) +
                       static_cast<std::size_t>(rng.below(idx.size() - static_cast<std::size_t>(j)));
    std::swap(idx[static_cast<std::size_t>(j)], idx[pick]);
    c.centers.push_back(d.points[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])]);
  }
  return c;
}

EmpiricalErrorResult empirical_error(const Dataset& x, const WeightedPointSet& s, int k, int z,
                                     int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  std::vector<double> x_masses = x.profile_masses();
  std::vector<double> s_masses = s.profile_masses(x.gamma());
  for (std::size_t t = 0; t < x_masses.size(); ++t)
    if (std::abs(x_masses[t] - s_masses[t]) > 1e-9 * std::max(x_masses[t], 1.0))
      throw std::invalid_argument("coreset profile masses do not match dataset");

  WeightedPointSet xw = as_weighted(x);
  std::vector<double> err(static_cast<std::size_t>(trials),
                          std::numeric_limits<double>::quiet_NaN());
  std::vector<double> tx(static_cast<std::size_t>(trials), 0.0);
  std::vector<double> ts(static_cast<std::size_t>(trials), 0.0);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= trials) return;
      Rng trial_rng(seed ^ static_cast<std::uint64_t>(i));
      std::uint64_t f_seed = trial_rng.next();
      std::uint64_t c_seed = trial_rng.next();
      ProfileConstraint f = sample_constraint(x_masses, k, f_seed);
      CenterSet c = sample_centers(x, k, c_seed);

      auto t0 = Clock::now();
      double kx = evaluate_objective(xw, f, c, z).objective;
      tx[static_cast<std::size_t>(i)] =
          std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      t0 = Clock::now();
      double ks = evaluate_objective(s, f, c, z).objective;
      ts[static_cast<std::size_t>(i)] =
          std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      if (kx > 0.0) err[static_cast<std::size_t>(i)] = std::abs(ks / kx - 1.0);
    }
  };
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned nthreads = std::min<unsigned>(hw, static_cast<unsigned>(trials));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  EmpiricalErrorResult out;
  for (int i = 0; i < trials; ++i) {
    if (std::isnan(err[static_cast<std::size_t>(i)])) {
      ++out.skipped;
    } else {
      out.errors.push_back(err[static_cast<std::size_t>(i)]);
      out.max_err = std::max(out.max_err, err[static_cast<std::size_t>(i)]);
    }
    out.t_x_ms += tx[static_cast<std::size_t>(i)];
    out.t_s_ms += ts[static_cast<std::size_t>(i)];
  }
  out.t_x_ms /= trials;
  out.t_s_ms /= trials;
  if (out.errors.empty()) throw std::runtime_error("all trials degenerate");
  return out;
}

BenchReport run_benchmark(const BenchConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("trials must be positive");
  if (config.epsilons.empty()) throw std::invalid_argument("no epsilon values");
  for (double e : config.epsilons)
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("epsilon must be in (0,1)");
  if (config.z != 1 && config.z != 2) throw std::invalid_argument("z must be 1 or 2");
  if (config.k < 1) throw std::invalid_argument("k must be positive");

  CsvLoad loaded = load_csv(config);
  Dataset data = config.normalize ? normalize_minmax(loaded.dataset) : loaded.dataset;

  BenchReport report;
  report.config = config;
  report.n = static_cast<int>(data.size());
  report.dim = static_cast<int>(data.dim());
  report.gamma = data.gamma();
  report.group_count = data.group_count;
  report.dropped_rows = loaded.dropped_rows;
  report.note =
      "constraints: uniform compositions per profile; centers: data points without "
      "replacement; (F,C) samples shared between methods within a row; per-trial seed = "
      "row seed xor trial index";

  Rng base(config.seed);
  for (std::size_t ri = 0; ri < config.epsilons.size(); ++ri) {
    double eps = config.epsilons[ri];
    std::uint64_t row_seed = base.fork(ri);

    CoresetParams params;
    params.epsilon = eps;
    params.k = config.k;
    params.z = config.z;
    params.seed = config.seed;
    params.projection_budget_scale = config.projection_budget_scale;

    auto t0 = Clock::now();
    CoresetArtifact ours = build_fair_coreset(data, params);
    double t_c = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

    CoresetArtifact uni = uniform_coreset(data, static_cast<int>(ours.points.size()), config.seed);

    EmpiricalErrorResult ours_err =
        empirical_error(data, ours.points, config.k, config.z, config.trials, row_seed);
    EmpiricalErrorResult uni_err =
        empirical_error(data, uni.points, config.k, config.z, config.trials, row_seed);

    BenchRow row;
    row.epsilon = eps;
    row.size = static_cast<int>(ours.points.size());
    row.err_ours = ours_err.max_err;
    row.err_uniform = uni_err.max_err;
    row.t_s_ms = ours_err.t_s_ms;
    row.t_c_ms = t_c;
    row.t_x_ms = ours_err.t_x_ms;
    row.trials = config.trials;
    row.skipped_ours = ours_err.skipped;
    row.skipped_uniform = uni_err.skipped;
    report.rows.push_back(row);
  }

  if (!config.output.empty()) {
    std::ofstream js(config.output + ".json");
    if (!js) throw std::runtime_error("cannot write " + config.output + ".json");
    js << report_to_json(report) << "\n";
    std::ofstream cs(config.output + ".csv");
    if (!cs) throw std::runtime_error("cannot write " + config.output + ".csv");
    cs << report_to_csv(report);
  }
  return report;
}

std::string report_to_json(const BenchReport& r) {
  nlohmann::json j;
  j["config"] = config_to_json(r.config);
  j["n"] = r.n;
  j["dim"] = r.dim;
  j["gamma"] = r.gamma;
  j["group_count"] = r.group_count;
  j["dropped_rows"] = r.dropped_rows;
  j["note"] = r.note;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows)
    j["rows"].push_back({{"epsilon", row.epsilon},
                         {"size", row.size},
                         {"err_ours", row.err_ours},
                         {"err_uniform", row.err_uniform},
                         {"t_s_ms", row.t_s_ms},
                         {"t_c_ms", row.t_c_ms},
                         {"t_x_ms", row.t_x_ms},
                         {"trials", row.trials},
                         {"skipped_ours", row.skipped_ours},
                         {"skipped_uniform", row.skipped_uniform}});
  return j.dump(2);
}

BenchReport report_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  BenchReport r;
  r.config = config_from_json(j.at("config"));
  r.n = j.at("n").get<int>();
  r.dim = j.at("dim").get<int>();
  r.gamma = j.at("gamma").get<int>();
  r.group_count = j.at("group_count").get<int>();
  r.dropped_rows = j.at("dropped_rows").get<int>();
  r.note = j.at("note").get<std::string>();
  for (const auto& row : j.at("rows")) {
    BenchRow b;
    b.epsilon = row.at("epsilon").get<double>();
    b.size = row.at("size").get<int>();
    b.err_ours = row.at("err_ours").get<double>();
    b.err_uniform = row.at("err_uniform").get<double>();
    b.t_s_ms = row.at("t_s_ms").get<double>();
    b.t_c_ms = row.at("t_c_ms").get<double>();
    b.t_x_ms = row.at("t_x_ms").get<double>();
    b.trials = row.at("trials").get<int>();
    b.skipped_ours = row.at("skipped_ours").get<int>();
    b.skipped_uniform = row.at("skipped_uniform").get<int>();
    r.rows.push_back(b);
  }
  return r;
}

ProfileConstraint load_constraint_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("no header");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (trim(header) != "cluster,profile,mass")
    throw std::runtime_error("parse error line 1: expected header cluster,profile,mass");

  std::vector<std::tuple<int, int, double>> entries;
  int k = 0, gamma = 0;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    double cluster, profile, mass;
    if (fields.size() != 3 || !parse_double(trim(fields[0]), &cluster) ||
        !parse_double(trim(fields[1]), &profile) || !parse_double(trim(fields[2]), &mass))
      throw std::runtime_error("parse error line " + std::to_string(lineno));
    int ci = static_cast<int>(cluster);
    int pi = static_cast<int>(profile);
    if (ci < 0 || pi < 0 || cluster != ci || profile != pi)
      throw std::runtime_error("parse error line " + std::to_string(lineno) +
                               ": cluster and profile must be nonnegative integers");
    entries.emplace_back(ci, pi, mass);
    k = std::max(k, ci + 1);
    gamma = std::max(gamma, pi + 1);
  }
  if (entries.empty()) throw std::runtime_error("empty constraint file");
  ProfileConstraint f;
  f.quotas.assign(static_cast<std::size_t>(k),
                  std::vector<double>(static_cast<std::size_t>(gamma), 0.0));
  for (const auto& [ci, pi, mass] : entries)
    f.quotas[static_cast<std::size_t>(ci)][static_cast<std::size_t>(pi)] += mass;
  return f;
}

CenterSet load_centers_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("no header");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  std::size_t dim = split_csv_line(header).size();

  CenterSet c;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != dim)
      throw std::runtime_error("parse error line " + std::to_string(lineno) +
                               ": expected " + std::to_string(dim) + " columns");
    Point p;
    p.coords.resize(dim);
    for (std::size_t j = 0; j < dim; ++j)
      if (!parse_double(trim(fields[j]), &p.coords[j]))
        throw std::runtime_error("parse error line " + std::to_string(lineno));
    c.centers.push_back(std::move(p));
  }
  if (c.centers.empty()) throw std::runtime_error("empty center file");
  return c;
}

std::string report_to_csv(const BenchReport& r) {
  std::ostringstream out;
  out << "epsilon,size,err_ours,err_uniform,t_s_ms,t_c_ms,t_x_ms,trials,skipped_ours,"
         "skipped_uniform\n";
  for (const auto& row : r.rows) {
    out << format_double(row.epsilon) << "," << row.size << "," << format_double(row.err_ours)
        << "," << format_double(row.err_uniform) << "," << format_double(row.t_s_ms) << ","
        << format_double(row.t_c_ms) << "," << format_double(row.t_x_ms) << "," << row.trials
        << "," << row.skipped_ours << "," << row.skipped_uniform << "\n";
  }
  return out.str();
}

}  // namespace faircoreset
