#include "faircoreset/line_coreset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace faircoreset {

namespace {

// Range moment evaluation over sorted positions via long-double prefix sums.
// Delta_1 is about the mean (not the median), so the split at the mean plus
// the two partial sums give it exactly.
class PrefixMoments {
 public:
  explicit PrefixMoments(const std::vector<double>& xs) : xs_(xs) {
    sum_.resize(xs.size() + 1, 0.0L);
    sq_.resize(xs.size() + 1, 0.0L);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sum_[i + 1] = sum_[i] + static_cast<long double>(xs[i]);
      sq_[i + 1] = sq_[i] + static_cast<long double>(xs[i]) * xs[i];
    }
  }

  double mean(int a, int b) const {
    return static_cast<double>((sum_[static_cast<std::size_t>(b)] - sum_[static_cast<std::size_t>(a)]) / (b - a));
  }

  double delta(int a, int b, int z) const {
    int n = b - a;
    long double s = sum_[static_cast<std::size_t>(b)] - sum_[static_cast<std::size_t>(a)];
    long double mu = s / n;
    if (z == 2) {
      long double q = sq_[static_cast<std::size_t>(b)] - sq_[static_cast<std::size_t>(a)];
      long double d = q - s * mu;
      return d > 0.0L ? static_cast<double>(d) : 0.0;
    }
    auto it = std::lower_bound(xs_.begin() + a, xs_.begin() + b, static_cast<double>(mu));
    int split = static_cast<int>(it - xs_.begin());
    long double left = sum_[static_cast<std::size_t>(split)] - sum_[static_cast<std::size_t>(a)];
    long double right = sum_[static_cast<std::size_t>(b)] - sum_[static_cast<std::size_t>(split)];
    long double d = (right - (b - split) * mu) - (left - (split - a) * mu);
    return d > 0.0L ? static_cast<double>(d) : 0.0;
  }

 private:
  const std::vector<double>& xs_;
  std::vector<long double> sum_;
  std::vector<long double> sq_;
};

// Exact recomputation at batch close (two passes over the range).
double direct_delta(const std::vector<double>& xs, int a, int b, int z, double* mean_out) {
  double mu = 0.0;
  for (int i = a; i < b; ++i) mu += xs[static_cast<std::size_t>(i)];
  mu /= (b - a);
  double d = 0.0;
  for (int i = a; i < b; ++i) {
    double r = xs[static_cast<std::size_t>(i)] - mu;
    d += z == 2 ? r * r : std::abs(r);
  }
  if (mean_out) *mean_out = mu;
  return d;
}

WeightedPointSet make_1d_set(const std::vector<std::pair<double, double>>& pts) {
  WeightedPointSet s;
  for (const auto& [pos, w] : pts) {
    s.points.push_back(Point{pos});
    s.weights.push_back(w);
    s.profile_of.push_back(0);
  }
  return s;
}

void check_line_inputs(const LineDataset& l, int k, double opt_estimate, double epsilon) {
  if (l.positions.empty()) throw std::invalid_argument("empty line");
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in (0,1)");
  double spread = l.positions.back() - l.positions.front();
  if (opt_estimate <= 0.0 && spread > 0.0)
    throw std::invalid_argument("nonpositive opt estimate");
}

}  // namespace

std::vector<Batch> partition_batches(const LineDataset& l, double xi, int z) {
  if (l.positions.empty()) throw std::invalid_argument("empty line");
  if (!std::is_sorted(l.positions.begin(), l.positions.end()))
    throw std::invalid_argument("positions not sorted");
  if (z != 1 && z != 2) throw std::invalid_argument("z must be 1 or 2");

  PrefixMoments pm(l.positions);
  std::vector<Batch> batches;
  int n = static_cast<int>(l.positions.size());
  int a = 0;
  while (a < n) {
    int b = a + 1;  // a single point always fits: Delta = 0
    while (b < n && pm.delta(a, b + 1, z) <= xi) ++b;
    Batch batch{a, b, 0.0, 0.0};
    batch.err = direct_delta(l.positions, a, b, z, &batch.mean);
    batches.push_back(batch);
    a = b;
  }
  return batches;
}

WeightedPointSet median_line_coreset(const LineDataset& l, int k, double opt_estimate,
                                     double epsilon) {
  check_line_inputs(l, k, opt_estimate, epsilon);
  if (opt_estimate <= 0.0) {
    // Zero spread: the whole line is one point.
    return make_1d_set({{l.positions.front(), static_cast<double>(l.size())}});
  }
  double xi = epsilon * opt_estimate / (30.0 * k);
  std::vector<std::pair<double, double>> pts;
  for (const Batch& b : partition_batches(l, xi, 1))
    pts.emplace_back(b.mean, static_cast<double>(b.count()));
  return make_1d_set(pts);
}

std::vector<std::pair<double, double>> two_point_moment_match(std::span<const double> batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  double n = static_cast<double>(batch.size());
  double mu = 0.0;
  double lo = batch[0], hi = batch[0];
  for (double x : batch) {
    mu += x;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  mu /= n;
  double var = 0.0;
  for (double x : batch) var += (x - mu) * (x - mu);
  var /= n;

  if (var <= 0.0 || mu - lo <= 0.0) return {{mu, n}};
  // q1 at the batch minimum; Bhatia-Davis gives q2 <= max.
  double q1 = lo;
  double q2 = mu + var / (mu - q1);
  if (q2 > hi) q2 = hi;  // fp guard, the inequality is tight for two-valued batches
  double w1 = n * (q2 - mu) / (q2 - q1);
  double w2 = n - w1;
  return {{q1, w1}, {q2, w2}};
}

WeightedPointSet means_line_coreset(const LineDataset& l, int k, double opt_estimate,
                                    double epsilon) {
  check_line_inputs(l, k, opt_estimate, epsilon);
  if (opt_estimate <= 0.0)
    return make_1d_set({{l.positions.front(), static_cast<double>(l.size())}});
  double xi = epsilon * epsilon * opt_estimate / (200.0 * k * k);
  std::vector<std::pair<double, double>> pts;
  for (const Batch& b : partition_batches(l, xi, 2)) {
    std::span<const double> range(l.positions.data() + b.begin, static_cast<std::size_t>(b.count()));
    for (const auto& p : two_point_moment_match(range)) pts.push_back(p);
  }
  return make_1d_set(pts);
}

Point lift_to_ambient(const LineDataset& l, double position) {
  Point p = l.origin;
  for (std::size_t j = 0; j < p.coords.size(); ++j) p.coords[j] += position * l.direction[j];
  return p;
}

}  // namespace faircoreset
