// Copyright 2026 The dkrm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dkrm/influence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "dkrm/error.hpp"
#include "dkrm/rng.hpp"

namespace dkrm {
namespace {

constexpr std::size_t kMaxGridPoints = std::size_t{1} << 24;

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

std::vector<double> make_points(const FeatureSchema& schema, const InfluenceConfig& cfg,
                                std::size_t& count) {
  const std::size_t n = schema.size();
  std::vector<double> pts;
  if (cfg.sampling == InfluenceConfig::Sampling::kMonteCarloUniform) {
    count = cfg.sample_count;
    pts.resize(count * n);
    Rng rng(cfg.seed);
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        pts[i * n + j] = rng.uniform(schema[j].min + cfg.delta, schema[j].max - cfg.delta);
      }
    }
    return pts;
  }
  const std::size_t p = cfg.points_per_axis;
  count = 1;
  for (std::size_t j = 0; j < n; ++j) {
    if (count > kMaxGridPoints / p) {
      throw DataError("full grid too large: " + std::to_string(p) + "^" + std::to_string(n) +
                      " points");
    }
    count *= p;
  }
  pts.resize(count * n);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t rest = i;
    for (std::size_t j = n; j-- > 0;) {
      const std::size_t k = rest % p;
      rest /= p;
      const double lo = schema[j].min + cfg.delta;
      const double hi = schema[j].max - cfg.delta;
      pts[i * n + j] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(p - 1);
    }
  }
  return pts;
}

}  // namespace

InfluenceReport feature_influence(const RewardModel& model, const InfluenceConfig& config) {
  const auto& schema = model.schema;
  if (!(config.delta > 0.0) || !(config.delta < 0.5 * schema.smallest_range())) {
    throw DataError("delta out of range: " + format_number(config.delta) +
                    " must lie in (0, " + format_number(0.5 * schema.smallest_range()) + ")");
  }
  if (config.sampling == InfluenceConfig::Sampling::kMonteCarloUniform &&
      config.sample_count == 0) {
    throw DataError("sample_count must be positive");
  }
  if (config.sampling == InfluenceConfig::Sampling::kFullGrid && config.points_per_axis < 2) {
    throw DataError("points_per_axis must be >= 2");
  }

  const std::size_t n = schema.size();
  std::size_t count = 0;
  const std::vector<double> points = make_points(schema, config, count);
  std::vector<double> diffs(count * n, 0.0);

  auto work = [&](std::size_t begin, std::size_t end) {
    RewardEvaluator eval(model);
    std::vector<double> x(n);
    for (std::size_t i = begin; i < end; ++i) {
      std::copy_n(points.begin() + static_cast<std::ptrdiff_t>(i * n), n, x.begin());
      for (std::size_t j = 0; j < n; ++j) {
        const double orig = x[j];
        x[j] = orig + config.delta;
        const double up = eval(x);
        x[j] = orig - config.delta;
        const double down = eval(x);
        x[j] = orig;
        diffs[i * n + j] = up - down;
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(config.threads, 1, std::max<std::size_t>(count, 1));
  if (threads == 1) {
    work(0, count);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(count, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }

  InfluenceReport report;
  report.sample_count = count;
  report.raw.resize(n);
  const double scale = 1.0 / (2.0 * config.delta * static_cast<double>(count));
  CompensatedSum total_abs;
  for (std::size_t j = 0; j < n; ++j) {
    CompensatedSum s;
    for (std::size_t i = 0; i < count; ++i) s.add(diffs[i * n + j]);
    report.raw[j] = s.value() * scale;
    total_abs.add(std::abs(report.raw[j]));
  }
  const double total = total_abs.value();
  if (!std::isfinite(total)) throw NumericalError("non-finite influence");
  if (total == 0.0) throw NumericalError("zero total influence");
  report.normalized.resize(n);
  for (std::size_t j = 0; j < n; ++j) report.normalized[j] = report.raw[j] / total;
  for (const auto& f : schema.features()) report.feature_names.push_back(f.name);
  return report;
}

std::string InfluenceReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "feature,raw,normalized\n";
  for (std::size_t j = 0; j < raw.size(); ++j) {
    os << feature_names[j] << ',' << raw[j] << ',' << normalized[j] << '\n';
  }
  return os.str();
}

std::string InfluenceReport::to_bar_chart(std::size_t width) const {
  std::size_t name_w = 0;
  for (const auto& name : feature_names) name_w = std::max(name_w, name.size());
  std::string out;
  char buf[64];
  for (std::size_t j = 0; j < normalized.size(); ++j) {
    const double share = normalized[j];
    const auto len = static_cast<std::size_t>(std::lround(std::abs(share) * static_cast<double>(width)));
    out += feature_names[j];
    out.append(name_w - feature_names[j].size() + 1, ' ');
    out += "| ";
    out.append(len, share < 0.0 ? '-' : '#');
    out.append(width - std::min(len, width) + 1, ' ');
    std::snprintf(buf, sizeof buf, "%+.4f\n", share);
    out += buf;
  }
  return out;
}

}  // namespace dkrm
