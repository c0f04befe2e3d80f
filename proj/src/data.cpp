#include "bcgp/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "bcgp/errors.hpp"
#include "bcgp/rng.hpp"

namespace bcgp {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::istringstream is(s);
  is.imbue(std::locale::classic());
  is >> out;
  return !is.fail() && is.eof();
}

TimeSeries subset(const TimeSeries& s, const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(idx.size()));
  Eigen::VectorXd v(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    t[static_cast<Eigen::Index>(i)] = s.times()[idx[i]];
    v[static_cast<Eigen::Index>(i)] = s.values()[idx[i]];
  }
  return TimeSeries(std::move(t), std::move(v));
}

// First `count` entries of a seeded Fisher-Yates shuffle, returned sorted.
std::vector<Eigen::Index> draw_without_replacement(std::vector<Eigen::Index> pool, long count,
                                                   std::uint64_t seed) {
  Rng rng(seed);
  const auto n = pool.size();
  for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) {
    const std::size_t j = i + rng.index(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

TimeSeries::TimeSeries(Eigen::VectorXd times, Eigen::VectorXd values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size()) throw DataError("timestamps and values differ in length");
  for (Eigen::Index i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(values_[i])) {
      throw DataError("non-finite entry at index " + std::to_string(i));
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw DataError("timestamps not strictly increasing at index " + std::to_string(i));
    }
  }
}

TimeSeries load_csv(const std::string& path, const std::string& time_column,
                    const std::string& value_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty (no header row)");
  const auto header = split_line(line);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("'" + path + "' has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t tc = column(time_column);
  const std::size_t vc = column(value_column);

  std::vector<double> times;
  std::vector<double> values;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_line(line);
    double t = 0.0;
    double v = 0.0;
    if (tc >= fields.size() || !parse_double(fields[tc], t)) {
      throw DataError("'" + path + "' row " + std::to_string(row) + ", column '" + time_column +
                      "': missing or unparsable value");
    }
    if (vc >= fields.size() || !parse_double(fields[vc], v)) {
      throw DataError("'" + path + "' row " + std::to_string(row) + ", column '" + value_column +
                      "': missing or unparsable value");
    }
    if (!times.empty() && !(t > times.back())) {
      throw DataError("'" + path + "' row " + std::to_string(row) +
                      ": timestamps must be strictly increasing");
    }
    times.push_back(t);
    values.push_back(v);
  }
  if (times.empty()) throw DataError("'" + path + "' contains no data rows");
  return TimeSeries(Eigen::Map<Eigen::VectorXd>(times.data(), static_cast<Eigen::Index>(times.size())),
                    Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
}

Split split(const TimeSeries& series, const SplitSpec& spec) {
  Split out;
  if (const auto* rf = std::get_if<ReconstructForecast>(&spec.mode)) {
    if (!(rf->window_start <= rf->window_end)) throw ArgumentError("split window is empty");
    std::vector<Eigen::Index> window;
    std::vector<Eigen::Index> after;
    std::vector<Eigen::Index> before;
    for (Eigen::Index i = 0; i < series.size(); ++i) {
      const double t = series.times()[i];
      if (t < rf->window_start) {
        before.push_back(i);
      } else if (t <= rf->window_end) {
        window.push_back(i);
      } else {
        after.push_back(i);
      }
    }
    if (window.empty()) throw ArgumentError("split window contains no points");
    if (rf->train_count < 1 || rf->train_count > static_cast<long>(window.size())) {
      throw ArgumentError("train_count " + std::to_string(rf->train_count) + " not in [1, " +
                          std::to_string(window.size()) + "]");
    }
    const auto train = draw_without_replacement(window, rf->train_count, spec.seed);
    std::vector<Eigen::Index> rest;
    std::set_difference(window.begin(), window.end(), train.begin(), train.end(),
                        std::back_inserter(rest));
    // Points before the window are neither trained on nor forecast; they are
    // reconstruction targets so the partitions still cover the series.
    rest.insert(rest.begin(), before.begin(), before.end());
    out.train = subset(series, train);
    out.reconstruct = subset(series, rest);
    out.forecast = subset(series, after);
    return out;
  }
  const auto& rnd = std::get<RandomFraction>(spec.mode);
  long count = rnd.train_count;
  if (count == 0) count = std::lround(rnd.fraction * static_cast<double>(series.size()));
  if (count < 1 || count > series.size()) {
    throw ArgumentError("train_count " + std::to_string(count) + " not in [1, " +
                        std::to_string(series.size()) + "]");
  }
  std::vector<Eigen::Index> all(static_cast<std::size_t>(series.size()));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  const auto train = draw_without_replacement(all, count, spec.seed);
  std::vector<Eigen::Index> rest;
  std::set_difference(all.begin(), all.end(), train.begin(), train.end(), std::back_inserter(rest));
  out.train = subset(series, train);
  out.reconstruct = subset(series, rest);
  return out;
}

Scores score(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_point,
             const Eigen::VectorXd& log_densities) {
  if (y_true.size() != y_point.size() || y_true.size() != log_densities.size()) {
    throw ArgumentError("score: length mismatch");
  }
  if (y_true.size() == 0) throw ArgumentError("score: empty test set");
  const Eigen::ArrayXd err = (y_true - y_point).array();
  Scores s;
  s.mae = err.abs().mean();
  s.mse = err.square().mean();
  s.nlpd = -log_densities.mean();
  return s;
}

}  // namespace bcgp
