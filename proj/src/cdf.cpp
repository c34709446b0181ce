#include "kvrand/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <string>

#include "kvrand/error.hpp"
#include "kvrand/special.hpp"

namespace kvrand {

namespace {

void check_domain(double x_min, double x_max) {
  if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw Error(ErrorCode::InvalidRange, "distribution domain needs x_min < x_max");
  }
}

double interpolate(std::span<const double> xs, std::span<const double> ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + w * (ys[i + 1] - ys[i]);
}

}  // namespace

DistributionSpec DistributionSpec::normal(double mu, double sigma, double x_min, double x_max) {
  DistributionSpec s;
  s.kind = Kind::Builtin;
  s.builtin = Builtin::Normal;
  s.mu = mu;
  s.sigma = sigma;
  s.x_min = x_min;
  s.x_max = x_max;
  return s;
}

DistributionSpec DistributionSpec::airy(double x_min, double x_max) {
  DistributionSpec s;
  s.kind = Kind::Builtin;
  s.builtin = Builtin::Airy;
  s.x_min = x_min;
  s.x_max = x_max;
  return s;
}

DistributionSpec DistributionSpec::uniform(double x_min, double x_max) {
  DistributionSpec s;
  s.kind = Kind::Builtin;
  s.builtin = Builtin::Uniform;
  s.x_min = x_min;
  s.x_max = x_max;
  return s;
}

DistributionSpec DistributionSpec::from_expression(std::string text, double x_min, double x_max) {
  DistributionSpec s;
  s.kind = Kind::Expression;
  s.expression = std::move(text);
  s.x_min = x_min;
  s.x_max = x_max;
  return s;
}

DistributionSpec DistributionSpec::tabulated(std::vector<double> x, std::vector<double> pdf) {
  DistributionSpec s;
  s.kind = Kind::Tabulated;
  s.table_x = std::move(x);
  s.table_pdf = std::move(pdf);
  if (!s.table_x.empty()) {
    s.x_min = s.table_x.front();
    s.x_max = s.table_x.back();
  }
  return s;
}

ScalarFunction density_function(const DistributionSpec& spec) {
  check_domain(spec.x_min, spec.x_max);
  switch (spec.kind) {
    case DistributionSpec::Kind::Builtin:
      switch (spec.builtin) {
        case DistributionSpec::Builtin::Normal: {
          if (!(spec.sigma > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "normal sigma must be positive");
          }
          const double mu = spec.mu;
          const double sigma = spec.sigma;
          return [mu, sigma](double x) { return normal_pdf(x, mu, sigma); };
        }
        case DistributionSpec::Builtin::Airy:
          return [](double x) { return airy_ai(x); };
        case DistributionSpec::Builtin::Uniform:
          return [](double) { return 1.0; };
      }
      break;
    case DistributionSpec::Kind::Expression: {
      auto ast = std::make_shared<const ExpressionAst>(parse_expression(spec.expression));
      return [ast](double x) { return ast->evaluate(x); };
    }
    case DistributionSpec::Kind::Tabulated: {
      const auto& xs = spec.table_x;
      if (xs.size() < 2 || xs.size() != spec.table_pdf.size()) {
        throw Error(ErrorCode::TooFewElements, "tabulated density needs at least 2 (x, pdf) rows");
      }
      for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!(xs[i] < xs[i + 1])) {
          throw Error(ErrorCode::InvalidArgument,
                      "tabulated x values must be strictly ascending (row " +
                          std::to_string(i + 2) + ")");
        }
      }
      auto x = std::make_shared<const std::vector<double>>(spec.table_x);
      auto p = std::make_shared<const std::vector<double>>(spec.table_pdf);
      return [x, p](double v) { return interpolate(*x, *p, v); };
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown distribution kind");
}

DistributionSpec read_tabulated(std::istream& in) {
  std::vector<double> xs;
  std::vector<double> ps;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double x = 0.0;
    double p = 0.0;
    if (!(fields >> x)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw Error(ErrorCode::SyntaxError, "table line " + std::to_string(line_no) +
                                              ": expected two numbers");
    }
    std::string rest;
    if (!(fields >> p) || (fields >> rest)) {
      throw Error(ErrorCode::SyntaxError, "table line " + std::to_string(line_no) +
                                              ": expected two numbers");
    }
    xs.push_back(x);
    ps.push_back(p);
  }
  auto spec = DistributionSpec::tabulated(std::move(xs), std::move(ps));
  density_function(spec);  // validates ordering and size
  return spec;
}

CumulativeTable build_cdf(const DistributionSpec& spec, std::size_t n) {
  if (n < 2) throw Error(ErrorCode::TooFewElements, "cumulative table needs at least 2 nodes");
  const auto density = density_function(spec);

  CumulativeTable t;
  t.x_min = spec.x_min;
  t.x_max = spec.x_max;
  const double dx = (spec.x_max - spec.x_min) / static_cast<double>(n - 1);
  t.x_nodes.resize(n);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.x_nodes[i] = (i + 1 == n) ? spec.x_max : spec.x_min + static_cast<double>(i) * dx;
    z[i] = density(t.x_nodes[i]);
    if (!std::isfinite(z[i])) {
      throw Error(ErrorCode::DensityEvaluationError,
                  "density is not finite at x = " + std::to_string(t.x_nodes[i]));
    }
  }
  t.z_min = *std::min_element(z.begin(), z.end());
  t.shift = std::max(0.0, -t.z_min);

  std::vector<double> gstar(n);
  const bool closed_form = spec.kind == DistributionSpec::Kind::Builtin &&
                           spec.builtin == DistributionSpec::Builtin::Normal;
  if (closed_form) {
    for (std::size_t i = 0; i < n; ++i) gstar[i] = normal_cdf(t.x_nodes[i], spec.mu, spec.sigma);
  } else {
    gstar[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      const double h = t.x_nodes[i] - t.x_nodes[i - 1];
      gstar[i] = gstar[i - 1] + 0.5 * h * (z[i - 1] + z[i] + 2.0 * t.shift);
    }
  }
  const auto [lo, hi] = std::minmax_element(gstar.begin(), gstar.end());
  t.gstar_min = *lo;
  t.gstar_max = *hi;
  const double range = t.gstar_max - t.gstar_min;
  if (!(range > 0.0)) {
    throw Error(ErrorCode::AllZeroDensity, "density integrates to zero over the domain");
  }
  t.g_values.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.g_values[i] = (gstar[i] - t.gstar_min) / range;
  return t;
}

double default_plateau_tolerance() { return 16.0 * std::numeric_limits<double>::epsilon(); }

CumulativeTable excise_plateaus(const CumulativeTable& table, double tol) {
  CumulativeTable out = table;
  out.x_nodes.clear();
  out.g_values.clear();
  out.excised = table.excised;

  const auto& x = table.x_nodes;
  const auto& g = table.g_values;
  const std::size_t n = x.size();
  out.x_nodes.push_back(x[0]);
  out.g_values.push_back(g[0]);
  std::size_t i = 1;
  while (i < n) {
    if (g[i] - g[i - 1] < tol) {
      const std::size_t a = i - 1;
      while (i < n && g[i] - g[i - 1] < tol) ++i;
      out.excised.push_back({x[a], x[i - 1]});
      continue;
    }
    out.x_nodes.push_back(x[i]);
    out.g_values.push_back(g[i]);
    ++i;
  }
  if (out.x_nodes.size() < 2) {
    throw Error(ErrorCode::AllZeroDensity, "cumulative table is flat everywhere");
  }
  std::sort(out.excised.begin(), out.excised.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });

  const double g0 = out.g_values.front();
  const double span = out.g_values.back() - g0;
  for (auto& v : out.g_values) v = (v - g0) / span;
  return out;
}

CoordinateMap::CoordinateMap(std::vector<Interval> excised) : excised_(std::move(excised)) {
  std::sort(excised_.begin(), excised_.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double removed = 0.0;
  for (const auto& iv : excised_) {
    starts_.push_back(iv.lo - removed);
    removed += iv.hi - iv.lo;
    offsets_.push_back(removed);
  }
}

double CoordinateMap::compress(double x) const {
  double removed = 0.0;
  for (const auto& iv : excised_) {
    if (x <= iv.lo) break;
    if (x < iv.hi) return iv.lo - removed;
    removed += iv.hi - iv.lo;
  }
  return x - removed;
}

double CoordinateMap::expand_slow(double t) const {
  const auto it = std::lower_bound(starts_.begin(), starts_.end(), t);
  if (it == starts_.begin()) return t;
  return t + offsets_[static_cast<std::size_t>(it - starts_.begin()) - 1];
}

CompressedCdf::CompressedCdf(const CumulativeTable& table) : g_(table.g_values) {
  const CoordinateMap map(table.excised);
  t_.reserve(table.x_nodes.size());
  for (double x : table.x_nodes) t_.push_back(map.compress(x));
}

double CompressedCdf::operator()(double t) const { return interpolate(t_, g_, t); }

}  // namespace kvrand
