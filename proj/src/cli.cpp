#include "kvrand/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "kvrand/artifact.hpp"
#include "kvrand/cdf.hpp"
#include "kvrand/error.hpp"
#include "kvrand/lut.hpp"
#include "kvrand/sampler.hpp"
#include "kvrand/stats.hpp"

namespace kvrand::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Counts accept plain integers and scientific notation ("1e7").
std::uint64_t parse_count(const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  if (auto [p, ec] = std::from_chars(text.data(), end, v); ec == std::errc{} && p == end) return v;
  char* stop = nullptr;
  const double d = std::strtod(text.c_str(), &stop);
  if (stop == text.c_str() || *stop != '\0' || !(d >= 0.0) || d > 0x1.0p63 || std::floor(d) != d) {
    throw CLI::ValidationError("expected a nonnegative integer, got '" + text + "'");
  }
  return static_cast<std::uint64_t>(d);
}

CLI::Option* add_count(CLI::App* cmd, const std::string& name, std::uint64_t& target,
                       const std::string& desc) {
  return cmd->add_option_function<std::string>(
                name, [&target](const std::string& s) { target = parse_count(s); }, desc)
      ->default_str(std::to_string(target));
}

struct SpecFlags {
  std::string builtin;
  std::string expr;
  std::string table;
  double mu = 0.0;
  double sigma = 1.0;
  double x_min = 0.0;
  double x_max = 0.0;
  CLI::Option* xmin_opt = nullptr;
  CLI::Option* xmax_opt = nullptr;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& f) {
  cmd->add_option("distribution", f.builtin, "Builtin density: normal, airy or uniform")
      ->check(CLI::IsMember({"normal", "airy", "uniform"}));
  cmd->add_option("--expr", f.expr, "Density expression in x");
  cmd->add_option("--table", f.table, "Two-column x,pdf text file");
  cmd->add_option("--mu", f.mu, "Normal mean")->capture_default_str();
  cmd->add_option("--sigma", f.sigma, "Normal standard deviation")->capture_default_str();
  f.xmin_opt = cmd->add_option("--xmin", f.x_min, "Domain lower bound");
  f.xmax_opt = cmd->add_option("--xmax", f.x_max, "Domain upper bound");
}

DistributionSpec make_spec(const SpecFlags& f) {
  const int sources = !f.builtin.empty() + !f.expr.empty() + !f.table.empty();
  if (sources != 1) {
    throw UsageError("give exactly one of a builtin name, --expr or --table");
  }
  const bool has_lo = f.xmin_opt->count() > 0;
  const bool has_hi = f.xmax_opt->count() > 0;
  auto domain = [&](double lo, double hi) {
    return std::pair{has_lo ? f.x_min : lo, has_hi ? f.x_max : hi};
  };
  if (!f.table.empty()) {
    std::ifstream in(f.table);
    if (!in) throw Error(ErrorCode::IOError, "cannot open table '" + f.table + "'");
    return read_tabulated(in);
  }
  if (!f.expr.empty()) {
    if (!has_lo || !has_hi) throw UsageError("--expr needs --xmin and --xmax");
    return DistributionSpec::from_expression(f.expr, f.x_min, f.x_max);
  }
  if (f.builtin == "normal") {
    const auto [lo, hi] = domain(f.mu - 5.0 * f.sigma, f.mu + 5.0 * f.sigma);
    return DistributionSpec::normal(f.mu, f.sigma, lo, hi);
  }
  if (f.builtin == "airy") {
    const auto [lo, hi] = domain(-8.0, 1.0);
    return DistributionSpec::airy(lo, hi);
  }
  const auto [lo, hi] = domain(0.0, 1.0);
  return DistributionSpec::uniform(lo, hi);
}

void write_text(std::ostream& os, std::span<const double> values) {
  std::string buffer;
  buffer.reserve(1 << 16);
  char num[32];
  for (double v : values) {
    const auto [p, ec] = std::to_chars(num, num + sizeof(num), v);
    buffer.append(num, p);
    buffer.push_back('\n');
    if (buffer.size() > (1 << 16) - 64) {
      os.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
      buffer.clear();
    }
  }
  os.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
}

void write_raw64(std::ostream& os, std::span<const double> values) {
  static_assert(std::endian::native == std::endian::little, "raw64 output assumes little endian");
  os.write(reinterpret_cast<const char*>(values.data()),
           static_cast<std::streamsize>(values.size() * sizeof(double)));
}

std::vector<double> read_samples(const std::string& path, const std::string& format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open samples '" + path + "'");
  std::vector<double> values;
  if (format == "raw64") {
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % 8 != 0) {
      throw Error(ErrorCode::IOError, "raw64 file size is not a multiple of 8");
    }
    values.resize(bytes.size() / 8);
    std::memcpy(values.data(), bytes.data(), bytes.size());
    return values;
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    double v = 0.0;
    const auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{}) {
      throw Error(ErrorCode::SyntaxError, "samples line " + std::to_string(line_no) +
                                              " is not a number");
    }
    values.push_back(v);
  }
  return values;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error(ErrorCode::IOError, "cannot open '" + path + "' for writing");
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }
  void close() {
    stream_->flush();
    if (file_.is_open()) file_.close();
    if (!*stream_) throw Error(ErrorCode::IOError, "writing samples failed");
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

// Draws `count` values from `draw_fn` in fixed-size chunks, handing each to
// `sink`; keeps memory flat for very long runs.
void stream_draws(std::uint64_t count,
                  const std::function<void(std::span<double>)>& draw_fn,
                  const std::function<void(std::span<const double>)>& sink) {
  constexpr std::uint64_t kChunk = 1 << 16;
  std::vector<double> buffer(static_cast<std::size_t>(std::min(count, kChunk)));
  for (std::uint64_t done = 0; done < count;) {
    const auto n = static_cast<std::size_t>(std::min(kChunk, count - done));
    std::span<double> chunk(buffer.data(), n);
    draw_fn(chunk);
    sink(chunk);
    done += n;
  }
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("KVRAND_SEED"); env != nullptr && *env != '\0') {
    try {
      return parse_count(env);
    } catch (const CLI::ValidationError&) {
      throw UsageError(std::string("KVRAND_SEED is not a nonnegative integer: ") + env);
    }
  }
  return 0;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownIdentifier:
      return kParse;
    case ErrorCode::IOError:
    case ErrorCode::BadArtifact:
      return kIo;
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidRange:
    case ErrorCode::TooFewElements:
      return kUsage;
    default:
      return kNumeric;
  }
}

// ---- build ----------------------------------------------------------------

struct BuildFlags {
  SpecFlags spec;
  std::uint64_t n_d = 1000;
  std::uint64_t grid_n = 20001;
  std::string mode = "direct";
  std::uint64_t n_e = 5;
  double plateau_tol = default_plateau_tolerance();
  std::string out;
};

int cmd_build(const BuildFlags& f, std::ostream& out) {
  const auto start = Clock::now();
  const DistributionSpec spec = make_spec(f.spec);
  const CumulativeTable raw = build_cdf(spec, f.grid_n);
  const CumulativeTable table = excise_plateaus(raw, f.plateau_tol);
  const Sampler sampler =
      make_sampler(table, f.n_d, parse_sampler_mode(f.mode), f.n_e, f.grid_n);
  write_artifact_file(f.out, to_artifact(sampler, raw.shift));
  out << "kind=grid\n"
      << "nodes=" << sampler.grid().size() << "\n"
      << "levels=" << sampler.grid().levels << "\n"
      << "mode=" << to_string(sampler.mode()) << "\n"
      << "excised=" << table.excised.size() << "\n"
      << "build_seconds=" << seconds_since(start) << "\n";
  return kOk;
}

// ---- sample ---------------------------------------------------------------

struct SampleFlags {
  std::string artifact;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::uint64_t stream = 0;
  std::string out;
  std::string format = "text";
  std::uint64_t threads = 1;
  std::string mode;
  std::uint64_t n_e = 0;
};

using DrawFn = std::function<void(UniformSource&, std::span<double>)>;

DrawFn load_draw_fn(const std::string& path, const std::string& mode_override, std::uint64_t n_e) {
  if (peek_artifact_kind(path) == ArtifactKind::Table) {
    auto table = std::make_shared<const SampleTable>(read_table_artifact_file(path).table);
    if (table->samples.empty()) throw Error(ErrorCode::EmptyTable, "artifact table is empty");
    return [table](UniformSource& rng, std::span<double> dst) {
      const std::uint64_t n = table->samples.size();
      for (double& v : dst) v = table->samples[rng.next_index(n)];
    };
  }
  Sampler sampler = to_sampler(read_grid_artifact_file(path));
  if (!mode_override.empty()) {
    const auto mode = parse_sampler_mode(mode_override);
    sampler = sampler.with_mode(mode, n_e != 0 ? n_e : (mode == SamplerMode::Lagrange ? 5 : 2));
  }
  auto shared = std::make_shared<const Sampler>(std::move(sampler));
  return [shared](UniformSource& rng, std::span<double> dst) { shared->draw_into(rng, dst); };
}

int cmd_sample(const SampleFlags& f, std::ostream& out) {
  if (f.threads == 0) throw UsageError("--threads must be at least 1");
  const DrawFn draw = load_draw_fn(f.artifact, f.mode, f.n_e);
  const std::uint64_t seed = f.seed_opt->count() > 0 ? f.seed : default_seed();
  Output output(f.out, out);
  auto& os = output.stream();
  const auto sink = [&](std::span<const double> v) {
    if (f.format == "raw64") {
      write_raw64(os, v);
    } else {
      write_text(os, v);
    }
  };

  if (f.threads == 1) {
    UniformSource rng(seed, f.stream);
    stream_draws(f.count, [&](std::span<double> dst) { draw(rng, dst); }, sink);
  } else {
    // Worker t owns stream (stream + t); output is concatenated in stream order.
    const std::uint64_t t_count = f.threads;
    std::vector<std::vector<double>> parts(t_count);
    std::vector<std::thread> workers;
    for (std::uint64_t t = 0; t < t_count; ++t) {
      const std::uint64_t share = f.count / t_count + (t < f.count % t_count ? 1 : 0);
      workers.emplace_back([&, t, share] {
        UniformSource rng(seed, f.stream + t);
        parts[t].resize(share);
        draw(rng, parts[t]);
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& p : parts) sink(p);
  }
  output.close();
  return kOk;
}

// ---- lut-build ------------------------------------------------------------

struct LutFlags {
  SpecFlags spec;
  std::uint64_t n_d = 1000;
  double dx_r = 9e-4;
  std::uint64_t grid_n = 65535;
  bool float32 = false;
  bool count_only = false;
  std::string out;
};

int cmd_lut_build(const LutFlags& f, std::ostream& out) {
  const auto start = Clock::now();
  const DistributionSpec spec = make_spec(f.spec);
  const LevelPlan plan =
      make_level_plan(density_function(spec), spec.x_min, spec.x_max, f.grid_n, f.n_d, f.dx_r);
  std::size_t total = 0;
  if (f.count_only) {
    for (auto c : count_sample_table(plan)) total += c;
  } else {
    if (f.out.empty()) throw UsageError("--out is required unless --count-only is given");
    TableArtifactWriter writer(f.out, spec.x_min, spec.x_max, f.dx_r, plan.table.y_min(),
                               plan.table.y_max(), f.float32);
    for_each_level(plan, [&](std::size_t, std::span<const double> points) {
      writer.append_level(points);
    });
    total = writer.finish();
    if (total == 0) throw Error(ErrorCode::EmptyTable, "level sweep produced no samples");
  }
  out << "kind=table\n"
      << "samples=" << total << "\n"
      << "levels=" << f.n_d << "\n"
      << "dx_r=" << f.dx_r << "\n"
      << "build_seconds=" << seconds_since(start) << "\n";
  return kOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchFlags {
  std::string artifact;
  std::uint64_t count = 1000000;
  std::uint64_t seed = 0;
  std::uint64_t n_e = 5;
};

int cmd_bench(const BenchFlags& f, std::ostream& out) {
  std::vector<std::pair<std::string, DrawFn>> runs;
  if (peek_artifact_kind(f.artifact) == ArtifactKind::Table) {
    runs.emplace_back("table", load_draw_fn(f.artifact, "", 0));
  } else {
    runs.emplace_back("direct", load_draw_fn(f.artifact, "direct", 0));
    runs.emplace_back("linear", load_draw_fn(f.artifact, "linear", 0));
    runs.emplace_back("lagrange", load_draw_fn(f.artifact, "lagrange", f.n_e));
  }
  for (const auto& [name, draw] : runs) {
    UniformSource rng(f.seed, 0);
    double checksum = 0.0;
    const auto start = Clock::now();
    stream_draws(f.count, [&](std::span<double> dst) { draw(rng, dst); },
                 [&](std::span<const double> v) {
                   for (double x : v) checksum += x;
                 });
    const double elapsed = seconds_since(start);
    out << "mode=" << name << " count=" << f.count << " elapsed=" << elapsed
        << " rate=" << (elapsed > 0.0 ? static_cast<double>(f.count) / elapsed : 0.0)
        << " checksum=" << checksum << "\n";
  }
  return kOk;
}

// ---- validate -------------------------------------------------------------

struct ValidateFlags {
  SpecFlags spec;
  std::string samples;
  std::string format = "text";
  std::uint64_t bins = 100;
  std::uint64_t grid_n = 20001;
  std::string histogram_csv;
};

int cmd_validate(const ValidateFlags& f, std::ostream& out) {
  const DistributionSpec spec = make_spec(f.spec);
  const CumulativeTable table =
      excise_plateaus(build_cdf(spec, f.grid_n), default_plateau_tolerance());
  const CompressedCdf compressed(table);
  const CoordinateMap map(table.excised);
  const auto cdf = [&](double x) { return compressed(map.compress(x)); };

  const std::vector<double> values = read_samples(f.samples, f.format);
  const Moments m = moments(values);
  const KsResult ks = ks_statistic(values, cdf);
  const double critical = 1.63 / std::sqrt(static_cast<double>(values.size()));

  const auto edges = uniform_edges(spec.x_min, spec.x_max, f.bins);
  const Histogram h = histogram(values, edges);
  const auto expected = expected_counts(edges, cdf, static_cast<double>(h.total()));
  std::vector<std::uint64_t> obs;
  std::vector<double> exp;
  std::uint64_t stray = h.underflow + h.overflow;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i] > 0.0) {
      obs.push_back(h.counts[i]);
      exp.push_back(expected[i]);
    } else {
      stray += h.counts[i];
    }
  }
  out << "n=" << m.n << "\n"
      << "mean=" << m.mean << "\n"
      << "stddev=" << m.stddev << "\n"
      << "skewness=" << m.skewness << "\n"
      << "ks_d=" << ks.d << "\n"
      << "ks_p=" << ks.p_value << "\n"
      << "ks_critical=" << critical << "\n";
  if (obs.size() >= 2) {
    const auto chi = chi_square(obs, exp);
    out << "chi2=" << chi.statistic << "\n"
        << "chi2_dof=" << chi.dof << "\n"
        << "chi2_p=" << chi.p_value << "\n";
  }
  out << "out_of_support=" << stray << "\n";
  if (!f.histogram_csv.empty()) {
    std::ofstream csv(f.histogram_csv);
    if (!csv) throw Error(ErrorCode::IOError, "cannot open '" + f.histogram_csv + "'");
    csv << "lo,hi,count,expected\n";
    for (std::size_t i = 0; i < h.bins(); ++i) {
      csv << edges[i] << "," << edges[i + 1] << "," << h.counts[i] << "," << expected[i] << "\n";
    }
  }
  const bool pass = ks.d < critical && stray == 0;
  out << "pass=" << (pass ? "yes" : "no") << "\n";
  return pass ? kOk : kValidation;
}

// ---- invert ---------------------------------------------------------------

struct InvertFlags {
  std::string artifact;
  std::vector<double> ys;
};

int cmd_invert(const InvertFlags& f, std::ostream& out) {
  const Sampler sampler = to_sampler(read_grid_artifact_file(f.artifact));
  char num[32];
  for (double y : f.ys) {
    const double x = sampler.inverse_at(y);
    const auto [p, ec] = std::to_chars(num, num + sizeof(num), x);
    out << y << " " << std::string_view(num, static_cast<std::size_t>(p - num)) << "\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"k-vector inverse-transform and look-up-table random sampling", "kvrand"};
  app.require_subcommand(1);

  BuildFlags build;
  auto* b = app.add_subcommand("build", "Preprocess a density into a grid artifact");
  add_spec_flags(b, build.spec);
  add_count(b, "--nd", build.n_d, "Number of ordinate levels");
  add_count(b, "--grid-n", build.grid_n, "Uniform table size for the CDF and root search");
  b->add_option("--mode", build.mode, "Default sampler mode")
      ->check(CLI::IsMember({"linear", "direct", "lagrange"}))
      ->capture_default_str();
  add_count(b, "--ne", build.n_e, "Lagrange node count");
  b->add_option("--plateau-tol", build.plateau_tol, "Excision tolerance on the normalized CDF");
  b->add_option("--out", build.out, "Artifact path")->required();

  SampleFlags sample;
  auto* s = app.add_subcommand("sample", "Draw samples from an artifact");
  s->add_option("--artifact", sample.artifact, "Artifact path")->required();
  add_count(s, "--count", sample.count, "Number of samples");
  sample.seed_opt = add_count(s, "--seed", sample.seed, "Seed (default: $KVRAND_SEED or 0)");
  add_count(s, "--stream", sample.stream, "Stream id");
  s->add_option("--out", sample.out, "Output path (default stdout)");
  s->add_option("--format", sample.format, "text or raw64")
      ->check(CLI::IsMember({"text", "raw64"}))
      ->capture_default_str();
  add_count(s, "--threads", sample.threads, "Worker count, one stream each");
  s->add_option("--mode", sample.mode, "Override the artifact's sampler mode")
      ->check(CLI::IsMember({"linear", "direct", "lagrange"}));
  add_count(s, "--ne", sample.n_e, "Lagrange node count for --mode lagrange");

  LutFlags lut;
  auto* l = app.add_subcommand("lut-build", "Build a look-up sample table");
  add_spec_flags(l, lut.spec);
  add_count(l, "--nd", lut.n_d, "Number of density levels");
  l->add_option("--dxr", lut.dx_r, "Point spacing inside intervals")->capture_default_str();
  add_count(l, "--grid-n", lut.grid_n, "Uniform table size for root search");
  l->add_flag("--float32", lut.float32, "Store samples as 32-bit floats");
  l->add_flag("--count-only", lut.count_only, "Report the table size without writing it");
  l->add_option("--out", lut.out, "Artifact path");

  BenchFlags bench;
  auto* be = app.add_subcommand("bench", "Measure sampling throughput per mode");
  be->add_option("--artifact", bench.artifact, "Artifact path")->required();
  add_count(be, "--count", bench.count, "Draws per mode");
  add_count(be, "--seed", bench.seed, "Seed");
  add_count(be, "--ne", bench.n_e, "Lagrange node count");

  ValidateFlags validate;
  auto* v = app.add_subcommand("validate", "Goodness of fit of a sample file");
  add_spec_flags(v, validate.spec);
  v->add_option("--samples", validate.samples, "Sample file")->required();
  v->add_option("--format", validate.format, "text or raw64")
      ->check(CLI::IsMember({"text", "raw64"}))
      ->capture_default_str();
  add_count(v, "--bins", validate.bins, "Histogram bins");
  add_count(v, "--grid-n", validate.grid_n, "Reference CDF table size");
  v->add_option("--histogram", validate.histogram_csv, "Write the histogram as CSV");

  InvertFlags invert_flags;
  auto* inv = app.add_subcommand("invert", "Invert the CDF of a grid artifact");
  inv->add_option("--artifact", invert_flags.artifact, "Artifact path")->required();
  inv->add_option("--y", invert_flags.ys, "Ordinates in [0, 1]")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*b) return cmd_build(build, out);
    if (*s) return cmd_sample(sample, out);
    if (*l) return cmd_lut_build(lut, out);
    if (*be) return cmd_bench(bench, out);
    if (*v) return cmd_validate(validate, out);
    if (*inv) return cmd_invert(invert_flags, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const kvrand::SyntaxError& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}

}  // namespace kvrand::cli
