#ifndef KVRAND_ARTIFACT_HPP
#define KVRAND_ARTIFACT_HPP

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kvrand/cdf.hpp"
#include "kvrand/lut.hpp"
#include "kvrand/sampler.hpp"

namespace kvrand {

/*
 * Binary artifact layout, all fields little-endian:
 *
 *   char[4]  magic "KVRD"
 *   u16      version (1)
 *   u8       kind (1 = optimal-grid sampler, 2 = sample table)
 *   u8       flags (bit 0 monotone grid, bit 1 float32 samples)
 *   u8       sampler mode, u8[3] zero, u32 n_e
 *   u64      n_d
 *   u64      count (nodes or samples)
 *   u64      excised interval count
 *   f64      x_min, x_max, inv_m, inv_q, shift, y_min, y_max
 *   f64[2e]  excised (lo, hi) pairs
 *
 * kind 1 payload: f64[count] x_nodes, f64[count] y_nodes.
 * kind 2 payload: samples (f64 or f32)[count], then u64[n_d] per-level
 * counts. For tables inv_m holds dx_r and inv_q is zero.
 */

inline constexpr std::uint16_t kArtifactVersion = 1;

enum class ArtifactKind : std::uint8_t { Grid = 1, Table = 2 };

struct GridArtifact {
  double x_min = 0.0;
  double x_max = 0.0;
  double shift = 0.0;
  std::vector<Interval> excised;
  SamplerMode mode = SamplerMode::DirectIndex;
  std::uint32_t n_e = 2;
  std::size_t n_d = 0;
  std::vector<double> x_nodes;
  std::vector<double> y_nodes;
  double inv_m = 0.0;
  double inv_q = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  bool monotone = true;
};

struct TableArtifact {
  double x_min = 0.0;
  double x_max = 0.0;
  double dx_r = 0.0;
  double y_min = 0.0;  // lowest level (density minimum)
  double y_max = 0.0;
  bool float32 = false;
  SampleTable table;
};

GridArtifact to_artifact(const Sampler& sampler, double shift);
/// Rebuilds the grid from the stored nodes and checks the stored line.
Sampler to_sampler(const GridArtifact& artifact);

void write_artifact(std::ostream& out, const GridArtifact& artifact);
void write_artifact(std::ostream& out, const TableArtifact& artifact);
void write_artifact_file(const std::string& path, const GridArtifact& artifact);
void write_artifact_file(const std::string& path, const TableArtifact& artifact);

/// Kind byte of a stored artifact; throws BadArtifact / IOError.
ArtifactKind peek_artifact_kind(const std::string& path);

GridArtifact read_grid_artifact(std::istream& in);
TableArtifact read_table_artifact(std::istream& in);
GridArtifact read_grid_artifact_file(const std::string& path);
TableArtifact read_table_artifact_file(const std::string& path);

/**
 * Kind-2 writer that appends one level at a time, so a table never has to
 * be held in memory. finish() patches the sample count into the header.
 */
class TableArtifactWriter {
 public:
  TableArtifactWriter(const std::string& path, double x_min, double x_max, double dx_r,
                      double y_min, double y_max, bool float32);
  TableArtifactWriter(const TableArtifactWriter&) = delete;
  TableArtifactWriter& operator=(const TableArtifactWriter&) = delete;

  void append_level(std::span<const double> points);
  /// Returns the number of samples written.
  std::size_t finish();

 private:
  std::string path_;
  std::ofstream out_;
  bool float32_;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> per_level_;
  bool finished_ = false;
};

}  // namespace kvrand

#endif  // KVRAND_ARTIFACT_HPP
