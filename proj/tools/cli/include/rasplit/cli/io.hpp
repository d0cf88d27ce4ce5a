#pragma once

#include "rasplit/engine.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rasplit::cli {

/// %.17g with '.' as the decimal point; "nan" and "inf" spelled out.
std::string format_double(double v);

/// Columns: iter,activated,err_db,sim_time_s,objective. `activated` holds
/// space-separated 1-based indices. Wall time is not written.
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path);

struct Series {
  std::string label;
  std::vector<double> time_s;
  std::vector<double> err_db;
};

/// One series: "time_s,err_db". Several: the union of time stamps with one
/// err_db_<label> column per series, each holding its latest value (blank
/// before the series starts).
void write_plot_data(const std::filesystem::path& path, const std::vector<Series>& series);

/// Reference cache. Entries live in $RASPLIT_CACHE_DIR (default
/// ./.rasplit-cache) keyed by a hash of the experiment and tolerance.
class ReferenceCache {
 public:
  ReferenceCache();
  explicit ReferenceCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(const std::string& key) const;
  std::optional<Vec> load(const std::string& key) const;
  void store(const std::string& key, const Vec& x) const;

 private:
  std::filesystem::path dir_;
};

/// FNV-1a 64-bit, hex encoded.
std::string hash_hex(const std::string& data);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rasplit::cli
