#include "rasplit/cli/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace rasplit::cli {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  double v;
  if (!(in >> v)) throw InvalidArgument("malformed number '" + s + "' in trace");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

void write_trace_csv(const fs::path& path, const std::vector<TraceRecord>& trace) {
  auto out = open_out(path);
  out << "iter,activated,err_db,sim_time_s,objective\n";
  for (const auto& r : trace) {
    out << r.iter << ',';
    for (std::size_t i = 0; i < r.activated.size(); ++i) out << (i ? " " : "") << r.activated[i];
    out << ',' << format_double(r.err_db) << ',' << format_double(r.sim_time_s) << ',';
    if (r.objective) out << format_double(*r.objective);
    out << '\n';
  }
}

std::vector<TraceRecord> read_trace_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open trace '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "iter,activated,err_db,sim_time_s,objective") {
    throw InvalidArgument(path.string() + ": not a trace file");
  }
  std::vector<TraceRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 5) throw InvalidArgument(path.string() + ": malformed row '" + line + "'");
    TraceRecord r;
    r.iter = std::stoull(f[0]);
    if (!f[1].empty()) {
      for (const auto& t : split(f[1], ' ')) r.activated.push_back(static_cast<std::uint32_t>(std::stoul(t)));
    }
    r.err_db = parse_double(f[2]);
    r.sim_time_s = parse_double(f[3]);
    if (!f[4].empty()) r.objective = parse_double(f[4]);
    out.push_back(std::move(r));
  }
  return out;
}

void write_plot_data(const fs::path& path, const std::vector<Series>& series) {
  require(!series.empty(), "plot data needs at least one trace");
  for (const auto& s : series) {
    require(s.time_s.size() == s.err_db.size(), "plot series '" + s.label + "' has mismatched columns");
    require(std::is_sorted(s.time_s.begin(), s.time_s.end()), "plot series '" + s.label + "' time is not sorted");
  }
  auto out = open_out(path);
  if (series.size() == 1) {
    out << "time_s,err_db\n";
    for (std::size_t i = 0; i < series[0].time_s.size(); ++i)
      out << format_double(series[0].time_s[i]) << ',' << format_double(series[0].err_db[i]) << '\n';
    return;
  }
  out << "time_s";
  for (const auto& s : series) out << ",err_db_" << s.label;
  out << '\n';

  // Rows in time order; ties keep series order so each sample appears once.
  struct Event {
    double t;
    std::size_t series, index;
  };
  std::vector<Event> events;
  for (std::size_t k = 0; k < series.size(); ++k)
    for (std::size_t i = 0; i < series[k].time_s.size(); ++i) events.push_back({series[k].time_s[i], k, i});
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
  std::vector<std::optional<double>> latest(series.size());
  for (std::size_t e = 0; e < events.size(); ++e) {
    latest[events[e].series] = series[events[e].series].err_db[events[e].index];
    if (e + 1 < events.size() && events[e + 1].t == events[e].t) continue;
    out << format_double(events[e].t);
    for (const auto& v : latest) {
      out << ',';
      if (v) out << format_double(*v);
    }
    out << '\n';
  }
}

std::string hash_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ReferenceCache::ReferenceCache() {
  const char* env = std::getenv("RASPLIT_CACHE_DIR");
  dir_ = env && *env ? fs::path(env) : fs::path(".rasplit-cache");
}

ReferenceCache::ReferenceCache(fs::path dir) : dir_(std::move(dir)) {}

fs::path ReferenceCache::path_for(const std::string& key) const { return dir_ / ("ref-" + key + ".bin"); }

namespace {
constexpr char kMagic[8] = {'R', 'S', 'P', 'L', 'R', 'E', 'F', '1'};
}

std::optional<Vec> ReferenceCache::load(const std::string& key) const {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  std::uint64_t n = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || !std::equal(magic, magic + 8, kMagic) || n == 0 || n > (1ULL << 32)) return std::nullopt;
  Vec x(static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(x.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) return std::nullopt;
  return x;
}

void ReferenceCache::store(const std::string& key, const Vec& x) const {
  fs::create_directories(dir_);
  // Write then rename so a concurrent reader never sees a partial file.
  const fs::path final_path = path_for(key);
  const fs::path tmp = final_path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write cache entry '" + tmp.string() + "'");
    const std::uint64_t n = static_cast<std::uint64_t>(x.size());
    out.write(kMagic, 8);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(x.data()), static_cast<std::streamsize>(n * sizeof(double)));
  }
  fs::rename(tmp, final_path);
}

}  // namespace rasplit::cli
