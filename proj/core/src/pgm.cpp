#include "rasplit/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

namespace rasplit {

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string token(std::istream& in) {
  std::string t;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!t.empty()) break;
      continue;
    }
    t.push_back(static_cast<char>(c));
  }
  return t;
}

std::size_t header_number(std::istream& in, const std::string& path) {
  const std::string t = token(in);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
    throw InvalidArgument(path + ": malformed PGM header");
  }
  return std::stoul(t);
}

}  // namespace

Raster read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open raster '" + path + "'");
  if (token(in) != "P5") throw InvalidArgument(path + ": not a binary PGM (P5)");
  Raster r;
  r.width = header_number(in, path);
  r.height = header_number(in, path);
  const std::size_t maxval = header_number(in, path);
  if (maxval != 255) throw InvalidArgument(path + ": only maxval 255 is supported");
  if (r.width == 0 || r.height == 0) throw InvalidArgument(path + ": empty raster");
  std::string bytes(r.width * r.height, '\0');
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw InvalidArgument(path + ": truncated raster");
  r.pixels.resize(static_cast<Eigen::Index>(bytes.size()));
  for (std::size_t i = 0; i < bytes.size(); ++i)
    r.pixels[static_cast<Eigen::Index>(i)] = static_cast<unsigned char>(bytes[i]);
  return r;
}

void write_pgm(const std::string& path, const Raster& r) {
  require_dim(static_cast<std::size_t>(r.pixels.size()), r.width * r.height, "write_pgm");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write raster '" + path + "'");
  out << "P5\n" << r.width << ' ' << r.height << "\n255\n";
  for (double v : r.pixels) out.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 255.0)))));
}

}  // namespace rasplit
