#include "lpup/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace lpup {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'L', 'P', 'U', 'P', 'G', 'R', 'D', '1'};
constexpr std::uint32_t kRowMajor = 1;

template <class T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in, const fs::path& path) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw std::runtime_error("truncated grid file " + path.string());
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw std::runtime_error("malformed JSON in " + path.string() + ": " + e.what());
  }
}

std::string snapshot_name(std::size_t i) {
  std::ostringstream s;
  s << "snapshot_" << std::setw(6) << std::setfill('0') << i << ".bin";
  return s.str();
}

}  // namespace

void write_grid_function(const fs::path& path, const GridFunction& f) {
  const Grid& g = f.grid();
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim));
    put<std::uint32_t>(out, kRowMajor);
    put<std::uint64_t>(out, g.points);
    put<double>(out, g.half_width);
    for (const cplx& z : f.samples()) {
      put<double>(out, z.real());
      put<double>(out, z.imag());
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
  }
  Json meta{{"format", "LPUPGRD1"},
            {"dim", g.dim},
            {"points", g.points},
            {"half_width", g.half_width},
            {"layout", "row-major"},
            {"payload", "complex128 little-endian"},
            {"samples", f.size()},
            {"tail_ratio", f.tail_ratio()}};
  write_text(fs::path(path.string() + ".json"), meta.dump(2) + "\n");
}

GridFunction read_grid_function(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw std::runtime_error("not a grid function file: " + path.string());
  Grid g;
  g.dim = static_cast<int>(get<std::uint32_t>(in, path));
  if (get<std::uint32_t>(in, path) != kRowMajor)
    throw std::runtime_error("unknown layout in " + path.string());
  g.points = get<std::uint64_t>(in, path);
  g.half_width = get<double>(in, path);
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error("bad grid header in " + path.string() + ": " + e.what());
  }
  std::vector<cplx> samples(g.size());
  for (auto& z : samples) {
    double re = get<double>(in, path);
    double im = get<double>(in, path);
    z = cplx(re, im);
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw std::runtime_error("trailing bytes in " + path.string());
  return GridFunction(g, std::move(samples));
}

void write_trace(const fs::path& dir, const EvolutionTrace& trace, const Json& params) {
  trace.validate();
  fs::create_directories(dir);
  Json files = Json::array();
  for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
    write_grid_function(dir / snapshot_name(i), trace.snapshots[i]);
    files.push_back(snapshot_name(i));
  }
  Json manifest{{"equation", trace.equation},
                {"method", trace.method},
                {"dt", trace.dt},
                {"times", trace.times},
                {"grid", grid_json(trace.grid())},
                {"parameters", params},
                {"snapshots", files}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

EvolutionTrace read_trace(const fs::path& dir) {
  Json manifest = read_json(dir / "manifest.json");
  EvolutionTrace trace;
  try {
    trace.equation = manifest.at("equation").get<std::string>();
    trace.method = manifest.at("method").get<std::string>();
    trace.dt = manifest.at("dt").get<double>();
    trace.times = manifest.at("times").get<std::vector<double>>();
    for (const auto& name : manifest.at("snapshots"))
      trace.snapshots.push_back(read_grid_function(dir / name.get<std::string>()));
  } catch (const Json::exception& e) {
    throw std::runtime_error("malformed trace manifest in " + dir.string() + ": " + e.what());
  }
  trace.validate();
  return trace;
}

fs::path write_record(const fs::path& dir, const ExperimentRecord& record) {
  fs::create_directories(dir);
  fs::path json = dir / (record.tag + ".json");
  write_text(json, record.dump());
  for (const auto& s : record.series) write_text(dir / (record.tag + "_" + s.name + ".csv"), s.to_csv());
  return json;
}

}  // namespace lpup
