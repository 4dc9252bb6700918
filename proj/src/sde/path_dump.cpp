#include "pathlab/sde/path_dump.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>

namespace pathlab::sde {

namespace {

constexpr char kMagic[8] = {'P', 'L', 'P', 'A', 'T', 'H', '\0', '\1'};

static_assert(std::endian::native == std::endian::little, "path dump assumes a little-endian host");

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("truncated path dump");
  return v;
}

void put_block(std::ostream& out, std::span<const double> xs) {
  out.write(reinterpret_cast<const char*>(xs.data()), static_cast<std::streamsize>(xs.size() * sizeof(double)));
}

std::vector<double> get_block(std::istream& in, std::size_t count) {
  std::vector<double> xs(count);
  in.read(reinterpret_cast<char*>(xs.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw std::runtime_error("truncated path dump");
  return xs;
}

}  // namespace

void write_path_dump(const FramePath& path, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, path.dim());
  put<std::uint32_t>(out, path.ambient_dim());
  put<std::uint32_t>(out, path.steps());
  put<std::uint32_t>(out, 0);
  put<double>(out, path.grid().horizon());
  put<std::uint64_t>(out, path.seed);
  put<std::uint64_t>(out, path.index);
  put_block(out, path.raw_points());
  put_block(out, path.raw_frames());
  put_block(out, path.raw_noise());
}

PathDump read_path_dump(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, 7) != 0) throw std::runtime_error("not a path dump");
  if (magic[7] != kMagic[7]) throw std::runtime_error("unsupported path dump version");
  PathDump d;
  d.n = get<std::uint32_t>(in);
  d.ambient = get<std::uint32_t>(in);
  d.m = get<std::uint32_t>(in);
  get<std::uint32_t>(in);
  d.T = get<double>(in);
  d.seed = get<std::uint64_t>(in);
  d.index = get<std::uint64_t>(in);
  const std::size_t knots = static_cast<std::size_t>(d.m) + 1;
  d.points = get_block(in, knots * d.ambient);
  d.frames = get_block(in, knots * d.ambient * d.n);
  d.increments = get_block(in, static_cast<std::size_t>(d.m) * d.n);
  return d;
}

}  // namespace pathlab::sde
