#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pathlab/sde/frame_path.hpp"

namespace pathlab::sde {

/* Debug dump of one path.  Layout (little-endian):
     char[8]  magic "PLPATH\0\1"   (last byte = format version)
     u32 n, u32 ambient, u32 m, u32 reserved
     f64 T, u64 seed, u64 path index
     f64 points[(m+1)*ambient], frames[(m+1)*ambient*n] (column-major per knot),
     increments[m*n]                                                        */
struct PathDump {
  std::uint32_t n = 0;
  std::uint32_t ambient = 0;
  std::uint32_t m = 0;
  double T = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  std::vector<double> points;
  std::vector<double> frames;
  std::vector<double> increments;
};

void write_path_dump(const FramePath& path, std::ostream& out);
PathDump read_path_dump(std::istream& in);

}  // namespace pathlab::sde
