// Copyright 2026 The Reflectolab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Path export: CSV rows and binary "RLPF" frames. Both are lossless at
// double precision; see docs/path_format.md for the frame layout.

#ifndef REFLECTOLAB_PATH_IO_HPP_
#define REFLECTOLAB_PATH_IO_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "reflectolab/simulation.hpp"

namespace reflectolab {

// Shortest form with 17 significant digits, '.' decimal, no locale.
std::string format_double(double v);

// Parses what format_double writes ("inf", "-inf", "nan" included).
// Throws kParseError.
double parse_double(std::string_view text);

// path_id,t,Z_1..Z_d,l,L_1..L_d,stopped_flag. All paths must share a
// dimension. Rows from step tau_V on carry stopped_flag 1.
void write_paths_csv(std::ostream& out, std::span<const PathSample> paths,
                     std::size_t first_id = 0);
// Rebuilds times, states, local times, reflections and tau_V. Path seeds,
// face local times and counters are not part of the CSV.
std::vector<PathSample> read_paths_csv(std::istream& in, double dt);

inline constexpr char kFrameMagic[4] = {'R', 'L', 'P', 'F'};
inline constexpr std::uint32_t kFrameVersion = 1;

void write_path_frame(std::ostream& out, const PathSample& path);
// Reads one frame. Returns false on a clean end of stream; throws
// kParseError on a bad magic, version or truncated frame.
bool read_path_frame(std::istream& in, PathSample& path);
std::vector<PathSample> read_path_frames(std::istream& in);

}  // namespace reflectolab

#endif  // REFLECTOLAB_PATH_IO_HPP_
