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

#include "reflectolab/path_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "reflectolab/error.hpp"

namespace reflectolab {
namespace {

static_assert(std::endian::native == std::endian::little, "frames are written little-endian");

constexpr std::uint64_t kNoStop = std::numeric_limits<std::uint64_t>::max();

template <typename T>
void put(std::ostream& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

void put_array(std::ostream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

template <typename T>
T get(std::istream& in) {
  char buf[sizeof(T)];
  in.read(buf, sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) fail(ErrorCode::kParseError, "truncated path frame");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

void get_array(std::istream& in, std::vector<double>& v, std::uint64_t count) {
  if (count > (std::uint64_t{1} << 40)) fail(ErrorCode::kParseError, "path frame too large");
  v.resize(count);
  const auto bytes = static_cast<std::streamsize>(count * sizeof(double));
  in.read(reinterpret_cast<char*>(v.data()), bytes);
  if (in.gcount() != bytes) fail(ErrorCode::kParseError, "truncated path frame");
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return kInf;
  if (text == "-inf") return -kInf;
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    fail(ErrorCode::kParseError, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

void write_paths_csv(std::ostream& out, std::span<const PathSample> paths, std::size_t first_id) {
  if (paths.empty()) return;
  const int d = paths.front().dim;
  out << "path_id,t";
  for (int i = 1; i <= d; ++i) out << ",Z_" << i;
  out << ",l";
  for (int i = 1; i <= d; ++i) out << ",L_" << i;
  out << ",stopped_flag\n";
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const PathSample& path = paths[p];
    if (path.dim != d) fail(ErrorCode::kDimensionMismatch, "paths differ in dimension");
    const std::string id = std::to_string(first_id + p);
    for (std::size_t k = 0; k < path.size(); ++k) {
      std::string row = id;
      row += ',';
      row += format_double(path.times[k]);
      for (double z : path.state(k)) {
        row += ',';
        row += format_double(z);
      }
      row += ',';
      row += format_double(path.local_time[k]);
      for (double l : path.reflection_at(k)) {
        row += ',';
        row += format_double(l);
      }
      row += (path.tau_v && k >= *path.tau_v) ? ",1\n" : ",0\n";
      out << row;
    }
  }
}

std::vector<PathSample> read_paths_csv(std::istream& in, double dt) {
  std::string line;
  if (!std::getline(in, line)) return {};
  const auto header = split(line);
  if (header.size() < 5 || header[0] != "path_id" || header[1] != "t" || header.back() != "stopped_flag") {
    fail(ErrorCode::kParseError, "unexpected paths.csv header");
  }
  const int d = static_cast<int>((header.size() - 4) / 2);
  if (header.size() != static_cast<std::size_t>(2 * d + 4)) fail(ErrorCode::kParseError, "unexpected paths.csv header");
  std::vector<PathSample> paths;
  std::string current;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      fail(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": expected " +
                                       std::to_string(header.size()) + " fields");
    }
    if (paths.empty() || cells[0] != current) {
      current = std::string(cells[0]);
      PathSample p;
      p.dim = d;
      p.dt = dt;
      paths.push_back(std::move(p));
    }
    PathSample& p = paths.back();
    p.times.push_back(parse_double(cells[1]));
    for (int i = 0; i < d; ++i) p.states.push_back(parse_double(cells[2 + i]));
    p.local_time.push_back(parse_double(cells[2 + d]));
    for (int i = 0; i < d; ++i) p.reflection.push_back(parse_double(cells[3 + d + i]));
    if (cells.back() == "1" && !p.tau_v) p.tau_v = p.times.size() - 1;
  }
  return paths;
}

void write_path_frame(std::ostream& out, const PathSample& path) {
  const std::uint64_t n = path.size();
  out.write(kFrameMagic, 4);
  put<std::uint32_t>(out, kFrameVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(path.dim));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(path.faces));
  put<std::uint64_t>(out, path.seed);
  put<double>(out, path.dt);
  put<std::uint64_t>(out, n);
  put<std::uint64_t>(out, path.tau_v ? static_cast<std::uint64_t>(*path.tau_v) : kNoStop);
  put<std::uint64_t>(out, path.correction_events);
  put<double>(out, path.max_residual);
  put_array(out, path.times);
  put_array(out, path.states);
  put_array(out, path.local_time);
  put_array(out, path.reflection);
  put_array(out, path.face_local_time);
  if (!out) fail(ErrorCode::kIoError, "failed to write path frame");
}

bool read_path_frame(std::istream& in, PathSample& path) {
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() == 0 && in.eof()) return false;
  if (in.gcount() != 4 || std::memcmp(magic, kFrameMagic, 4) != 0) {
    fail(ErrorCode::kParseError, "bad path frame magic");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kFrameVersion) fail(ErrorCode::kParseError, "unsupported path frame version " + std::to_string(version));
  PathSample p;
  p.dim = static_cast<int>(get<std::uint32_t>(in));
  p.faces = static_cast<int>(get<std::uint32_t>(in));
  p.seed = get<std::uint64_t>(in);
  p.dt = get<double>(in);
  const auto n = get<std::uint64_t>(in);
  const auto tau = get<std::uint64_t>(in);
  if (tau != kNoStop) p.tau_v = static_cast<std::size_t>(tau);
  p.correction_events = static_cast<std::size_t>(get<std::uint64_t>(in));
  p.max_residual = get<double>(in);
  const auto d = static_cast<std::uint64_t>(p.dim);
  get_array(in, p.times, n);
  get_array(in, p.states, n * d);
  get_array(in, p.local_time, n);
  get_array(in, p.reflection, n * d);
  get_array(in, p.face_local_time, n * static_cast<std::uint64_t>(p.faces));
  path = std::move(p);
  return true;
}

std::vector<PathSample> read_path_frames(std::istream& in) {
  std::vector<PathSample> out;
  PathSample p;
  while (read_path_frame(in, p)) out.push_back(std::move(p));
  return out;
}

}  // namespace reflectolab
