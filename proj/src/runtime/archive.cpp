// Copyright 2026 The Fusebox Authors
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

#include "fusebox/runtime/archive.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "fusebox/core/error.hpp"

namespace fs = std::filesystem;

namespace fusebox {
namespace {

constexpr std::size_t kBlock = 512;

struct Header {
  char name[100];
  char mode[8];
  char uid[8];
  char gid[8];
  char size[12];
  char mtime[12];
  char checksum[8];
  char typeflag;
  char linkname[100];
  char magic[6];
  char version[2];
  char uname[32];
  char gname[32];
  char devmajor[8];
  char devminor[8];
  char prefix[155];
  char pad[12];
};
static_assert(sizeof(Header) == kBlock);

void put_octal(char* field, std::size_t width, std::uint64_t value) {
  // width-1 digits, NUL terminated
  std::snprintf(field, width, "%0*llo", static_cast<int>(width - 1),
                static_cast<unsigned long long>(value));
}

std::uint64_t get_octal(const char* field, std::size_t width) {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < width; ++i) {
    char c = field[i];
    if (c == ' ' || c == '\0') {
      if (value != 0) break;
      continue;
    }
    if (c < '0' || c > '7') {
      throw Error(ErrorCode::kInvalidArgument, "malformed tar number field");
    }
    value = value * 8 + static_cast<std::uint64_t>(c - '0');
  }
  return value;
}

unsigned checksum_of(const Header& header) {
  Header copy = header;
  std::memset(copy.checksum, ' ', sizeof copy.checksum);
  const auto* bytes = reinterpret_cast<const unsigned char*>(&copy);
  unsigned sum = 0;
  for (std::size_t i = 0; i < kBlock; ++i) sum += bytes[i];
  return sum;
}

std::string field_string(const char* field, std::size_t width) {
  return std::string(field, strnlen(field, width));
}

void write_entry(std::string& out, const std::string& name, char type,
                 unsigned mode, const std::string& data) {
  Header header{};
  std::string prefix;
  std::string base = name;
  if (base.size() > sizeof header.name) {
    std::size_t split = std::string::npos;
    for (std::size_t i = 0; i < name.size(); ++i) {
      if (name[i] == '/' && i <= sizeof header.prefix &&
          name.size() - i - 1 <= sizeof header.name && i + 1 < name.size()) {
        split = i;
        break;
      }
    }
    if (split == std::string::npos) {
      // GNU long-name record, then the real header with a truncated name.
      write_entry(out, "././@LongLink", 'L', 0644, name + '\0');
      base = name.substr(0, sizeof header.name);
    } else {
      prefix = name.substr(0, split);
      base = name.substr(split + 1);
    }
  }
  std::memcpy(header.name, base.data(), base.size());
  std::memcpy(header.prefix, prefix.data(), prefix.size());
  put_octal(header.mode, sizeof header.mode, mode);
  put_octal(header.uid, sizeof header.uid, 0);
  put_octal(header.gid, sizeof header.gid, 0);
  put_octal(header.size, sizeof header.size, data.size());
  put_octal(header.mtime, sizeof header.mtime, 0);
  header.typeflag = type;
  std::memcpy(header.magic, "ustar", 6);
  std::memcpy(header.version, "00", 2);
  std::snprintf(header.checksum, sizeof header.checksum, "%06o",
                checksum_of(header));
  header.checksum[7] = ' ';

  out.append(reinterpret_cast<const char*>(&header), kBlock);
  out.append(data);
  out.append((kBlock - data.size() % kBlock) % kBlock, '\0');
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path safe_relative(const std::string& name) {
  fs::path path(name);
  if (name.empty() || path.is_absolute()) {
    throw Error(ErrorCode::kInvalidArgument,
                "archive entry has unsafe path '" + name + "'");
  }
  fs::path clean;
  for (const auto& part : path) {
    if (part == "..") {
      throw Error(ErrorCode::kInvalidArgument,
                  "archive entry escapes root: '" + name + "'");
    }
    if (part == "." || part.empty()) continue;
    clean /= part;
  }
  return clean;
}

// Value of the "path" key in a pax extended header, if present.
std::optional<std::string> pax_path(const std::string& records) {
  std::size_t pos = 0;
  while (pos < records.size()) {
    auto space = records.find(' ', pos);
    if (space == std::string::npos) break;
    auto length = std::stoul(records.substr(pos, space - pos));
    if (length == 0 || pos + length > records.size()) break;
    auto record = records.substr(space + 1, length - (space - pos) - 2);
    if (record.rfind("path=", 0) == 0) return record.substr(5);
    pos += length;
  }
  return std::nullopt;
}

}  // namespace

std::string pack_directory(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw Error(ErrorCode::kInvalidArgument,
                root.string() + " is not a directory");
  }
  std::vector<fs::path> entries;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    entries.push_back(entry.path());
  }
  std::sort(entries.begin(), entries.end());

  std::string out;
  for (const auto& path : entries) {
    auto relative = fs::relative(path, root).generic_string();
    auto status = fs::symlink_status(path);
    auto mode = static_cast<unsigned>(status.permissions() & fs::perms::mask);
    if (fs::is_directory(status)) {
      write_entry(out, relative + "/", '5', mode, {});
    } else if (fs::is_regular_file(status)) {
      write_entry(out, relative, '0', mode, slurp(path));
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "cannot archive special file " + path.string());
    }
  }
  out.append(2 * kBlock, '\0');
  return out;
}

void unpack_archive(std::string_view archive, const fs::path& destination) {
  fs::create_directories(destination);
  std::size_t offset = 0;
  std::optional<std::string> long_name;
  bool terminated = false;
  while (offset + kBlock <= archive.size()) {
    Header header;
    std::memcpy(&header, archive.data() + offset, kBlock);
    offset += kBlock;
    const auto* raw = reinterpret_cast<const unsigned char*>(&header);
    if (std::all_of(raw, raw + kBlock, [](unsigned char b) { return b == 0; })) {
      terminated = true;
      break;
    }
    if (get_octal(header.checksum, sizeof header.checksum) !=
        checksum_of(header)) {
      throw Error(ErrorCode::kInvalidArgument, "tar header checksum mismatch");
    }
    auto size = get_octal(header.size, sizeof header.size);
    if (offset + size > archive.size()) {
      throw Error(ErrorCode::kInvalidArgument, "truncated tar archive");
    }
    std::string data(archive.substr(offset, size));
    offset += (size + kBlock - 1) / kBlock * kBlock;

    std::string name = field_string(header.name, sizeof header.name);
    auto prefix = field_string(header.prefix, sizeof header.prefix);
    if (!prefix.empty()) name = prefix + "/" + name;
    if (long_name) {
      name = *long_name;
      long_name.reset();
    }

    switch (header.typeflag) {
      case 'L':  // GNU long name for the next entry
        long_name = field_string(data.data(), data.size());
        continue;
      case 'x':
        long_name = pax_path(data);
        continue;
      case 'g':
        continue;
      case '5': {
        auto relative = safe_relative(name);
        if (!relative.empty()) fs::create_directories(destination / relative);
        continue;
      }
      case '0':
      case '\0': {
        auto target = destination / safe_relative(name);
        fs::create_directories(target.parent_path());
        std::ofstream out(target, std::ios::binary | std::ios::trunc);
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) {
          throw Error(ErrorCode::kInternal, "cannot write " + target.string());
        }
        out.close();
        auto mode = get_octal(header.mode, sizeof header.mode);
        fs::permissions(target,
                        static_cast<fs::perms>(mode & 0777) | fs::perms::owner_read |
                            fs::perms::owner_write);
        continue;
      }
      default:
        throw Error(ErrorCode::kInvalidArgument,
                    std::string("unsupported tar entry type '") +
                        header.typeflag + "' for " + name);
    }
  }
  if (!terminated) {
    throw Error(ErrorCode::kInvalidArgument,
                "truncated tar archive: no end-of-archive marker");
  }
}

}  // namespace fusebox
