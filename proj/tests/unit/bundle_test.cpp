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

#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "fusebox/core/error.hpp"
#include "fusebox/runtime/archive.hpp"
#include "fusebox/runtime/bundle.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace fusebox {
namespace {

using testing::TempDir;
using testing::make_bundle;
using testing::read_file;
using testing::write_file;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInternal;
}

TEST(ManifestTest, RoundTrip) {
  std::vector<FunctionId> m{FunctionId("B"), FunctionId("A")};
  EXPECT_EQ(format_manifest(m), "B\nA\n");
  EXPECT_EQ(parse_manifest("B\n\nA\n"), m);
  EXPECT_THROW(parse_manifest("bad name\n"), Error);
}

TEST(BundleTest, CreateAndOpen) {
  TempDir dir;
  auto bundle = make_bundle(dir / "b", {{"A", "emit a\n"}, {"B", "emit b\n"}});
  auto reopened = Bundle::open(dir / "b");
  EXPECT_EQ(reopened.manifest(), bundle.manifest());
  EXPECT_EQ(reopened.function_dir(FunctionId("A")), dir / "b" / "A");
}

TEST(BundleTest, ValidationRejectsMalformedTrees) {
  TempDir dir;
  auto root = dir / "b";
  make_bundle(root, {{"A", "emit a\n"}});

  EXPECT_EQ(code_of([&] { validate_bundle_tree(root, {}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] {
              validate_bundle_tree(root, {FunctionId("A"), FunctionId("A")});
            }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] {
              validate_bundle_tree(root, {FunctionId("A"), FunctionId("B")});
            }),
            ErrorCode::kInvalidArgument);

  // Extra subdirectory not named by the manifest.
  write_file(root / "stray" / "fn", "emit x\n");
  EXPECT_EQ(code_of([&] { Bundle::open(root); }), ErrorCode::kInvalidArgument);
  fs::remove_all(root / "stray");

  // Function dir without entry module.
  fs::remove(root / "A" / "fn");
  EXPECT_EQ(code_of([&] { Bundle::open(root); }), ErrorCode::kInvalidArgument);
}

TEST(BundleTest, CopyIsByteIdentical) {
  TempDir dir;
  auto bundle = make_bundle(dir / "b", {{"A", "compute 5\n"}});
  write_file(dir / "b" / "A" / "util" / "helper.txt", "support bytes\x01\x02");
  auto copy = bundle.copy_to(dir / "c");
  EXPECT_EQ(copy.manifest(), bundle.manifest());
  EXPECT_EQ(read_file(dir / "c" / "A" / "util" / "helper.txt"),
            "support bytes\x01\x02");
  EXPECT_EQ(read_file(dir / "c" / "A" / "fn"), "compute 5\n");
  EXPECT_THROW(bundle.copy_to(dir / "c"), Error);
}

std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    auto rel = fs::relative(entry.path(), root).string();
    out[rel] = entry.is_directory() ? "<dir>" : read_file(entry.path());
  }
  return out;
}

TEST(ArchiveTest, RandomTreesRoundTrip) {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    TempDir dir;
    auto src = dir / "src";
    fs::create_directories(src);
    int files = std::uniform_int_distribution<int>(1, 6)(rng);
    for (int i = 0; i < files; ++i) {
      std::string rel = "d" + std::to_string(rng() % 3);
      if (rng() % 2) rel += "/sub" + std::to_string(rng() % 2);
      // Long names exercise the prefix/long-name paths.
      if (rng() % 4 == 0) rel += "/" + std::string(120, 'n');
      rel += "/file" + std::to_string(i);
      std::string content(rng() % 2000, '\0');
      for (auto& c : content) c = static_cast<char>(rng());
      write_file(src / rel, content);
    }
    auto archive = pack_directory(src);
    EXPECT_EQ(archive.size() % 512, 0u);
    unpack_archive(archive, dir / "out");
    ASSERT_EQ(snapshot_tree(src), snapshot_tree(dir / "out")) << trial;
    // Packing is deterministic.
    EXPECT_EQ(pack_directory(src), archive);
  }
}

TEST(ArchiveTest, InteroperatesWithSystemTar) {
  if (std::system("tar --version >/dev/null 2>&1") != 0) GTEST_SKIP();
  TempDir dir;
  write_file(dir / "src" / "fn", "emit hi\n");
  write_file(dir / "src" / "lib" / "x.txt", "x");
  std::string cmd = "tar -cf " + (dir / "sys.tar").string() + " -C " +
                    (dir / "src").string() + " .";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  unpack_archive(read_file(dir / "sys.tar"), dir / "a");
  EXPECT_EQ(read_file(dir / "a" / "fn"), "emit hi\n");
  EXPECT_EQ(read_file(dir / "a" / "lib" / "x.txt"), "x");

  write_file(dir / "ours.tar", pack_directory(dir / "src"));
  fs::create_directories(dir / "b");
  cmd = "tar -xf " + (dir / "ours.tar").string() + " -C " +
        (dir / "b").string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(read_file(dir / "b" / "lib" / "x.txt"), "x");
}

TEST(ArchiveTest, RejectsCorruptAndEscapingArchives) {
  TempDir dir;
  write_file(dir / "src" / "fn", "emit hi\n");
  auto archive = pack_directory(dir / "src");
  auto corrupt = archive;
  corrupt[0] ^= 0x5a;
  EXPECT_THROW(unpack_archive(corrupt, dir / "x"), Error);
  EXPECT_THROW(unpack_archive("short", dir / "y"), Error);

  if (std::system("tar --version >/dev/null 2>&1") != 0) return;
  write_file(dir / "evil" / "inner" / "x", "x");
  std::string cmd = "cd " + (dir / "evil" / "inner").string() +
                    " && tar -cf ../evil.tar --absolute-names ../inner/x"
                    " 2>/dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_THROW(unpack_archive(read_file(dir / "evil" / "evil.tar"),
                              dir / "z"),
               Error);
}

}  // namespace
}  // namespace fusebox
