// Copyright 2026 The riskcal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "riskcal/catalog.hpp"
#include "riskcal/curation.hpp"

namespace riskcal::testing {

inline const std::filesystem::path kFixtures = RISKCAL_FIXTURES;
inline const std::filesystem::path kCorpus = kFixtures / "corpus";
inline const std::filesystem::path kTransitive = kFixtures / "transitive";

/// Metadata plus tables of a fixture tree, loaded once per process.
class FixtureCorpus {
 public:
  explicit FixtureCorpus(const std::filesystem::path& root)
      : source_(root, QuasiIdentifierDictionary::defaults()), metadata_(harvest(source_, nullptr).metadata) {}

  static FixtureCorpus& get(const std::filesystem::path& root) {
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<FixtureCorpus>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[root.string()];
    if (!slot) slot = std::make_unique<FixtureCorpus>(root);
    return *slot;
  }

  const std::vector<DatasetMetadata>& metadata() const { return metadata_; }

  const DatasetMetadata& meta(const std::string& ref) const {
    for (const auto& m : metadata_) {
      if (m.ref() == ref) return m;
    }
    throw std::runtime_error("no fixture dataset " + ref);
  }

  const RecordTable& table(const std::string& ref) {
    std::lock_guard lock(mu_);
    auto it = tables_.find(ref);
    if (it == tables_.end()) it = tables_.emplace(ref, source_.fetch_records(meta(ref))).first;
    return it->second;
  }

  CatalogSource& source() { return source_; }

 private:
  FixtureSource source_;
  std::vector<DatasetMetadata> metadata_;
  std::mutex mu_;
  std::map<std::string, RecordTable> tables_;
};

inline CollectionManifest labeled_manifest(const std::filesystem::path& root, std::size_t min_qi = 2) {
  auto m = make_manifest(FixtureCorpus::get(root).metadata(), QuasiIdentifierDictionary::defaults(), min_qi);
  apply_labels(m, load_labels(root / "labels.jsonl"));
  return m;
}

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("riskcal-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Saves the labeled fixture manifest into `dir` and returns its path.
inline std::filesystem::path write_fixture_manifest(const std::filesystem::path& dir,
                                                    const std::filesystem::path& root = kCorpus) {
  const auto path = dir / "collection.jsonl";
  save_manifest(labeled_manifest(root), path);
  return path;
}

}  // namespace riskcal::testing
