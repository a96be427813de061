// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oneshot/face_image.hpp"
#include "oneshot/geometry.hpp"
#include "oneshot/landmarks.hpp"

namespace oneshot {

struct Sample {
  FaceImage image;
  LandmarkSet landmarks;
  std::int64_t identity_id = 0;
  bool padded = false;  // alignment sampled outside the source raster
};

struct ManifestRecord {
  std::string image;      // relative to the manifest root
  std::string landmarks;  // relative landmark file
  std::int64_t identity = 0;
  std::string split;      // "train" | "test"
};

struct RejectRecord {
  std::string path;
  std::string reason;
};

// Deterministic dataset index: per-sample records, identity-disjoint split
// tags, and the train-split mean shape.
struct Manifest {
  std::filesystem::path root;
  std::vector<ManifestRecord> records;
  std::vector<RejectRecord> rejects;
  LandmarkSet mean_shape;

  std::vector<const ManifestRecord*> split(const std::string& tag) const;
  std::vector<std::int64_t> identities(const std::string& tag) const;
};

// Scans `root` for <identity>_<sample>.png images with .txt landmark
// sidecars, assigns a seeded identity-disjoint train/test split and computes
// the train mean shape (generalized Procrustes). Unusable files land in the
// rejects list, never silently dropped. Throws DataError when no usable
// sample exists.
Manifest build_manifest(const std::filesystem::path& root, double split_ratio, std::uint64_t seed,
                        const LandmarkLayout& layout);

// manifest.jsonl + mean_shape.txt + rejects.jsonl under `dir`.
void save_manifest(const Manifest& manifest, const std::filesystem::path& dir);
Manifest load_manifest(const std::filesystem::path& dir);

// Loads and aligns one record at the working resolution.
Sample load_sample(const Manifest& manifest, const ManifestRecord& record, int resolution);

// Loads a full split into memory (desk-scale datasets are small).
std::vector<Sample> load_split(const Manifest& manifest, const std::string& tag, int resolution);

// Mean shape via generalized Procrustes over raw landmark sets.
LandmarkSet mean_landmark_shape(const std::vector<LandmarkSet>& sets);

}  // namespace oneshot
