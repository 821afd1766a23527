// Copyright 2026 The cacscore Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cacscore/agatston.hpp"
#include "cacscore/lesion.hpp"
#include "cacscore/provider.hpp"

namespace cacscore::review {

/// One consistent view of a study. Published atomically; every response is
/// built from a single snapshot and carries its revision.
struct StudySnapshot {
  std::uint64_t revision = 0;
  std::shared_ptr<const BinaryMask> mask;
  AgatstonReport report;
  std::vector<Lesion> lesions;
};

struct EditOutcome {
  std::shared_ptr<const StudySnapshot> snapshot;
};

[[nodiscard]] std::string edit_to_json(const MaskEdit& edit);
/// Throws kInvalidArgument on an unrecognised edit document.
[[nodiscard]] MaskEdit edit_from_json(std::string_view text,
                                      const Connectivity& default_conn);

class StudySession {
 public:
  /// `storage_dir` empty keeps the session in memory only; otherwise the
  /// inputs and an append-only edit log are written there.
  StudySession(std::string id, std::shared_ptr<const Volume> volume,
               BinaryMask initial_mask, ScoringConfig config,
               std::filesystem::path storage_dir = {});

  /// Rebuilds a session by replaying the edit log in `dir`.
  [[nodiscard]] static std::shared_ptr<StudySession> restore(
      const std::filesystem::path& dir);

  [[nodiscard]] const std::string& id() const { return id_; }
  [[nodiscard]] const Volume& volume() const { return *volume_; }
  [[nodiscard]] const ScoringConfig& config() const { return config_; }
  [[nodiscard]] const BinaryMask& initial_mask() const { return initial_mask_; }
  [[nodiscard]] std::shared_ptr<const StudySnapshot> snapshot() const;
  [[nodiscard]] std::vector<MaskEdit> history() const;

  struct ExportState {
    std::shared_ptr<const StudySnapshot> snapshot;
    std::vector<MaskEdit> edits;
  };
  /// Snapshot and edit history taken together (no edit in between).
  [[nodiscard]] ExportState export_state() const;

  /// Optimistic concurrency: throws kRevisionConflict unless
  /// expected_revision is current, kUnknownComponent / kVoxelOutOfBounds for
  /// invalid edits. On failure nothing changes.
  EditOutcome apply(const MaskEdit& edit, std::uint64_t expected_revision);

 private:
  void persist_initial() const;
  void append_log(const MaskEdit& edit, std::uint64_t revision) const;
  [[nodiscard]] std::shared_ptr<const StudySnapshot> make_snapshot(
      std::uint64_t revision, BinaryMask mask) const;

  std::string id_;
  std::shared_ptr<const Volume> volume_;
  BinaryMask initial_mask_;
  ScoringConfig config_;
  std::filesystem::path storage_dir_;

  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const StudySnapshot> current_;
  mutable std::mutex edit_mutex_;  // serializes writers
  std::vector<MaskEdit> history_;
};

struct VolumeReference {
  // Exactly one of these is used, in this order.
  std::vector<std::uint8_t> bundle;
  std::filesystem::path fixture;  // raw fixture manifest
  std::filesystem::path dicom_dir;
};

enum class MaskSource { kThreshold, kFile, kInline, kProvider };

struct CreateStudyRequest {
  std::optional<std::string> study_id;
  VolumeReference volume;
  MaskSource mask_source = MaskSource::kThreshold;
  std::filesystem::path mask_file;
  std::vector<std::uint8_t> mask_bundle;
  std::string provider_endpoint;
  ScoringConfig config;
};

/// Owns every live session. Studies are independent; lookups take a shared
/// lock only.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path storage_root = {});

  /// Restores every session directory found under the storage root.
  std::size_t restore_all();

  /// Throws kShapeMismatch when the mask does not fit the volume and
  /// kProviderFailure for provider errors.
  std::shared_ptr<StudySession> create(const CreateStudyRequest& request);
  /// Throws kUnknownStudy.
  [[nodiscard]] std::shared_ptr<StudySession> get(const std::string& id) const;
  [[nodiscard]] std::vector<std::string> ids() const;

 private:
  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<StudySession>> sessions_;
  std::uint64_t next_id_ = 1;
};

}  // namespace cacscore::review
