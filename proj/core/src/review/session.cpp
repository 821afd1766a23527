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

#include "cacscore/review/session.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "../json_support.hpp"
#include "cacscore/dicom.hpp"
#include "cacscore/error.hpp"
#include "cacscore/raw_fixture.hpp"

namespace cacscore::review {

using json_support::json;
using json_support::ordered_json;

namespace {

constexpr char kVolumeFile[] = "volume.bundle";
constexpr char kInitialMaskFile[] = "initial_mask.bundle";
constexpr char kSessionFile[] = "session.json";
constexpr char kEditLog[] = "edits.jsonl";

ordered_json edit_json(const MaskEdit& edit) {
  ordered_json j;
  if (const auto* remove = std::get_if<RemoveComponent>(&edit)) {
    j["type"] = "remove_component";
    j["id"] = remove->id;
    j["connectivity"] = {{"in_plane", to_string(remove->connectivity.in_plane)},
                         {"cross_slice", to_string(remove->connectivity.cross_slice)}};
  } else {
    const auto& paint = std::get<Paint>(edit);
    j["type"] = "paint";
    j["value"] = paint.value;
    ordered_json voxels = ordered_json::array();
    for (const auto& v : paint.voxels) voxels.push_back({v.slice, v.row, v.col});
    j["voxels"] = std::move(voxels);
  }
  return j;
}

MaskEdit edit_from(const json& j, const Connectivity& default_conn) {
  try {
    if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "edit must be an object");
    const auto type = j.at("type").get<std::string>();
    if (type == "remove_component") {
      RemoveComponent edit;
      const auto id = j.at("id").get<long long>();
      if (id <= 0) throw Error(ErrorCode::kUnknownComponent, "component ids start at 1");
      edit.id = static_cast<std::uint32_t>(id);
      edit.connectivity = default_conn;
      if (j.contains("connectivity")) {
        const auto& c = j.at("connectivity");
        if (c.contains("in_plane")) {
          edit.connectivity.in_plane = parse_in_plane(c.at("in_plane").get<std::string>());
        }
        if (c.contains("cross_slice")) {
          edit.connectivity.cross_slice =
              parse_cross_slice(c.at("cross_slice").get<std::string>());
        }
      }
      return edit;
    }
    if (type == "paint") {
      Paint edit;
      edit.value = j.value("value", true);
      for (const auto& v : j.at("voxels")) {
        if (!v.is_array() || v.size() != 3) {
          throw Error(ErrorCode::kInvalidArgument, "voxels are [slice, row, col] triples");
        }
        edit.voxels.push_back({v[0].get<long>(), v[1].get<long>(), v[2].get<long>()});
      }
      return edit;
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown edit type '" + type + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed edit: ") + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file_bytes(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 128 || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

}  // namespace

std::string edit_to_json(const MaskEdit& edit) { return edit_json(edit).dump(); }

MaskEdit edit_from_json(std::string_view text, const Connectivity& default_conn) {
  return edit_from(json_support::parse(text, ErrorCode::kInvalidArgument), default_conn);
}

StudySession::StudySession(std::string id, std::shared_ptr<const Volume> volume,
                           BinaryMask initial_mask, ScoringConfig config,
                           std::filesystem::path storage_dir)
    : id_(std::move(id)),
      volume_(std::move(volume)),
      initial_mask_(std::move(initial_mask)),
      config_(config),
      storage_dir_(std::move(storage_dir)) {
  if (!(initial_mask_.shape() == volume_->shape())) {
    throw Error(ErrorCode::kShapeMismatch, "mask shape does not match the volume");
  }
  config_.validate();
  current_ = make_snapshot(0, initial_mask_);
  if (!storage_dir_.empty()) persist_initial();
}

std::shared_ptr<const StudySnapshot> StudySession::make_snapshot(std::uint64_t revision,
                                                                 BinaryMask mask) const {
  auto snap = std::make_shared<StudySnapshot>();
  snap->revision = revision;
  auto scored = score_patient_detailed(*volume_, mask, config_);
  snap->report = std::move(scored.report);
  snap->lesions = std::move(scored.lesions);
  snap->mask = std::make_shared<const BinaryMask>(std::move(mask));
  return snap;
}

std::shared_ptr<const StudySnapshot> StudySession::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return current_;
}

std::vector<MaskEdit> StudySession::history() const {
  std::lock_guard lock(edit_mutex_);
  return history_;
}

StudySession::ExportState StudySession::export_state() const {
  std::lock_guard lock(edit_mutex_);
  return {snapshot(), history_};
}

EditOutcome StudySession::apply(const MaskEdit& edit, std::uint64_t expected_revision) {
  std::lock_guard lock(edit_mutex_);
  const auto current = snapshot();
  if (expected_revision != current->revision) {
    throw Error(ErrorCode::kRevisionConflict,
                "expected revision " + std::to_string(expected_revision) +
                    " but the study is at revision " + std::to_string(current->revision));
  }
  auto next = make_snapshot(current->revision + 1, apply_edit(*current->mask, edit));
  append_log(edit, next->revision);
  history_.push_back(edit);
  {
    std::lock_guard publish(snapshot_mutex_);
    current_ = next;
  }
  return {std::move(next)};
}

void StudySession::persist_initial() const {
  std::filesystem::create_directories(storage_dir_);
  write_file_bytes(storage_dir_ / kVolumeFile, encode_volume_bundle(*volume_));
  write_file_bytes(storage_dir_ / kInitialMaskFile, encode_mask_bundle(initial_mask_));
  ordered_json session;
  session["study_id"] = id_;
  session["config"] = json_support::config_json(config_);
  write_text(storage_dir_ / kSessionFile, session.dump(2) + "\n");
  write_text(storage_dir_ / kEditLog, "");
}

void StudySession::append_log(const MaskEdit& edit, std::uint64_t revision) const {
  if (storage_dir_.empty()) return;
  ordered_json record;
  record["revision"] = revision;
  record["edit"] = edit_json(edit);
  std::ofstream out(storage_dir_ / kEditLog, std::ios::app);
  out << record.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "cannot append to edit log of " + id_);
}

std::shared_ptr<StudySession> StudySession::restore(const std::filesystem::path& dir) {
  const auto session_bytes = read_file_bytes(dir / kSessionFile);
  const auto session =
      json_support::parse(std::string(session_bytes.begin(), session_bytes.end()));
  const auto id = session.at("study_id").get<std::string>();
  const auto config =
      json_support::overrides_from(session.at("config")).apply(ScoringConfig{});
  auto volume = std::make_shared<const Volume>(
      decode_volume_bundle(read_file_bytes(dir / kVolumeFile)));
  auto mask = decode_mask_bundle(read_file_bytes(dir / kInitialMaskFile));

  auto restored = std::make_shared<StudySession>(id, std::move(volume), std::move(mask), config);
  const auto log_path = dir / kEditLog;
  std::ifstream log(log_path);
  std::string line;
  std::uintmax_t intact_bytes = 0;
  bool torn = false;
  while (std::getline(log, line)) {
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error&) {
      // A torn final line from an interrupted append; everything before it
      // is intact.
      if (log.peek() == EOF) {
        torn = true;
        break;
      }
      throw Error(ErrorCode::kInvalidManifest, "corrupt edit log in " + dir.string());
    }
    const auto revision = record.at("revision").get<std::uint64_t>();
    restored->apply(edit_from(record.at("edit"), config.connectivity), revision - 1);
    intact_bytes = log.eof() ? std::filesystem::file_size(log_path)
                             : static_cast<std::uintmax_t>(log.tellg());
  }
  log.close();
  if (torn) std::filesystem::resize_file(log_path, intact_bytes);
  restored->storage_dir_ = dir;
  return restored;
}

SessionStore::SessionStore(std::filesystem::path storage_root)
    : root_(std::move(storage_root)) {}

std::size_t SessionStore::restore_all() {
  if (root_.empty() || !std::filesystem::is_directory(root_)) return 0;
  std::size_t restored = 0;
  std::unique_lock lock(mutex_);
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    if (!entry.is_directory() || !std::filesystem::exists(entry.path() / kSessionFile)) {
      continue;
    }
    auto session = StudySession::restore(entry.path());
    sessions_[session->id()] = session;
    ++restored;
  }
  return restored;
}

std::shared_ptr<StudySession> SessionStore::create(const CreateStudyRequest& request) {
  request.config.validate();
  std::shared_ptr<const Volume> volume;
  if (!request.volume.bundle.empty()) {
    volume = std::make_shared<const Volume>(decode_volume_bundle(request.volume.bundle));
  } else if (!request.volume.fixture.empty()) {
    volume = std::make_shared<const Volume>(read_volume_files(request.volume.fixture));
  } else if (!request.volume.dicom_dir.empty()) {
    volume = std::make_shared<const Volume>(dicom::load_series(request.volume.dicom_dir));
  } else {
    throw Error(ErrorCode::kInvalidArgument, "no volume given");
  }

  BinaryMask mask;
  switch (request.mask_source) {
    case MaskSource::kThreshold:
      mask = threshold_segment(*volume, request.config.hu_threshold);
      break;
    case MaskSource::kFile:
      mask = read_mask_files(request.mask_file);
      break;
    case MaskSource::kInline:
      mask = decode_mask_bundle(request.mask_bundle);
      break;
    case MaskSource::kProvider:
      mask = make_provider(request.provider_endpoint)
                 ->provide(*volume, {0, volume->shape().slices});
      break;
  }
  if (!(mask.shape() == volume->shape())) {
    throw Error(ErrorCode::kShapeMismatch, "mask shape does not match the volume");
  }

  std::unique_lock lock(mutex_);
  std::string id;
  if (request.study_id) {
    id = *request.study_id;
    if (!valid_id(id)) throw Error(ErrorCode::kInvalidArgument, "invalid study id '" + id + "'");
    if (sessions_.contains(id)) {
      throw Error(ErrorCode::kInvalidArgument, "study '" + id + "' already exists");
    }
  } else {
    do {
      id = "study-" + std::to_string(next_id_++);
    } while (sessions_.contains(id));
  }
  auto session = std::make_shared<StudySession>(
      id, std::move(volume), std::move(mask), request.config,
      root_.empty() ? std::filesystem::path{} : root_ / id);
  sessions_[id] = session;
  return session;
}

std::shared_ptr<StudySession> SessionStore::get(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::kUnknownStudy, "no study '" + id + "'");
  return it->second;
}

std::vector<std::string> SessionStore::ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

}  // namespace cacscore::review
