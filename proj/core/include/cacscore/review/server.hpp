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

// HTTP+JSON front end for the review loop.
//
//   POST /studies                      create (JSON or multipart upload)
//   GET  /studies/{id}                 summary + current report
//   GET  /studies/{id}/slices/{k}      8-bit frame (?wc=&ww=); JSON sidecar
//                                      in the X-Frame-Meta header
//   GET  /studies/{id}/slices/{k}/overlay   mask run-lengths as JSON
//   GET  /studies/{id}/lesions         lesion summaries, highest score first
//   POST /studies/{id}/edits           {"expected_revision", "edit"}
//   GET  /studies/{id}/export          mask bundle (base64) + report + edits
//   GET  /studies/{id}/export/mask     raw mask bundle
//   GET  /healthz

#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "cacscore/agatston.hpp"
#include "cacscore/review/session.hpp"

namespace cacscore::review {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 0;
  // Empty: sessions live in memory only.
  std::filesystem::path storage_dir;
  // Relative fixture/mask paths in create requests resolve against this.
  std::filesystem::path data_root = ".";
  ScoringConfig default_config;
};

class ReviewServer {
 public:
  explicit ReviewServer(ServerOptions options);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  /// Binds and serves on a background thread; returns the bound port.
  int start();
  /// Binds and serves on the calling thread until stop().
  void run();
  void stop();

  [[nodiscard]] SessionStore& store();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cacscore::review
