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

#include "cacscore/review/server.hpp"

#include <algorithm>
#include <thread>

#include <httplib.h>

#include "../json_support.hpp"
#include "cacscore/error.hpp"
#include "cacscore/key_value.hpp"
#include "cacscore/raw_fixture.hpp"
#include "cacscore/render.hpp"
#include "cacscore/study.hpp"

namespace cacscore::review {

using json_support::json;
using json_support::ordered_json;

namespace {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownStudy: return 404;
    case ErrorCode::kSliceOutOfRange: return 416;
    case ErrorCode::kRevisionConflict: return 409;
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kUnknownComponent:
    case ErrorCode::kVoxelOutOfBounds: return 422;
    case ErrorCode::kProviderFailure: return 502;
    default: return 400;
  }
}

void send_json(httplib::Response& res, const ordered_json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code,
                const std::string& message, ordered_json extra = {}) {
  ordered_json err;
  err["code"] = code;
  err["message"] = message;
  if (extra.is_object()) {
    for (auto& [k, v] : extra.items()) err[k] = v;
  }
  send_json(res, {{"error", err}}, status);
}

double query_double(const httplib::Request& req, const char* key, double fallback) {
  if (!req.has_param(key)) return fallback;
  const auto text = req.get_param_value(key);
  try {
    return parse_double(text);
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("query parameter ") + key + " must be a number");
  }
}

std::size_t path_index(const std::string& text) {
  if (text.empty() || text.size() > 9 ||
      !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw Error(ErrorCode::kSliceOutOfRange, "slice index '" + text + "'");
  }
  return std::stoul(text);
}

ordered_json lesion_list(const StudySnapshot& snap) {
  std::vector<LesionScore> lesions = snap.report.per_lesion;
  std::stable_sort(lesions.begin(), lesions.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  ordered_json arr = ordered_json::array();
  for (const auto& l : lesions) arr.push_back(json_support::lesion_score_json(l));
  return arr;
}

ordered_json summary(const StudySession& session, const StudySnapshot& snap) {
  ordered_json j;
  j["study_id"] = session.id();
  j["revision"] = snap.revision;
  const auto& shape = session.volume().shape();
  const auto& spacing = session.volume().spacing();
  j["shape"] = {shape.slices, shape.rows, shape.cols};
  j["spacing_mm"] = {spacing.slice_mm, spacing.row_mm, spacing.col_mm};
  j["total_score"] = snap.report.total_score;
  j["category"] = to_string(snap.report.category);
  j["report"] = json_support::report_json(snap.report);
  return j;
}

}  // namespace

struct ReviewServer::Impl {
  ServerOptions options;
  SessionStore store;
  httplib::Server server;
  std::thread thread;

  explicit Impl(ServerOptions opts)
      : options(std::move(opts)), store(options.storage_dir) {}

  std::filesystem::path resolve(const std::string& p) const {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : options.data_root / path;
  }

  // Wraps a handler so library errors become structured HTTP errors.
  template <typename Fn>
  httplib::Server::Handler guarded(Fn fn) {
    return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        send_error(res, http_status(e.code()), to_string(e.code()), e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
      }
    };
  }

  CreateStudyRequest parse_create(const httplib::Request& req) const {
    CreateStudyRequest create;
    create.config = options.default_config;
    json meta = json::object();
    if (req.is_multipart_form_data()) {
      if (req.has_file("meta")) meta = json_support::parse(req.get_file_value("meta").content,
                                                          ErrorCode::kInvalidArgument);
      if (!req.has_file("volume")) {
        throw Error(ErrorCode::kInvalidArgument, "multipart upload needs a 'volume' part");
      }
      const auto& volume = req.get_file_value("volume").content;
      create.volume.bundle.assign(volume.begin(), volume.end());
      if (req.has_file("mask")) {
        const auto& mask = req.get_file_value("mask").content;
        create.mask_bundle.assign(mask.begin(), mask.end());
        create.mask_source = MaskSource::kInline;
      }
    } else {
      meta = json_support::parse(req.body, ErrorCode::kInvalidArgument);
      if (!meta.is_object()) throw Error(ErrorCode::kInvalidArgument, "body must be an object");
      if (!meta.contains("volume") || !meta.at("volume").is_object()) {
        throw Error(ErrorCode::kInvalidArgument, "body needs a 'volume' object");
      }
      const auto& v = meta.at("volume");
      if (v.contains("bundle_b64")) {
        create.volume.bundle = json_support::base64_decode(v.at("bundle_b64").get<std::string>());
      } else if (v.contains("fixture")) {
        create.volume.fixture = resolve(v.at("fixture").get<std::string>());
      } else if (v.contains("dicom_dir")) {
        create.volume.dicom_dir = resolve(v.at("dicom_dir").get<std::string>());
      } else {
        throw Error(ErrorCode::kInvalidArgument,
                    "volume needs one of bundle_b64, fixture, dicom_dir");
      }
    }
    if (meta.contains("study_id")) create.study_id = meta.at("study_id").get<std::string>();
    if (meta.contains("scoring")) {
      create.config = json_support::overrides_from(meta.at("scoring")).apply(create.config);
    }
    if (meta.contains("mask")) {
      const auto& m = meta.at("mask");
      const auto source = m.value("source", std::string("threshold"));
      if (source == "threshold") {
        create.mask_source = MaskSource::kThreshold;
      } else if (source == "file") {
        create.mask_source = MaskSource::kFile;
        create.mask_file = resolve(m.at("path").get<std::string>());
      } else if (source == "inline") {
        create.mask_source = MaskSource::kInline;
        if (m.contains("bundle_b64")) {
          create.mask_bundle = json_support::base64_decode(m.at("bundle_b64").get<std::string>());
        }
        if (create.mask_bundle.empty()) {
          throw Error(ErrorCode::kInvalidArgument, "inline mask needs bundle_b64 or a 'mask' part");
        }
      } else if (source == "provider") {
        create.mask_source = MaskSource::kProvider;
        create.provider_endpoint = m.value("endpoint", std::string());
        if (create.provider_endpoint.empty()) {
          if (const char* env = std::getenv(kProviderEnvVar)) create.provider_endpoint = env;
        }
        if (create.provider_endpoint.empty()) {
          throw Error(ErrorCode::kInvalidArgument, "provider mask source needs an endpoint");
        }
      } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown mask source '" + source + "'");
      }
    }
    return create;
  }

  void register_routes() {
    server.Get("/healthz", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, {{"status", "ok"}, {"studies", store.ids().size()},
                      {"tool_version", kToolVersion}});
    }));

    server.Post("/studies", guarded([this](const httplib::Request& req, httplib::Response& res) {
      CreateStudyRequest create;
      try {
        create = parse_create(req);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kInvalidArgument, std::string("malformed request: ") + e.what());
      }
      const auto session = store.create(create);
      const auto snap = session->snapshot();
      send_json(res, summary(*session, *snap), 201);
    }));

    server.Get(R"(/studies/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto session = store.get(req.matches[1]);
                 const auto snap = session->snapshot();
                 auto body = summary(*session, *snap);
                 body["edit_count"] = snap->revision;
                 send_json(res, body);
               }));

    server.Get(R"(/studies/([^/]+)/slices/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto session = store.get(req.matches[1]);
                 const auto snap = session->snapshot();
                 const auto index = path_index(req.matches[2]);
                 const Window window{query_double(req, "wc", Window{}.center),
                                     query_double(req, "ww", Window{}.width)};
                 const auto frame = render_frame(session->volume(), index, window);
                 const auto& shape = session->volume().shape();
                 ordered_json meta;
                 meta["shape"] = {shape.rows, shape.cols};
                 meta["revision"] = snap->revision;
                 meta["slice"] = index;
                 meta["window"] = {{"center", window.center}, {"width", window.width}};
                 res.set_header("X-Frame-Meta", meta.dump());
                 res.set_header("X-Revision", std::to_string(snap->revision));
                 res.set_content(reinterpret_cast<const char*>(frame.data()), frame.size(),
                                 "application/octet-stream");
               }));

    server.Get(R"(/studies/([^/]+)/slices/([^/]+)/overlay)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto session = store.get(req.matches[1]);
                 const auto snap = session->snapshot();
                 const auto index = path_index(req.matches[2]);
                 const auto runs = overlay_runs(*snap->mask, index);
                 ordered_json body;
                 body["revision"] = snap->revision;
                 body["slice"] = index;
                 body["shape"] = {snap->mask->shape().rows, snap->mask->shape().cols};
                 ordered_json arr = ordered_json::array();
                 for (const auto& r : runs) arr.push_back({r.row, r.col, r.length});
                 body["runs"] = std::move(arr);
                 send_json(res, body);
               }));

    server.Get(R"(/studies/([^/]+)/lesions)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto session = store.get(req.matches[1]);
                 const auto snap = session->snapshot();
                 ordered_json body;
                 body["revision"] = snap->revision;
                 body["total_score"] = snap->report.total_score;
                 body["category"] = to_string(snap->report.category);
                 body["lesions"] = lesion_list(*snap);
                 send_json(res, body);
               }));

    server.Post(R"(/studies/([^/]+)/edits)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto session = store.get(req.matches[1]);
                  const auto body = json_support::parse(req.body, ErrorCode::kInvalidArgument);
                  if (!body.is_object() || !body.contains("expected_revision") ||
                      !body.at("expected_revision").is_number_unsigned() ||
                      !body.contains("edit")) {
                    throw Error(ErrorCode::kInvalidArgument,
                                "body needs expected_revision and edit");
                  }
                  const auto expected = body.at("expected_revision").get<std::uint64_t>();
                  MaskEdit edit;
                  try {
                    edit = edit_from_json(body.at("edit").dump(),
                                          session->config().connectivity);
                  } catch (const Error& e) {
                    send_error(res, 422, "invalid_edit", e.what());
                    return;
                  }
                  try {
                    const auto outcome = session->apply(edit, expected);
                    const auto& snap = *outcome.snapshot;
                    ordered_json out;
                    out["revision"] = snap.revision;
                    out["total_score"] = snap.report.total_score;
                    out["category"] = to_string(snap.report.category);
                    out["report"] = json_support::report_json(snap.report);
                    out["lesions"] = lesion_list(snap);
                    send_json(res, out);
                  } catch (const Error& e) {
                    if (e.code() != ErrorCode::kRevisionConflict) throw;
                    send_error(res, 409, to_string(e.code()), e.what(),
                               {{"current_revision", session->snapshot()->revision}});
                  }
                }));

    server.Get(R"(/studies/([^/]+)/export)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto session = store.get(req.matches[1]);
                 const auto state = session->export_state();
                 const auto bundle = encode_mask_bundle(*state.snapshot->mask);
                 ordered_json body;
                 body["study_id"] = session->id();
                 body["revision"] = state.snapshot->revision;
                 body["report"] = json_support::report_json(state.snapshot->report);
                 ordered_json edits = ordered_json::array();
                 for (const auto& e : state.edits) edits.push_back(ordered_json::parse(edit_to_json(e)));
                 body["edits"] = std::move(edits);
                 body["mask"] = {{"content_type", kMaskContentType},
                                 {"bundle_b64", json_support::base64_encode(bundle)}};
                 send_json(res, body);
               }));

    server.Get(R"(/studies/([^/]+)/export/mask)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto session = store.get(req.matches[1]);
                 const auto snap = session->snapshot();
                 const auto bundle = encode_mask_bundle(*snap->mask);
                 res.set_header("X-Revision", std::to_string(snap->revision));
                 res.set_content(reinterpret_cast<const char*>(bundle.data()), bundle.size(),
                                 kMaskContentType);
               }));
  }
};

ReviewServer::ReviewServer(ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {
  impl_->options.default_config.validate();
  impl_->store.restore_all();
  impl_->register_routes();
}

ReviewServer::~ReviewServer() { stop(); }

namespace {

int bind_server(httplib::Server& server, const std::string& host, int port) {
  const int bound =
      port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::kIoError, "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

}  // namespace

int ReviewServer::start() {
  const int port = bind_server(impl_->server, impl_->options.host, impl_->options.port);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void ReviewServer::run() {
  bind_server(impl_->server, impl_->options.host, impl_->options.port);
  impl_->server.listen_after_bind();
}

void ReviewServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

SessionStore& ReviewServer::store() { return impl_->store; }

}  // namespace cacscore::review
