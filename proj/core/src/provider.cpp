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

#include "cacscore/provider.hpp"

#include <atomic>
#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>

#include "cacscore/error.hpp"
#include "cacscore/lesion.hpp"
#include "cacscore/raw_fixture.hpp"

namespace cacscore {
namespace {

std::string shape_text(const Shape& s) {
  return std::to_string(s.slices) + "x" + std::to_string(s.rows) + "x" +
         std::to_string(s.cols);
}

void replace_all(std::string& text, const std::string& from, const std::string& to) {
  for (auto pos = text.find(from); pos != std::string::npos;
       pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
}

SliceRange clamp_range(SliceRange range, const Volume& volume) {
  const auto n = volume.shape().slices;
  if (range.end == 0 || range.end > n) range.end = n;
  if (range.begin > range.end) range.begin = range.end;
  return range;
}

}  // namespace

void check_provider_mask(const BinaryMask& mask, const Volume& volume) {
  if (!(mask.shape() == volume.shape())) {
    throw Error(ErrorCode::kProviderFailure,
                "provider mask shape " + shape_text(mask.shape()) +
                    " does not match volume shape " + shape_text(volume.shape()));
  }
}

BinaryMask ThresholdMaskProvider::provide(const Volume& volume, SliceRange range) const {
  range = clamp_range(range, volume);
  const auto& s = volume.shape();
  return threshold_segment(
      volume, threshold_,
      VoxelBox{{static_cast<long>(range.begin), 0, 0},
               {static_cast<long>(range.end), static_cast<long>(s.rows),
                static_cast<long>(s.cols)}});
}

std::string ThresholdMaskProvider::describe() const {
  return "threshold(" + std::to_string(threshold_) + ")";
}

HttpMaskProvider::HttpMaskProvider(ProviderContract contract)
    : contract_(std::move(contract)) {
  const auto& url = contract_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "provider endpoint needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

BinaryMask HttpMaskProvider::provide(const Volume& volume, SliceRange range) const {
  range = clamp_range(range, volume);
  const auto body = encode_volume_bundle(volume);
  const std::string path = path_ + (path_.find('?') == std::string::npos ? "?" : "&") +
                           "slice_begin=" + std::to_string(range.begin) +
                           "&slice_end=" + std::to_string(range.end);

  httplib::Client client(scheme_host_port_);
  const auto seconds = contract_.timeout.count() / 1000;
  const auto micros = (contract_.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  std::string last_error;
  const int attempts = std::max(1, contract_.retry_budget + 1);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    auto res = client.Post(path, reinterpret_cast<const char*>(body.data()), body.size(),
                           kVolumeContentType);
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "provider answered HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::kProviderFailure,
                  "provider answered HTTP " + std::to_string(res->status) + ": " +
                      res->body.substr(0, 200));
    }
    const auto content_type = res->get_header_value("Content-Type");
    if (content_type.rfind(kMaskContentType, 0) != 0) {
      throw Error(ErrorCode::kProviderFailure,
                  "provider answered with content type '" + content_type + "'");
    }
    BinaryMask mask;
    try {
      mask = decode_mask_bundle(
          {reinterpret_cast<const std::uint8_t*>(res->body.data()), res->body.size()});
    } catch (const Error& e) {
      throw Error(ErrorCode::kProviderFailure,
                  std::string("provider mask unreadable: ") + e.what());
    }
    check_provider_mask(mask, volume);
    return mask;
  }
  throw Error(ErrorCode::kProviderFailure,
              contract_.endpoint + " failed after " + std::to_string(attempts) +
                  " attempt(s): " + last_error);
}

std::string HttpMaskProvider::describe() const { return contract_.endpoint; }

CommandMaskProvider::CommandMaskProvider(std::string command_template)
    : command_template_(std::move(command_template)) {}

BinaryMask CommandMaskProvider::provide(const Volume& volume, SliceRange range) const {
  range = clamp_range(range, volume);
  static std::atomic<std::uint64_t> counter{0};
  std::random_device rd;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("cacscore-provider-" + std::to_string(rd()) + "-" +
                    std::to_string(counter++));
  std::filesystem::create_directories(dir);
  const auto input = dir / "volume.bundle";
  const auto output = dir / "mask.bundle";
  write_file_bytes(input, encode_volume_bundle(volume));

  std::string command = command_template_;
  replace_all(command, "{input}", input.string());
  replace_all(command, "{output}", output.string());
  replace_all(command, "{slice_begin}", std::to_string(range.begin));
  replace_all(command, "{slice_end}", std::to_string(range.end));
  const int status = std::system(command.c_str());

  BinaryMask mask;
  try {
    if (status != 0) {
      throw Error(ErrorCode::kProviderFailure,
                  "provider command exited with status " + std::to_string(status));
    }
    mask = decode_mask_bundle(read_file_bytes(output));
  } catch (const Error& e) {
    std::filesystem::remove_all(dir);
    if (e.code() == ErrorCode::kProviderFailure) throw;
    throw Error(ErrorCode::kProviderFailure,
                std::string("provider command output unreadable: ") + e.what());
  }
  std::filesystem::remove_all(dir);
  check_provider_mask(mask, volume);
  return mask;
}

std::string CommandMaskProvider::describe() const {
  return "exec:" + command_template_;
}

std::unique_ptr<MaskProvider> make_provider(const std::string& endpoint) {
  if (endpoint.rfind("http://", 0) == 0 || endpoint.rfind("https://", 0) == 0) {
    return std::make_unique<HttpMaskProvider>(ProviderContract{endpoint});
  }
  if (endpoint.rfind("exec:", 0) == 0) {
    return std::make_unique<CommandMaskProvider>(endpoint.substr(5));
  }
  throw Error(ErrorCode::kInvalidArgument,
              "provider endpoint must start with http:// or exec:, got '" + endpoint + "'");
}

struct ThresholdProviderServer::Impl {
  double threshold;
  httplib::Server server;
  std::thread thread;
};

ThresholdProviderServer::ThresholdProviderServer(double hu_threshold)
    : impl_(std::make_unique<Impl>()) {
  impl_->threshold = hu_threshold;
  impl_->server.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto volume = decode_volume_bundle(
          {reinterpret_cast<const std::uint8_t*>(req.body.data()), req.body.size()});
      SliceRange range;
      if (req.has_param("slice_begin")) {
        range.begin = std::stoul(req.get_param_value("slice_begin"));
      }
      if (req.has_param("slice_end")) range.end = std::stoul(req.get_param_value("slice_end"));
      const auto mask = ThresholdMaskProvider(impl_->threshold).provide(volume, range);
      const auto bundle = encode_mask_bundle(mask);
      res.set_content(reinterpret_cast<const char*>(bundle.data()), bundle.size(),
                      kMaskContentType);
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(e.what(), "text/plain");
    }
  });
}

ThresholdProviderServer::~ThresholdProviderServer() { stop(); }

int ThresholdProviderServer::start(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                              : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::kIoError, "cannot bind provider to " + host + ":" +
                                         std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ThresholdProviderServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace cacscore
