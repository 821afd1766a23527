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

// Mask providers: anything that turns a Volume into a BinaryMask of the same
// shape. The HTTP wire contract is
//
//   POST <endpoint>?slice_begin=<b>&slice_end=<e>
//   Content-Type: application/x-cacscore-volume    (volume bundle)
//   -> 200, Content-Type: application/x-cacscore-mask (mask bundle)
//
// Bundles are described in raw_fixture.hpp and mask.hpp. A response whose
// shape differs from the request volume is a provider failure.

#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>

#include "cacscore/mask.hpp"
#include "cacscore/volume.hpp"

namespace cacscore {

inline constexpr char kVolumeContentType[] = "application/x-cacscore-volume";
inline constexpr char kMaskContentType[] = "application/x-cacscore-mask";
/// Environment variable consulted when a study names no provider endpoint.
inline constexpr char kProviderEnvVar[] = "CACSCORE_PROVIDER_URL";

/// Half-open slice range.
struct SliceRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

class MaskProvider {
 public:
  virtual ~MaskProvider() = default;
  /// Throws Error(kProviderFailure) on transport or contract failures.
  [[nodiscard]] virtual BinaryMask provide(const Volume& volume,
                                           SliceRange range) const = 0;
  [[nodiscard]] virtual std::string describe() const = 0;
};

class ThresholdMaskProvider final : public MaskProvider {
 public:
  explicit ThresholdMaskProvider(double hu_threshold) : threshold_(hu_threshold) {}
  [[nodiscard]] BinaryMask provide(const Volume& volume,
                                   SliceRange range) const override;
  [[nodiscard]] std::string describe() const override;

 private:
  double threshold_;
};

struct ProviderContract {
  std::string endpoint;
  std::chrono::milliseconds timeout{30000};
  int retry_budget = 2;
};

class HttpMaskProvider final : public MaskProvider {
 public:
  explicit HttpMaskProvider(ProviderContract contract);
  [[nodiscard]] BinaryMask provide(const Volume& volume,
                                   SliceRange range) const override;
  [[nodiscard]] std::string describe() const override;

 private:
  ProviderContract contract_;
  std::string scheme_host_port_;
  std::string path_;
};

/// Runs a shell command per request. `{input}` and `{output}` in the
/// template are replaced by paths of the volume bundle to read and the mask
/// bundle to write; `{slice_begin}`/`{slice_end}` by the range.
class CommandMaskProvider final : public MaskProvider {
 public:
  explicit CommandMaskProvider(std::string command_template);
  [[nodiscard]] BinaryMask provide(const Volume& volume,
                                   SliceRange range) const override;
  [[nodiscard]] std::string describe() const override;

 private:
  std::string command_template_;
};

/// "http://..." -> HttpMaskProvider, "exec:<template>" -> CommandMaskProvider.
[[nodiscard]] std::unique_ptr<MaskProvider> make_provider(
    const std::string& endpoint);

/// Throws kProviderFailure when the mask shape differs from the volume's.
void check_provider_mask(const BinaryMask& mask, const Volume& volume);

/// Serves the wire contract with threshold segmentation. Used as a reference
/// provider and in tests.
class ThresholdProviderServer {
 public:
  explicit ThresholdProviderServer(double hu_threshold = 130.0);
  ~ThresholdProviderServer();
  ThresholdProviderServer(const ThresholdProviderServer&) = delete;
  ThresholdProviderServer& operator=(const ThresholdProviderServer&) = delete;

  /// Binds to host:port (port 0 picks a free port) and serves on a
  /// background thread. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cacscore
