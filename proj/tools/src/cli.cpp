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

#include "cacscore_cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cacscore/confusion_fixture.hpp"
#include "cacscore/dicom.hpp"
#include "cacscore/error.hpp"
#include "cacscore/lesion.hpp"
#include "cacscore/mask.hpp"
#include "cacscore/provider.hpp"
#include "cacscore/raw_fixture.hpp"
#include "cacscore/report_json.hpp"
#include "cacscore/review/server.hpp"
#include "cacscore/study.hpp"

#ifndef CACSCORE_DEFAULT_FIXTURE_DIR
#define CACSCORE_DEFAULT_FIXTURE_DIR "data/confusion"
#endif

namespace cacscore::cli {
namespace {

namespace fs = std::filesystem;

enum class Format { kJson, kTable, kBoth };

struct ScoringFlags {
  std::optional<std::string> mode;
  std::optional<double> hu_threshold;
  std::optional<double> min_component_area_mm2;
  std::optional<bool> thickness_normalization;
  std::optional<std::string> in_plane;
  std::optional<std::string> cross_slice;
  std::string config_file;

  void attach(CLI::App& cmd) {
    cmd.add_option("--mode", mode, "lesion_specific | classic_slicewise");
    cmd.add_option("--hu-threshold", hu_threshold, "Calcium threshold in HU");
    cmd.add_option("--min-component-area-mm2", min_component_area_mm2,
                   "Smallest lesion area kept, in mm^2");
    cmd.add_option("--thickness-normalization", thickness_normalization,
                   "Scale slice terms by thickness / 3 mm (true|false)");
    cmd.add_option("--in-plane", in_plane, "In-plane connectivity: four | eight");
    cmd.add_option("--cross-slice", cross_slice,
                   "Cross-slice connectivity: none | face | full");
    cmd.add_option("--config", config_file, "JSON scoring config document")
        ->check(CLI::ExistingFile);
  }

  [[nodiscard]] ScoringOverrides overrides() const {
    ScoringOverrides o;
    if (mode) o.mode = parse_mode(*mode);
    o.hu_threshold = hu_threshold;
    o.min_component_area_mm2 = min_component_area_mm2;
    o.thickness_normalization = thickness_normalization;
    if (in_plane) o.in_plane = parse_in_plane(*in_plane);
    if (cross_slice) o.cross_slice = parse_cross_slice(*cross_slice);
    return o;
  }

  /// Defaults, then the --config document, then explicit flags.
  [[nodiscard]] ScoringConfig base_config() const {
    ScoringConfig cfg;
    if (!config_file.empty()) {
      const auto bytes = read_file_bytes(config_file);
      cfg = ScoringOverrides::parse_json(std::string(bytes.begin(), bytes.end())).apply(cfg);
    }
    cfg = overrides().apply(cfg);
    return cfg;
  }
};

/// Command-line flags take precedence over manifest scoring blocks.
void overlay(ScoringOverrides& target, const ScoringOverrides& flags) {
  if (flags.mode) target.mode = flags.mode;
  if (flags.hu_threshold) target.hu_threshold = flags.hu_threshold;
  if (flags.min_component_area_mm2) target.min_component_area_mm2 = flags.min_component_area_mm2;
  if (flags.thickness_normalization) target.thickness_normalization = flags.thickness_normalization;
  if (flags.in_plane) target.in_plane = flags.in_plane;
  if (flags.cross_slice) target.cross_slice = flags.cross_slice;
}

void write_text(const fs::path& path, const std::string& text) {
  const auto* data = reinterpret_cast<const std::uint8_t*>(text.data());
  write_file_bytes(path, std::span<const std::uint8_t>(data, text.size()));
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());
  return fs::path(dir);
}

void emit(std::ostream& out, Format format, const std::string& json, const std::string& table) {
  if (format != Format::kTable) out << json;
  if (format == Format::kBoth) out << "\n";
  if (format != Format::kJson) out << table;
}

Volume read_volume_input(const fs::path& path) {
  if (fs::is_directory(path)) return dicom::load_series(path);
  if (path.extension() == ".bundle") return decode_volume_bundle(read_file_bytes(path));
  return read_volume_files(path);
}

BinaryMask read_mask_input(const fs::path& path) {
  if (path.extension() == ".bundle") return decode_mask_bundle(read_file_bytes(path));
  return read_mask_files(path);
}

std::optional<VoxelBox> parse_roi(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::vector<long> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stol(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "--roi expects six integers");
    }
  }
  if (v.size() != 6 || std::any_of(v.begin(), v.end(), [](long x) { return x < 0; })) {
    throw Error(ErrorCode::kInvalidArgument, "--roi expects s0,r0,c0,s1,r1,c1");
  }
  return VoxelBox{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
}

Format parse_format(const std::string& text, Format fallback) {
  if (text.empty()) return fallback;
  if (text == "json") return Format::kJson;
  if (text == "table") return Format::kTable;
  return Format::kBoth;
}

void add_format(CLI::App& cmd, std::string& value) {
  cmd.add_option("--format", value, "json | table | both")
      ->check(CLI::IsMember({"json", "table", "both"}));
}

int error_exit(std::ostream& err, int exit_code, std::string_view code, const std::string& message) {
  nlohmann::ordered_json record;
  record["error"] = {{"code", code}, {"message", message}, {"exit_code", exit_code}};
  err << record.dump() << "\n";
  return exit_code;
}

int exit_code_for(ErrorCode code) {
  return code == ErrorCode::kProviderFailure ? kExitProviderError : kExitInputError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coronary artery calcium scoring", "cacscore"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  ScoringFlags flags;
  std::string format_text;
  std::string output_dir;
  std::string manifest_path;

  auto* score = app.add_subcommand("score", "Score one study manifest");
  score->add_option("manifest", manifest_path, "Study manifest (JSON)")->required();
  flags.attach(*score);
  add_format(*score, format_text);
  score->add_option("--output-dir", output_dir, "Write <study_id>.report.json here");

  unsigned threads = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a cohort against ground truth");
  evaluate->add_option("manifest", manifest_path, "Cohort manifest (JSON)")->required();
  evaluate->add_option("--threads", threads, "Concurrent studies (0 = hardware)");
  flags.attach(*evaluate);
  add_format(*evaluate, format_text);
  evaluate->add_option("--output-dir", output_dir, "Write cohort.json and cohort.csv here");

  std::string fixture_dir = CACSCORE_DEFAULT_FIXTURE_DIR;
  auto* tables = app.add_subcommand("tables", "Recompute the published tables from fixtures");
  tables->add_option("--fixtures", fixture_dir, "Directory of *.cm confusion fixtures");
  add_format(*tables, format_text);
  tables->add_option("--output-dir", output_dir, "Write tables.json here");

  std::string input_path;
  std::string output_path;
  std::string roi_text;
  auto* segment = app.add_subcommand("segment", "Threshold segmentation baseline");
  segment->add_option("--input", input_path, "Volume manifest, .bundle or DICOM directory")
      ->required();
  segment->add_option("--output", output_path, "Mask manifest or .bundle to write")->required();
  segment->add_option("--roi", roi_text, "Half-open box s0,r0,c0,s1,r1,c1");
  flags.attach(*segment);
  segment->add_option("--output-dir", output_dir, "Also write PGM previews of each slice here");

  std::string bit_order = "msb_first";
  auto* convert = app.add_subcommand("mask-convert", "Convert between mask encodings");
  convert->add_option("--input", input_path, "Mask manifest or .bundle")->required();
  convert->add_option("--output", output_path, "Mask manifest or .bundle to write");
  convert->add_option("--bit-order", bit_order, "msb_first | lsb_first")
      ->check(CLI::IsMember({"msb_first", "lsb_first"}));
  convert->add_option("--output-dir", output_dir, "Write PGM previews of each slice here");

  std::string host = "127.0.0.1";
  int port = 8080;
  int provider_port = 8081;
  std::string storage_dir;
  std::string data_root = ".";
  auto* serve = app.add_subcommand("serve", "Run the review service");
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--port", port, "Bind port (0 picks a free port)")->capture_default_str();
  serve->add_option("--storage-dir", storage_dir, "Persist sessions here");
  serve->add_option("--data-root", data_root, "Base for relative fixture paths");
  flags.attach(*serve);

  auto* serve_provider =
      app.add_subcommand("serve-provider", "Run the threshold reference mask provider");
  serve_provider->add_option("--host", host, "Bind address")->capture_default_str();
  serve_provider->add_option("--port", provider_port, "Bind port (0 picks a free port)")
      ->capture_default_str();
  serve_provider->add_option("--hu-threshold", flags.hu_threshold, "Calcium threshold in HU");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return error_exit(err, kExitInputError, "usage", e.what());
  }

  try {
    if (score->parsed()) {
      auto manifest = StudyManifest::read(manifest_path);
      overlay(manifest.scoring, flags.overrides());
      const auto result = run_study(manifest, flags.base_config());
      const auto json = report_to_json(result.report, result.study_id);
      if (!output_dir.empty()) {
        write_text(ensure_dir(output_dir) / (result.study_id + ".report.json"), json);
      }
      emit(out, parse_format(format_text, Format::kBoth), json, render_report_table(result.report));
    } else if (evaluate->parsed()) {
      auto manifest = CohortManifest::read(manifest_path);
      const auto cli = flags.overrides();
      overlay(manifest.scoring, cli);
      for (auto& study : manifest.studies) overlay(study.scoring, cli);
      const auto report = evaluate_cohort(manifest, flags.base_config(), threads);
      const auto json = cohort_to_json(report);
      if (!output_dir.empty()) {
        const auto dir = ensure_dir(output_dir);
        write_text(dir / "cohort.json", json);
        write_text(dir / "cohort.csv", cohort_to_csv(report));
      }
      emit(out, parse_format(format_text, Format::kBoth), json, render_cohort_table(report));
    } else if (tables->parsed()) {
      std::vector<TableReproduction> reproduced;
      std::string rendered;
      for (const auto& fixture : load_fixture_set(fixture_dir)) {
        reproduced.push_back(reproduce(fixture));
        rendered += render_table(reproduced.back()) + "\n";
      }
      const auto json = tables_to_json(reproduced);
      if (!output_dir.empty()) write_text(ensure_dir(output_dir) / "tables.json", json);
      emit(out, parse_format(format_text, Format::kTable), json, rendered);
    } else if (segment->parsed()) {
      const auto config = flags.base_config();
      const auto volume = read_volume_input(input_path);
      const auto mask = threshold_segment(volume, config.hu_threshold, parse_roi(roi_text));
      if (fs::path(output_path).extension() == ".bundle") {
        write_file_bytes(output_path, encode_mask_bundle(mask));
      } else {
        write_mask_files(mask, output_path);
      }
      if (!output_dir.empty()) export_pgm_slices(mask, ensure_dir(output_dir), "mask");
      nlohmann::ordered_json summary;
      summary["output"] = output_path;
      summary["shape"] = {mask.shape().slices, mask.shape().rows, mask.shape().cols};
      summary["voxels"] = mask.count();
      summary["hu_threshold"] = config.hu_threshold;
      out << summary.dump(2) << "\n";
    } else if (convert->parsed()) {
      const auto mask = read_mask_input(input_path);
      if (output_path.empty() && output_dir.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "mask-convert needs --output or --output-dir");
      }
      if (!output_path.empty()) {
        if (fs::path(output_path).extension() == ".bundle") {
          write_file_bytes(output_path, encode_mask_bundle(mask));
        } else {
          write_mask_files(mask, output_path,
                           bit_order == "lsb_first" ? BitOrder::kLsbFirst : BitOrder::kMsbFirst);
        }
      }
      if (!output_dir.empty()) export_pgm_slices(mask, ensure_dir(output_dir), "mask");
      nlohmann::ordered_json summary;
      summary["shape"] = {mask.shape().slices, mask.shape().rows, mask.shape().cols};
      summary["voxels"] = mask.count();
      out << summary.dump(2) << "\n";
    } else if (serve->parsed()) {
      review::ServerOptions options;
      options.host = host;
      options.port = port;
      options.storage_dir = storage_dir;
      options.data_root = data_root;
      options.default_config = flags.base_config();
      review::ReviewServer server(options);
      const int bound = server.start();
      out << "listening on " << host << ":" << bound << std::endl;
      std::promise<void>().get_future().wait();
    } else if (serve_provider->parsed()) {
      ThresholdProviderServer server(flags.hu_threshold.value_or(kDefaultHuThreshold));
      const int bound = server.start(host, provider_port);
      out << "provider listening on " << host << ":" << bound << std::endl;
      std::promise<void>().get_future().wait();
    }
  } catch (const InvariantViolation& e) {
    return error_exit(err, kExitInvariantViolation, "invariant_violation", e.what());
  } catch (const Error& e) {
    return error_exit(err, exit_code_for(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_exit(err, kExitInvariantViolation, "internal", e.what());
  }
  return kExitOk;
}

}  // namespace cacscore::cli
